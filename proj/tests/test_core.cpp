#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "loz/core.hpp"
#include "loz/counting.hpp"

using namespace loz;

namespace {

Signature sig(std::vector<long long> v) { return validate_signature(v); }

GTPattern pat(std::vector<std::vector<long long>> rows) {
  GTPattern p;
  p.rows = std::move(rows);
  return p;
}

}  // namespace

TEST_CASE("validate_signature accepts and rejects") {
  CHECK(sig({2, 0}).entries == std::vector<long long>{2, 0});
  CHECK(sig({7}).n() == 1);

  CHECK_THROWS_WITH_AS(validate_signature({0, 2}),
                       doctest::Contains("entries[0]"), LozError);
  try {
    validate_signature({0, 2});
  } catch (const LozError& e) {
    CHECK(e.code == ErrCode::NotStrictlyDecreasing);
    CHECK(e.index == 0);
  }
  try {
    validate_signature({5, 3, 3});
  } catch (const LozError& e) {
    CHECK(e.code == ErrCode::NotStrictlyDecreasing);
    CHECK(e.index == 1);
  }
  CHECK_THROWS_AS(validate_signature({}), LozError);
  CHECK_THROWS_AS(validate_signature({(1LL << 41)}), LozError);
}

TEST_CASE("validate_pattern flags interlacing violations") {
  auto t = sig({2, 0});
  CHECK(validate_pattern(pat({{1}, {2, 0}}), t).empty());
  CHECK(validate_pattern(pat({{7}}), sig({7})).empty());

  auto v = validate_pattern(pat({{0}, {2, 0}}), t);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == InterlacingViolation::kUpperGt);
  CHECK(v[0].level == 1);
  CHECK(v[0].index == 1);

  auto w = validate_pattern(pat({{3}, {2, 0}}), t);
  REQUIRE(w.size() == 1);
  CHECK(w[0].kind == InterlacingViolation::kLowerGe);

  auto top = validate_pattern(pat({{1}, {3, 0}}), t);
  REQUIRE(top.size() == 1);
  CHECK(top[0].kind == InterlacingViolation::kTopMismatch);

  CHECK_THROWS_AS(validate_pattern(pat({{1, 2}, {2, 0}}), t), LozError);
}

TEST_CASE("horizontal lozenge positions") {
  auto hl1 = horizontal_lozenges(pat({{0}}));
  CHECK(hl1 == std::vector<std::pair<long long, int>>{{0, 1}});

  auto hl2 = horizontal_lozenges(pat({{1}, {2, 0}}));
  std::set<std::pair<long long, int>> got(hl2.begin(), hl2.end());
  CHECK(got == std::set<std::pair<long long, int>>{{1, 1}, {2, 2}, {0, 2}});

  auto t5 = sig({3, 0, -1, -4, -5});
  auto p5 = min_pattern(t5);
  REQUIRE(validate_pattern(p5, t5).empty());
  auto hl5 = horizontal_lozenges(p5);
  CHECK(hl5.size() == 15);
  std::set<long long> level5;
  for (auto [x, n] : hl5) {
    if (n == 5) level5.insert(x);
  }
  CHECK(level5 == std::set<long long>{3, 0, -1, -4, -5});
}

TEST_CASE("extremal patterns are valid and extreme") {
  for (auto t : {sig({3, 0, -1, -4, -5}), sig({2, 0}), sig({10, 3, 2, -7})}) {
    auto lo = min_pattern(t), hi = max_pattern(t);
    CHECK(validate_pattern(lo, t).empty());
    CHECK(validate_pattern(hi, t).empty());
    // Every pattern entry lies between the same entry of min and max.
    enumerate_patterns(t, [&](const GTPattern& p) {
      for (int r = 0; r < p.n(); ++r) {
        for (size_t j = 0; j < p.rows[r].size(); ++j) {
          CHECK(p.rows[r][j] <= hi.rows[r][j]);
          CHECK(p.rows[r][j] >= lo.rows[r][j]);
        }
      }
      return true;
    }, 100000);
  }
}

TEST_CASE("height function basics and golden fully packed field") {
  // Fully packed t = (N-1,...,0): the unique pattern is x^n_j = N - j and
  // H(x, n) = clamp(N - x, 0, n).
  const int N = 3;
  auto t = sig({2, 1, 0});
  REQUIRE(gt_dimension(t) == 1);
  auto p = max_pattern(t);
  auto h = height_function(p);
  for (int n = 0; n <= N; ++n) {
    for (long long x = h.x_min(); x <= h.x_max(); ++x) {
      long long expect = std::clamp<long long>(N - x, 0, n);
      CHECK(h.at(x, n) == expect);
    }
  }
  // Left-most vertical: 0,1,2,...,N.
  for (int n = 0; n <= N; ++n) CHECK(h.at(h.x_min() + 1, n) == n);
  CHECK_THROWS_AS(h.at(0, -1), LozError);
  CHECK_THROWS_AS(h.at(0, N + 2), LozError);

  // Window export re-anchors at the window's bottom-left vertex.
  auto w = h.window(1, 1, 3, 3);
  CHECK(w[0][0] == 0);
  CHECK(w[2][0] == h.at(1, 3) - h.at(1, 1));
}

TEST_CASE("height boundary depends only on the signature") {
  auto t = sig({3, 1, -2});
  std::vector<GTPattern> pats = all_patterns(t);
  REQUIRE(pats.size() >= 2);
  auto ref = height_function(pats[0]);
  for (const auto& p : pats) {
    auto h = height_function(p);
    for (int n = 0; n <= t.n(); ++n) {
      CHECK(h.at(h.x_min(), n) == ref.at(ref.x_min(), n));
      CHECK(h.at(h.x_max(), n) == ref.at(ref.x_max(), n));
    }
    for (long long x = ref.x_min(); x <= ref.x_max(); ++x) {
      CHECK(h.at(x, 0) == 0);
      CHECK(h.at(x, t.n()) == ref.at(x, t.n()));
    }
  }
}

TEST_CASE("tiles cover the trapezoid consistently with heights") {
  // Over every pattern of a few small signatures: tile counts, per-type
  // counts, and the relation between vertical-edge height increments and
  // tile shapes.
  for (auto t : {sig({2, 0}), sig({3, 1, -2}), sig({5, 0}), sig({4, 2, 0})}) {
    const int N = t.n();
    const long long C = t[0] - t[N - 1] + 1;
    for (const auto& p : all_patterns(t)) {
      auto ts = tiles(p);
      CHECK(static_cast<long long>(ts.size()) == N * (C + 1));
      long long horiz = 0;
      std::set<std::pair<long long, int>> down_edges;  // interior vertical edge (x, strip)
      std::map<std::pair<long long, int>, int> particle_at;
      for (const auto& tile : ts) {
        if (tile.type == TileType::kHorizontal) {
          ++horiz;
          particle_at[{tile.x, tile.n}] = 1;
        }
        if (tile.type == TileType::kDown) {
          down_edges.insert({tile.x + 1, tile.n});
        }
      }
      CHECK(horiz == N * (N + 1) / 2);

      auto h = height_function(p);
      for (int strip = 0; strip < N; ++strip) {
        for (long long x = h.x_min() + 1; x <= h.x_max(); ++x) {
          long long dh = h.at(x, strip + 1) - h.at(x, strip);
          CHECK(dh >= 0);
          CHECK(dh <= 1);
          // Increment 1 exactly when the edge is interior to a down tile.
          CHECK((dh == 1) == (down_edges.count({x, strip}) > 0));
          // A particle touching the edge from either side forces 0.
          if (particle_at.count({x, strip}) ||
              particle_at.count({x - 1, strip + 1})) {
            CHECK(dh == 0);
          }
        }
      }

      // Triangle-level disjointness and coverage: every half cell of every
      // strip is covered exactly once.
      std::map<std::tuple<long long, int, int>, int> cover;  // (x, strip, L=0/U=1)
      auto mark = [&](long long x, int strip, int half) {
        ++cover[{x, strip, half}];
      };
      for (const auto& tile : ts) {
        if (tile.type == TileType::kHorizontal) {
          mark(tile.x, tile.n - 1, 1);
          mark(tile.x, tile.n, 0);
        } else if (tile.type == TileType::kUp) {
          mark(tile.x, tile.n, 0);
          mark(tile.x, tile.n, 1);
        } else {
          mark(tile.x, tile.n, 1);
          mark(tile.x + 1, tile.n, 0);
        }
      }
      for (const auto& [key, cnt] : cover) CHECK(cnt == 1);
      CHECK(cover.size() == ts.size() * 2);
      for (int strip = 0; strip < N; ++strip) {
        CHECK(cover.count({t[N - 1] - 1, strip, 1}) == 1);  // boundary wedge
        for (long long x = t[N - 1]; x <= t[0]; ++x) {
          CHECK(cover.count({x, strip, 0}) == 1);
          CHECK(cover.count({x, strip, 1}) == 1);
        }
      }
    }
  }
}

TEST_CASE("empirical measures") {
  auto m = empirical_measure(sig({2, 0}));
  REQUIRE(m.atoms.size() == 2);
  CHECK(m.atoms[0].first == doctest::Approx(0.0));
  CHECK(m.atoms[1].first == doctest::Approx(1.0));
  CHECK(m.atoms[0].second == doctest::Approx(0.5));

  // Shift equivariance: t + s moves atoms by s/N.
  auto t0 = sig({4, 1, -3});
  auto t1 = sig({9, 6, 2});  // t0 + 5
  auto m0 = empirical_measure(t0), m1 = empirical_measure(t1);
  for (size_t i = 0; i < m0.atoms.size(); ++i) {
    CHECK(m1.atoms[i].first ==
          doctest::Approx(m0.atoms[i].first + 5.0 / 3).epsilon(1e-12));
  }

  // Hexagon family: l from lambda = (m^m, 0^m) converges to density 1 on
  // [-1,-1/2] U [0,1/2].
  auto target = PiecewiseDensityMeasure::checked(
      {{-1.0, -0.5, 1.0}, {0.0, 0.5, 1.0}});
  double prev = 1e9;
  for (int m : {4, 8, 16, 32}) {
    std::vector<long long> ell;
    for (int i = 1; i <= 2 * m; ++i) ell.push_back((i <= m ? m : 0) - i);
    auto emp = empirical_measure(sig(ell));
    double d = kolmogorov_distance(emp, target);
    CHECK(d <= 2.0 / (2 * m) + 1e-12);
    CHECK(d < prev + 1e-12);
    prev = d;
  }
}

TEST_CASE("piecewise measures validate") {
  CHECK_THROWS_AS(PiecewiseDensityMeasure::checked({{0, 1, 1.5}}), LozError);
  CHECK_THROWS_AS(PiecewiseDensityMeasure::checked({{0, 1, 0.5}}), LozError);
  CHECK_THROWS_AS(
      PiecewiseDensityMeasure::checked({{0, 1, 1.0}, {0.5, 1.5, 0.0}}),
      LozError);
  auto ok = PiecewiseDensityMeasure::checked({{0, 2, 0.5}});
  CHECK(ok.cdf(1.0) == doctest::Approx(0.5));
  CHECK(ok.cdf(0.5) == doctest::Approx(0.25));
  CHECK(ok.density_at(1.9) == doctest::Approx(0.5));
  CHECK(ok.density_at(2.1) == 0.0);
  // unchecked admits non-normalized densities (used to probe error paths).
  auto raw = PiecewiseDensityMeasure::unchecked({{0.0, 0.5, 1.0}});
  CHECK(raw.total_mass() == doctest::Approx(0.5));
}

TEST_CASE("kolmogorov distance between empiricals") {
  EmpiricalMeasure a{{{0.0, 0.5}, {1.0, 0.5}}};
  EmpiricalMeasure b{{{0.0, 0.5}, {2.0, 0.5}}};
  CHECK(kolmogorov_distance(a, b) == doctest::Approx(0.5));
  CHECK(kolmogorov_distance(a, a) == doctest::Approx(0.0));
}
