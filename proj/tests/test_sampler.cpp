#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "loz/core.hpp"
#include "loz/counting.hpp"
#include "loz/sampler.hpp"

using namespace loz;

namespace {

Signature sig(std::vector<long long> v) { return validate_signature(v); }

bool valid(const GTPattern& p, const Signature& t) {
  return validate_pattern(p, t).empty();
}

// Chi-square statistic over the full pattern set of a small signature.
double pattern_chi2(const Signature& t,
                    const std::vector<GTPattern>& samples) {
  auto pats = all_patterns(t);
  std::map<std::vector<std::vector<long long>>, int> index;
  for (size_t i = 0; i < pats.size(); ++i) index[pats[i].rows] = (int)i;
  std::vector<long long> counts(pats.size(), 0);
  for (const auto& s : samples) {
    auto it = index.find(s.rows);
    REQUIRE(it != index.end());
    ++counts[it->second];
  }
  const double expect = double(samples.size()) / double(pats.size());
  double chi2 = 0;
  for (long long c : counts) {
    const double d = double(c) - expect;
    chi2 += d * d / expect;
  }
  return chi2;
}

}  // namespace

TEST_CASE("sequential sampler produces valid patterns and is reproducible") {
  std::vector<Signature> cases = {
      sig({2, 0}), sig({4, 2, 0}), sig({7, 3, 2, -1, -4}),
      sig({20, 15, 11, 10, 4, 0, -2, -9})};
  for (const auto& t : cases) {
    for (std::uint64_t s = 0; s < 4; ++s) {
      GTPattern p = sample_exact(t, {99, s});
      CHECK(valid(p, t));
      GTPattern q = sample_exact(t, {99, s});
      CHECK(p.rows == q.rows);
    }
    GTPattern a = sample_exact(t, {99, 0});
    GTPattern b = sample_exact(t, {99, 1});
    GTPattern c = sample_exact(t, {100, 0});
    // different streams or seeds almost surely differ for non-rigid shapes
    if (gt_dimension(t) > 4) {
      CHECK((a.rows != b.rows || a.rows != c.rows));
    }
  }
}

TEST_CASE("fully packed signature has a unique pattern") {
  auto t = sig({3, 2, 1, 0});
  GTPattern p = sample_exact(t, {1, 0});
  CHECK(p.rows == max_pattern(t).rows);
  CHECK(p.rows == min_pattern(t).rows);
  CftpStats st;
  GTPattern q = sample_cftp(t, {1, 0}, &st);
  CHECK(q.rows == p.rows);
  CHECK(st.epochs == 0);
  CHECK(st.total_steps == 0);
}

TEST_CASE("budget gate on the sequential sampler") {
  std::vector<long long> e(81);
  for (int i = 0; i < 81; ++i) e[i] = 81 - i;
  auto t = sig(e);
  CHECK_THROWS_AS(sample_exact(t, {0, 0}), LozError);
  try {
    sample_exact(t, {0, 0});
  } catch (const LozError& err) {
    CHECK(err.code == ErrCode::BudgetExceeded);
    CHECK(is_budget_error(err.code));
  }
  // a custom budget admits it
  CHECK(valid(sample_exact(t, {0, 0}, 81), t));
}

TEST_CASE("float route agrees with the exact route pattern for pattern") {
  // At these sizes the float filter carries every decision unless the
  // margin trips, and margin trips re-decide with the same draw, so the
  // two routes must emit identical patterns.
  std::mt19937_64 shapes(5150);
  for (int n = 13; n <= 16; ++n) {
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<long long> e(n);
      long long cur = (long long)(shapes() % 4);
      for (int i = 0; i < n; ++i) {
        e[i] = cur;
        cur -= 1 + (long long)(shapes() % 3);
      }
      auto t = sig(e);
      for (std::uint64_t s = 0; s < 4; ++s) {
        SeededStream stream{7000 + (std::uint64_t)n, s + 10 * trial};
        GTPattern fast = sample_exact(t, stream);
        GTPattern slow = detail::sample_exact_route_only(t, stream);
        REQUIRE(valid(fast, t));
        CHECK(fast.rows == slow.rows);
      }
    }
  }
}

TEST_CASE("sequential sampler is uniform on the 8 patterns of (4,2,0)") {
  auto t = sig({4, 2, 0});
  REQUIRE(gt_dimension(t) == 8);
  const int M = 20000;
  std::vector<GTPattern> samples;
  samples.reserve(M);
  for (int i = 0; i < M; ++i)
    samples.push_back(sample_exact(t, {2026, (std::uint64_t)i}));
  // chi-square with 7 degrees of freedom, 0.999 quantile
  CHECK(pattern_chi2(t, samples) < 24.3219);
}

TEST_CASE("cftp is uniform on the 8 patterns of (4,2,0)") {
  auto t = sig({4, 2, 0});
  const int M = 4000;
  std::vector<GTPattern> samples;
  samples.reserve(M);
  std::uint64_t max_span = 0;
  for (int i = 0; i < M; ++i) {
    CftpStats st;
    samples.push_back(sample_cftp(t, {77, (std::uint64_t)i}, &st));
    CHECK(valid(samples.back(), t));
    CHECK(st.epochs >= 1);
    CHECK(st.final_span == (1ull << (st.epochs - 1)));
    CHECK(st.total_steps == (1ull << st.epochs) - 1);
    max_span = std::max(max_span, st.final_span);
  }
  CHECK(pattern_chi2(t, samples) < 24.3219);
  CHECK(max_span >= 2);  // coalescence is not instantaneous for this shape
}

TEST_CASE("cftp matches sequential sampling in distribution on (2,0)") {
  auto t = sig({2, 0});
  const int M = 2000;
  int ones_seq = 0, ones_cftp = 0;
  for (int i = 0; i < M; ++i) {
    if (sample_exact(t, {31, (std::uint64_t)i}).rows[0][0] == 1) ++ones_seq;
    if (sample_cftp(t, {32, (std::uint64_t)i}).rows[0][0] == 1) ++ones_cftp;
  }
  // binomial(2000, 1/2): 4 sigma is about 89
  CHECK(std::abs(ones_seq - 1000) < 90);
  CHECK(std::abs(ones_cftp - 1000) < 90);
}

TEST_CASE("cftp handles wide gaps and larger shapes") {
  for (auto t : {sig({40, 0}), sig({13, 5, 0, -7}), sig({9, 8, 4, 1, 0, -3})}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      GTPattern p = sample_cftp(t, {55, s});
      CHECK(valid(p, t));
      GTPattern q = sample_cftp(t, {55, s});
      CHECK(p.rows == q.rows);
    }
  }
}

TEST_CASE("glauber dynamics stays valid and needs sweeps >= 1") {
  auto t = sig({6, 3, 0, -2});
  CHECK_THROWS_AS(sample_glauber(t, 0, {0, 0}), LozError);
  for (std::uint64_t s = 0; s < 3; ++s) {
    GTPattern p = sample_glauber(t, 40, {10, s});
    CHECK(valid(p, t));
  }
  CHECK(default_glauber_sweeps(10) == 10000);
  // one-row signature: nothing to move
  GTPattern single = sample_glauber(sig({5}), 3, {0, 0});
  CHECK(single.rows == std::vector<std::vector<long long>>{{5}});
}

TEST_CASE("glauber distribution approaches uniform on (4,2,0)") {
  auto t = sig({4, 2, 0});
  const int M = 4000;
  std::vector<GTPattern> samples;
  samples.reserve(M);
  for (int i = 0; i < M; ++i)
    samples.push_back(sample_glauber(t, 60, {404, (std::uint64_t)i}));
  CHECK(pattern_chi2(t, samples) < 24.3219);
}

TEST_CASE("schur weyl shapes: single letter word and two letter words") {
  // n = 1: shape is always a single box
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto t = sample_schur_weyl(6, 1, {8, s});
    CHECK(t.entries == std::vector<long long>{0, -2, -3, -4, -5, -6});
  }
  // n = 0: empty shape
  auto empty = sample_schur_weyl(4, 0, {8, 0});
  CHECK(empty.entries == std::vector<long long>{-1, -2, -3, -4});

  // N = 3, n = 2: P(two-row shape) = P(second letter < first) = 1/3
  const int M = 9000;
  int two_row = 0;
  for (int i = 0; i < M; ++i) {
    auto t = sample_schur_weyl(3, 2, {909, (std::uint64_t)i});
    if (t.entries == std::vector<long long>{0, -1, -3}) {
      ++two_row;
    } else {
      CHECK(t.entries == std::vector<long long>{1, -2, -3});
    }
  }
  // binomial(9000, 1/3): sigma ~ 44.7, allow 4 sigma
  CHECK(std::abs(two_row - 3000) < 179);
}

TEST_CASE("schur weyl output is always a valid signature") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    auto t = sample_schur_weyl(7, 30, {123, s});
    CHECK(t.n() == 7);
    CHECK_NOTHROW(validate_signature(t.entries));
    // total boxes = word length
    long long boxes = 0;
    for (int i = 0; i < 7; ++i) boxes += t.entries[i] + (i + 1);
    CHECK(boxes == 30);
  }
}

TEST_CASE("quantize_profile reproduces worked examples") {
  using P = PiecewiseDensityMeasure;
  auto uni01 = P::checked({{0, 1, 1}});
  CHECK(quantize_profile(uni01, 4).entries ==
        std::vector<long long>{3, 2, 1, 0});

  auto half02 = P::checked({{0, 2, 0.5}});
  CHECK(quantize_profile(half02, 4).entries ==
        std::vector<long long>{6, 4, 2, 0});

  // two full-density blocks with a gap: the staircase of the hexagon
  auto hex = P::checked({{-1, -0.5, 1}, {0, 0.5, 1}});
  const int m = 8, N = 2 * m;
  auto t = quantize_profile(hex, N);
  for (int i = 1; i <= N; ++i) {
    CHECK(t.entries[i - 1] == (i <= m ? m - i : -i));
  }
}

TEST_CASE("quantize_profile tracks the profile in kolmogorov distance") {
  using P = PiecewiseDensityMeasure;
  std::vector<P> profiles = {
      P::checked({{0, 1, 1}}),
      P::checked({{-1, -0.5, 1}, {0, 0.5, 1}}),
      P::checked({{-2, 0, 0.25}, {1, 2, 0.5}}),
      P::checked({{0, 1.25, 0.8}})};
  for (const auto& f : profiles) {
    for (int N : {5, 12, 40, 90}) {
      auto t = quantize_profile(f, N);
      CHECK(kolmogorov_distance(empirical_measure(t), f) <= 2.0 / N + 1e-12);
    }
  }
}

TEST_CASE("quantize_profile validates input") {
  using P = PiecewiseDensityMeasure;
  auto bad = P::unchecked({{0, 1, 1.4}});
  CHECK_THROWS_AS(quantize_profile(bad, 5), LozError);
  auto uni = P::checked({{0, 1, 1}});
  CHECK_THROWS_AS(quantize_profile(uni, 0), LozError);
}

TEST_CASE("sparse transitions fall back to the exact route") {
  // spans too wide for prefix tables: validity plus determinism
  auto t = sig({500000, 350001, 349998, 220000, 130007, 130000, 90000,
                55555, 31000, 20002, 20000, 10000, 0});
  for (std::uint64_t s = 0; s < 2; ++s) {
    GTPattern p = sample_exact(t, {606, s});
    CHECK(valid(p, t));
    GTPattern q = sample_exact(t, {606, s});
    CHECK(p.rows == q.rows);
  }
}

TEST_CASE("wide but tabulable spans run the dense float route") {
  std::vector<long long> e(20);
  std::mt19937_64 rng(31337);
  long long cur = 100000;
  for (int i = 0; i < 20; ++i) {
    e[i] = cur;
    cur -= 3000 + (long long)(rng() % 4000);
  }
  auto t = sig(e);
  for (std::uint64_t s = 0; s < 2; ++s) {
    GTPattern p = sample_exact(t, {717, s});
    CHECK(valid(p, t));
  }
}

TEST_CASE("per level marginals of (4,2,0) match enumeration") {
  auto t = sig({4, 2, 0});
  auto pats = all_patterns(t);
  // exact marginal of the level-1 particle position
  std::map<long long, int> exact;
  for (const auto& p : pats) ++exact[p.rows[0][0]];
  const int M = 8000;
  std::map<long long, int> emp;
  for (int i = 0; i < M; ++i)
    ++emp[sample_exact(t, {1234, (std::uint64_t)i}).rows[0][0]];
  for (auto [v, cnt] : exact) {
    const double p = double(cnt) / double(pats.size());
    const double sd = std::sqrt(M * p * (1 - p));
    CHECK(std::abs(emp[v] - M * p) < 4.5 * sd + 1);
  }
}
