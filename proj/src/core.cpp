#include "loz/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace loz {

const char* err_name(ErrCode code) {
  switch (code) {
    case ErrCode::NotStrictlyDecreasing: return "NotStrictlyDecreasing";
    case ErrCode::ShapeMismatch: return "ShapeMismatch";
    case ErrCode::CapExceeded: return "CapExceeded";
    case ErrCode::InconsistentOrdering: return "InconsistentOrdering";
    case ErrCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrCode::PoleHit: return "PoleHit";
    case ErrCode::CertificationFailed: return "CertificationFailed";
    case ErrCode::DegenerateIdentical: return "DegenerateIdentical";
    case ErrCode::InversionFailed: return "InversionFailed";
    case ErrCode::NotLiquid: return "NotLiquid";
    case ErrCode::TooCloseToEdge: return "TooCloseToEdge";
    case ErrCode::OnSupport: return "OnSupport";
    case ErrCode::DensityOutOfRange: return "DensityOutOfRange";
    case ErrCode::BudgetExceeded: return "BudgetExceeded";
    case ErrCode::EntryOutOfRange: return "EntryOutOfRange";
  }
  return "UnknownError";
}

bool is_budget_error(ErrCode code) {
  return code == ErrCode::CapExceeded || code == ErrCode::BudgetExceeded;
}

void check_entry_range(long long v) {
  if (v > kMaxEntryMagnitude || v < -kMaxEntryMagnitude) {
    throw LozError(ErrCode::EntryOutOfRange,
                   "entry magnitude exceeds 2^40: " + std::to_string(v), v);
  }
}

// ============================================================
// Signatures and patterns
// ============================================================

Signature validate_signature(const std::vector<long long>& raw) {
  if (raw.empty()) {
    throw LozError(ErrCode::ShapeMismatch, "signature must be nonempty");
  }
  for (long long v : raw) check_entry_range(v);
  for (size_t i = 0; i + 1 < raw.size(); ++i) {
    if (!(raw[i] > raw[i + 1])) {
      throw LozError(ErrCode::NotStrictlyDecreasing,
                     "entries[" + std::to_string(i) + "]=" +
                         std::to_string(raw[i]) + " <= entries[" +
                         std::to_string(i + 1) + "]=" +
                         std::to_string(raw[i + 1]),
                     static_cast<long long>(i));
    }
  }
  return Signature{raw};
}

std::vector<InterlacingViolation> validate_pattern(const GTPattern& p,
                                                   const Signature& t) {
  const int n = p.n();
  if (n != t.n()) {
    throw LozError(ErrCode::ShapeMismatch, "pattern has " + std::to_string(n) +
                                               " rows, signature has " +
                                               std::to_string(t.n()));
  }
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(p.rows[j].size()) != j + 1) {
      throw LozError(ErrCode::ShapeMismatch,
                     "row " + std::to_string(j + 1) + " has length " +
                         std::to_string(p.rows[j].size()),
                     j + 1);
    }
    for (long long v : p.rows[j]) check_entry_range(v);
  }

  std::vector<InterlacingViolation> out;
  // Interlacing between row j (length j) and row j+1, 1-based levels.
  for (int j = 1; j < n; ++j) {
    const auto& lo = p.rows[j - 1];  // row j
    const auto& hi = p.rows[j];      // row j+1
    for (int i = 0; i < j; ++i) {
      if (!(hi[i] >= lo[i])) {
        out.push_back({InterlacingViolation::kLowerGe, j, i + 1});
      }
      if (!(lo[i] > hi[i + 1])) {
        out.push_back({InterlacingViolation::kUpperGt, j, i + 1});
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (p.rows[n - 1][i] != t[i]) {
      out.push_back({InterlacingViolation::kTopMismatch, n, i + 1});
    }
  }
  return out;
}

bool is_valid_pattern(const GTPattern& p, const Signature& t) {
  return validate_pattern(p, t).empty();
}

std::vector<std::pair<long long, int>> horizontal_lozenges(const GTPattern& p) {
  std::vector<std::pair<long long, int>> out;
  out.reserve(static_cast<size_t>(p.n()) * (p.n() + 1) / 2);
  for (int j = 0; j < p.n(); ++j) {
    for (long long x : p.rows[j]) out.emplace_back(x, j + 1);
  }
  return out;
}

GTPattern max_pattern(const Signature& t) {
  const int n = t.n();
  GTPattern p;
  p.rows.resize(n);
  for (int row = 0; row < n; ++row) {
    p.rows[row].assign(t.entries.begin(), t.entries.begin() + row + 1);
  }
  return p;
}

GTPattern min_pattern(const Signature& t) {
  const int n = t.n();
  GTPattern p;
  p.rows.resize(n);
  for (int row = 0; row < n; ++row) {
    // Row row+1 entry j (0-based): t_{j + N - (row+1)} + (N - (row+1)),
    // pushing every particle as far left as interlacing allows.
    const int slack = n - (row + 1);
    p.rows[row].resize(row + 1);
    for (int j = 0; j <= row; ++j) {
      p.rows[row][j] = t[j + slack] + slack;
    }
  }
  return p;
}

// ============================================================
// Tiles
// ============================================================

std::vector<Tile> tiles(const GTPattern& p, long long cap) {
  const int n = p.n();
  const long long t1 = p.rows[n - 1].front();
  const long long tn = p.rows[n - 1].back();
  const long long c = t1 - tn + 1;
  if (n * (c + 1) > cap) {
    throw LozError(ErrCode::CapExceeded,
                   "tiling has " + std::to_string(n * (c + 1)) + " tiles",
                   n * (c + 1));
  }

  std::vector<Tile> out;
  out.reserve(static_cast<size_t>(n * (c + 1)));
  for (int level = 1; level <= n; ++level) {
    for (long long x : p.rows[level - 1]) {
      out.push_back({TileType::kHorizontal, x, level});
    }
  }

  // Fill each strip [strip, strip+1] by scanning its half-cell triangles
  // left to right: L(x) then U(x) for x in [t_N, t_1], preceded by the
  // boundary wedge U(t_N - 1).  L(x) is taken by a level-`strip` particle
  // at x, U(x) by a level-(strip+1) particle at x; free triangles pair up
  // as L(x)+U(x) -> up tile, U(x)+L(x+1) -> down tile.
  enum class Pending { kNone, kL, kU };
  for (int strip = 0; strip < n; ++strip) {
    const std::vector<long long>* below =
        strip >= 1 ? &p.rows[strip - 1] : nullptr;
    const std::vector<long long>& above = p.rows[strip];
    std::set<long long> l_taken, u_taken;
    if (below) l_taken.insert(below->begin(), below->end());
    u_taken.insert(above.begin(), above.end());

    Pending pending = Pending::kU;  // the boundary wedge U(t_N - 1)
    long long pending_x = tn - 1;
    for (long long x = tn; x <= t1; ++x) {
      if (!l_taken.count(x)) {
        if (pending == Pending::kU && pending_x == x - 1) {
          out.push_back({TileType::kDown, pending_x, strip});
          pending = Pending::kNone;
        } else if (pending == Pending::kNone) {
          pending = Pending::kL;
          pending_x = x;
        } else {
          throw LozError(ErrCode::ShapeMismatch,
                         "strip pairing failed; pattern not interlacing");
        }
      }
      if (!u_taken.count(x)) {
        if (pending == Pending::kL && pending_x == x) {
          out.push_back({TileType::kUp, x, strip});
          pending = Pending::kNone;
        } else if (pending == Pending::kNone) {
          pending = Pending::kU;
          pending_x = x;
        } else {
          throw LozError(ErrCode::ShapeMismatch,
                         "strip pairing failed; pattern not interlacing");
        }
      }
    }
    if (pending != Pending::kNone) {
      throw LozError(ErrCode::ShapeMismatch,
                     "strip pairing left a dangling triangle");
    }
  }
  return out;
}

std::array<std::pair<long long, int>, 4> tile_corners(const Tile& tile) {
  const long long x = tile.x;
  const int n = tile.n;
  switch (tile.type) {
    case TileType::kHorizontal:
      return {{{x + 1, n - 1}, {x + 1, n}, {x, n + 1}, {x, n}}};
    case TileType::kUp:
      return {{{x, n}, {x + 1, n}, {x + 1, n + 1}, {x, n + 1}}};
    case TileType::kDown:
      return {{{x + 1, n}, {x + 2, n}, {x + 1, n + 1}, {x, n + 1}}};
  }
  return {};
}

// ============================================================
// Height function
// ============================================================

HeightFunction::HeightFunction(const GTPattern& p) : n_(p.n()) {
  const auto& top = p.rows[n_ - 1];
  x_min_ = top.back() - 1;
  x_max_ = top.front() + 1;
  rows_ascending_.reserve(n_);
  for (const auto& row : p.rows) {
    std::vector<long long> asc(row.rbegin(), row.rend());
    rows_ascending_.push_back(std::move(asc));
  }
}

long long HeightFunction::at(long long x, int n) const {
  if (n < 0 || n > n_ + 1) {
    throw LozError(ErrCode::LevelOutOfRange,
                   "level " + std::to_string(n) + " outside [0, " +
                       std::to_string(n_ + 1) + "]",
                   n);
  }
  if (n == 0) return 0;
  const auto& row = rows_ascending_[std::min(n, n_) - 1];
  // Number of entries >= x in an ascending row.
  return static_cast<long long>(row.end() -
                                std::lower_bound(row.begin(), row.end(), x));
}

std::vector<std::vector<long long>> HeightFunction::window(long long x_lo,
                                                           int n_lo, int width,
                                                           int height) const {
  std::vector<std::vector<long long>> grid(height,
                                           std::vector<long long>(width));
  const long long anchor = at(x_lo, n_lo);
  for (int dn = 0; dn < height; ++dn) {
    for (int dx = 0; dx < width; ++dx) {
      grid[dn][dx] = at(x_lo + dx, n_lo + dn) - anchor;
    }
  }
  return grid;
}

HeightFunction height_function(const GTPattern& p) { return HeightFunction(p); }

// ============================================================
// Measures
// ============================================================

EmpiricalMeasure empirical_measure(const Signature& t) {
  const int n = t.n();
  EmpiricalMeasure m;
  m.atoms.reserve(n);
  for (int i = n - 1; i >= 0; --i) {
    m.atoms.emplace_back(static_cast<double>(t[i]) / n, 1.0 / n);
  }
  return m;
}

double PiecewiseDensityMeasure::total_mass() const {
  double s = 0;
  for (const auto& p : pieces) s += p.q * (p.b - p.a);
  return s;
}

double PiecewiseDensityMeasure::density_at(double x) const {
  for (const auto& p : pieces) {
    if (x >= p.a && x < p.b) return p.q;
  }
  return 0.0;
}

double PiecewiseDensityMeasure::cdf(double x) const {
  double s = 0;
  for (const auto& p : pieces) {
    if (x <= p.a) break;
    s += p.q * (std::min(x, p.b) - p.a);
  }
  return s;
}

double PiecewiseDensityMeasure::support_min() const {
  return pieces.empty() ? 0.0 : pieces.front().a;
}

double PiecewiseDensityMeasure::support_max() const {
  return pieces.empty() ? 0.0 : pieces.back().b;
}

PiecewiseDensityMeasure PiecewiseDensityMeasure::checked(
    const std::vector<Piece>& pieces) {
  if (pieces.empty()) {
    throw LozError(ErrCode::ShapeMismatch, "measure needs at least one piece");
  }
  for (size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    if (!(p.a < p.b)) {
      throw LozError(ErrCode::ShapeMismatch,
                     "piece has a >= b", static_cast<long long>(i));
    }
    if (p.q < 0.0 || p.q > 1.0) {
      throw LozError(ErrCode::DensityOutOfRange,
                     "density " + std::to_string(p.q) + " outside [0,1]",
                     static_cast<long long>(i));
    }
    if (i > 0 && pieces[i - 1].b > p.a) {
      throw LozError(ErrCode::ShapeMismatch, "pieces overlap or unsorted",
                     static_cast<long long>(i));
    }
  }
  PiecewiseDensityMeasure m{pieces};
  if (std::abs(m.total_mass() - 1.0) > 1e-9) {
    throw LozError(ErrCode::DensityOutOfRange,
                   "total mass " + std::to_string(m.total_mass()) + " != 1");
  }
  return m;
}

PiecewiseDensityMeasure PiecewiseDensityMeasure::unchecked(
    std::vector<Piece> pieces) {
  return PiecewiseDensityMeasure{std::move(pieces)};
}

double kolmogorov_distance(const EmpiricalMeasure& emp,
                           const PiecewiseDensityMeasure& m) {
  // The empirical cdf jumps at atoms and the target cdf is monotone, so the
  // supremum is attained at an atom location (left or right limit).
  double best = 0.0, acc = 0.0;
  for (const auto& [loc, mass] : emp.atoms) {
    best = std::max(best, std::abs(m.cdf(loc) - acc));
    acc += mass;
    best = std::max(best, std::abs(m.cdf(loc) - acc));
  }
  return best;
}

double kolmogorov_distance(const EmpiricalMeasure& a,
                           const EmpiricalMeasure& b) {
  double best = 0.0, fa = 0.0, fb = 0.0;
  size_t i = 0, j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    double xa = i < a.atoms.size() ? a.atoms[i].first : 1e300;
    double xb = j < b.atoms.size() ? b.atoms[j].first : 1e300;
    double x = std::min(xa, xb);
    while (i < a.atoms.size() && a.atoms[i].first <= x) fa += a.atoms[i++].second;
    while (j < b.atoms.size() && b.atoms[j].first <= x) fb += b.atoms[j++].second;
    best = std::max(best, std::abs(fa - fb));
  }
  return best;
}

}  // namespace loz
