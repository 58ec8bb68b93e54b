// Domain types for lozenge tilings of trapezoids: signatures (fixed top
// rows), Gelfand-Tsetlin patterns, the pattern <-> tiling bijection, height
// functions and empirical measures.
//
// Coordinate conventions used throughout the library, in sheared (square
// grid) coordinates (x, n) with the level n increasing upward:
//
//   * A pattern has rows 1..N (stored 0-based); row n holds n strictly
//     decreasing integers x^n_1 > ... > x^n_n.  Interlacing:
//     x^{n+1}_j >= x^n_j > x^{n+1}_{j+1}.
//   * Each row-n entry x is a "horizontal" lozenge (a particle) drawn as the
//     quad (x+1,n-1),(x+1,n),(x,n+1),(x,n).  It is symmetric about level n.
//   * The rest of the trapezoid is tiled by "up" lozenges (unit cell
//     [x,x+1]x[n,n+1]) and "down" lozenges (quad spanning cells (x,n) and
//     (x+1,n), with the vertical edge x+1 in its interior).
//   * The trapezoid spans levels 0..N plus the top-row particles sticking
//     out above level N; columns run from t_N to t_1, with one extra "down"
//     wedge per strip on the left boundary.
//
// The up/down naming matches the frozen-region classification: a region of
// all-up tiles is the void left behind past the last particle (complex slope
// degenerates into (0,1)), a region of all-down tiles has slope > 1.
#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "loz/errors.hpp"

namespace loz {

// Entries are machine integers; magnitudes are checked at the API boundary
// so downstream exact arithmetic can size its big-integer buffers safely.
constexpr long long kMaxEntryMagnitude = 1LL << 40;

void check_entry_range(long long v);

// ============================================================
// Signatures and patterns
// ============================================================

// Strictly decreasing integer N-tuple; the fixed top row t_1 > ... > t_N.
struct Signature {
  std::vector<long long> entries;

  int n() const { return static_cast<int>(entries.size()); }
  long long operator[](int i) const { return entries[i]; }  // 0-based
  bool operator==(const Signature& o) const { return entries == o.entries; }
};

// Throws NotStrictlyDecreasing with the first offending index (0-based pair
// position i meaning entries[i] <= entries[i+1]), or EntryOutOfRange.
Signature validate_signature(const std::vector<long long>& raw);

// Triangular array; rows[j] has length j+1 (0-based), i.e. row j+1 of the
// pattern. rows.back() must equal the signature.
struct GTPattern {
  std::vector<std::vector<long long>> rows;

  int n() const { return static_cast<int>(rows.size()); }
};

struct InterlacingViolation {
  enum Kind {
    kLowerGe,    // rows[j+1][i] >= rows[j][i] fails
    kUpperGt,    // rows[j][i] > rows[j+1][i+1] fails
    kTopMismatch // rows[N] != t at this index
  };
  Kind kind;
  int level;  // j, 1-based row index of the smaller row involved
  int index;  // i, 1-based entry index
};

// Empty result means the pattern is a valid GT pattern with top row t.
// Throws ShapeMismatch if row lengths are not 1..N.
std::vector<InterlacingViolation> validate_pattern(const GTPattern& p,
                                                   const Signature& t);

bool is_valid_pattern(const GTPattern& p, const Signature& t);

// Positions of horizontal lozenges: {(rows[n][i], n)} with n the 1-based
// level; exactly N(N+1)/2 of them.
std::vector<std::pair<long long, int>> horizontal_lozenges(const GTPattern& p);

// Extremal patterns with top row t; these are also the CFTP sandwich bounds.
// max: x^n_j = t_j.  min: x^n_j = t_{j+N-n} + (N-n).
GTPattern max_pattern(const Signature& t);
GTPattern min_pattern(const Signature& t);

// ============================================================
// Tiles
// ============================================================

enum class TileType { kHorizontal, kUp, kDown };

struct Tile {
  TileType type;
  long long x;  // anchor column
  int n;        // anchor level: particle level, or strip index for up/down
};

// Complete tiling of the trapezoid determined by the pattern: all particles
// plus the up/down filler tiles of every strip n in [0, N).  Within strip n,
// fillers are found by pairing free half-cell triangles left to right; the
// pairing is forced and always succeeds for interlacing rows (a left/right
// count argument shows the pending triangle is empty before each particle).
// Total count is N(C+1) with C = t_1 - t_N + 1.  Throws CapExceeded if that
// total exceeds the cap.
std::vector<Tile> tiles(const GTPattern& p, long long cap = 20'000'000);

// Corner vertices of a tile's quad in sheared (x, n) coordinates, in
// counterclockwise order.
std::array<std::pair<long long, int>, 4> tile_corners(const Tile& tile);

// ============================================================
// Height function
// ============================================================

// H(x, n) counts the row-n entries that are >= x.  Crossing a non-horizontal
// lozenge path from below to above raises H by 1, H = 0 at the bottom of the
// left-most vertical (x = t_N, n = 0), and along that vertical H = n.  Values
// are evaluated on demand from the rows, so signatures with huge gaps do not
// materialize a dense grid.
class HeightFunction {
 public:
  explicit HeightFunction(const GTPattern& p);

  // Levels 0..N+1 are meaningful (N+1 covers the tips of the sticking-out
  // top-row lozenges); throws LevelOutOfRange otherwise.
  long long at(long long x, int n) const;

  int levels() const { return n_; }
  long long x_min() const { return x_min_; }  // t_N - 1
  long long x_max() const { return x_max_; }  // t_1 + 1

  // Dense window export re-anchored at the window's bottom-left vertex:
  // grid[dn][dx] = H(x_lo+dx, n_lo+dn) - H(x_lo, n_lo).
  std::vector<std::vector<long long>> window(long long x_lo, int n_lo,
                                             int width, int height) const;

 private:
  int n_;
  long long x_min_, x_max_;
  std::vector<std::vector<long long>> rows_ascending_;
};

HeightFunction height_function(const GTPattern& p);

// ============================================================
// Measures
// ============================================================

// Atoms at l_i / N with mass 1/N each, listed in increasing location.
struct EmpiricalMeasure {
  std::vector<std::pair<double, double>> atoms;  // (location, mass)
};

EmpiricalMeasure empirical_measure(const Signature& t);

// Compactly supported measure with piecewise constant density in [0, 1].
struct PiecewiseDensityMeasure {
  struct Piece {
    double a, b, q;  // density q on [a, b)
  };
  std::vector<Piece> pieces;

  double total_mass() const;
  double density_at(double x) const;
  // Distribution function F(x) = measure of (-inf, x].
  double cdf(double x) const;
  double support_min() const;
  double support_max() const;

  // Validated constructor: pieces sorted, disjoint, a < b, 0 <= q <= 1,
  // total mass 1 within 1e-9.  Throws DensityOutOfRange / ShapeMismatch.
  static PiecewiseDensityMeasure checked(const std::vector<Piece>& pieces);
  // No validation at all; lets tests and error paths build non-normalized
  // or out-of-range densities deliberately.
  static PiecewiseDensityMeasure unchecked(std::vector<Piece> pieces);
};

// sup_x |F_emp(x) - F(x)| between an empirical measure and a density.
double kolmogorov_distance(const EmpiricalMeasure& emp,
                           const PiecewiseDensityMeasure& m);
// Between two empirical measures.
double kolmogorov_distance(const EmpiricalMeasure& a,
                           const EmpiricalMeasure& b);

}  // namespace loz
