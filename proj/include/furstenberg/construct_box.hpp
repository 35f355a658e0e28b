#pragma once

// Finite truncation of the sharp box-dimension example
//   Y = U_n 2^-n V_n(E),   X = U_m (2^-m Y + u_m),   L = { V_n + u_m },
// plus the predicted-cover upper envelope used to check measured counts.

#include <cstdint>
#include <vector>

#include "furstenberg/boxcount.hpp"
#include "furstenberg/cantor.hpp"
#include "furstenberg/grassmann.hpp"

namespace furstenberg::box {

struct BoxSharpSpec {
  int d = 2;
  CantorSpec cantor;
  double t = 1.5;
  int M = 6;        // translations u_1..u_M
  int N = 6;        // directions V_1..V_N
  int depth = 6;    // Cantor depth of each copy
  std::uint64_t seed = 0;
  std::uint64_t cap = 20'000'000;  // max points in X

  /// t + 1 - d.
  double beta() const { return t + 1.0 - d; }
  /// t <= d - 1: translations collapse to {0} and X = Y.
  bool collapsed() const { return beta() <= 0.0; }
  /// Throws invalid_parameter on out-of-range fields.
  void validate() const;
};

struct DirectionEntry {
  Direction direction;
  int shell = 0;           // j: distance band [2^-j-1, 2^-j) from V_0
  double net_spacing = 0;  // 2^-j^2
};

struct DirectionSequence {
  Direction v0;
  std::vector<DirectionEntry> entries;
};

/// V_0 = e_1. Shell j carries the directions at angle in [2^-j-1, 2^-j) from
/// V_0 on a grid of spacing 2^-j^2; for d = 2 these are the angles
/// 2^-j-1 + i 2^-j^2. For d >= 3 the grid lives in the tangent coordinates
/// w in e_1^perp (|w| = tan(angle)), enumerated lexicographically.
/// Truncated to the first N entries.
DirectionSequence make_directions(int d, int N, std::uint64_t seed = 0);

struct TranslationSequence {
  std::vector<Vec> points;  // each in V_0^perp, norm <= 1
  double beta = 0.0;
  std::vector<double> coordinate_betas;  // beta_i per coordinate of V_0^perp
};

/// {u_m} in V_0^perp with box dimension beta in (0, d-1]. beta is split
/// greedily into beta_i in (0,1]; coordinate i runs over m^-alpha with
/// alpha = 1/beta_i - 1, or log 2 / log(m+1) when beta_i = 1. For d >= 3 the
/// points form the product set, enumerated by increasing max index and then
/// lexicographically, and are scaled by 1/sqrt(d-1).
TranslationSequence make_translations(int d, double beta, int M, std::uint64_t seed = 0);

/// One entry per copy 2^-(m+n) V_n(E) + u_m, in build order
/// (increasing m + n, then m).
struct CopyIndex {
  int m = 0;  // 0 when collapsed
  int n = 0;
};
std::vector<CopyIndex> copy_order(const BoxSharpSpec& spec);

struct BoxConstruction {
  BoxSharpSpec spec;
  DirectionSequence directions;
  TranslationSequence translations;  // single zero vector when collapsed
  std::vector<CopyIndex> copies;
};

BoxConstruction prepare(const BoxSharpSpec& spec);

/// Resolution floor shared by X and L: 4 * 2^-(M+N) * B^-depth.
double construction_floor(const BoxSharpSpec& spec);

/// All points 2^-(m+n) V_n(e) + u_m. Throws resource over spec.cap.
PointCloud build_X(const BoxSharpSpec& spec);
PointCloud build_X(const BoxConstruction& construction);

/// M*N lines (V_n, P_{V_n^perp} u_m), in copy order.
LineFamily build_lines(const BoxSharpSpec& spec);
LineFamily build_lines(const BoxConstruction& construction);

/// Unique k >= 1 with 2^-k <= delta < 2^-(k-1).
int k_of_delta(double delta);
/// Unique l >= 1 with 2^-m 2^-l <= delta < 2^-m 2^-(l-1); requires m < k(delta).
int l_of_delta(double delta, int m);

/// delta^(d-1-t-eps) + k(delta) + sum_{m<k} sum_{n<l(delta,m)} N_{delta 2^(n+m)}(E),
/// the bound before the hidden constant.
double raw_cover_bound(const BoxSharpSpec& spec, double delta, double eps);

/// C * raw_cover_bound(spec, delta, eps).
double predicted_cover(const BoxSharpSpec& spec, double delta, double eps, double constant);

/// C = measured / raw at the coarsest scale, the single calibration point.
double calibrate_cover_constant(const BoxSharpSpec& spec, const PointCloud& x, double coarsest,
                                double eps);

}  // namespace furstenberg::box
