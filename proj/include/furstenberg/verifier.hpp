#pragma once

// Executable lower-bound arguments. Each extraction returns a certificate
// whose witness points are checked for separation, never assumed.

#include <cstdint>
#include <string>
#include <vector>

#include "furstenberg/boxcount.hpp"
#include "furstenberg/grassmann.hpp"

namespace furstenberg::verifier {

enum class Branch { pigeonhole, dichotomy_x, dichotomy_y };
std::string_view to_string(Branch b);

struct ExtractionCertificate {
  double delta = 0.0;
  Branch branch = Branch::pigeonhole;
  std::uint64_t direction_bucket = 0;     // G_0 (pigeonhole only)
  std::vector<std::size_t> line_indices;  // extracted lines
  std::vector<Vec> witnesses;             // one per extracted line
  std::size_t bound = 0;                  // certified lower bound on N_delta(X)
  double min_witness_separation = 0.0;    // exact, +inf with < 2 witnesses
  bool witnesses_separated = false;       // min separation >= delta

  // pigeonhole bookkeeping
  std::size_t mesh_count = 0;        // M_delta(family)
  std::uint64_t cover_size = 0;      // |G_delta|
  std::size_t best_bucket_cells = 0; // occupied translation cells in G_0
  double rescale = 1.0;              // X was divided by this to fit B(0,1)

  // dichotomy bookkeeping
  std::size_t x_cells = 0;           // grid cells occupied by the L_x points
  double threshold = 0.0;            // delta^(-t/2)
};

/// Validity range for the tangent bound.
inline constexpr double kMaxPigeonholeDelta = 0.5;
/// Thinning keeps one parity class of translation cells out of 2^(d-1).
std::size_t thinning_divisor(int d);

/// 4 delta - 2 tan(delta) - delta.
double tangent_margin(double delta);

/// Keep one line per occupied translation cell, thin each direction bucket
/// to its fullest parity class (translations pairwise > 4 delta apart in the
/// bucket frame), use the bucket whose class is largest, and pick for each kept
/// line a point of X within `tolerance` of it. X is rescaled into B(0,1)
/// when needed; witnesses are reported in original coordinates.
/// A negative tolerance means X.resolution_floor().
ExtractionCertificate pigeonhole_extract(const LineFamily& family, const PointCloud& x, double delta,
                                         double tolerance = -1.0);

struct TwoPointFamily {
  LineFamily family;
  std::vector<Vec> x_points;  // L_x per line
  std::vector<Vec> y_points;  // L_y per line
  int n = 1;                  // |L_x - L_y| >= 1/n
};

/// Build endpoint pairs from marked lines: first and last mark of every line
/// with at least two marks. n is the smallest integer with 1/n <= the
/// smallest pair distance.
TwoPointFamily pairs_from_marks(const std::vector<AffineLine>& lines,
                                const std::vector<std::vector<Vec>>& marks);

/// Dichotomy on whether the L_x points occupy at most delta^(-t/2) cells.
/// Small: pigeonhole the fullest cell and certify a greedy delta-separated
/// subset of the matching L_y points (dichotomy_y). Large: certify a greedy
/// delta-separated subset of all L_x points (dichotomy_x).
ExtractionCertificate two_point_extract(const TwoPointFamily& input, double delta, double t,
                                        double on_line_tolerance = 1e-9);

/// Divisor C in bound >= min(|family|, floor(delta^(-t/2))) / C.
inline constexpr double kDichotomyConstant = 16.0;

struct Thresholds {
  double box = 0.0;        // max{s, t+1-d}
  double packing = 0.0;    // max{s, t/2}
  double hausdorff = 0.0;  // min{s+t, (3s+t)/2, s+1}
};

Thresholds thresholds(int d, double s, double t);

/// Audit JSON: scale, branch, indices, bound and the supplied measured count.
std::string certificate_json(const ExtractionCertificate& cert, std::size_t measured_count);

}  // namespace furstenberg::verifier
