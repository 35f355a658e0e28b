#pragma once

// Grid covering numbers, scale schedules and log-log slope fits.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "furstenberg/linalg.hpp"

namespace furstenberg {

/// Finite point set in R^d, stored row-major. resolution_floor is the
/// smallest scale at which the points stand in for the idealized set.
class PointCloud {
 public:
  PointCloud(int dim, double resolution_floor);
  PointCloud(int dim, std::vector<double> coords, double resolution_floor);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const noexcept { return coords_.empty(); }
  double resolution_floor() const noexcept { return resolution_floor_; }
  void set_resolution_floor(double floor);

  ConstVecView point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }

  void add(ConstVecView p);
  void reserve(std::size_t n) { coords_.reserve(n * static_cast<std::size_t>(dim_)); }

 private:
  int dim_;
  std::vector<double> coords_;
  double resolution_floor_;
};

/// Lift a 1-d cloud onto coordinate axis `axis` of R^d.
PointCloud embed_on_axis(const PointCloud& line_cloud, int d, int axis);

struct CoverRow {
  double delta;
  std::size_t count;
  double log_inv_delta;
  double log_count;
};

struct CoverReport {
  std::vector<CoverRow> rows;  // delta strictly decreasing
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;       // RMS of the least-squares residuals
  double fit_max = 0.0;        // coarsest scale in the fit
  double fit_min = 0.0;        // finest scale in the fit
  double bracket_constant = 1.0;  // grid count / true cover count is at most this
  bool monotone = true;        // counts nondecreasing as delta decreases
  std::size_t dropped_scales = 0;  // scales rejected by the resolution floor
};

/// Cell side used by grid_count: delta/sqrt(d), so each cell has diameter delta.
double grid_cell_side(int dim, double delta);

/// Number of origin-anchored lattice cells of diameter delta that contain a
/// point. Brackets the true cover number: N <= grid_count <= 3^d N.
/// Throws stale_resolution when delta < cloud.resolution_floor().
std::size_t grid_count(const PointCloud& cloud, double delta);

/// grid_count without the resolution-floor check (used for raw mark sets).
std::size_t grid_count_unchecked(const PointCloud& cloud, double delta);

/// Scales 2^-j inside [delta_min, delta_max], descending.
std::vector<double> dyadic_schedule(double delta_max, double delta_min);

/// Least-squares fit of log N against log(1/delta) over already-counted rows.
CoverReport fit_cover_report(std::vector<std::pair<double, std::size_t>> counts, int dim);

/// Grid-count the cloud at every usable scale and fit the slope. Requires at
/// least three scales at or above the resolution floor.
CoverReport estimate_dimension(const PointCloud& cloud, const std::vector<double>& schedule);

/// CSV with header `delta,count,log_inv_delta,log_count`.
std::string cover_report_csv(const CoverReport& report);

/// JSON sidecar carrying slope, residual and fit metadata.
std::string cover_report_json(const CoverReport& report);

/// Shortest round-trip decimal rendering; the byte format of every output file.
std::string format_double(double v);

}  // namespace furstenberg
