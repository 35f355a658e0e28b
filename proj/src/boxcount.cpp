#include "furstenberg/boxcount.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "furstenberg/error.hpp"

namespace furstenberg {

namespace {

// Points within 1e-9 cell widths below a lattice boundary are placed in the
// upper cell, so exactly representable endpoints land where they belong.
constexpr double kSnap = 1e-9;

using CellKey = std::array<std::int64_t, kMaxDim>;

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorKind::invalid_input,
                "dimension " + std::to_string(dim) + " outside [1, " + std::to_string(kMaxDim) + "]");
  }
}

}  // namespace

PointCloud::PointCloud(int dim, double resolution_floor)
    : dim_(dim), resolution_floor_(resolution_floor) {
  check_dim(dim);
  set_resolution_floor(resolution_floor);
}

PointCloud::PointCloud(int dim, std::vector<double> coords, double resolution_floor)
    : dim_(dim), coords_(std::move(coords)), resolution_floor_(resolution_floor) {
  check_dim(dim);
  set_resolution_floor(resolution_floor);
  if (coords_.size() % static_cast<std::size_t>(dim_) != 0) {
    throw Error(ErrorKind::invalid_input, "coordinate count is not a multiple of the dimension");
  }
  for (double v : coords_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "non-finite coordinate");
  }
}

void PointCloud::set_resolution_floor(double floor) {
  if (!(floor > 0.0) || !std::isfinite(floor)) {
    throw Error(ErrorKind::invalid_input, "resolution floor must be positive and finite");
  }
  resolution_floor_ = floor;
}

void PointCloud::add(ConstVecView p) {
  if (p.size() != static_cast<std::size_t>(dim_)) {
    throw Error(ErrorKind::invalid_input, "point dimension mismatch");
  }
  for (double v : p) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "non-finite coordinate");
  }
  coords_.insert(coords_.end(), p.begin(), p.end());
}

PointCloud embed_on_axis(const PointCloud& line_cloud, int d, int axis) {
  if (line_cloud.dim() != 1) throw Error(ErrorKind::invalid_input, "embed_on_axis expects a 1-d cloud");
  if (axis < 0 || axis >= d) throw Error(ErrorKind::invalid_input, "axis out of range");
  PointCloud out(d, line_cloud.resolution_floor());
  out.reserve(line_cloud.size());
  Vec p(static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < line_cloud.size(); ++i) {
    p[static_cast<std::size_t>(axis)] = line_cloud.point(i)[0];
    out.add(p);
  }
  return out;
}

double grid_cell_side(int dim, double delta) { return delta / std::sqrt(static_cast<double>(dim)); }

std::size_t grid_count_unchecked(const PointCloud& cloud, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::invalid_scale, "scale must be positive");
  }
  if (cloud.empty()) return 0;
  const int d = cloud.dim();
  const double inv_side = 1.0 / grid_cell_side(d, delta);
  std::vector<CellKey> keys(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const ConstVecView p = cloud.point(i);
    CellKey key{};
    for (int j = 0; j < d; ++j) {
      key[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(std::floor(p[j] * inv_side + kSnap));
    }
    keys[i] = key;
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

std::size_t grid_count(const PointCloud& cloud, double delta) {
  if (delta < cloud.resolution_floor()) {
    throw Error(ErrorKind::stale_resolution,
                "scale " + format_double(delta) + " is below the resolution floor " +
                    format_double(cloud.resolution_floor()));
  }
  return grid_count_unchecked(cloud, delta);
}

std::vector<double> dyadic_schedule(double delta_max, double delta_min) {
  if (!(delta_min > 0.0) || !(delta_max < 1.0) || delta_min > delta_max) {
    throw Error(ErrorKind::invalid_input, "need 0 < delta_min <= delta_max < 1");
  }
  std::vector<double> out;
  for (int j = 1; j < 1075; ++j) {
    const double s = std::ldexp(1.0, -j);
    if (s < delta_min) break;
    if (s <= delta_max) out.push_back(s);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_input, "no dyadic scale in the requested range");
  return out;
}

CoverReport fit_cover_report(std::vector<std::pair<double, std::size_t>> counts, int dim) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  counts.erase(std::unique(counts.begin(), counts.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               counts.end());
  CoverReport report;
  report.bracket_constant = std::pow(3.0, dim);
  for (const auto& [delta, count] : counts) {
    report.rows.push_back({delta, count, std::log(1.0 / delta),
                           count > 0 ? std::log(static_cast<double>(count)) : 0.0});
  }
  if (report.rows.size() < 3) {
    throw Error(ErrorKind::insufficient_data,
                "need at least 3 usable scales, got " + std::to_string(report.rows.size()));
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].count < report.rows[i - 1].count) report.monotone = false;
  }
  const double n = static_cast<double>(report.rows.size());
  double sx = 0, sy = 0;
  for (const CoverRow& r : report.rows) {
    sx += r.log_inv_delta;
    sy += r.log_count;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const CoverRow& r : report.rows) {
    sxx += (r.log_inv_delta - mx) * (r.log_inv_delta - mx);
    sxy += (r.log_inv_delta - mx) * (r.log_count - my);
  }
  report.slope = sxx > 0 ? sxy / sxx : 0.0;
  report.intercept = my - report.slope * mx;
  double ss = 0;
  for (const CoverRow& r : report.rows) {
    const double e = r.log_count - (report.intercept + report.slope * r.log_inv_delta);
    ss += e * e;
  }
  report.residual = std::sqrt(ss / n);
  report.fit_max = report.rows.front().delta;
  report.fit_min = report.rows.back().delta;
  return report;
}

CoverReport estimate_dimension(const PointCloud& cloud, const std::vector<double>& schedule) {
  std::vector<std::pair<double, std::size_t>> counts;
  std::size_t dropped = 0;
  for (double delta : schedule) {
    if (delta < cloud.resolution_floor()) {
      ++dropped;
      continue;
    }
    counts.emplace_back(delta, grid_count(cloud, delta));
  }
  CoverReport report = fit_cover_report(std::move(counts), cloud.dim());
  report.dropped_scales = dropped;
  return report;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string cover_report_csv(const CoverReport& report) {
  std::string out = "delta,count,log_inv_delta,log_count\n";
  for (const CoverRow& r : report.rows) {
    out += format_double(r.delta) + "," + std::to_string(r.count) + "," + format_double(r.log_inv_delta) +
           "," + format_double(r.log_count) + "\n";
  }
  return out;
}

std::string cover_report_json(const CoverReport& report) {
  nlohmann::ordered_json j;
  j["slope"] = report.slope;
  j["intercept"] = report.intercept;
  j["residual"] = report.residual;
  j["fit_range"] = {report.fit_max, report.fit_min};
  j["num_scales"] = report.rows.size();
  j["bracket_constant"] = report.bracket_constant;
  j["monotone"] = report.monotone;
  j["dropped_scales"] = report.dropped_scales;
  return j.dump(2) + "\n";
}

}  // namespace furstenberg
