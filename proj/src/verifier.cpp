#include "furstenberg/verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "json.hpp"

#include "furstenberg/error.hpp"

namespace furstenberg::verifier {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_pairwise(const std::vector<Vec>& pts) {
  double best = kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, distance(pts[i], pts[j]));
  }
  return best;
}

void finish(ExtractionCertificate& cert) {
  cert.bound = cert.witnesses.size();
  cert.min_witness_separation = min_pairwise(cert.witnesses);
  cert.witnesses_separated = cert.min_witness_separation >= cert.delta;
}

// Greedy delta-separated subsequence, in the given order.
std::vector<std::size_t> greedy_separated(const std::vector<const Vec*>& pts, double delta) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool ok = true;
    for (std::size_t j : kept) {
      if (distance(*pts[i], *pts[j]) < delta) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(i);
  }
  return kept;
}

std::array<std::int64_t, kMaxDim> grid_key(ConstVecView p, double delta) {
  const double inv = 1.0 / grid_cell_side(static_cast<int>(p.size()), delta);
  std::array<std::int64_t, kMaxDim> key{};
  for (std::size_t i = 0; i < p.size(); ++i) key[i] = static_cast<std::int64_t>(std::floor(p[i] * inv + 1e-9));
  return key;
}

}  // namespace

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::pigeonhole: return "pigeonhole";
    case Branch::dichotomy_x: return "dichotomy-x";
    case Branch::dichotomy_y: return "dichotomy-y";
  }
  return "unknown";
}

std::size_t thinning_divisor(int d) {
  return std::size_t{1} << (d - 1);
}

double tangent_margin(double delta) { return 4.0 * delta - 2.0 * std::tan(delta) - delta; }

ExtractionCertificate pigeonhole_extract(const LineFamily& family, const PointCloud& x, double delta,
                                         double tolerance) {
  if (!(delta > 0.0 && delta <= kMaxPigeonholeDelta)) {
    throw Error(ErrorKind::invalid_scale, "pigeonhole extraction needs 0 < delta <= 0.5, got " + format_double(delta));
  }
  if (!family.empty() && x.dim() != family.dim) throw Error(ErrorKind::invalid_input, "dimension mismatch");
  ExtractionCertificate cert;
  cert.delta = delta;
  cert.branch = Branch::pigeonhole;
  if (family.empty()) {
    finish(cert);
    return cert;
  }
  if (x.empty()) throw Error(ErrorKind::inconsistent_input, "X is empty but the family is not");

  double radius = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) radius = std::max(radius, norm(x.point(i)));
  cert.rescale = std::max(1.0, radius);
  const double inv = 1.0 / cert.rescale;
  const double tol = (tolerance < 0.0 ? x.resolution_floor() : tolerance) * inv;

  LineFamily scaled_family{family.dim, {}, family.resolution_floor * inv};
  scaled_family.lines.reserve(family.size());
  for (const AffineLine& l : family.lines) scaled_family.lines.push_back(l.scaled(inv));
  cert.mesh_count = mesh_cover_count(scaled_family, delta).count;

  const DirectionCover cover(family.dim, delta);
  cert.cover_size = cover.size();
  // bucket -> translation cell -> first line in it
  std::map<std::uint64_t, std::map<std::vector<std::int64_t>, std::size_t>> buckets;
  std::map<std::uint64_t, std::vector<Vec>> frames;
  for (std::size_t i = 0; i < scaled_family.size(); ++i) {
    const AffineLine& l = scaled_family.lines[i];
    const std::uint64_t b = cover.bucket_of(l.direction());
    auto fit = frames.find(b);
    if (fit == frames.end()) fit = frames.emplace(b, cover.frame(b)).first;
    std::vector<std::int64_t> cell;
    for (const Vec& f : fit->second) {
      cell.push_back(static_cast<std::int64_t>(std::floor(dot(l.translation(), f) / (4.0 * delta) + 1e-9)));
    }
    buckets[b].emplace(std::move(cell), i);
  }
  // Cells of equal parity differ by >= 2 in some frame coordinate, so their
  // translations are more than 4 delta apart there.
  const auto parity_classes = [](const std::map<std::vector<std::int64_t>, std::size_t>& cells) {
    std::map<std::vector<std::int64_t>, std::vector<std::size_t>> out;
    for (const auto& [cell, line] : cells) {
      std::vector<std::int64_t> color;
      for (std::int64_t c : cell) color.push_back(c & 1);
      out[color].push_back(line);
    }
    auto pick = out.begin();
    for (auto it = out.begin(); it != out.end(); ++it) {
      if (it->second.size() > pick->second.size()) pick = it;
    }
    return pick->second;
  };
  // Largest thinned class first, then most cells, then lowest bucket index.
  std::vector<std::size_t> lines;
  for (auto it = buckets.begin(); it != buckets.end(); ++it) {
    std::vector<std::size_t> cls = parity_classes(it->second);
    if (lines.empty() || cls.size() > lines.size() ||
        (cls.size() == lines.size() && it->second.size() > cert.best_bucket_cells)) {
      lines = std::move(cls);
      cert.direction_bucket = it->first;
      cert.best_bucket_cells = it->second.size();
    }
  }
  std::sort(lines.begin(), lines.end());
  for (std::size_t li : lines) {
    const AffineLine& l = scaled_family.lines[li];
    const Vec& v = l.direction().unit();
    const Vec& a = l.translation();
    double best_dist = kInf;
    std::size_t best_pt = 0;
    std::array<double, kMaxDim> rel{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      const ConstVecView p = x.point(i);
      double along = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        rel[k] = p[k] * inv - a[k];
        along += rel[k] * v[k];
      }
      double sq = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double r = rel[k] - along * v[k];
        sq += r * r;
      }
      const double dist = std::sqrt(sq);
      if (dist < best_dist) {
        best_dist = dist;
        best_pt = i;
      }
    }
    if (!(best_dist <= tol)) {
      throw Error(ErrorKind::inconsistent_input, "line " + std::to_string(li) + " has no point of X within " +
                                                     format_double(tol * cert.rescale) + " (nearest " +
                                                     format_double(best_dist * cert.rescale) + ")");
    }
    const ConstVecView p = x.point(best_pt);
    cert.line_indices.push_back(li);
    cert.witnesses.emplace_back(p.begin(), p.end());
  }
  finish(cert);
  return cert;
}

TwoPointFamily pairs_from_marks(const std::vector<AffineLine>& lines, const std::vector<std::vector<Vec>>& marks) {
  if (lines.size() != marks.size()) throw Error(ErrorKind::invalid_input, "one mark list per line required");
  TwoPointFamily out;
  out.family.dim = lines.empty() ? 2 : lines.front().dim();
  double closest = kInf;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (marks[i].size() < 2) continue;
    const auto by_tau = [&](const Vec& a, const Vec& b) { return lines[i].parameter_of(a) < lines[i].parameter_of(b); };
    const auto [lo, hi] = std::minmax_element(marks[i].begin(), marks[i].end(), by_tau);
    out.family.lines.push_back(lines[i]);
    out.x_points.push_back(*lo);
    out.y_points.push_back(*hi);
    closest = std::min(closest, distance(*lo, *hi));
  }
  if (!out.family.empty()) {
    if (!(closest > 0.0)) throw Error(ErrorKind::invalid_witness, "coincident endpoint pair");
    out.n = static_cast<int>(std::ceil(1.0 / closest - 1e-12));
    out.family.resolution_floor = 0.0;
  }
  return out;
}

ExtractionCertificate two_point_extract(const TwoPointFamily& input, double delta, double t,
                                        double on_line_tolerance) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::invalid_scale, "two-point extraction needs 0 < delta < 1");
  const std::size_t n_lines = input.family.size();
  if (input.x_points.size() != n_lines || input.y_points.size() != n_lines) {
    throw Error(ErrorKind::invalid_input, "one endpoint pair per line required");
  }
  if (input.n < 1) throw Error(ErrorKind::invalid_parameter, "n must be >= 1");
  const double min_gap = 1.0 / input.n;
  for (std::size_t i = 0; i < n_lines; ++i) {
    const AffineLine& l = input.family.lines[i];
    if (l.distance_to_point(input.x_points[i]) > on_line_tolerance ||
        l.distance_to_point(input.y_points[i]) > on_line_tolerance) {
      throw Error(ErrorKind::invalid_witness, "endpoint of line " + std::to_string(i) + " is off the line");
    }
    if (distance(input.x_points[i], input.y_points[i]) < min_gap * (1.0 - 1e-12)) {
      throw Error(ErrorKind::invalid_witness, "endpoints of line " + std::to_string(i) + " are closer than 1/n = " +
                                                  format_double(min_gap));
    }
  }

  ExtractionCertificate cert;
  cert.delta = delta;
  cert.threshold = std::pow(delta, -t / 2.0);
  if (n_lines == 0) {
    cert.branch = Branch::dichotomy_x;
    finish(cert);
    return cert;
  }

  std::map<std::array<std::int64_t, kMaxDim>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < n_lines; ++i) cells[grid_key(input.x_points[i], delta)].push_back(i);
  cert.x_cells = cells.size();

  std::vector<std::size_t> pool;
  const std::vector<Vec>* source = nullptr;
  if (static_cast<double>(cert.x_cells) <= cert.threshold) {
    cert.branch = Branch::dichotomy_y;
    auto fullest = cells.begin();
    for (auto it = cells.begin(); it != cells.end(); ++it) {
      if (it->second.size() > fullest->second.size()) fullest = it;
    }
    pool = fullest->second;
    source = &input.y_points;
  } else {
    cert.branch = Branch::dichotomy_x;
    pool.resize(n_lines);
    for (std::size_t i = 0; i < n_lines; ++i) pool[i] = i;
    source = &input.x_points;
  }
  std::vector<const Vec*> pts;
  pts.reserve(pool.size());
  for (std::size_t i : pool) pts.push_back(&(*source)[i]);
  for (std::size_t k : greedy_separated(pts, delta)) {
    cert.line_indices.push_back(pool[k]);
    cert.witnesses.push_back(*pts[k]);
  }
  finish(cert);
  return cert;
}

Thresholds thresholds(int d, double s, double t) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::invalid_parameter, "d must lie in [2, 8]");
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::invalid_parameter, "s must lie in [0, 1]");
  if (!(t >= 0.0 && t <= 2.0 * (d - 1))) {
    throw Error(ErrorKind::invalid_parameter, "t = " + format_double(t) + " outside [0, 2(d-1)]");
  }
  return {std::max(s, t + 1.0 - d), std::max(s, t / 2.0), std::min({s + t, (3.0 * s + t) / 2.0, s + 1.0})};
}

std::string certificate_json(const ExtractionCertificate& cert, std::size_t measured_count) {
  const int d = cert.witnesses.empty() ? 0 : static_cast<int>(cert.witnesses.front().size());
  nlohmann::ordered_json j;
  j["delta"] = cert.delta;
  j["branch"] = std::string(to_string(cert.branch));
  if (cert.branch == Branch::pigeonhole) {
    j["direction_bucket"] = cert.direction_bucket;
    j["mesh_count"] = cert.mesh_count;
    j["cover_size"] = cert.cover_size;
    j["best_bucket_cells"] = cert.best_bucket_cells;
    j["rescale"] = cert.rescale;
  } else {
    j["x_cells"] = cert.x_cells;
    j["threshold"] = cert.threshold;
  }
  j["line_indices"] = cert.line_indices;
  j["witnesses"] = cert.witnesses;
  j["bound"] = cert.bound;
  j["measured_count"] = measured_count;
  if (std::isfinite(cert.min_witness_separation)) {
    j["min_witness_separation"] = cert.min_witness_separation;
  } else {
    j["min_witness_separation"] = nullptr;
  }
  j["witnesses_separated"] = cert.witnesses_separated;
  j["sound"] = static_cast<double>(cert.bound) <= std::pow(3.0, d) * static_cast<double>(measured_count);
  return j.dump(2) + "\n";
}

}  // namespace furstenberg::verifier
