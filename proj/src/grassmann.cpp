#include "furstenberg/grassmann.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "furstenberg/error.hpp"

namespace furstenberg {

namespace {

constexpr double kSnap = 1e-9;
constexpr double kPi = std::numbers::pi;

void check_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorKind::invalid_input, "dimension mismatch");
}

}  // namespace

Direction Direction::from_vector(ConstVecView v) {
  if (v.size() < 2 || v.size() > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorKind::invalid_input, "direction dimension outside [2, 8]");
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorKind::invalid_input, "non-finite direction component");
  }
  const double len = norm(v);
  if (!(len > 0.0)) throw Error(ErrorKind::invalid_input, "zero direction vector");
  Vec unit(v.begin(), v.end());
  double sign = 1.0;
  for (double x : unit) {
    if (x != 0.0) {
      sign = x > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  for (double& x : unit) x = sign * x / len;
  return Direction(std::move(unit));
}

double Direction::distance(const Direction& other) const {
  check_same_dim(unit_.size(), other.unit_.size());
  // |w - <v,w> v| = sqrt(1 - <v,w>^2) without the cancellation near 0.
  // Rejecting the lexicographically larger vector keeps the result symmetric.
  const bool swap = other.unit_ < unit_;
  const Vec& v = swap ? other.unit_ : unit_;
  const Vec& w = swap ? unit_ : other.unit_;
  return std::min(1.0, norm(reject(w, v)));
}

AffineLine AffineLine::standard_form(ConstVecView point, ConstVecView dir) {
  check_same_dim(point.size(), dir.size());
  Direction direction = Direction::from_vector(dir);
  for (double x : point) {
    if (!std::isfinite(x)) throw Error(ErrorKind::invalid_input, "non-finite point");
  }
  Vec translation = reject(point, direction.unit());
  return AffineLine(std::move(direction), std::move(translation));
}

AffineLine AffineLine::from_parts(Direction direction, Vec translation) {
  check_same_dim(static_cast<std::size_t>(direction.dim()), translation.size());
  const double scale = std::max(1.0, norm(translation));
  if (std::abs(dot(translation, direction.unit())) > 1e-12 * scale) {
    throw Error(ErrorKind::invalid_input, "translation is not orthogonal to the direction");
  }
  return AffineLine(std::move(direction), std::move(translation));
}

Vec AffineLine::at(double tau) const { return axpy(tau, direction_.unit(), translation_); }

double AffineLine::distance_to_point(ConstVecView p) const {
  check_same_dim(p.size(), translation_.size());
  const Vec rel = axpy(-1.0, translation_, p);
  return norm(reject(rel, direction_.unit()));
}

AffineLine AffineLine::scaled(double factor) const {
  return AffineLine(direction_, furstenberg::scaled(factor, translation_));
}

double metric_d1(const AffineLine& lhs, const AffineLine& rhs) {
  return lhs.direction().distance(rhs.direction()) + distance(lhs.translation(), rhs.translation());
}

DirectionCover::DirectionCover(int d, double delta) : d_(d), delta_(delta) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::invalid_input, "cover dimension outside [2, 8]");
  if (!(delta > 0.0) || delta > 1.0) {
    throw Error(ErrorKind::invalid_scale, "direction cover needs 0 < delta <= 1");
  }
  if (delta == 1.0) return;  // a single bucket, size_ = 1
  if (d == 2) {
    width_ = std::min(std::asin(delta), kPi / 2);
    size_ = static_cast<std::uint64_t>(std::ceil(kPi / width_ - 1e-12));
    return;
  }
  width_ = delta / std::sqrt(static_cast<double>(d - 1));
  const double per_axis = std::ceil(2.0 / width_ - 1e-12);
  const double total = d * std::pow(per_axis, d - 1);
  if (total > 4.0e18) throw Error(ErrorKind::resource, "direction cover too large to index");
  cells_per_axis_ = static_cast<std::int64_t>(per_axis);
  std::uint64_t sz = 1;
  for (int i = 0; i < d - 1; ++i) sz *= static_cast<std::uint64_t>(cells_per_axis_);
  size_ = static_cast<std::uint64_t>(d) * sz;
}

std::uint64_t DirectionCover::bucket_of(const Direction& dir) const {
  check_same_dim(static_cast<std::size_t>(dir.dim()), static_cast<std::size_t>(d_));
  if (size_ == 1) return 0;
  const Vec& v = dir.unit();
  if (d_ == 2) {
    double theta = std::atan2(v[1], v[0]);
    if (theta < 0.0) theta += kPi;
    const auto b = static_cast<std::uint64_t>(std::max(0.0, std::floor(theta / width_)));
    return std::min(b, size_ - 1);
  }
  int face = 0;
  for (int i = 1; i < d_; ++i) {
    if (std::abs(v[i]) > std::abs(v[face])) face = i;
  }
  const double lead = v[face];
  std::uint64_t index = 0;
  std::uint64_t stride = 1;
  for (int j = 0; j < d_; ++j) {
    if (j == face) continue;
    const double u = v[j] / lead;  // sign of lead folds antipodes together
    auto cell = static_cast<std::int64_t>(std::floor((u + 1.0) / width_));
    cell = std::clamp<std::int64_t>(cell, 0, cells_per_axis_ - 1);
    index += static_cast<std::uint64_t>(cell) * stride;
    stride *= static_cast<std::uint64_t>(cells_per_axis_);
  }
  return static_cast<std::uint64_t>(face) * stride + index;
}

Direction DirectionCover::center(std::uint64_t bucket) const {
  if (bucket >= size_) throw Error(ErrorKind::invalid_input, "bucket index out of range");
  if (size_ == 1) return Direction::from_vector(basis_vector(d_, 0));
  if (d_ == 2) {
    const double lo = static_cast<double>(bucket) * width_;
    const double hi = std::min(lo + width_, kPi);
    const double mid = 0.5 * (lo + hi);
    const Vec v{std::cos(mid), std::sin(mid)};
    return Direction::from_vector(v);
  }
  std::uint64_t stride = 1;
  for (int i = 0; i < d_ - 1; ++i) stride *= static_cast<std::uint64_t>(cells_per_axis_);
  const int face = static_cast<int>(bucket / stride);
  std::uint64_t rem = bucket % stride;
  Vec v(static_cast<std::size_t>(d_), 0.0);
  v[static_cast<std::size_t>(face)] = 1.0;
  for (int j = 0; j < d_; ++j) {
    if (j == face) continue;
    const auto cell = static_cast<double>(rem % static_cast<std::uint64_t>(cells_per_axis_));
    rem /= static_cast<std::uint64_t>(cells_per_axis_);
    const double lo = -1.0 + cell * width_;
    const double hi = std::min(lo + width_, 1.0);
    v[static_cast<std::size_t>(j)] = 0.5 * (lo + hi);
  }
  return Direction::from_vector(v);
}

std::vector<Vec> DirectionCover::frame(std::uint64_t bucket) const {
  return complement_frame(center(bucket).unit());
}

std::vector<Direction> direction_cover(int d, double delta, std::uint64_t cap) {
  const DirectionCover cover(d, delta);
  if (cover.size() > cap) {
    throw Error(ErrorKind::resource,
                "direction cover has " + std::to_string(cover.size()) + " buckets, cap " + std::to_string(cap));
  }
  std::vector<Direction> out;
  out.reserve(cover.size());
  for (std::uint64_t b = 0; b < cover.size(); ++b) out.push_back(cover.center(b));
  return out;
}

namespace {

std::vector<std::int64_t> translation_cell(const AffineLine& line, const std::vector<Vec>& frame, double delta) {
  std::vector<std::int64_t> cell;
  cell.reserve(frame.size());
  const double inv = 1.0 / (4.0 * delta);
  for (const Vec& f : frame) {
    cell.push_back(static_cast<std::int64_t>(std::floor(dot(line.translation(), f) * inv + kSnap)));
  }
  return cell;
}

}  // namespace

MeshCellId mesh_cell(const AffineLine& line, const DirectionCover& cover) {
  const std::uint64_t bucket = cover.bucket_of(line.direction());
  return {bucket, translation_cell(line, cover.frame(bucket), cover.delta())};
}

MeshCount mesh_cover_count(const LineFamily& family, double delta) {
  if (!(delta > 0.0) || delta > 1.0) throw Error(ErrorKind::invalid_scale, "mesh count needs 0 < delta <= 1");
  if (delta < family.resolution_floor) {
    throw Error(ErrorKind::invalid_scale, "scale " + format_double(delta) + " is below the family resolution floor " +
                                              format_double(family.resolution_floor));
  }
  if (family.empty()) return {0, CountStatus::empty_family};
  const DirectionCover cover(family.dim, delta);
  std::unordered_map<std::uint64_t, std::vector<Vec>> frames;
  using Key = std::array<std::int64_t, kMaxDim>;
  std::vector<Key> keys;
  keys.reserve(family.size());
  for (const AffineLine& line : family.lines) {
    const std::uint64_t bucket = cover.bucket_of(line.direction());
    auto it = frames.find(bucket);
    if (it == frames.end()) it = frames.emplace(bucket, cover.frame(bucket)).first;
    const std::vector<std::int64_t> cell = translation_cell(line, it->second, delta);
    Key key{};
    key[0] = static_cast<std::int64_t>(bucket);
    std::copy(cell.begin(), cell.end(), key.begin() + 1);
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  return {static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin()), CountStatus::ok};
}

CoverReport estimate_family_dimension(const LineFamily& family, const std::vector<double>& schedule) {
  std::vector<std::pair<double, std::size_t>> counts;
  std::size_t dropped = 0;
  for (double delta : schedule) {
    if (delta < family.resolution_floor || delta > 1.0) {
      ++dropped;
      continue;
    }
    counts.emplace_back(delta, mesh_cover_count(family, delta).count);
  }
  CoverReport report = fit_cover_report(std::move(counts), 2 * (family.dim - 1));
  report.dropped_scales = dropped;
  return report;
}

}  // namespace furstenberg
