#pragma once

// Lines through the origin G(d,1), affine lines A(d,1) in standard form, the
// product metric d1, delta-covers of directions and the mesh counter M_delta.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "furstenberg/boxcount.hpp"
#include "furstenberg/linalg.hpp"

namespace furstenberg {

/// A 1-dimensional subspace, represented by a unit vector whose first
/// nonzero component is positive, so v and -v give the same Direction.
class Direction {
 public:
  /// Normalizes and canonicalizes; throws invalid_input on a zero or
  /// non-finite vector.
  static Direction from_vector(ConstVecView v);

  int dim() const noexcept { return static_cast<int>(unit_.size()); }
  const Vec& unit() const noexcept { return unit_; }

  /// Operator norm of P_V - P_W, i.e. the sine of the principal angle.
  double distance(const Direction& other) const;

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  explicit Direction(Vec unit) : unit_(std::move(unit)) {}
  Vec unit_;
};

/// L = V + a with a in the orthogonal complement of V.
class AffineLine {
 public:
  /// Line through `point` with direction `dir`; translation is the
  /// projection of `point` onto dir^perp.
  static AffineLine standard_form(ConstVecView point, ConstVecView dir);

  /// Assemble from parts already in standard form; throws invalid_input
  /// unless the translation is orthogonal to the direction (1e-12, relative).
  static AffineLine from_parts(Direction direction, Vec translation);

  int dim() const noexcept { return direction_.dim(); }
  const Direction& direction() const noexcept { return direction_; }
  const Vec& translation() const noexcept { return translation_; }

  /// Point a + tau v.
  Vec at(double tau) const;
  /// Euclidean distance from p to the line.
  double distance_to_point(ConstVecView p) const;
  /// Coordinate of the orthogonal projection of p along the direction.
  double parameter_of(ConstVecView p) const { return dot(p, direction_.unit()); }

  /// The same line scaled about the origin by `factor` > 0.
  AffineLine scaled(double factor) const;

  friend bool operator==(const AffineLine&, const AffineLine&) = default;

 private:
  AffineLine(Direction direction, Vec translation)
      : direction_(std::move(direction)), translation_(std::move(translation)) {}
  Direction direction_;
  Vec translation_;
};

/// d1(V+a, V'+a') = |P_V - P_V'| + |a - a'|.
double metric_d1(const AffineLine& lhs, const AffineLine& rhs);

/// Finite set of lines with a declared resolution floor.
struct LineFamily {
  int dim = 2;
  std::vector<AffineLine> lines;
  double resolution_floor = 0.0;

  std::size_t size() const noexcept { return lines.size(); }
  bool empty() const noexcept { return lines.empty(); }
};

/// Realized delta-cover of G(d,1).
///
/// d = 2: angle buckets of width min(asin(delta), pi/2) over [0, pi).
/// d >= 3: gnomonic cube-face grid; the face is the coordinate of largest
/// magnitude (made positive), the other coordinates divided by it lie in
/// [-1,1] and are binned with side delta/sqrt(d-1). Bucket count is
/// d * ceil(2 sqrt(d-1)/delta)^(d-1).
/// delta = 1 yields one bucket (G(d,1) has diameter 1).
/// Any two directions in a bucket are within delta, so each bucket center
/// is within delta of every direction in its bucket.
class DirectionCover {
 public:
  DirectionCover(int d, double delta);

  int dim() const noexcept { return d_; }
  double delta() const noexcept { return delta_; }
  std::uint64_t size() const noexcept { return size_; }

  std::uint64_t bucket_of(const Direction& dir) const;
  Direction center(std::uint64_t bucket) const;
  /// Orthonormal frame of center^perp identifying it with R^{d-1}.
  std::vector<Vec> frame(std::uint64_t bucket) const;

 private:
  int d_;
  double delta_;
  double width_ = 0.0;           // d = 2 angle width or d >= 3 face-cell side
  std::int64_t cells_per_axis_ = 1;
  std::uint64_t size_ = 1;
};

/// Bucket centers of DirectionCover(d, delta). Throws resource when the
/// cover has more than `cap` buckets.
std::vector<Direction> direction_cover(int d, double delta, std::uint64_t cap = 10'000'000);

/// A cell G x R of the product mesh: direction bucket plus the integer
/// coordinates N of the 4*delta translation cell [4N delta, 4(N+1) delta).
struct MeshCellId {
  std::uint64_t direction_bucket = 0;
  std::vector<std::int64_t> translation_cell;

  friend bool operator==(const MeshCellId&, const MeshCellId&) = default;
  friend auto operator<=>(const MeshCellId&, const MeshCellId&) = default;
};

/// Cell of `line` at the cover's scale. Translation coordinates are taken in
/// the bucket's frame.
MeshCellId mesh_cell(const AffineLine& line, const DirectionCover& cover);

enum class CountStatus { ok, empty_family };

struct MeshCount {
  std::size_t count = 0;
  CountStatus status = CountStatus::ok;
};

/// M_delta: number of distinct mesh cells hit by the family. Requires
/// 0 < delta <= 1 and delta >= family.resolution_floor (invalid_scale).
MeshCount mesh_cover_count(const LineFamily& family, double delta);

/// Mesh-count the family across a schedule and fit the slope.
CoverReport estimate_family_dimension(const LineFamily& family, const std::vector<double>& schedule);

}  // namespace furstenberg
