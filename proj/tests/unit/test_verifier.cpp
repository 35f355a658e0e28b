#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "json.hpp"

#include "furstenberg/construct_box.hpp"
#include "furstenberg/construct_packing.hpp"
#include "furstenberg/error.hpp"
#include "furstenberg/verifier.hpp"

using namespace furstenberg;
using namespace furstenberg::verifier;

namespace {

double brute_min_separation(const std::vector<Vec>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) best = std::min(best, distance(pts[i], pts[j]));
  }
  return best;
}

struct Fixture {
  LineFamily family{2, {}, 1e-9};
  PointCloud x{2, 1e-9};
};

Fixture parallel_lines(int count, double delta) {
  Fixture f;
  for (int i = 0; i < count; ++i) {
    const double y = (8.0 * i + 1.0) * delta;
    f.family.lines.push_back(AffineLine::standard_form(Vec{0, y}, Vec{1, 0}));
    f.x.add(Vec{0.3, y});
  }
  return f;
}

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::invalid_input;
}

}  // namespace

TEST_CASE("pigeonhole on parallel lines 8 delta apart") {
  const double delta = 0.01;
  const Fixture f = parallel_lines(10, delta);
  const ExtractionCertificate c = pigeonhole_extract(f.family, f.x, delta);
  CHECK(c.branch == Branch::pigeonhole);
  CHECK(c.bound == 10);
  CHECK(c.witnesses_separated);
  CHECK(c.min_witness_separation == doctest::Approx(brute_min_separation(c.witnesses)));
  CHECK(c.min_witness_separation >= delta);
  CHECK(c.bound <= c.witnesses.size());
  CHECK(c.rescale == 1.0);

  const Fixture one = parallel_lines(1, delta);
  CHECK(pigeonhole_extract(one.family, one.x, delta).bound == 1);
}

TEST_CASE("pigeonhole arithmetic and rescaling") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int d = 2; d <= 4; ++d) {
    LineFamily fam{d, {}, 1e-9};
    PointCloud x(d, 1e-9);
    for (int i = 0; i < 300; ++i) {
      Vec p(static_cast<std::size_t>(d)), v(static_cast<std::size_t>(d));
      for (auto& c : p) c = 1.5 * g(rng);
      for (auto& c : v) c = g(rng);
      fam.lines.push_back(AffineLine::standard_form(p, v));
      x.add(p);
    }
    for (double delta : {0.5, 0.2, 0.05}) {
      const ExtractionCertificate c = pigeonhole_extract(fam, x, delta);
      CHECK(c.rescale > 1.0);
      CHECK(c.witnesses_separated);
      CHECK(c.min_witness_separation >= delta);
      CHECK(c.bound * thinning_divisor(d) >= c.best_bucket_cells);
      CHECK(static_cast<double>(c.best_bucket_cells) * static_cast<double>(c.cover_size) >=
            static_cast<double>(c.mesh_count));
      for (std::size_t i = 0; i < c.line_indices.size(); ++i) {
        CHECK(fam.lines[c.line_indices[i]].distance_to_point(c.witnesses[i]) <= 1e-9);
      }
    }
  }
  CHECK(thinning_divisor(2) == 2);
  CHECK(thinning_divisor(4) == 8);
}

TEST_CASE("pigeonhole bound never exceeds the grid count of the box instance") {
  box::BoxSharpSpec spec;
  spec.M = 6;
  spec.N = 6;
  spec.depth = 6;
  spec.t = 1.5;
  const box::BoxConstruction c = box::prepare(spec);
  const PointCloud x = box::build_X(c);
  const LineFamily lines = box::build_lines(c);
  for (int k = 3; k <= 8; ++k) {
    const double delta = std::ldexp(1.0, -k);
    const ExtractionCertificate cert = pigeonhole_extract(lines, x, delta);
    CHECK(cert.witnesses_separated);
    CHECK(cert.bound <= grid_count(x, delta));
    CHECK(nlohmann::json::parse(certificate_json(cert, grid_count(x, delta)))["sound"] == true);
  }
}

TEST_CASE("pigeonhole is monotone in the family") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  LineFamily fam{3, {}, 1e-9};
  PointCloud x(3, 1e-9);
  std::size_t prev = 0;
  for (int i = 0; i < 150; ++i) {
    Vec p(3), v(3);
    for (auto& c : p) c = 0.4 * g(rng);
    for (auto& c : v) c = g(rng);
    v[0] += 4.0;  // keep most directions in a few buckets
    fam.lines.push_back(AffineLine::standard_form(p, v));
    x.add(p);
    const std::size_t b = pigeonhole_extract(fam, x, 0.1).bound;
    REQUIRE(b >= prev);
    prev = b;
  }
  CHECK(prev > 1);
}

TEST_CASE("pigeonhole error paths") {
  const Fixture f = parallel_lines(3, 0.01);
  CHECK(kind_of([&] { pigeonhole_extract(f.family, f.x, 0.6); }) == ErrorKind::invalid_scale);
  CHECK(kind_of([&] { pigeonhole_extract(f.family, f.x, 0.0); }) == ErrorKind::invalid_scale);
  PointCloud missing(2, 1e-9);
  missing.add(f.x.point(0));
  missing.add(f.x.point(1));
  CHECK(kind_of([&] { pigeonhole_extract(f.family, missing, 0.01); }) == ErrorKind::inconsistent_input);
  CHECK(kind_of([&] { pigeonhole_extract(f.family, PointCloud(2, 1e-9), 0.01); }) == ErrorKind::inconsistent_input);

  const ExtractionCertificate empty = pigeonhole_extract(LineFamily{2, {}, 1e-9}, PointCloud(2, 1e-9), 0.1);
  CHECK(empty.bound == 0);
  CHECK(empty.witnesses.empty());
}

TEST_CASE("tangent margin over the pigeonhole range") {
  for (double delta = 1e-4; delta <= kMaxPigeonholeDelta; delta *= 1.1) CHECK(tangent_margin(delta) >= 0.0);
  CHECK(tangent_margin(0.5) == doctest::Approx(1.5 - 2 * std::tan(0.5)));
  CHECK(tangent_margin(std::atan(1.5) + 0.05) < 0.0);
}

TEST_CASE("two-point dichotomy on two crossing lines") {
  TwoPointFamily in;
  in.family = LineFamily{2,
                         {AffineLine::standard_form(Vec{0, 0}, Vec{1, 0}),
                          AffineLine::standard_form(Vec{0, 0}, Vec{0, 1})},
                         0.0};
  in.x_points = {Vec{0, 0}, Vec{0, 0}};
  in.y_points = {Vec{1, 0}, Vec{0, 1}};
  in.n = 1;
  const ExtractionCertificate c = two_point_extract(in, 0.1, 1.0);
  CHECK(c.threshold == doctest::Approx(std::sqrt(10.0)));
  CHECK(c.x_cells == 1);
  CHECK(c.branch == Branch::dichotomy_y);
  CHECK(c.bound == 2);
  CHECK(c.witnesses_separated);

  TwoPointFamily single = in;
  single.family.lines.pop_back();
  single.x_points.pop_back();
  single.y_points.pop_back();
  CHECK(two_point_extract(single, 0.1, 1.0).bound == 1);
}

TEST_CASE("two-point dichotomy x branch") {
  TwoPointFamily in;
  in.family.dim = 2;
  for (int i = 0; i < 20; ++i) {
    const double y = 0.06 * i;
    in.family.lines.push_back(AffineLine::standard_form(Vec{0, y}, Vec{1, 0}));
    in.x_points.push_back(Vec{0, y});
    in.y_points.push_back(Vec{1, y});
  }
  in.n = 1;
  const ExtractionCertificate c = two_point_extract(in, 0.1, 1.0);
  CHECK(c.branch == Branch::dichotomy_x);
  CHECK(static_cast<double>(c.x_cells) > c.threshold);
  CHECK(c.bound == 10);
  CHECK(c.witnesses_separated);
}

TEST_CASE("two-point on packing marks") {
  const packing::Trajectory traj =
      packing::run_alternating(2, 0.5, 1.0, packing::EtaSchedule{{1, 1.0 / 16, 1.0 / 4096}, packing::ScheduleMode::demo});
  const packing::MarkedLineState& st = traj.back();
  const TwoPointFamily in = pairs_from_marks(st.lines, st.marks);
  CHECK(in.family.size() == st.num_lines());
  for (std::size_t i = 0; i < in.family.size(); ++i) {
    CHECK(distance(in.x_points[i], in.y_points[i]) >= 1.0 / in.n * (1 - 1e-12));
  }
  const PointCloud marks = st.mark_cloud();
  for (double delta : {1.0 / 32, 1.0 / 256, 1.0 / 2048}) {
    const ExtractionCertificate c = two_point_extract(in, delta, 1.0);
    CHECK(c.witnesses_separated);
    CHECK(c.bound >= 1);
    CHECK(c.bound <= grid_count(marks, delta));
  }
}

TEST_CASE("two-point error paths") {
  TwoPointFamily in;
  in.family = LineFamily{2, {AffineLine::standard_form(Vec{0, 0}, Vec{1, 0})}, 0.0};
  in.x_points = {Vec{0, 0}};
  in.y_points = {Vec{0.2, 0}};
  in.n = 2;
  CHECK(kind_of([&] { two_point_extract(in, 0.1, 1.0); }) == ErrorKind::invalid_witness);
  in.y_points = {Vec{0.6, 0.1}};
  CHECK(kind_of([&] { two_point_extract(in, 0.1, 1.0); }) == ErrorKind::invalid_witness);
  in.y_points = {Vec{0.6, 0}};
  CHECK(two_point_extract(in, 0.1, 1.0).bound == 1);
  CHECK(kind_of([&] { two_point_extract(in, 1.0, 1.0); }) == ErrorKind::invalid_scale);
  CHECK(kind_of([&] { pairs_from_marks(in.family.lines, {}); }) == ErrorKind::invalid_input);
  CHECK(pairs_from_marks(in.family.lines, {{Vec{0, 0}}}).family.empty());
}

TEST_CASE("thresholds") {
  const Thresholds a = thresholds(2, 0.5, 1.0);
  CHECK(a.box == doctest::Approx(0.5));
  CHECK(a.packing == doctest::Approx(0.5));
  CHECK(a.hausdorff == doctest::Approx(1.25));
  CHECK(thresholds(2, 0.0, 1.0).box == 0.0);
  CHECK(thresholds(3, 1.0, 4.0).packing == doctest::Approx(2.0));
  CHECK(kind_of([] { thresholds(2, 0.5, 3.0); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { thresholds(2, 1.5, 1.0); }) == ErrorKind::invalid_parameter);
  CHECK(kind_of([] { thresholds(1, 0.5, 0.0); }) == ErrorKind::invalid_parameter);
}
