#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "furstenberg/boxcount.hpp"
#include "furstenberg/cantor.hpp"
#include "furstenberg/error.hpp"

using namespace furstenberg;

namespace {

// Distinct cells by a std::set of integer tuples, no sorting tricks.
std::size_t oracle_count(const PointCloud& c, double delta) {
  const double side = delta / std::sqrt(static_cast<double>(c.dim()));
  std::set<std::vector<long long>> cells;
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::vector<long long> key;
    for (double x : c.point(i)) key.push_back(static_cast<long long>(std::floor(x / side + 1e-9)));
    cells.insert(key);
  }
  return cells.size();
}

PointCloud random_cloud(std::mt19937_64& rng, int d, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointCloud c(d, 1e-9);
  Vec p(static_cast<std::size_t>(d));
  for (int i = 0; i < n; ++i) {
    for (auto& x : p) x = u(rng) * u(rng);
    c.add(p);
  }
  return c;
}

}  // namespace

TEST_CASE("grid count examples") {
  PointCloud one(3, 1e-6);
  one.add(Vec{0.3, -0.2, 5.0});
  for (double delta : {0.5, 0.01, 1e-5}) CHECK(grid_count(one, delta) == 1);

  const PointCloud cantor = embed_on_axis(points_at_depth(CantorSpec{}, 5), 2, 0);
  CHECK(grid_count_unchecked(cantor, std::pow(3.0, -3) * std::sqrt(2.0)) == 8);

  PointCloud lattice(2, 1e-3);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) lattice.add(Vec{i * 0.1, j * 0.1});
  }
  CHECK(grid_count(lattice, 0.1 * std::sqrt(2.0)) == 100);
}

TEST_CASE("grid count agrees with a set-based oracle") {
  std::mt19937_64 rng(41);
  for (int d = 1; d <= 5; ++d) {
    const PointCloud c = random_cloud(rng, d, 3000);
    for (double delta : {0.5, 0.1, 0.03, 0.007}) CHECK(grid_count(c, delta) == oracle_count(c, delta));
  }
}

TEST_CASE("stale resolution and bad input") {
  PointCloud c(2, 0.01);
  c.add(Vec{0, 0});
  CHECK_THROWS_AS(grid_count(c, 0.001), Error);
  CHECK_NOTHROW(grid_count_unchecked(c, 0.001));
  CHECK_THROWS_AS(c.add(Vec{0, NAN}), Error);
  CHECK_THROWS_AS(c.add(Vec{0, 0, 0}), Error);
  CHECK_THROWS_AS(PointCloud(2, 0.0), Error);
  CHECK_THROWS_AS(PointCloud(9, 1.0), Error);
}

TEST_CASE("dyadic schedules") {
  CHECK(dyadic_schedule(0.5, 0.06) == std::vector<double>{0.5, 0.25, 0.125, 0.0625});
  CHECK(dyadic_schedule(0.5, 0.5) == std::vector<double>{0.5});
  CHECK(dyadic_schedule(0.25, 1.0 / 64).size() == 5);
  CHECK_THROWS_AS(dyadic_schedule(0.3, 0.26), Error);
  CHECK_THROWS_AS(dyadic_schedule(0.1, 0.2), Error);
}

TEST_CASE("slope estimates") {
  const PointCloud thirds = points_at_depth(CantorSpec{}, 10);
  std::vector<double> triadic;
  for (int j = 2; j <= 8; ++j) triadic.push_back(std::pow(3.0, -j));
  const CoverReport r = estimate_dimension(thirds, triadic);
  CHECK(std::abs(r.slope - std::log(2.0) / std::log(3.0)) < 0.02);
  CHECK(r.monotone);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].count == (std::size_t{1} << (i + 2)));

  PointCloud single(2, 1e-9);
  single.add(Vec{0.1, 0.2});
  CHECK(estimate_dimension(single, dyadic_schedule(0.5, 1e-3)).slope == 0.0);

  PointCloud seg(1, std::ldexp(1.0, -10));
  for (int i = 0; i < 1024; ++i) seg.add(Vec{i * std::ldexp(1.0, -10)});
  const CoverReport s = estimate_dimension(seg, dyadic_schedule(0.25, std::ldexp(1.0, -8)));
  CHECK(std::abs(s.slope - 1.0) < 0.02);
  CHECK(s.residual < 1e-9);

  CHECK_THROWS_AS(estimate_dimension(seg, {0.5, 0.25}), Error);
  CoverReport dropped = estimate_dimension(seg, {0.5, 0.25, 0.125, 1e-6});
  CHECK(dropped.dropped_scales == 1);
  CHECK(dropped.rows.size() == 3);
}

TEST_CASE("counting invariants on random clouds") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  for (int d = 1; d <= 4; ++d) {
    const PointCloud c = random_cloud(rng, d, 2000);
    const std::vector<double> sched = dyadic_schedule(0.5, 1.0 / 256);
    const CoverReport r = estimate_dimension(c, sched);
    CHECK(r.monotone);
    CHECK(r.slope >= 0.0);
    CHECK(r.slope <= d);
    for (double delta : sched) {
      const auto n = static_cast<double>(grid_count(c, delta));
      const auto half = static_cast<double>(grid_count(c, delta / 2));
      CHECK(n <= half);
      CHECK(half <= std::pow(6.0, d) * n);
      std::vector<double> moved(c.coords());
      const double off = shift(rng);
      for (double& x : moved) x += off;
      const auto m = static_cast<double>(grid_count(PointCloud(d, std::move(moved), 1e-9), delta));
      CHECK(m <= std::pow(2.0, d) * n);
      CHECK(n <= std::pow(2.0, d) * m);
    }
  }
}

TEST_CASE("report serialization") {
  PointCloud seg(1, 1e-6);
  for (int i = 0; i < 64; ++i) seg.add(Vec{i / 64.0});
  const CoverReport r = estimate_dimension(seg, dyadic_schedule(0.5, 1.0 / 16));
  const std::string csv = cover_report_csv(r);
  CHECK(csv.rfind("delta,count,log_inv_delta,log_count\n", 0) == 0);
  CHECK(csv.find("0.0625,16,") != std::string::npos);
  CHECK(cover_report_json(r).find("\"slope\"") != std::string::npos);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(0.0) == "0");
}
