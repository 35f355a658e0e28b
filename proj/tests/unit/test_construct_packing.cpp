#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "furstenberg/construct_packing.hpp"
#include "furstenberg/error.hpp"

using namespace furstenberg;
using namespace furstenberg::packing;

namespace {

MarkedLineState seed_state(double eta, double s = 0.5, double t = 1.0, int d = 2) {
  MarkedLineState st = initial_state(d, s, t);
  st.eta = st.eta_prev = eta;
  return st;
}

// Greedy net in the plane written with angles and normals only: a candidate
// (phi, b) is the line through (0, b) with slope phi.
std::size_t oracle_greedy_lines(double r, double sep) {
  struct L {
    double theta, tx, ty;
  };
  const double h = sep / 2;
  const double r_phi = r / std::sqrt(1 - r * r) + h, r_b = r / (1 - r_phi) + h;
  const auto reach_phi = static_cast<long>(std::ceil(r_phi / h)), reach_b = static_cast<long>(std::ceil(r_b / h));
  const auto dist = [](const L& a, const L& b) {
    return std::abs(std::sin(a.theta - b.theta)) + std::hypot(a.tx - b.tx, a.ty - b.ty);
  };
  std::vector<L> kept;
  const L parent{0, 0, 0};
  for (long i = -reach_phi; i <= reach_phi; ++i) {
    for (long j = -reach_b; j <= reach_b; ++j) {
      const double theta = std::atan(i * h), b = j * h;
      // foot of the perpendicular from the origin to the line
      const double nx = -std::sin(theta), ny = std::cos(theta);
      const L cand{theta, nx * b * ny, ny * b * ny};
      if (dist(cand, parent) > r) continue;
      bool ok = true;
      for (const L& k : kept) ok = ok && dist(cand, k) >= sep;
      if (ok) kept.push_back(cand);
    }
  }
  return kept.size();
}

}  // namespace

TEST_CASE("schedules") {
  const EtaSchedule demo = EtaSchedule::demo(3);
  CHECK(demo.etas == std::vector<double>{1, 1.0 / 16, 1.0 / 256, 1.0 / 4096});
  CHECK_NOTHROW(demo.validate());
  CHECK_FALSE(demo.decay_compliant());
  const EtaSchedule strict = EtaSchedule::strict(3, 0.5);
  CHECK_NOTHROW(strict.validate());
  CHECK(strict.decay_compliant());
  for (int k = 1; k < strict.K(); ++k) {
    CHECK(strict.etas[static_cast<std::size_t>(k + 1)] <= std::pow(strict.etas[static_cast<std::size_t>(k)], k));
  }
  CHECK_THROWS_AS((EtaSchedule{{1, 0.5}, ScheduleMode::demo}.validate()), Error);
  CHECK_THROWS_AS((EtaSchedule{{1, 0.01, 0.02}, ScheduleMode::demo}.validate()), Error);
  CHECK_THROWS_AS((EtaSchedule{{0.5, 0.01}, ScheduleMode::demo}.validate()), Error);
  CHECK_THROWS_AS((EtaSchedule{{1, 0.5, 0.4, 0.2}, ScheduleMode::strict}.validate()), Error);
}

TEST_CASE("option A replacement count against the greedy oracle") {
  const MarkedLineState st = seed_state(0.25);
  const double next = 1.0 / 4096;
  CHECK(radius_A(2, 1.0, 0.25, next) == doctest::Approx(1.0 / 512));
  const MarkedLineState out = step_A(st, next);
  const std::size_t realized = out.num_lines();
  CHECK(realized == oracle_greedy_lines(1.0 / 512, next));
  const double predicted = std::pow(next, -1.0) * 0.25 * 0.25;
  CHECK(predicted == doctest::Approx(256));
  CHECK(realized >= predicted / 8);
  CHECK(realized <= predicted * 8);
  CHECK(check_separation(out).ok);
  CHECK(out.num_marks() == realized);  // one transferred mark per new line
  CHECK(check_nesting(st, out).ok);
}

TEST_CASE("option A with t = 0 keeps one line") {
  const MarkedLineState st = seed_state(0.25, 0.5, 0.0);
  const MarkedLineState out = step_A(st, 1.0 / 64);
  CHECK(out.stats.degenerate);
  CHECK(out.num_lines() == 1);
  StepOptions strict;
  strict.reject_degenerate = true;
  try {
    step_A(st, 1.0 / 64, strict);
    FAIL("expected a degenerate step");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_step);
    CHECK(std::string(e.what()).find("r_A") != std::string::npos);
  }
}

TEST_CASE("option A mark transfer lies on the orthogonal hyperplane") {
  MarkedLineState st = seed_state(0.25);
  st.marks[0] = {Vec{0.3, 0.0}, Vec{-0.6, 0.0}};
  st.mark_parent[0] = {0, 1};
  const MarkedLineState out = step_A(st, 1.0 / 1024);
  REQUIRE(out.num_lines() > 1);
  for (std::size_t i = 0; i < out.num_lines(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const Vec& y = out.marks[i][j];
      const Vec& x = st.marks[0][out.mark_parent[i][j]];
      CHECK(y[0] == doctest::Approx(x[0]).epsilon(1e-12));
      CHECK(out.lines[i].distance_to_point(y) <= 1e-12);
    }
  }
  CHECK(check_separation(out).ok);
}

TEST_CASE("option B count laws") {
  const MarkedLineState st = seed_state(0.25);
  const double next = 1.0 / 4096;
  const MarkedLineState out = step_B(st, next);
  CHECK(out.num_lines() == 1);
  const double r = radius_B(0.5, 0.25, next);
  CHECK(out.num_marks() == 2 * static_cast<std::size_t>(std::floor(r / next)) + 1);
  const double predicted = std::pow(next, -0.5) * 0.25;
  CHECK(predicted == doctest::Approx(16));
  CHECK(out.num_marks() >= predicted / 4);
  CHECK(out.num_marks() <= predicted * 4);
  CHECK(check_separation(out).ok);

  // s = 1 saturates: marks fill the segment of length 2 r_B = 1.
  const MarkedLineState full = step_B(initial_state(2, 1.0, 1.0), 1.0 / 512);
  CHECK(full.num_marks() == 513);
  CHECK(check_separation(full).ok);

  MarkedLineState many = seed_state(0.25);
  many.lines.push_back(AffineLine::standard_form(Vec{0, 0.5}, Vec{1, 0}));
  many.marks.push_back({Vec{0, 0.5}});
  many.mark_parent.push_back({0});
  many.parent_line.push_back(1);
  CHECK(step_B(many, next).num_lines() == 2);
}

TEST_CASE("option B dedups overlapping children") {
  MarkedLineState st = seed_state(0.25);
  st.marks[0] = {Vec{0, 0}, Vec{0.25, 0}};
  st.mark_parent[0] = {0, 1};
  const MarkedLineState out = step_B(st, 1.0 / 64);  // r_B = 1/64: 3 per mark
  CHECK(out.num_marks() == 6);
  CHECK(check_separation(out).ok);
  CHECK(check_nesting(st, out).ok);
}

TEST_CASE("alternating runs") {
  const Trajectory zero = run_alternating(2, 0.5, 1.0, EtaSchedule::demo(0));
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].num_lines() == 1);
  CHECK(zero[0].num_marks() == 1);

  const Trajectory traj = run_alternating(2, 0.5, 1.0, EtaSchedule::demo(3));
  REQUIRE(traj.size() == 4);
  double accumulated = 1.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const MarkedLineState& st = traj[k];
    CHECK(st.history.back() == (k % 2 == 1 ? Option::A : Option::B));
    CHECK(check_separation(st).ok);
    CHECK(check_nesting(traj[k - 1], st).ok);
    accumulated *= 16;
    CHECK(static_cast<double>(st.num_lines()) <= st.pred_lines * accumulated);
    CHECK(static_cast<double>(st.num_lines()) >= st.pred_lines / accumulated);
    CHECK(static_cast<double>(st.num_marks()) <= st.pred_marks * accumulated);
    CHECK(static_cast<double>(st.num_marks()) >= st.pred_marks / accumulated);
  }

  RunOptions b_first;
  b_first.b_first = true;
  CHECK(run_alternating(2, 0.5, 1.0, EtaSchedule::demo(1), b_first)[1].history.back() == Option::B);

  RunOptions tight;
  tight.step.caps.max_lines = 3;
  try {
    run_alternating(2, 0.5, 1.0, EtaSchedule::demo(1), tight);
    FAIL("expected a cap error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("step laws on non-degenerate steps") {
  struct Case {
    int d;
    double s, t;
    std::vector<double> etas;
    bool b_first;
  };
  const std::vector<Case> cases{
      {2, 0.5, 1.0, {1, 1.0 / 16, 1.0 / 4096}, false},
      {2, 0.5, 1.5, {1, 1.0 / 32, 1.0 / 2048}, true},
      {3, 0.5, 2.0, {1, 1.0 / 16}, false},
  };
  for (const Case& c : cases) {
    RunOptions opts;
    opts.b_first = c.b_first;
    const Trajectory traj = run_alternating(c.d, c.s, c.t, EtaSchedule{c.etas, ScheduleMode::demo}, opts);
    for (std::size_t k = 1; k < traj.size(); ++k) {
      const StepStats& st = traj[k].stats;
      if (st.degenerate) continue;
      const double c1 = traj[k].history.back() == Option::A ? std::pow(4.0, -2 * (c.d - 1)) : 0.25;
      const double c2 = 1.0 / c1;
      CHECK(static_cast<double>(st.min_replacement) >= c1 * st.predicted_factor);
      CHECK(static_cast<double>(st.max_replacement) <= c2 * st.predicted_factor);
      CHECK(check_separation(traj[k]).ok);
      CHECK(check_nesting(traj[k - 1], traj[k]).ok);
    }
  }
}

TEST_CASE("separation check catches violations") {
  MarkedLineState st = seed_state(0.25);
  st.lines.push_back(AffineLine::standard_form(Vec{0, 0.1}, Vec{1, 0}));
  st.marks.push_back({Vec{0, 0.1}});
  CHECK_FALSE(check_separation(st).ok);
  MarkedLineState marks = seed_state(0.25);
  marks.marks[0] = {Vec{0, 0}, Vec{0.1, 0}};
  CHECK_FALSE(check_separation(marks).ok);
  MarkedLineState off = seed_state(0.25);
  off.marks[0] = {Vec{0, 0.3}};
  CHECK_FALSE(check_separation(off).ok);
}

TEST_CASE("neighbourhood counts") {
  const Trajectory traj = run_alternating(2, 0.5, 1.0, EtaSchedule::demo(3));
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double delta = std::sqrt(traj[k].eta * traj[k + 1].eta);
    const NeighborhoodCounts nc = neighborhood_counts(traj, k, delta);
    CHECK(static_cast<double>(nc.measured_marks) <= nc.predicted_marks);
    CHECK(static_cast<double>(nc.measured_lines) <= nc.predicted_lines);
    CHECK(std::log(static_cast<double>(nc.measured_marks)) / std::log(1 / delta) <= 0.5 + 0.25);

    // envelope collapses to C * N_{eta_k} near delta = eta_k
    const NeighborhoodCounts top = neighborhood_counts(traj, k, traj[k].eta * (1 - 1e-9));
    CHECK(top.predicted_marks == doctest::Approx(mark_envelope_constant(2) * top.base_marks));
    CHECK(top.predicted_lines == doctest::Approx(line_envelope_constant(2) * top.base_lines));
  }
  CHECK_THROWS_AS(neighborhood_counts(traj, 0, 1.0), Error);
  CHECK_THROWS_AS(neighborhood_counts(traj, 0, 1.0 / 16), Error);
  CHECK_THROWS_AS(neighborhood_counts(traj, 3, 1e-5), Error);
}

TEST_CASE("intersection profile") {
  RunOptions b_first;
  b_first.b_first = true;
  const Trajectory traj = run_alternating(2, 0.5, 1.0, EtaSchedule::demo(1), b_first);
  const MarkedLineState& st = traj[1];
  const IntersectionProfile exact = intersection_profile(traj, st.lines[0], st.eta);
  CHECK(exact.interval_count == st.marks[0].size());
  CHECK(exact.predicted == doctest::Approx(4.0));
  CHECK(static_cast<double>(exact.interval_count) <= 4 * exact.predicted);
  CHECK(static_cast<double>(exact.interval_count) >= exact.predicted / 4);
  CHECK(exact.meets_bound);

  const AffineLine nudged = AffineLine::standard_form(Vec{0, st.eta / 2}, Vec{1, 0});
  CHECK(intersection_profile(traj, nudged, st.eta).interval_count == exact.interval_count);

  const AffineLine far = AffineLine::standard_form(Vec{0, 0.5}, Vec{1, 0});
  try {
    intersection_profile(traj, far, st.eta);
    FAIL("expected not_in_family");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_in_family);
  }
}

TEST_CASE("trajectory csv") {
  const std::string csv = trajectory_csv(run_alternating(2, 0.5, 1.0, EtaSchedule::demo(1)));
  CHECK(csv == "k,eta,option,num_lines,num_marks,pred_lines,pred_marks\n0,1,-,1,1,1,1\n1,0.0625,A,15,15,16,16\n");
}
