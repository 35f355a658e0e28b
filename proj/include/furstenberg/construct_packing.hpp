#pragma once

// Iterative marked-line construction for the sharp packing example.
// Option A spreads lines, option B spreads marks; X_k is the closed
// 5 eta_k neighbourhood of the marks and L_k the eta_k neighbourhood of the
// lines. Neighbourhoods are never materialized; counts work from centers.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "furstenberg/boxcount.hpp"
#include "furstenberg/grassmann.hpp"

namespace furstenberg::packing {

enum class ScheduleMode { strict, demo };

struct EtaSchedule {
  std::vector<double> etas;  // eta_0 = 1 > eta_1 > ... > eta_K
  ScheduleMode mode = ScheduleMode::demo;

  int K() const { return static_cast<int>(etas.size()) - 1; }
  /// strict: eta_{k+1} <= eta_k^k; demo: eta_{k+1} <= eta_k / 16.
  /// Throws invalid_parameter.
  void validate() const;
  /// Only strict schedules satisfy the decay the limiting argument needs.
  bool decay_compliant() const { return mode == ScheduleMode::strict; }

  /// eta_k = 16^-k.
  static EtaSchedule demo(int K);
  /// eta_1 = first, eta_{k+1} = min(eta_k^k, eta_k / 2).
  static EtaSchedule strict(int K, double first = 0.5);
};

enum class Option { A, B };
char to_char(Option o);

struct StepStats {
  double predicted_factor = 1.0;     // per line (A) or per mark (B)
  std::size_t min_replacement = 0;   // realized children per parent
  std::size_t max_replacement = 0;
  double radius = 0.0;               // r_A or r_B
  bool degenerate = false;           // radius < eta_next: one child per parent
};

struct MarkedLineState {
  int step = 0;
  double eta = 1.0;       // eta_k
  double eta_prev = 1.0;  // eta_{k-1} (equal to eta at step 0)
  int d = 2;
  double s = 0.5;
  double t = 1.0;
  std::vector<AffineLine> lines;
  std::vector<std::vector<Vec>> marks;                    // per line
  std::vector<std::size_t> parent_line;                   // index into previous state
  std::vector<std::vector<std::uint32_t>> mark_parent;    // index into parent's marks
  std::vector<Option> history;
  StepStats stats;
  double pred_lines = 1.0;  // product of per-step line factors
  double pred_marks = 1.0;  // product of per-step total-mark factors

  std::size_t num_lines() const { return lines.size(); }
  std::size_t num_marks() const;
  /// All marks of all lines as one cloud (floor = eta).
  PointCloud mark_cloud() const;
  LineFamily line_family() const;
};

struct Caps {
  std::size_t max_lines = 1'000'000;
  std::size_t max_marks = 10'000'000;
};

struct StepOptions {
  Caps caps;
  /// Throw degenerate_step instead of keeping the parent when the radius is
  /// smaller than eta_next.
  bool reject_degenerate = false;
};

/// Step 0: the x-axis marked with the origin.
MarkedLineState initial_state(int d, double s, double t);

/// r_A = eta_next^(1 - t/(2(d-1))) eta_k / 2.
double radius_A(int d, double t, double eta_k, double eta_next);
/// r_B = eta_next^(1 - s) eta_k / 2.
double radius_B(double s, double eta_k, double eta_next);

/// Replace each line by a greedy maximal eta_next-separated set of lines in
/// its d1-ball of radius r_A. Candidates are a lattice of spacing eta_next/2
/// in local (tilt, offset) coordinates, visited lexicographically; the
/// separation test is global across parents. Each old mark x gives one mark
/// per new line: the intersection with the hyperplane through x orthogonal
/// to the old line.
MarkedLineState step_A(const MarkedLineState& state, double eta_next, const StepOptions& opts = {});

/// Replace each mark by the points x + j eta_next v, |j eta_next| <= r_B,
/// then drop marks closer than eta_next to the previous kept one along the
/// line. Lines are unchanged.
MarkedLineState step_B(const MarkedLineState& state, double eta_next, const StepOptions& opts = {});

struct RunOptions {
  bool b_first = false;
  StepOptions step;
};

using Trajectory = std::vector<MarkedLineState>;

/// States 0..K alternating A, B, A, ... (B first when requested).
Trajectory run_alternating(int d, double s, double t, const EtaSchedule& schedule,
                           const RunOptions& opts = {});

struct SeparationReport {
  double min_line_separation = 0.0;  // +inf with fewer than two lines
  double min_mark_separation = 0.0;  // along any single line
  double max_mark_offset = 0.0;      // distance from a mark to its line
  bool ok = false;                   // all three at the state's eta
};

/// Exact all-pairs check of the separation invariants.
SeparationReport check_separation(const MarkedLineState& state);

struct NestingReport {
  double max_mark_excess = 0.0;  // |x_new - x_parent| - (5 eta_k - 5 eta_{k+1}), max
  double max_line_excess = 0.0;  // d1(L_new, L_parent) - (eta_k - eta_{k+1}), max
  bool ok = false;
};

/// X_{k+1} within X_k and L_{k+1} within L_k, via center/radius bookkeeping.
NestingReport check_nesting(const MarkedLineState& prev, const MarkedLineState& next);

/// Envelope constants for the intermediate-scale bounds.
double mark_envelope_constant(int d);
double line_envelope_constant(int d);

struct NeighborhoodCounts {
  double delta = 0.0;
  std::size_t measured_marks = 0;  // grid count of the step k+1 marks at delta
  std::size_t measured_lines = 0;  // mesh count of the step k+1 lines at delta
  std::size_t base_marks = 0;      // grid count of the step k marks at eta_k
  std::size_t base_lines = 0;      // mesh count of the step k lines at eta_k
  double predicted_marks = 0.0;
  double predicted_lines = 0.0;
};

/// Counts at eta_{k+1} < delta < eta_k (domain error otherwise), with the
/// envelopes
///   C_X N_{eta_k}(X_k) max{(r_A/delta)^(d-1), r_B/delta, 1}
///   C_L N_{eta_k}(L_k) max{(r_A/delta)^(2(d-1)), 1}.
NeighborhoodCounts neighborhood_counts(const Trajectory& trajectory, std::size_t k, double delta);

struct IntersectionProfile {
  int step = 0;                 // state used: deepest with eta_k >= delta
  std::size_t nearest_line = 0;
  double line_distance = 0.0;   // d1 to the nearest construction line
  std::size_t interval_count = 0;
  double predicted = 0.0;       // product of B-step factors up to the state
  double lower_bound = 0.0;     // 4^-(#B steps) * predicted
  bool meets_bound = false;
};

/// Disjoint intervals of L inside X_k: marks of the nearest construction
/// line whose 5 eta_k ball meets L in a chord of length >= eta_k, thinned so
/// the chord centers are >= eta_k / 2 apart. Throws not_in_family when L is
/// farther than eta_k from every construction line.
IntersectionProfile intersection_profile(const Trajectory& trajectory, const AffineLine& line,
                                         double delta);

/// CSV `k,eta,option,num_lines,num_marks,pred_lines,pred_marks`.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace furstenberg::packing
