#include "furstenberg/construct_packing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "furstenberg/error.hpp"

namespace furstenberg::packing {

namespace {

// Separation checks forgive this much relative rounding; lattice offsets
// j * eta reproduce eta only up to a few ulps.
constexpr double kRoundoff = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxCandidates = 5e7;

using CellKey = std::array<std::int64_t, kMaxDim>;

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

CellKey cell_of(ConstVecView p, double side) {
  CellKey key{};
  for (std::size_t i = 0; i < p.size(); ++i) key[i] = static_cast<std::int64_t>(std::floor(p[i] / side));
  return key;
}

// Lines bucketed by translation cell of side `side`; two lines with
// d1 < side have translations in adjacent cells.
class LineHash {
 public:
  LineHash(int d, double side) : d_(d), side_(side) {}

  template <class Fn>
  bool any_near(const AffineLine& line, Fn&& near) const {
    const CellKey base = cell_of(line.translation(), side_);
    std::array<int, kMaxDim> off{};
    off.fill(-1);
    while (true) {
      CellKey k = base;
      for (int i = 0; i < d_; ++i) k[static_cast<std::size_t>(i)] += off[static_cast<std::size_t>(i)];
      if (auto it = cells_.find(k); it != cells_.end()) {
        for (std::size_t idx : it->second) {
          if (near(idx)) return true;
        }
      }
      int pos = 0;
      while (pos < d_ && off[static_cast<std::size_t>(pos)] == 1) off[static_cast<std::size_t>(pos++)] = -1;
      if (pos == d_) return false;
      ++off[static_cast<std::size_t>(pos)];
    }
  }

  void insert(const AffineLine& line, std::size_t idx) { cells_[cell_of(line.translation(), side_)].push_back(idx); }

 private:
  int d_;
  double side_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

void check_params(int d, double s, double t) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::invalid_parameter, "d must lie in [2, 8]");
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::invalid_parameter, "s must lie in [0, 1]");
  if (!(t >= 0.0 && t <= 2.0 * (d - 1))) {
    throw Error(ErrorKind::invalid_parameter, "t = " + format_double(t) + " outside [0, 2(d-1)]");
  }
}

void check_next(const MarkedLineState& state, double eta_next) {
  if (!(eta_next > 0.0 && eta_next < state.eta)) {
    throw Error(ErrorKind::invalid_parameter,
                "eta_next = " + format_double(eta_next) + " must lie in (0, " + format_double(state.eta) + ")");
  }
}

MarkedLineState next_shell(const MarkedLineState& state, double eta_next, Option option) {
  MarkedLineState out;
  out.step = state.step + 1;
  out.eta = eta_next;
  out.eta_prev = state.eta;
  out.d = state.d;
  out.s = state.s;
  out.t = state.t;
  out.history = state.history;
  out.history.push_back(option);
  out.pred_lines = state.pred_lines;
  out.pred_marks = state.pred_marks;
  return out;
}

void check_caps(const MarkedLineState& state, const Caps& caps) {
  if (state.num_lines() > caps.max_lines) {
    throw Error(ErrorKind::resource, "step " + std::to_string(state.step) + ": " + std::to_string(state.num_lines()) +
                                         " lines exceed cap " + std::to_string(caps.max_lines));
  }
  if (state.num_marks() > caps.max_marks) {
    throw Error(ErrorKind::resource, "step " + std::to_string(state.step) + ": " + std::to_string(state.num_marks()) +
                                         " marks exceed cap " + std::to_string(caps.max_marks));
  }
}

std::vector<std::uint32_t> identity_parents(std::size_t n) {
  std::vector<std::uint32_t> out(n);
  std::iota(out.begin(), out.end(), 0u);
  return out;
}

// Where the hyperplane through x orthogonal to `old_dir` meets `line`.
Vec transfer_mark(ConstVecView x, const Vec& old_dir, const AffineLine& line) {
  const Vec& v = line.direction().unit();
  const double c = dot(v, old_dir);
  const Vec rel = axpy(-1.0, line.translation(), x);
  const double tau = std::abs(c) > 1e-12 ? dot(rel, old_dir) / c : dot(rel, v);
  return line.at(tau);
}

bool next_lattice(std::vector<std::int64_t>& idx, const std::vector<std::int64_t>& reach) {
  for (std::size_t pos = idx.size(); pos-- > 0;) {
    if (idx[pos] < reach[pos]) {
      ++idx[pos];
      return true;
    }
    idx[pos] = -reach[pos];
  }
  return false;
}

}  // namespace

void EtaSchedule::validate() const {
  if (etas.empty() || etas.front() != 1.0) throw Error(ErrorKind::invalid_parameter, "schedule must start at eta_0 = 1");
  for (std::size_t k = 0; k + 1 < etas.size(); ++k) {
    const double cur = etas[k], next = etas[k + 1];
    if (!(next > 0.0 && next < cur) || !std::isfinite(next)) {
      throw Error(ErrorKind::invalid_parameter, "schedule must be positive and strictly decreasing at k = " +
                                                    std::to_string(k + 1));
    }
    const double bound = mode == ScheduleMode::strict ? std::pow(cur, static_cast<double>(k)) : cur / 16.0;
    if (next > bound * (1.0 + 1e-12)) {
      throw Error(ErrorKind::invalid_parameter,
                  std::string(mode == ScheduleMode::strict ? "strict" : "demo") + " schedule violated at k = " +
                      std::to_string(k + 1) + ": eta = " + format_double(next) + " > " + format_double(bound));
    }
  }
}

EtaSchedule EtaSchedule::demo(int K) {
  if (K < 0) throw Error(ErrorKind::invalid_parameter, "K must be >= 0");
  EtaSchedule s;
  s.mode = ScheduleMode::demo;
  for (int k = 0; k <= K; ++k) s.etas.push_back(std::ldexp(1.0, -4 * k));
  if (s.etas.back() == 0.0) throw Error(ErrorKind::resource, "demo schedule underflows");
  return s;
}

EtaSchedule EtaSchedule::strict(int K, double first) {
  if (K < 0) throw Error(ErrorKind::invalid_parameter, "K must be >= 0");
  if (!(first > 0.0 && first < 1.0)) throw Error(ErrorKind::invalid_parameter, "eta_1 must lie in (0, 1)");
  EtaSchedule s;
  s.mode = ScheduleMode::strict;
  s.etas.push_back(1.0);
  if (K >= 1) s.etas.push_back(first);
  for (int k = 1; k < K; ++k) {
    const double cur = s.etas.back();
    const double next = std::min(std::pow(cur, static_cast<double>(k)), cur / 2.0);
    if (!(next >= std::numeric_limits<double>::min())) {
      throw Error(ErrorKind::resource, "strict schedule underflows double range at k = " + std::to_string(k + 1));
    }
    s.etas.push_back(next);
  }
  return s;
}

char to_char(Option o) { return o == Option::A ? 'A' : 'B'; }

std::size_t MarkedLineState::num_marks() const {
  std::size_t n = 0;
  for (const auto& m : marks) n += m.size();
  return n;
}

PointCloud MarkedLineState::mark_cloud() const {
  PointCloud cloud(d, eta);
  cloud.reserve(num_marks());
  for (const auto& line_marks : marks) {
    for (const Vec& x : line_marks) cloud.add(x);
  }
  return cloud;
}

LineFamily MarkedLineState::line_family() const { return LineFamily{d, lines, eta}; }

MarkedLineState initial_state(int d, double s, double t) {
  check_params(d, s, t);
  MarkedLineState st;
  st.d = d;
  st.s = s;
  st.t = t;
  const Vec origin(static_cast<std::size_t>(d), 0.0);
  st.lines.push_back(AffineLine::standard_form(origin, basis_vector(d, 0)));
  st.marks.push_back({origin});
  st.parent_line.push_back(0);
  st.mark_parent.push_back({0});
  st.stats.min_replacement = st.stats.max_replacement = 1;
  return st;
}

double radius_A(int d, double t, double eta_k, double eta_next) {
  return std::pow(eta_next, 1.0 - t / (2.0 * (d - 1))) * eta_k / 2.0;
}

double radius_B(double s, double eta_k, double eta_next) { return std::pow(eta_next, 1.0 - s) * eta_k / 2.0; }

MarkedLineState step_A(const MarkedLineState& state, double eta_next, const StepOptions& opts) {
  check_next(state, eta_next);
  const int d = state.d;
  const double r = radius_A(d, state.t, state.eta, eta_next);
  MarkedLineState out = next_shell(state, eta_next, Option::A);
  out.stats.radius = r;
  out.stats.predicted_factor = std::pow(eta_next, -state.t) * std::pow(state.eta, 2.0 * (d - 1));

  if (r < eta_next) {
    if (opts.reject_degenerate) {
      throw Error(ErrorKind::degenerate_step, "option A at step " + std::to_string(out.step) + ": r_A = " +
                                                  format_double(r) + " < eta_next = " + format_double(eta_next) +
                                                  " (d = " + std::to_string(d) + ", t = " + format_double(state.t) +
                                                  ", eta_k = " + format_double(state.eta) + ")");
    }
    out.stats.degenerate = true;
    out.stats.min_replacement = out.stats.max_replacement = 1;
    out.lines = state.lines;
    out.marks = state.marks;
    out.parent_line.resize(state.lines.size());
    std::iota(out.parent_line.begin(), out.parent_line.end(), std::size_t{0});
    for (const auto& m : state.marks) out.mark_parent.push_back(identity_parents(m.size()));
    out.pred_marks *= out.stats.predicted_factor;
    out.pred_lines *= out.stats.predicted_factor;
    return out;
  }

  const double h = eta_next / 2.0;
  const int c = d - 1;
  LineHash hash(d, eta_next);
  out.stats.min_replacement = std::numeric_limits<std::size_t>::max();

  for (std::size_t p = 0; p < state.lines.size(); ++p) {
    const AffineLine& parent = state.lines[p];
    const Vec& v = parent.direction().unit();
    const Vec& a = parent.translation();
    const std::vector<Vec> frame = complement_frame(v);
    const double r_phi = r / std::sqrt(1.0 - r * r) + h;
    const double r_b = (r + norm(a) * r_phi) / (1.0 - r_phi) + h;
    std::vector<std::int64_t> reach(static_cast<std::size_t>(2 * c));
    double candidates = 1.0;
    for (int i = 0; i < 2 * c; ++i) {
      reach[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::ceil((i < c ? r_phi : r_b) / h));
      candidates *= 2.0 * static_cast<double>(reach[static_cast<std::size_t>(i)]) + 1.0;
    }
    if (candidates > kMaxCandidates) {
      throw Error(ErrorKind::resource, "option A at step " + std::to_string(out.step) + " needs " +
                                           format_double(candidates) + " lattice candidates per line");
    }

    std::size_t children = 0;
    std::vector<std::int64_t> idx(reach.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = -reach[i];
    do {
      Vec dir = v, point = a;
      for (int i = 0; i < c; ++i) {
        dir = axpy(static_cast<double>(idx[static_cast<std::size_t>(i)]) * h, frame[static_cast<std::size_t>(i)], dir);
        point = axpy(static_cast<double>(idx[static_cast<std::size_t>(c + i)]) * h, frame[static_cast<std::size_t>(i)],
                     point);
      }
      AffineLine cand = AffineLine::standard_form(point, dir);
      if (metric_d1(cand, parent) > r) continue;
      const bool blocked =
          hash.any_near(cand, [&](std::size_t j) { return metric_d1(cand, out.lines[j]) < eta_next; });
      if (blocked) continue;
      hash.insert(cand, out.lines.size());
      std::vector<Vec> marks;
      marks.reserve(state.marks[p].size());
      for (const Vec& x : state.marks[p]) marks.push_back(transfer_mark(x, v, cand));
      out.lines.push_back(std::move(cand));
      out.marks.push_back(std::move(marks));
      out.parent_line.push_back(p);
      out.mark_parent.push_back(identity_parents(state.marks[p].size()));
      ++children;
      if (out.lines.size() > opts.caps.max_lines) check_caps(out, opts.caps);
    } while (next_lattice(idx, reach));
    out.stats.min_replacement = std::min(out.stats.min_replacement, children);
    out.stats.max_replacement = std::max(out.stats.max_replacement, children);
  }
  if (state.lines.empty()) out.stats.min_replacement = 0;
  check_caps(out, opts.caps);
  out.pred_lines *= out.stats.predicted_factor;
  out.pred_marks *= out.stats.predicted_factor;
  return out;
}

MarkedLineState step_B(const MarkedLineState& state, double eta_next, const StepOptions& opts) {
  check_next(state, eta_next);
  const double r = radius_B(state.s, state.eta, eta_next);
  MarkedLineState out = next_shell(state, eta_next, Option::B);
  out.stats.radius = r;
  out.stats.predicted_factor = std::pow(eta_next, -state.s) * state.eta;
  out.lines = state.lines;
  out.parent_line.resize(state.lines.size());
  std::iota(out.parent_line.begin(), out.parent_line.end(), std::size_t{0});
  out.pred_marks *= out.stats.predicted_factor;

  if (r < eta_next) {
    if (opts.reject_degenerate) {
      throw Error(ErrorKind::degenerate_step, "option B at step " + std::to_string(out.step) + ": r_B = " +
                                                  format_double(r) + " < eta_next = " + format_double(eta_next) +
                                                  " (s = " + format_double(state.s) +
                                                  ", eta_k = " + format_double(state.eta) + ")");
    }
    out.stats.degenerate = true;
    out.stats.min_replacement = out.stats.max_replacement = 1;
    out.marks = state.marks;
    for (const auto& m : state.marks) out.mark_parent.push_back(identity_parents(m.size()));
    return out;
  }

  const auto reach = static_cast<std::int64_t>(std::floor(r / eta_next + kRoundoff));
  out.stats.min_replacement = std::numeric_limits<std::size_t>::max();
  for (std::size_t li = 0; li < state.lines.size(); ++li) {
    const Vec& v = state.lines[li].direction().unit();
    struct Child {
      double tau;
      std::uint32_t parent;
      Vec x;
    };
    std::vector<Child> kids;
    kids.reserve(state.marks[li].size() * static_cast<std::size_t>(2 * reach + 1));
    for (std::size_t mi = 0; mi < state.marks[li].size(); ++mi) {
      const Vec& x = state.marks[li][mi];
      for (std::int64_t j = -reach; j <= reach; ++j) {
        Vec y = axpy(static_cast<double>(j) * eta_next, v, x);
        kids.push_back({dot(y, v), static_cast<std::uint32_t>(mi), std::move(y)});
      }
    }
    std::stable_sort(kids.begin(), kids.end(), [](const Child& l, const Child& r2) { return l.tau < r2.tau; });
    std::vector<Vec> kept;
    std::vector<std::uint32_t> parents;
    std::vector<std::size_t> per_parent(state.marks[li].size(), 0);
    for (Child& k : kids) {
      if (!kept.empty() && distance(k.x, kept.back()) < eta_next * (1.0 - kRoundoff)) continue;
      ++per_parent[k.parent];
      parents.push_back(k.parent);
      kept.push_back(std::move(k.x));
    }
    for (std::size_t n : per_parent) {
      out.stats.min_replacement = std::min(out.stats.min_replacement, n);
      out.stats.max_replacement = std::max(out.stats.max_replacement, n);
    }
    out.marks.push_back(std::move(kept));
    out.mark_parent.push_back(std::move(parents));
    if (out.num_marks() > opts.caps.max_marks) check_caps(out, opts.caps);
  }
  if (out.stats.min_replacement == std::numeric_limits<std::size_t>::max()) out.stats.min_replacement = 0;
  check_caps(out, opts.caps);
  return out;
}

Trajectory run_alternating(int d, double s, double t, const EtaSchedule& schedule, const RunOptions& opts) {
  schedule.validate();
  Trajectory traj;
  traj.push_back(initial_state(d, s, t));
  for (int k = 0; k < schedule.K(); ++k) {
    const bool a_turn = (k % 2 == 0) != opts.b_first;
    const double next = schedule.etas[static_cast<std::size_t>(k + 1)];
    traj.push_back(a_turn ? step_A(traj.back(), next, opts.step) : step_B(traj.back(), next, opts.step));
  }
  return traj;
}

SeparationReport check_separation(const MarkedLineState& state) {
  SeparationReport rep;
  rep.min_line_separation = kInf;
  rep.min_mark_separation = kInf;
  const std::size_t n = state.lines.size();
  if (n <= 5000) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        rep.min_line_separation = std::min(rep.min_line_separation, metric_d1(state.lines[i], state.lines[j]));
      }
    }
  } else {
    // Pairs closer than eta share adjacent cells; others cannot violate.
    LineHash hash(state.d, state.eta);
    for (std::size_t i = 0; i < n; ++i) {
      hash.any_near(state.lines[i], [&](std::size_t j) {
        rep.min_line_separation = std::min(rep.min_line_separation, metric_d1(state.lines[i], state.lines[j]));
        return false;
      });
      hash.insert(state.lines[i], i);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const AffineLine& line = state.lines[i];
    std::vector<std::pair<double, const Vec*>> order;
    order.reserve(state.marks[i].size());
    for (const Vec& x : state.marks[i]) {
      order.emplace_back(line.parameter_of(x), &x);
      rep.max_mark_offset = std::max(rep.max_mark_offset, line.distance_to_point(x));
    }
    std::sort(order.begin(), order.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t j = 1; j < order.size(); ++j) {
      rep.min_mark_separation = std::min(rep.min_mark_separation, distance(*order[j - 1].second, *order[j].second));
    }
  }
  const double floor = state.eta * (1.0 - kRoundoff);
  rep.ok = rep.min_line_separation >= floor && rep.min_mark_separation >= floor && rep.max_mark_offset <= state.eta;
  return rep;
}

NestingReport check_nesting(const MarkedLineState& prev, const MarkedLineState& next) {
  if (next.step != prev.step + 1 || next.parent_line.size() != next.lines.size()) {
    throw Error(ErrorKind::invalid_input, "states are not consecutive");
  }
  NestingReport rep;
  rep.max_mark_excess = -kInf;
  rep.max_line_excess = -kInf;
  const double line_room = prev.eta - next.eta;
  const double mark_room = 5.0 * prev.eta - 5.0 * next.eta;
  for (std::size_t i = 0; i < next.lines.size(); ++i) {
    const std::size_t p = next.parent_line[i];
    rep.max_line_excess = std::max(rep.max_line_excess, metric_d1(next.lines[i], prev.lines[p]) - line_room);
    for (std::size_t j = 0; j < next.marks[i].size(); ++j) {
      const Vec& parent_mark = prev.marks[p][next.mark_parent[i][j]];
      rep.max_mark_excess = std::max(rep.max_mark_excess, distance(next.marks[i][j], parent_mark) - mark_room);
    }
  }
  rep.ok = rep.max_line_excess <= 1e-12 && rep.max_mark_excess <= 1e-12;
  return rep;
}

double mark_envelope_constant(int d) { return std::pow(4.0, d); }
double line_envelope_constant(int d) { return std::pow(4.0, 2 * (d - 1)); }

NeighborhoodCounts neighborhood_counts(const Trajectory& trajectory, std::size_t k, double delta) {
  if (k + 1 >= trajectory.size()) throw Error(ErrorKind::domain, "step k + 1 is not in the trajectory");
  const MarkedLineState& cur = trajectory[k];
  const MarkedLineState& next = trajectory[k + 1];
  if (!(delta > next.eta && delta < cur.eta)) {
    throw Error(ErrorKind::domain, "delta = " + format_double(delta) + " outside (" + format_double(next.eta) + ", " +
                                       format_double(cur.eta) + ")");
  }
  const int d = cur.d;
  NeighborhoodCounts out;
  out.delta = delta;
  out.measured_marks = grid_count(next.mark_cloud(), delta);
  out.measured_lines = mesh_cover_count(next.line_family(), delta).count;
  out.base_marks = grid_count(cur.mark_cloud(), cur.eta);
  out.base_lines = mesh_cover_count(cur.line_family(), cur.eta).count;
  const double ra = radius_A(d, cur.t, cur.eta, next.eta) / delta;
  const double rb = radius_B(cur.s, cur.eta, next.eta) / delta;
  out.predicted_marks = mark_envelope_constant(d) * static_cast<double>(out.base_marks) *
                        std::max({std::pow(ra, d - 1), rb, 1.0});
  out.predicted_lines =
      line_envelope_constant(d) * static_cast<double>(out.base_lines) * std::max(std::pow(ra, 2 * (d - 1)), 1.0);
  return out;
}

IntersectionProfile intersection_profile(const Trajectory& trajectory, const AffineLine& line, double delta) {
  if (trajectory.empty()) throw Error(ErrorKind::invalid_input, "empty trajectory");
  if (!(delta > 0.0)) throw Error(ErrorKind::invalid_scale, "delta must be positive");
  std::size_t k = 0;
  while (k + 1 < trajectory.size() && trajectory[k + 1].eta >= delta) ++k;
  const MarkedLineState& st = trajectory[k];
  if (line.dim() != st.d) throw Error(ErrorKind::invalid_input, "line dimension mismatch");

  IntersectionProfile prof;
  prof.step = static_cast<int>(k);
  prof.line_distance = kInf;
  for (std::size_t i = 0; i < st.lines.size(); ++i) {
    const double dist = metric_d1(line, st.lines[i]);
    if (dist < prof.line_distance) {
      prof.line_distance = dist;
      prof.nearest_line = i;
    }
  }
  if (!(prof.line_distance <= st.eta)) {
    throw Error(ErrorKind::not_in_family, "line is " + format_double(prof.line_distance) +
                                              " from every construction line at eta = " + format_double(st.eta));
  }

  const double eta = st.eta;
  std::vector<double> centers;
  for (const Vec& c : st.marks[prof.nearest_line]) {
    const double rho = line.distance_to_point(c);
    const double half = 25.0 * eta * eta - rho * rho;
    if (half > 0.0 && 2.0 * std::sqrt(half) >= eta) centers.push_back(line.parameter_of(c));
  }
  std::sort(centers.begin(), centers.end());
  double last = -kInf;
  for (double c : centers) {
    if (c - last >= eta / 2.0) {
      ++prof.interval_count;
      last = c;
    }
  }

  prof.predicted = 1.0;
  int b_steps = 0;
  for (std::size_t j = 1; j <= k; ++j) {
    if (trajectory[j].history.back() == Option::B) {
      prof.predicted *= trajectory[j].stats.predicted_factor;
      ++b_steps;
    }
  }
  prof.lower_bound = std::pow(4.0, -b_steps) * prof.predicted;
  prof.meets_bound = static_cast<double>(prof.interval_count) >= prof.lower_bound;
  return prof;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "k,eta,option,num_lines,num_marks,pred_lines,pred_marks\n";
  for (const MarkedLineState& st : trajectory) {
    out += std::to_string(st.step) + "," + format_double(st.eta) + "," +
           (st.history.empty() ? std::string("-") : std::string(1, to_char(st.history.back()))) + "," +
           std::to_string(st.num_lines()) + "," + std::to_string(st.num_marks()) + "," +
           format_double(st.pred_lines) + "," + format_double(st.pred_marks) + "\n";
  }
  return out;
}

}  // namespace furstenberg::packing
