#include "furstenberg/construct_box.hpp"

#include <algorithm>
#include <cmath>

#include "furstenberg/error.hpp"

namespace furstenberg::box {

void BoxSharpSpec::validate() const {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::invalid_parameter, "d must lie in [2, 8]");
  try {
    cantor.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::invalid_parameter, e.what());
  }
  const double t_max = 2.0 * (d - 1);
  if (!(t >= 0.0 && t <= t_max)) {
    throw Error(ErrorKind::invalid_parameter,
                "t = " + format_double(t) + " outside [0, 2(d-1)] = [0, " + format_double(t_max) + "]");
  }
  if (M < 1 || N < 1 || depth < 0) throw Error(ErrorKind::invalid_parameter, "M, N must be >= 1 and depth >= 0");
}

namespace {

// Lexicographic step through {-reach..reach}^n, last coordinate fastest.
bool advance_odometer(std::vector<std::int64_t>& idx, std::int64_t reach) {
  for (std::size_t pos = idx.size(); pos-- > 0;) {
    if (idx[pos] < reach) {
      ++idx[pos];
      return true;
    }
    idx[pos] = -reach;
  }
  return false;
}

}  // namespace

DirectionSequence make_directions(int d, int N, std::uint64_t /*seed*/) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::invalid_parameter, "d must lie in [2, 8]");
  if (N < 1) throw Error(ErrorKind::invalid_parameter, "N must be >= 1");
  DirectionSequence seq{Direction::from_vector(basis_vector(d, 0)), {}};
  seq.entries.reserve(static_cast<std::size_t>(N));
  const auto want = static_cast<std::size_t>(N);

  for (int j = 1; seq.entries.size() < want; ++j) {
    const double spacing = std::ldexp(1.0, -j * j);
    const double lo = std::ldexp(1.0, -j - 1);
    const double hi = std::ldexp(1.0, -j);
    if (d == 2) {
      for (double i = 0;; ++i) {
        const double theta = lo + i * spacing;
        if (theta >= hi || seq.entries.size() == want) break;
        const Vec v{std::cos(theta), std::sin(theta)};
        seq.entries.push_back({Direction::from_vector(v), j, spacing});
      }
      continue;
    }
    // Tangent-plane grid w = spacing * idx, kept when tan(lo) <= |w| < tan(hi).
    const double w_lo = std::tan(lo), w_hi = std::tan(hi);
    const auto reach = static_cast<std::int64_t>(std::floor(w_hi / spacing));
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d - 1), -reach);
    do {
      double r2 = 0.0;
      for (std::int64_t i : idx) r2 += (static_cast<double>(i) * spacing) * (static_cast<double>(i) * spacing);
      const double r = std::sqrt(r2);
      if (r >= w_lo && r < w_hi) {
        Vec v(static_cast<std::size_t>(d), 0.0);
        v[0] = 1.0;
        for (std::size_t k = 0; k < idx.size(); ++k) v[k + 1] = static_cast<double>(idx[k]) * spacing;
        seq.entries.push_back({Direction::from_vector(v), j, spacing});
      }
    } while (seq.entries.size() < want && advance_odometer(idx, reach));
  }
  return seq;
}

namespace {

double coordinate_value(double beta_i, int m) {
  if (beta_i >= 1.0) return std::log(2.0) / std::log(static_cast<double>(m) + 1.0);
  const double alpha = 1.0 / beta_i - 1.0;
  return std::pow(static_cast<double>(m), -alpha);
}

// Tuples in {1..r}^c with max exactly r, for r = 1, 2, ..., lexicographic
// within each r; the first `count` of them.
std::vector<std::vector<int>> product_indices(int c, int count) {
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int r = 1; static_cast<int>(out.size()) < count; ++r) {
    std::vector<int> tup(static_cast<std::size_t>(c), 1);
    while (true) {
      if (*std::max_element(tup.begin(), tup.end()) == r) {
        out.push_back(tup);
        if (static_cast<int>(out.size()) == count) return out;
      }
      int pos = c - 1;
      while (pos >= 0 && tup[static_cast<std::size_t>(pos)] == r) tup[static_cast<std::size_t>(pos--)] = 1;
      if (pos < 0) break;
      ++tup[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

}  // namespace

TranslationSequence make_translations(int d, double beta, int M, std::uint64_t /*seed*/) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::invalid_parameter, "d must lie in [2, 8]");
  if (!(beta > 0.0 && beta <= d - 1 + 1e-12)) {
    throw Error(ErrorKind::invalid_parameter, "beta = " + format_double(beta) + " outside (0, d-1]");
  }
  if (M < 1) throw Error(ErrorKind::invalid_parameter, "M must be >= 1");
  TranslationSequence seq;
  seq.beta = beta;
  double rem = beta;
  while (rem > 1e-12) {
    const double b = std::min(1.0, rem);
    seq.coordinate_betas.push_back(b);
    rem -= b;
  }
  const int used = static_cast<int>(seq.coordinate_betas.size());
  const double shrink = 1.0 / std::sqrt(static_cast<double>(d - 1));
  for (const std::vector<int>& tup : product_indices(used, M)) {
    Vec u(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < used; ++i) {
      u[static_cast<std::size_t>(i + 1)] =
          shrink * coordinate_value(seq.coordinate_betas[static_cast<std::size_t>(i)], tup[static_cast<std::size_t>(i)]);
    }
    seq.points.push_back(std::move(u));
  }
  return seq;
}

std::vector<CopyIndex> copy_order(const BoxSharpSpec& spec) {
  std::vector<CopyIndex> out;
  if (spec.collapsed()) {
    for (int n = 1; n <= spec.N; ++n) out.push_back({0, n});
    return out;
  }
  for (int sum = 2; sum <= spec.M + spec.N; ++sum) {
    for (int m = std::max(1, sum - spec.N); m <= std::min(spec.M, sum - 1); ++m) out.push_back({m, sum - m});
  }
  return out;
}

BoxConstruction prepare(const BoxSharpSpec& spec) {
  spec.validate();
  BoxConstruction c{spec, make_directions(spec.d, spec.N, spec.seed), {}, copy_order(spec)};
  if (spec.collapsed()) {
    c.translations.points.push_back(Vec(static_cast<std::size_t>(spec.d), 0.0));
  } else {
    c.translations = make_translations(spec.d, spec.beta(), spec.M, spec.seed);
  }
  return c;
}

double construction_floor(const BoxSharpSpec& spec) {
  return 4.0 * std::ldexp(1.0, -(spec.M + spec.N)) * std::pow(static_cast<double>(spec.cantor.base), -spec.depth);
}

namespace {

const Vec& translation_of(const BoxConstruction& c, const CopyIndex& idx) {
  return c.translations.points[static_cast<std::size_t>(std::max(idx.m, 1) - 1)];
}

}  // namespace

PointCloud build_X(const BoxConstruction& c) {
  const BoxSharpSpec& spec = c.spec;
  const std::uint64_t per_copy = covering_count(spec.cantor, spec.depth);
  const double total = static_cast<double>(per_copy) * static_cast<double>(c.copies.size());
  if (total > static_cast<double>(spec.cap)) {
    throw Error(ErrorKind::resource, "X would have " + format_double(total) + " points, cap " + std::to_string(spec.cap));
  }
  const PointCloud e = points_at_depth(spec.cantor, spec.depth, spec.cap);
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(total) * static_cast<std::size_t>(spec.d));
  for (const CopyIndex& idx : c.copies) {
    const Vec& v = c.directions.entries[static_cast<std::size_t>(idx.n - 1)].direction.unit();
    const Vec& u = translation_of(c, idx);
    const double scale = std::ldexp(1.0, -(idx.m + idx.n));
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double along = scale * e.point(i)[0];
      for (int k = 0; k < spec.d; ++k) coords.push_back(u[static_cast<std::size_t>(k)] + along * v[static_cast<std::size_t>(k)]);
    }
  }
  return PointCloud(spec.d, std::move(coords), construction_floor(spec));
}

PointCloud build_X(const BoxSharpSpec& spec) { return build_X(prepare(spec)); }

LineFamily build_lines(const BoxConstruction& c) {
  LineFamily family;
  family.dim = c.spec.d;
  family.resolution_floor = construction_floor(c.spec);
  family.lines.reserve(c.copies.size());
  for (const CopyIndex& idx : c.copies) {
    const Vec& v = c.directions.entries[static_cast<std::size_t>(idx.n - 1)].direction.unit();
    family.lines.push_back(AffineLine::standard_form(translation_of(c, idx), v));
  }
  return family;
}

LineFamily build_lines(const BoxSharpSpec& spec) { return build_lines(prepare(spec)); }

int k_of_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::invalid_scale, "k(delta) needs 0 < delta < 1");
  int e = 0;
  std::frexp(delta, &e);  // delta in [2^(e-1), 2^e)
  return 1 - e;
}

int l_of_delta(double delta, int m) {
  const int k = k_of_delta(delta);
  if (m < 1 || m >= k) {
    throw Error(ErrorKind::domain, "l(delta, m) needs 1 <= m < k(delta) = " + std::to_string(k));
  }
  return k - m;
}

double raw_cover_bound(const BoxSharpSpec& spec, double delta, double eps) {
  const int k = k_of_delta(delta);
  double total = std::pow(delta, spec.d - 1 - spec.t - eps) + k;
  for (int m = 1; m < k; ++m) {
    const int l = l_of_delta(delta, m);
    for (int n = 1; n < l; ++n) total += covering_count_at_scale(spec.cantor, std::ldexp(delta, n + m));
  }
  return total;
}

double predicted_cover(const BoxSharpSpec& spec, double delta, double eps, double constant) {
  return constant * raw_cover_bound(spec, delta, eps);
}

double calibrate_cover_constant(const BoxSharpSpec& spec, const PointCloud& x, double coarsest, double eps) {
  return static_cast<double>(grid_count(x, coarsest)) / raw_cover_bound(spec, coarsest, eps);
}

}  // namespace furstenberg::box
