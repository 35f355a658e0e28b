#include "furstenberg/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "furstenberg/error.hpp"

namespace furstenberg {

double CantorSpec::dimension() const {
  return std::log(static_cast<double>(digits.size())) / std::log(static_cast<double>(base));
}

bool CantorSpec::strong_separation() const {
  if (static_cast<int>(digits.size()) == base) return true;
  for (std::size_t i = 1; i < digits.size(); ++i) {
    if (digits[i] - digits[i - 1] < 2) return false;
  }
  return true;
}

void CantorSpec::validate() const {
  if (base < 2) throw Error(ErrorKind::invalid_input, "Cantor base must be >= 2");
  if (digits.empty()) throw Error(ErrorKind::invalid_input, "Cantor digit set is empty");
  if (!std::is_sorted(digits.begin(), digits.end()) ||
      std::adjacent_find(digits.begin(), digits.end()) != digits.end()) {
    throw Error(ErrorKind::invalid_input, "Cantor digits must be sorted and distinct");
  }
  if (digits.front() < 0 || digits.back() >= base) {
    throw Error(ErrorKind::invalid_input, "Cantor digit outside {0, ..., base-1}");
  }
  if (!strong_separation()) {
    throw Error(ErrorKind::invalid_input, "adjacent digits violate strong separation");
  }
}

CantorSpec cantor_for_dimension(double s, int max_base) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::invalid_parameter, "target dimension outside [0,1]");
  if (max_base < 2) throw Error(ErrorKind::invalid_parameter, "max_base must be >= 2");
  int best_base = 2, best_count = 1;
  double best_err = std::numeric_limits<double>::infinity();
  for (int b = 2; b <= max_base; ++b) {
    for (int k = 1; k <= b; ++k) {
      if (k != b && 2 * k - 1 > b) continue;  // cannot space k digits apart
      const double err = std::abs(std::log(static_cast<double>(k)) / std::log(static_cast<double>(b)) - s);
      if (err < best_err - 1e-12) {
        best_err = err;
        best_base = b;
        best_count = k;
      }
    }
  }
  CantorSpec spec;
  spec.base = best_base;
  spec.digits.clear();
  if (best_count == best_base) {
    for (int i = 0; i < best_base; ++i) spec.digits.push_back(i);
  } else if (best_count == 1) {
    spec.digits.push_back(0);
  } else {
    for (int i = 0; i < best_count; ++i) {
      spec.digits.push_back(static_cast<int>(std::lround(static_cast<double>(i) * (best_base - 1) / (best_count - 1))));
    }
  }
  return spec;
}

std::uint64_t covering_count(const CantorSpec& spec, int k) {
  spec.validate();
  if (k < 0) throw Error(ErrorKind::invalid_input, "depth must be nonnegative");
  const auto size = static_cast<std::uint64_t>(spec.digits.size());
  std::uint64_t out = 1;
  for (int i = 0; i < k; ++i) {
    if (out > std::numeric_limits<std::uint64_t>::max() / size) {
      throw Error(ErrorKind::resource, "covering count overflows 64 bits");
    }
    out *= size;
  }
  return out;
}

double covering_count_at_scale(const CantorSpec& spec, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::invalid_scale, "scale must be positive");
  if (sigma >= 1.0) return 1.0;
  const double levels = std::ceil(std::log(1.0 / sigma) / std::log(static_cast<double>(spec.base)) - 1e-9);
  return std::pow(static_cast<double>(spec.digits.size()), levels);
}

PointCloud points_at_depth(const CantorSpec& spec, int k, std::uint64_t cap) {
  const std::uint64_t count = covering_count(spec, k);
  if (count > cap) {
    throw Error(ErrorKind::resource,
                "depth " + std::to_string(k) + " needs " + std::to_string(count) + " points, cap " + std::to_string(cap));
  }
  const double denom = std::pow(static_cast<double>(spec.base), k);
  PointCloud cloud(1, 4.0 / denom);
  cloud.reserve(count);
  std::vector<double> values;
  values.reserve(count);
  if (denom <= 9007199254740992.0) {  // 2^53: numerators stay exact
    std::vector<std::uint64_t> nums{0};
    for (int level = 0; level < k; ++level) {
      std::vector<std::uint64_t> next;
      next.reserve(nums.size() * spec.digits.size());
      for (std::uint64_t p : nums) {
        for (int dgt : spec.digits) next.push_back(p * static_cast<std::uint64_t>(spec.base) + static_cast<std::uint64_t>(dgt));
      }
      nums.swap(next);
    }
    for (std::uint64_t p : nums) values.push_back(static_cast<double>(p) / denom);
  } else {
    values.push_back(0.0);
    double scale = 1.0;
    for (int level = 0; level < k; ++level) {
      scale /= spec.base;
      std::vector<double> next;
      next.reserve(values.size() * spec.digits.size());
      for (double x : values) {
        for (int dgt : spec.digits) next.push_back(x + dgt * scale);
      }
      values.swap(next);
    }
  }
  for (double x : values) cloud.add(ConstVecView(&x, 1));
  return cloud;
}

ScaledCountWitness scaled_count_check(const CantorSpec& spec, double c, int k) {
  spec.validate();
  if (k < 0) throw Error(ErrorKind::invalid_input, "depth must be nonnegative");
  if (!(c >= 1.0)) throw Error(ErrorKind::unsupported_scale, "scaling factor must be >= 1");
  const double b = spec.base;
  const long j = std::lround(std::log(c) / std::log(b));
  if (std::abs(std::pow(b, static_cast<double>(j)) - c) > 1e-9 * c) {
    throw Error(ErrorKind::unsupported_scale, "scaling factor is not a power of the base");
  }
  if (j > k) throw Error(ErrorKind::unsupported_scale, "delta * c exceeds 1");
  const double delta = std::pow(b, -static_cast<double>(k));

  const PointCloud approx = points_at_depth(spec, k);
  std::vector<double> shrunk(approx.coords());
  for (double& x : shrunk) x /= c;
  const PointCloud scaled_cloud(1, std::move(shrunk), approx.resolution_floor() / c);

  ScaledCountWitness w;
  w.scaled_grid_count = grid_count_unchecked(scaled_cloud, delta);
  w.covering_count = covering_count(spec, static_cast<int>(k - j));
  w.envelope = std::pow(delta * c, -spec.dimension());
  w.pass = w.scaled_grid_count == w.covering_count &&
           static_cast<double>(w.covering_count) <= w.envelope * (1.0 + 1e-9);
  return w;
}

}  // namespace furstenberg
