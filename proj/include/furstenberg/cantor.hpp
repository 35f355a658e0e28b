#pragma once

// Digit-restricted self-similar subsets of [0,1]:
//   E = { sum_i d_i B^-i : d_i in D }.

#include <cstdint>
#include <vector>

#include "furstenberg/boxcount.hpp"

namespace furstenberg {

struct CantorSpec {
  int base = 3;
  std::vector<int> digits{0, 2};  // sorted, distinct

  /// log|D| / log B.
  double dimension() const;
  /// Distinct digits give disjoint closed level-1 intervals (no two digits
  /// adjacent), or D is the full digit set and E = [0,1].
  bool strong_separation() const;
  /// Throws invalid_input on bad base/digits or a separation failure.
  void validate() const;
};

/// (B, D) with B <= max_base minimizing |log|D|/log B - s|. Digits are spread
/// evenly over {0..B-1} so the result is strongly separated. Ties go to the
/// smaller base.
CantorSpec cantor_for_dimension(double s, int max_base = 64);

/// |D|^k, the number of level-k intervals (= grid count at B^-k).
std::uint64_t covering_count(const CantorSpec& spec, int k);

/// Upper cover count at an arbitrary scale sigma in (0,1]: |D|^ceil(log_B 1/sigma).
double covering_count_at_scale(const CantorSpec& spec, double sigma);

/// Left endpoints of all level-k intervals as a 1-d cloud, ascending.
/// resolution_floor = 4 B^-k. Throws resource when |D|^k > cap.
PointCloud points_at_depth(const CantorSpec& spec, int k, std::uint64_t cap = 50'000'000);

struct ScaledCountWitness {
  std::size_t scaled_grid_count = 0;  // grid count of approximant / c at B^-k
  std::uint64_t covering_count = 0;   // covering_count at scale B^-k * c
  double envelope = 0.0;              // C (delta c)^-s with C = 1
  bool pass = false;
};

/// Checks N_delta(E/c) = N_{delta c}(E) <= (delta c)^-s on the grid, with
/// delta = B^-k. c must be a power of B with delta c <= 1
/// (unsupported_scale otherwise).
ScaledCountWitness scaled_count_check(const CantorSpec& spec, double c, int k);

}  // namespace furstenberg
