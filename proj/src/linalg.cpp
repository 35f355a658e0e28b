#include "furstenberg/linalg.hpp"

#include <cmath>

namespace furstenberg {

std::vector<Vec> complement_frame(ConstVecView unit) {
  const int d = static_cast<int>(unit.size());
  int skip = 0;
  for (int i = 1; i < d; ++i) {
    if (std::abs(unit[i]) > std::abs(unit[skip])) skip = i;
  }
  std::vector<Vec> frame;
  frame.reserve(static_cast<std::size_t>(d - 1));
  for (int i = 0; i < d; ++i) {
    if (i == skip) continue;
    Vec e = reject(basis_vector(d, i), unit);
    for (const Vec& f : frame) e = reject(e, f);
    const double len = norm(e);
    for (double& v : e) v /= len;
    frame.push_back(std::move(e));
  }
  return frame;
}

}  // namespace furstenberg
