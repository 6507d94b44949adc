#ifndef PHASEMIX_GRID_HPP
#define PHASEMIX_GRID_HPP

#include <cmath>
#include <string>
#include <vector>

#include "phasemix/error.hpp"

namespace phasemix {

/// Log-spaced points lo * 10^{i / per_decade}, ending exactly at hi when hi is on the lattice
/// and otherwise at the last lattice point below hi followed by hi itself.
inline std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || per_decade < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid needs 0 < lo < hi < inf and per_decade >= 1, got lo = " +
                                                std::to_string(lo) + ", hi = " + std::to_string(hi) +
                                                ", per_decade = " + std::to_string(per_decade));
  }
  const double steps = std::log10(hi / lo) * per_decade;
  const long n = static_cast<long>(std::floor(steps + 1e-9));
  std::vector<double> out;
  out.reserve(n + 2);
  for (long i = 0; i <= n; ++i) out.push_back(lo * std::pow(10.0, static_cast<double>(i) / per_decade));
  if (std::abs(steps - n) <= 1e-9) {
    out.back() = hi;
  } else {
    out.push_back(hi);
  }
  return out;
}

}  // namespace phasemix

#endif  // PHASEMIX_GRID_HPP
