#include <algorithm>
#include <cmath>
#include <limits>

#include "dcroute/kernels.hpp"

namespace dcroute::kernels {
namespace {

void add_constant_scalar(std::span<double> xs, double value) {
  for (double& x : xs) x += value;
}

void min_residual_scalar(std::span<double> acc, std::span<const double> load, double capacity) {
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double free = capacity - load[i];
    acc[i] = free < acc[i] ? free : acc[i];
  }
}

double max_prefix_mismatch_scalar(std::span<const double> prefix, std::span<const double> load,
                                  double base) {
  double worst = 0.0;
  double prev = base;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    worst = std::max(worst, std::fabs((prefix[i] - prev) - load[i]));
    prev = prefix[i];
  }
  return worst;
}

double max_overload_scalar(std::span<const double> load, double capacity) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double x : load) worst = std::max(worst, x - capacity);
  return worst;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", add_constant_scalar, min_residual_scalar,
                                 max_prefix_mismatch_scalar, max_overload_scalar};
  return table;
}

}  // namespace dcroute::kernels
