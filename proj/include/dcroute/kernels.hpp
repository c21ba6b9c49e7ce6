#pragma once

// Data-parallel inner loops of the allocation grid. Every kernel has a scalar
// reference implementation; an AVX2 variant is selected at runtime when the
// CPU supports it. Both variants are elementwise-identical (no reassociation),
// so results agree bit for bit.

#include <span>
#include <string_view>

namespace dcroute::kernels {

struct KernelTable {
  std::string_view name;
  // xs[i] += value
  void (*add_constant)(std::span<double> xs, double value);
  // acc[i] = min(acc[i], capacity - load[i])
  void (*min_residual)(std::span<double> acc, std::span<const double> load, double capacity);
  // max_i |(prefix[i] - prev) - load[i]| where prev is prefix[i-1], or
  // `base` for i == 0.
  double (*max_prefix_mismatch)(std::span<const double> prefix, std::span<const double> load,
                                double base);
  // max_i load[i] - capacity (may be negative); -inf on empty input.
  double (*max_overload)(std::span<const double> load, double capacity);
};

const KernelTable& scalar_table();
// nullptr when the AVX2 variant was not built or the CPU lacks AVX2.
const KernelTable* avx2_table();

// The table used by the library. Honors DCROUTE_FORCE_SCALAR=1.
const KernelTable& active();

inline void add_constant(std::span<double> xs, double value) {
  active().add_constant(xs, value);
}
inline void min_residual(std::span<double> acc, std::span<const double> load, double capacity) {
  active().min_residual(acc, load, capacity);
}
inline double max_prefix_mismatch(std::span<const double> prefix, std::span<const double> load,
                                  double base) {
  return active().max_prefix_mismatch(prefix, load, base);
}
inline double max_overload(std::span<const double> load, double capacity) {
  return active().max_overload(load, capacity);
}

}  // namespace dcroute::kernels
