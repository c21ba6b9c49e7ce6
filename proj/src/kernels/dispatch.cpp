#include <cstdlib>
#include <string_view>

#include "dcroute/kernels.hpp"

namespace dcroute::kernels {

#if defined(DCROUTE_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(DCROUTE_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* force = std::getenv("DCROUTE_FORCE_SCALAR");
    if (force != nullptr && std::string_view(force) == "1") return scalar_table();
    if (const KernelTable* fast = avx2_table()) return *fast;
    return scalar_table();
  }();
  return table;
}

}  // namespace dcroute::kernels
