#include <cstdlib>
#include <string_view>

#include "hughes/kernels.hpp"

namespace hughes::kernels {

#if defined(HUGHES_HAVE_AVX2)
const Table* avx2_table();
#endif

const Table* avx2() {
#if defined(HUGHES_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  static const Table& chosen = [] () -> const Table& {
    const char* env = std::getenv("HUGHES_KERNELS");
    if (env && std::string_view(env) == "scalar") return scalar();
    const Table* t = avx2();
    return t ? *t : scalar();
  }();
  return chosen;
}

}  // namespace hughes::kernels
