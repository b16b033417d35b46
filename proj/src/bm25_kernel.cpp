#include "qvar/bm25_kernel.hpp"

namespace qvar {

namespace {

bool cpu_has_avx2() {
#if defined(QVAR_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

struct Dispatch {
  Bm25AccumulateFn fn;
  const char* name;
  Dispatch() {
#if defined(QVAR_HAVE_AVX2_TU)
    if (cpu_has_avx2()) {
      fn = bm25_accumulate_avx2;
      name = "avx2";
      return;
    }
#endif
    fn = bm25_accumulate_scalar;
    name = "scalar";
  }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace

Bm25AccumulateFn bm25_accumulate_kernel() { return dispatch().fn; }
const char* bm25_kernel_name() { return dispatch().name; }

}  // namespace qvar
