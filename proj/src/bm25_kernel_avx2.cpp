#include "qvar/bm25_kernel.hpp"

#if defined(QVAR_HAVE_AVX2_TU) && defined(__AVX2__)

#include <immintrin.h>

namespace qvar {

// Four postings per iteration: gather the per-document length norms, compute
// the contributions with the same mul/add/div sequence as the scalar kernel
// (bit-identical lanes), then scatter-add with scalar stores.
void bm25_accumulate_avx2(const std::uint32_t* docs, const std::uint32_t* tfs,
                          std::size_t n, const double* norms, double w,
                          double* acc) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  alignas(32) double contrib[4];
  for (; i + 4 <= n; i += 4) {
    __m128i vdocs = _mm_loadu_si128(reinterpret_cast<const __m128i*>(docs + i));
    __m128i vtfs_i = _mm_loadu_si128(reinterpret_cast<const __m128i*>(tfs + i));
    __m256d vtf = _mm256_cvtepi32_pd(vtfs_i);
    __m256d vnorm = _mm256_i32gather_pd(norms, vdocs, 8);
    __m256d num = _mm256_mul_pd(vw, vtf);
    __m256d den = _mm256_add_pd(vtf, vnorm);
    _mm256_store_pd(contrib, _mm256_div_pd(num, den));
    acc[docs[i + 0]] += contrib[0];
    acc[docs[i + 1]] += contrib[1];
    acc[docs[i + 2]] += contrib[2];
    acc[docs[i + 3]] += contrib[3];
  }
  for (; i < n; ++i) {
    double tf = static_cast<double>(tfs[i]);
    acc[docs[i]] += (w * tf) / (tf + norms[docs[i]]);
  }
}

}  // namespace qvar

#endif
