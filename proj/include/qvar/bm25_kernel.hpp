#pragma once

#include <cstddef>
#include <cstdint>

namespace qvar {

// Postings-scoring inner loop: for each posting i,
//
//   acc[docs[i]] += (w * tfs[i]) / (tfs[i] + norms[docs[i]])
//
// where w = idf * (k1 + 1) and norms[d] = k1 * (1 - b + b * |d| / avgdl).
// docs is strictly increasing, so the scatter-add has no lane conflicts and
// scalar and SIMD variants produce bit-identical accumulators.
using Bm25AccumulateFn = void (*)(const std::uint32_t* docs,
                                  const std::uint32_t* tfs, std::size_t n,
                                  const double* norms, double w, double* acc);

void bm25_accumulate_scalar(const std::uint32_t* docs, const std::uint32_t* tfs,
                            std::size_t n, const double* norms, double w,
                            double* acc);

#if defined(QVAR_HAVE_AVX2_TU)
void bm25_accumulate_avx2(const std::uint32_t* docs, const std::uint32_t* tfs,
                          std::size_t n, const double* norms, double w,
                          double* acc);
#endif

// Variant selected at load time from CPU capabilities.
Bm25AccumulateFn bm25_accumulate_kernel();
const char* bm25_kernel_name();

}  // namespace qvar
