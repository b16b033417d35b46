#include "qvar/bm25_kernel.hpp"

namespace qvar {

void bm25_accumulate_scalar(const std::uint32_t* docs, const std::uint32_t* tfs,
                            std::size_t n, const double* norms, double w,
                            double* acc) {
  for (std::size_t i = 0; i < n; ++i) {
    double tf = static_cast<double>(tfs[i]);
    acc[docs[i]] += (w * tf) / (tf + norms[docs[i]]);
  }
}

}  // namespace qvar
