#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "wvplan/kernels.hpp"

namespace wvplan::kernels::avx2 {

double affine_spmv(const CsrMatrix& a, const double* b, double scale, const double* x, double* y) {
  double delta = 0.0;
  const std::size_t n = a.rows();
  const double* val = a.val.data();
  const std::int32_t* col = a.col.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t k = a.row_ptr[i];
    const std::uint32_t end = a.row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
      const __m256d xs = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xs, acc);
    }
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
    for (; k < end; ++k) sum += val[k] * x[col[k]];
    const double yi = b[i] + scale * sum;
    delta = std::max(delta, std::abs(yi - x[i]));
    y[i] = yi;
  }
  return delta;
}

}  // namespace wvplan::kernels::avx2
