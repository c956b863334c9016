#include <algorithm>
#include <cmath>

#include "wvplan/kernels.hpp"

namespace wvplan::kernels::scalar {

double affine_spmv(const CsrMatrix& a, const double* b, double scale, const double* x, double* y) {
  double delta = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::uint32_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.val[k] * x[a.col[k]];
    const double yi = b[i] + scale * acc;
    delta = std::max(delta, std::abs(yi - x[i]));
    y[i] = yi;
  }
  return delta;
}

}  // namespace wvplan::kernels::scalar
