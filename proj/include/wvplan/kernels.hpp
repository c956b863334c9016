#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wvplan::kernels {

/// Compressed sparse rows with 32-bit column indices.
struct CsrMatrix {
  std::size_t cols = 0;
  std::vector<std::uint32_t> row_ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;

  std::size_t rows() const { return row_ptr.size() - 1; }
};

/// y = b + scale * A x. Returns max_i |y_i - x_i| (A must be square).
using AffineSpmvFn = double (*)(const CsrMatrix& a, const double* b, double scale, const double* x, double* y);

namespace scalar {
double affine_spmv(const CsrMatrix& a, const double* b, double scale, const double* x, double* y);
}
namespace avx2 {
double affine_spmv(const CsrMatrix& a, const double* b, double scale, const double* x, double* y);
}

enum class Isa { Scalar, Avx2 };

std::string to_string(Isa isa);
bool isa_supported(Isa isa);

/// Chosen once from CPU features; `WVPLAN_SIMD=scalar` forces the scalar path.
Isa active_isa();
/// Test hook; throws wvplan::Error if the ISA is unavailable in this build or CPU.
void force_isa(Isa isa);

double affine_spmv(const CsrMatrix& a, std::span<const double> b, double scale, std::span<const double> x,
                   std::span<double> y);

}  // namespace wvplan::kernels
