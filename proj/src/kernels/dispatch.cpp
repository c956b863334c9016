#include <cstdlib>
#include <cstring>

#include "wvplan/factored_space.hpp"
#include "wvplan/kernels.hpp"

namespace wvplan::kernels {

#ifndef WVPLAN_HAVE_AVX2
namespace avx2 {
double affine_spmv(const CsrMatrix& a, const double* b, double scale, const double* x, double* y) {
  return scalar::affine_spmv(a, b, scale, x, y);
}
}  // namespace avx2
#endif

namespace {

bool cpu_has_avx2() {
#if defined(WVPLAN_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  const char* env = std::getenv("WVPLAN_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

Isa& current() {
  static Isa isa = detect();
  return isa;
}

}  // namespace

std::string to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() { return current(); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) throw Error("instruction set '" + to_string(isa) + "' is not available");
  current() = isa;
}

double affine_spmv(const CsrMatrix& a, std::span<const double> b, double scale, std::span<const double> x,
                   std::span<double> y) {
  if (a.rows() != a.cols || b.size() != a.rows() || x.size() != a.rows() || y.size() != a.rows()) {
    throw Error("affine_spmv: dimension mismatch");
  }
  if (current() == Isa::Avx2) return avx2::affine_spmv(a, b.data(), scale, x.data(), y.data());
  return scalar::affine_spmv(a, b.data(), scale, x.data(), y.data());
}

}  // namespace wvplan::kernels
