#pragma once

#include <cstddef>
#include <string>

#include "qclip/common.hpp"

namespace qclip::kernels {

// Dense inner loops used by the matrix layer.  Every kernel has a scalar
// reference implementation and (on x86-64 with AVX2+FMA) a vectorized
// variant; the dispatch table is chosen once at startup from CPUID and can
// be overridden with QCLIP_KERNELS=scalar|avx2.  SIMD variants must agree
// with the scalar reference to ~1 ulp-per-accumulation; the equivalence
// suite in tests/ pins that down.
struct KernelTable {
    const char* name;

    // y[i] += a * x[i]
    void (*caxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
    // y[i] += a * conj(x[i])
    void (*caxpyc)(std::size_t n, cplx a, const cplx* x, cplx* y);
    // sum_i x[i] * y[i]
    cplx (*cdotu)(std::size_t n, const cplx* x, const cplx* y);
    // sum_i conj(x[i]) * y[i]
    cplx (*cdotc)(std::size_t n, const cplx* x, const cplx* y);
    // x[i] *= a
    void (*cscal)(std::size_t n, cplx a, cplx* x);
    // Unitary pair rotation, c real, s complex:
    //   x[i] <- c*x[i] + s*y[i];  y[i] <- c*y[i] - conj(s)*x_old[i]
    void (*crot)(std::size_t n, cplx* x, std::ptrdiff_t incx, cplx* y, std::ptrdiff_t incy,
                 double c, cplx s);

    // Real variants for the classical-network paths.
    void (*daxpy)(std::size_t n, double a, const double* x, double* y);
    double (*ddot)(std::size_t n, const double* x, const double* y);
    void (*dscal)(std::size_t n, double a, double* x);
};

namespace scalar {
extern const KernelTable table;
}

#if defined(QCLIP_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

// Table selected for this process (CPUID + QCLIP_KERNELS override).
const KernelTable& active();

// Force a specific table; throws Error for unknown or unsupported names.
// Intended for tests and benchmarking.
void select(const std::string& name);

bool cpu_supports_avx2();

}  // namespace qclip::kernels
