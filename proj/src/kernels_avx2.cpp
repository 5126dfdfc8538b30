#include "qclip/kernels.hpp"

#if defined(QCLIP_HAVE_AVX2)

#include <immintrin.h>

namespace qclip::kernels::avx2 {

namespace {

// A __m256d holds two interleaved complex doubles: [re0, im0, re1, im1].

// (re, im) lanes of v times the complex constant (ar + i*ai).
inline __m256d cmul_const(__m256d v, __m256d ar, __m256d ai) {
    const __m256d swapped = _mm256_permute_pd(v, 0x5);
    return _mm256_fmaddsub_pd(v, ar, _mm256_mul_pd(swapped, ai));
}

inline __m256d conj_lanes(__m256d v) {
    const __m256d mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    return _mm256_xor_pd(v, mask);
}

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    auto* yd = reinterpret_cast<double*>(y);
    const auto* xd = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_const(xv, ar, ai)));
    }
    for (; i < n; ++i) {
        y[i] += a * x[i];
    }
}

void caxpyc(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    auto* yd = reinterpret_cast<double*>(y);
    const auto* xd = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = conj_lanes(_mm256_loadu_pd(xd + 2 * i));
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_const(xv, ar, ai)));
    }
    for (; i < n; ++i) {
        y[i] += a * std::conj(x[i]);
    }
}

cplx cdotu(std::size_t n, const cplx* x, const cplx* y) {
    const auto* xd = reinterpret_cast<const double*>(x);
    const auto* yd = reinterpret_cast<const double*>(y);
    __m256d acc_same = _mm256_setzero_pd();   // xr*yr, xi*yi pairs
    __m256d acc_cross = _mm256_setzero_pd();  // xr*yi, xi*yr pairs
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        acc_same = _mm256_fmadd_pd(xv, yv, acc_same);
        acc_cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), acc_cross);
    }
    alignas(32) double same[4];
    alignas(32) double cross[4];
    _mm256_store_pd(same, acc_same);
    _mm256_store_pd(cross, acc_cross);
    double re = (same[0] - same[1]) + (same[2] - same[3]);
    double im = (cross[0] + cross[1]) + (cross[2] + cross[3]);
    for (; i < n; ++i) {
        const cplx p = x[i] * y[i];
        re += p.real();
        im += p.imag();
    }
    return {re, im};
}

cplx cdotc(std::size_t n, const cplx* x, const cplx* y) {
    const auto* xd = reinterpret_cast<const double*>(x);
    const auto* yd = reinterpret_cast<const double*>(y);
    __m256d acc_same = _mm256_setzero_pd();
    __m256d acc_cross = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        acc_same = _mm256_fmadd_pd(xv, yv, acc_same);
        acc_cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), acc_cross);
    }
    alignas(32) double same[4];
    alignas(32) double cross[4];
    _mm256_store_pd(same, acc_same);
    _mm256_store_pd(cross, acc_cross);
    double re = (same[0] + same[1]) + (same[2] + same[3]);
    double im = (cross[0] - cross[1]) + (cross[2] - cross[3]);
    for (; i < n; ++i) {
        const cplx p = std::conj(x[i]) * y[i];
        re += p.real();
        im += p.imag();
    }
    return {re, im};
}

void cscal(std::size_t n, cplx a, cplx* x) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    auto* xd = reinterpret_cast<double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        _mm256_storeu_pd(xd + 2 * i, cmul_const(xv, ar, ai));
    }
    for (; i < n; ++i) {
        x[i] *= a;
    }
}

void crot(std::size_t n, cplx* x, std::ptrdiff_t incx, cplx* y, std::ptrdiff_t incy, double c,
          cplx s) {
    if (incx == 1 && incy == 1) {
        const __m256d cv = _mm256_set1_pd(c);
        const __m256d sr = _mm256_set1_pd(s.real());
        const __m256d si = _mm256_set1_pd(s.imag());
        const __m256d scr = sr;
        const __m256d sci = _mm256_set1_pd(-s.imag());
        auto* xd = reinterpret_cast<double*>(x);
        auto* yd = reinterpret_cast<double*>(y);
        std::size_t i = 0;
        for (; i + 2 <= n; i += 2) {
            const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
            const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
            const __m256d xn = _mm256_fmadd_pd(xv, cv, cmul_const(yv, sr, si));
            const __m256d yn = _mm256_fmsub_pd(yv, cv, cmul_const(xv, scr, sci));
            _mm256_storeu_pd(xd + 2 * i, xn);
            _mm256_storeu_pd(yd + 2 * i, yn);
        }
        const cplx sc = std::conj(s);
        for (; i < n; ++i) {
            const cplx xi = x[i];
            const cplx yi = y[i];
            x[i] = c * xi + s * yi;
            y[i] = c * yi - sc * xi;
        }
        return;
    }
    // Strided pairs (column updates) stay scalar; the loads dominate anyway.
    const cplx sc = std::conj(s);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx xi = x[i * incx];
        const cplx yi = y[i * incy];
        x[i * incx] = c * xi + s * yi;
        y[i * incy] = c * yi - sc * xi;
    }
}

void daxpy(std::size_t n, double a, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(xv, av, yv));
    }
    for (; i < n; ++i) {
        y[i] += a * x[i];
    }
}

double ddot(std::size_t n, const double* x, const double* y) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) {
        sum += x[i] * y[i];
    }
    return sum;
}

void dscal(std::size_t n, double a, double* x) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), av));
    }
    for (; i < n; ++i) {
        x[i] *= a;
    }
}

}  // namespace

const KernelTable table = {
    "avx2", caxpy, caxpyc, cdotu, cdotc, cscal, crot, daxpy, ddot, dscal,
};

}  // namespace qclip::kernels::avx2

#endif  // QCLIP_HAVE_AVX2
