#include "qclip/kernels.hpp"

namespace qclip::kernels::scalar {

namespace {

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += a * x[i];
    }
}

void caxpyc(std::size_t n, cplx a, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += a * std::conj(x[i]);
    }
}

cplx cdotu(std::size_t n, const cplx* x, const cplx* y) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

cplx cdotc(std::size_t n, const cplx* x, const cplx* y) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::conj(x[i]) * y[i];
    }
    return acc;
}

void cscal(std::size_t n, cplx a, cplx* x) {
    for (std::size_t i = 0; i < n; ++i) {
        x[i] *= a;
    }
}

void crot(std::size_t n, cplx* x, std::ptrdiff_t incx, cplx* y, std::ptrdiff_t incy, double c,
          cplx s) {
    const cplx sc = std::conj(s);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx xi = x[i * incx];
        const cplx yi = y[i * incy];
        x[i * incx] = c * xi + s * yi;
        y[i * incy] = c * yi - sc * xi;
    }
}

void daxpy(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += a * x[i];
    }
}

double ddot(std::size_t n, const double* x, const double* y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

void dscal(std::size_t n, double a, double* x) {
    for (std::size_t i = 0; i < n; ++i) {
        x[i] *= a;
    }
}

}  // namespace

const KernelTable table = {
    "scalar", caxpy, caxpyc, cdotu, cdotc, cscal, crot, daxpy, ddot, dscal,
};

}  // namespace qclip::kernels::scalar
