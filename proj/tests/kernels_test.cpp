#include <doctest.h>

#include <vector>

#include "qclip/kernels.hpp"
#include "qclip/rng.hpp"

using namespace qclip;
using kernels::KernelTable;

namespace {

std::vector<cplx> random_cvec(std::size_t n, Rng& rng) {
    std::vector<cplx> v(n);
    for (auto& z : v) {
        z = {rng.normal(), rng.normal()};
    }
    return v;
}

std::vector<double> random_dvec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& z : v) {
        z = rng.normal();
    }
    return v;
}

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); }

#if defined(QCLIP_HAVE_AVX2)
constexpr bool kHaveAvx2Build = true;
#else
constexpr bool kHaveAvx2Build = false;
#endif

}  // namespace

TEST_CASE("scalar kernels match hand-computed values") {
    const auto& k = kernels::scalar::table;
    std::vector<cplx> x = {{1, 2}, {3, -1}};
    std::vector<cplx> y = {{0, 1}, {2, 0}};

    CHECK(close(k.cdotu(2, x.data(), y.data()), cplx{4, -1}, 1e-15));
    CHECK(close(k.cdotc(2, x.data(), y.data()), cplx{8, 3}, 1e-15));

    std::vector<cplx> y2 = y;
    k.caxpy(2, {2, 0}, x.data(), y2.data());
    CHECK(close(y2[0], cplx{2, 5}, 1e-15));
    CHECK(close(y2[1], cplx{8, -2}, 1e-15));

    std::vector<cplx> y3 = y;
    k.caxpyc(2, {1, 0}, x.data(), y3.data());
    CHECK(close(y3[0], cplx{1, -1}, 1e-15));
    CHECK(close(y3[1], cplx{5, 1}, 1e-15));
}

TEST_CASE("crot is unitary on the pair") {
    const auto& k = kernels::scalar::table;
    Rng rng(7);
    auto x = random_cvec(9, rng);
    auto y = random_cvec(9, rng);
    double before = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        before += std::norm(x[i]) + std::norm(y[i]);
    }
    const double c = 0.6;
    const cplx s = cplx{0.48, 0.64};  // |s| = 0.8, c^2 + |s|^2 = 1
    k.crot(x.size(), x.data(), 1, y.data(), 1, c, s);
    double after = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        after += std::norm(x[i]) + std::norm(y[i]);
    }
    CHECK(after == doctest::Approx(before).epsilon(1e-13));
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!kHaveAvx2Build || !kernels::cpu_supports_avx2()) {
        MESSAGE("AVX2 unavailable; equivalence suite skipped");
        return;
    }
#if defined(QCLIP_HAVE_AVX2)
    const KernelTable& s = kernels::scalar::table;
    const KernelTable& v = kernels::avx2::table;
    Rng rng(12345);
    const double tol = 1e-12;

    for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 16u, 33u, 64u}) {
        auto x = random_cvec(n, rng);
        auto y = random_cvec(n, rng);
        const cplx a{rng.normal(), rng.normal()};

        CHECK(close(s.cdotu(n, x.data(), y.data()), v.cdotu(n, x.data(), y.data()), tol));
        CHECK(close(s.cdotc(n, x.data(), y.data()), v.cdotc(n, x.data(), y.data()), tol));

        auto ys = y;
        auto yv = y;
        s.caxpy(n, a, x.data(), ys.data());
        v.caxpy(n, a, x.data(), yv.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close(ys[i], yv[i], tol));
        }

        ys = y;
        yv = y;
        s.caxpyc(n, a, x.data(), ys.data());
        v.caxpyc(n, a, x.data(), yv.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close(ys[i], yv[i], tol));
        }

        auto xs = x;
        auto xv = x;
        s.cscal(n, a, xs.data());
        v.cscal(n, a, xv.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close(xs[i], xv[i], tol));
        }

        // crot, contiguous and strided
        for (std::ptrdiff_t inc : {1, 3}) {
            if (n == 0) {
                continue;
            }
            auto base_x = random_cvec(n * inc, rng);
            auto base_y = random_cvec(n * inc, rng);
            auto bx_s = base_x;
            auto by_s = base_y;
            auto bx_v = base_x;
            auto by_v = base_y;
            const double c = 0.8;
            const cplx rot_s{0.36, 0.48};
            s.crot(n, bx_s.data(), inc, by_s.data(), inc, c, rot_s);
            v.crot(n, bx_v.data(), inc, by_v.data(), inc, c, rot_s);
            for (std::size_t i = 0; i < base_x.size(); ++i) {
                CHECK(close(bx_s[i], bx_v[i], tol));
                CHECK(close(by_s[i], by_v[i], tol));
            }
        }

        auto dx = random_dvec(n, rng);
        auto dy = random_dvec(n, rng);
        CHECK(s.ddot(n, dx.data(), dy.data()) ==
              doctest::Approx(v.ddot(n, dx.data(), dy.data())).epsilon(1e-12));
        auto dys = dy;
        auto dyv = dy;
        s.daxpy(n, 1.7, dx.data(), dys.data());
        v.daxpy(n, 1.7, dx.data(), dyv.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(dys[i] == doctest::Approx(dyv[i]).epsilon(1e-12));
        }
        auto dxs = dx;
        auto dxv = dx;
        s.dscal(n, -0.3, dxs.data());
        v.dscal(n, -0.3, dxv.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(dxs[i] == doctest::Approx(dxv[i]).epsilon(1e-12));
        }
    }
#endif
}

TEST_CASE("dispatch can be forced to either table") {
    kernels::select("scalar");
    CHECK(std::string(kernels::active().name) == "scalar");
    if (kHaveAvx2Build && kernels::cpu_supports_avx2()) {
        kernels::select("avx2");
        CHECK(std::string(kernels::active().name) == "avx2");
    }
    CHECK_THROWS_AS(kernels::select("sse9"), Error);
    // restore the default for the rest of the binary
    kernels::select(kHaveAvx2Build && kernels::cpu_supports_avx2() ? "avx2" : "scalar");
}
