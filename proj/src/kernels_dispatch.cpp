#include <cstdlib>

#include "qclip/kernels.hpp"

namespace qclip::kernels {

namespace {

const KernelTable* choose_default() {
    const char* env = std::getenv("QCLIP_KERNELS");
    const std::string want = env ? env : "";
    if (want == "scalar") {
        return &scalar::table;
    }
#if defined(QCLIP_HAVE_AVX2)
    if (want == "avx2") {
        if (!cpu_supports_avx2()) {
            throw Error("QCLIP_KERNELS=avx2 requested but CPU lacks AVX2/FMA");
        }
        return &avx2::table;
    }
    if (want.empty() && cpu_supports_avx2()) {
        return &avx2::table;
    }
#endif
    if (!want.empty() && want != "scalar") {
        throw Error("unknown QCLIP_KERNELS value: " + want);
    }
    return &scalar::table;
}

const KernelTable*& current() {
    static const KernelTable* table = choose_default();
    return table;
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& active() { return *current(); }

void select(const std::string& name) {
    if (name == "scalar") {
        current() = &scalar::table;
        return;
    }
#if defined(QCLIP_HAVE_AVX2)
    if (name == "avx2") {
        if (!cpu_supports_avx2()) {
            throw Error("CPU lacks AVX2/FMA support");
        }
        current() = &avx2::table;
        return;
    }
#endif
    throw Error("unknown kernel table: " + name);
}

}  // namespace qclip::kernels
