#include "mlmc/kernels.hpp"

#include <atomic>
#include <stdexcept>

#include "mlmc/kernels_avx2.hpp"
#include "mlmc/kernels_ref.hpp"

namespace mlmc::kernels {

namespace {

constexpr Vtable kScalarTable{
    &ref::dot,       &ref::sumsq,      &ref::sum,  &ref::axpy,
    &ref::scal,      &ref::sub,        &ref::cmul_acc, &ref::cmulc_acc,
    &ref::couter_acc, &ref::gelu,      &ref::gelu_vjp, &ref::adam_step,
};

#if MLMC_HAVE_AVX2_KERNELS
constexpr Vtable kAvx2Table{
    &avx2::dot,       &avx2::sumsq,      &avx2::sum,  &avx2::axpy,
    &avx2::scal,      &avx2::sub,        &avx2::cmul_acc, &avx2::cmulc_acc,
    &avx2::couter_acc, &avx2::gelu,      &avx2::gelu_vjp, &avx2::adam_step,
};
#endif

struct State {
    const Vtable* table;
    Backend backend;
};

State detect() {
#if MLMC_HAVE_AVX2_KERNELS
    if (cpu_supports_avx2()) return {&kAvx2Table, Backend::avx2};
#endif
    return {&kScalarTable, Backend::scalar};
}

State& state() {
    static State s = detect();
    return s;
}

}  // namespace

bool cpu_supports_avx2() {
#if MLMC_HAVE_AVX2_KERNELS
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

void set_backend(Backend b) {
    switch (b) {
        case Backend::scalar:
            state() = {&kScalarTable, Backend::scalar};
            return;
        case Backend::avx2:
#if MLMC_HAVE_AVX2_KERNELS
            if (cpu_supports_avx2()) {
                state() = {&kAvx2Table, Backend::avx2};
                return;
            }
#endif
            throw std::runtime_error("avx2 kernels not available on this machine");
    }
    throw std::runtime_error("unknown kernel backend");
}

Backend active_backend() { return state().backend; }

std::string backend_name() {
    return state().backend == Backend::avx2 ? "avx2" : "scalar";
}

const Vtable& table() { return *state().table; }

}  // namespace mlmc::kernels
