#pragma once

#include <complex>
#include <cstddef>

// AVX2+FMA variants of the reference kernels. Only compiled on x86-64; callers
// must check kernels::cpu_supports_avx2() (the dispatcher does) before use.

#if defined(__x86_64__) || defined(_M_X64)
#define MLMC_HAVE_AVX2_KERNELS 1
#else
#define MLMC_HAVE_AVX2_KERNELS 0
#endif

#if MLMC_HAVE_AVX2_KERNELS

namespace mlmc::kernels::avx2 {

double dot(const double* x, const double* y, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void cmul_acc(const std::complex<double>* w, const std::complex<double>* z,
              std::complex<double>* y, std::size_t n);
void cmulc_acc(const std::complex<double>* w, const std::complex<double>* g,
               std::complex<double>* t, std::size_t n);
void couter_acc(double a, const std::complex<double>* g, const std::complex<double>* z,
                std::complex<double>* dw, std::size_t n);
void gelu(const double* x, double* y, std::size_t n);
void gelu_vjp(const double* x, const double* g, double* dx, std::size_t n);
void adam_step(double* theta, double* m, double* v, const double* g,
               std::size_t n, double alpha, double beta1, double beta2,
               double eps, double c1, double c2);

}  // namespace mlmc::kernels::avx2

#endif  // MLMC_HAVE_AVX2_KERNELS
