#pragma once

#include <complex>
#include <cstddef>
#include <string>

// Runtime-dispatched arithmetic kernels. The scalar reference implementations
// live in kernels_ref.hpp; on x86-64 with AVX2 the dispatcher selects the
// vectorized variants at startup. Both backends are equivalence-tested.

namespace mlmc::kernels {

enum class Backend { scalar, avx2 };

bool cpu_supports_avx2();

// Select a backend explicitly (used by tests/benchmarks). Throws
// std::runtime_error if the backend is unavailable on this machine.
void set_backend(Backend b);
Backend active_backend();
std::string backend_name();

struct Vtable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    void (*sub)(const double*, const double*, double*, std::size_t);
    void (*cmul_acc)(const std::complex<double>*, const std::complex<double>*,
                     std::complex<double>*, std::size_t);
    void (*cmulc_acc)(const std::complex<double>*, const std::complex<double>*,
                      std::complex<double>*, std::size_t);
    void (*couter_acc)(double, const std::complex<double>*, const std::complex<double>*,
                       std::complex<double>*, std::size_t);
    void (*gelu)(const double*, double*, std::size_t);
    void (*gelu_vjp)(const double*, const double*, double*, std::size_t);
    void (*adam_step)(double*, double*, double*, const double*, std::size_t,
                      double, double, double, double, double, double);
};

const Vtable& table();

inline double dot(const double* x, const double* y, std::size_t n) { return table().dot(x, y, n); }
inline double sumsq(const double* x, std::size_t n) { return table().sumsq(x, n); }
inline double sum(const double* x, std::size_t n) { return table().sum(x, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { table().axpy(a, x, y, n); }
inline void scal(double a, double* x, std::size_t n) { table().scal(a, x, n); }
inline void sub(const double* a, const double* b, double* out, std::size_t n) { table().sub(a, b, out, n); }
inline void cmul_acc(const std::complex<double>* w, const std::complex<double>* z,
                     std::complex<double>* y, std::size_t n) { table().cmul_acc(w, z, y, n); }
inline void cmulc_acc(const std::complex<double>* w, const std::complex<double>* g,
                      std::complex<double>* t, std::size_t n) { table().cmulc_acc(w, g, t, n); }
inline void couter_acc(double a, const std::complex<double>* g, const std::complex<double>* z,
                       std::complex<double>* dw, std::size_t n) { table().couter_acc(a, g, z, dw, n); }
inline void gelu(const double* x, double* y, std::size_t n) { table().gelu(x, y, n); }
inline void gelu_vjp(const double* x, const double* g, double* dx, std::size_t n) { table().gelu_vjp(x, g, dx, n); }
inline void adam_step(double* theta, double* m, double* v, const double* g,
                      std::size_t n, double alpha, double beta1, double beta2,
                      double eps, double c1, double c2) {
    table().adam_step(theta, m, v, g, n, alpha, beta1, beta2, eps, c1, c2);
}

}  // namespace mlmc::kernels
