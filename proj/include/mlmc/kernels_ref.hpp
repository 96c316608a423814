#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

// Scalar reference kernels. These define the semantics; the SIMD variants in
// kernels_avx2.hpp must agree with them (see tests/test_kernels.cpp).

namespace mlmc::kernels::ref {

inline double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

inline double sumsq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

inline double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

// y += a*x
inline void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline void scal(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

// out = a - b
inline void sub(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

// y += w .* z, elementwise complex
inline void cmul_acc(const std::complex<double>* w, const std::complex<double>* z,
                     std::complex<double>* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double wr = w[i].real(), wi = w[i].imag();
        const double zr = z[i].real(), zi = z[i].imag();
        y[i] += std::complex<double>(wr * zr - wi * zi, wr * zi + wi * zr);
    }
}

// t += conj(w) .* g
inline void cmulc_acc(const std::complex<double>* w, const std::complex<double>* g,
                      std::complex<double>* t, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double wr = w[i].real(), wi = w[i].imag();
        const double gr = g[i].real(), gi = g[i].imag();
        t[i] += std::complex<double>(wr * gr + wi * gi, wr * gi - wi * gr);
    }
}

// dw += a * g .* conj(z), a real
inline void couter_acc(double a, const std::complex<double>* g, const std::complex<double>* z,
                       std::complex<double>* dw, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double gr = g[i].real(), gi = g[i].imag();
        const double zr = z[i].real(), zi = z[i].imag();
        dw[i] += std::complex<double>(a * (gr * zr + gi * zi), a * (gi * zr - gr * zi));
    }
}

namespace detail {
// tanh via exp, written so the AVX2 variant can mirror it term by term:
// tanh(x) = sign(x) * (1 - t) / (1 + t),  t = exp(-2|x|).
inline double tanh_via_exp(double x) {
    const double ax = std::fabs(x);
    const double t = std::exp(-2.0 * ax);
    const double r = (1.0 - t) / (1.0 + t);
    return x < 0.0 ? -r : r;
}

constexpr double kGeluC0 = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluC1 = 0.044715;
}  // namespace detail

// gelu(x) = 0.5*x*(1 + tanh(c0*(x + c1*x^3)))
inline void gelu(const double* x, double* y, std::size_t n) {
    using namespace detail;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x[i];
        const double u = kGeluC0 * (v + kGeluC1 * v * v * v);
        y[i] = 0.5 * v * (1.0 + tanh_via_exp(u));
    }
}

// dx = g * gelu'(x)
inline void gelu_vjp(const double* x, const double* g, double* dx, std::size_t n) {
    using namespace detail;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x[i];
        const double u = kGeluC0 * (v + kGeluC1 * v * v * v);
        const double t = tanh_via_exp(u);
        const double du = kGeluC0 * (1.0 + 3.0 * kGeluC1 * v * v);
        dx[i] = g[i] * (0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * du);
    }
}

// Fused Adam update. c1 = 1/(1-beta1^t), c2 = 1/(1-beta2^t) are precomputed
// by the caller so the kernel stays branch-free.
inline void adam_step(double* theta, double* m, double* v, const double* g,
                      std::size_t n, double alpha, double beta1, double beta2,
                      double eps, double c1, double c2) {
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = g[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
        v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
        const double mhat = m[i] * c1;
        const double vhat = v[i] * c2;
        theta[i] -= alpha * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace mlmc::kernels::ref
