#include "mlmc/kernels_avx2.hpp"

#if MLMC_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <cmath>

#include "mlmc/kernels_ref.hpp"

namespace mlmc::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// exp(x) for doubles: range reduction x = k*ln2 + r, degree-13 Taylor on r,
// then scale by 2^k through the exponent bits. Inputs are clamped to the
// finite range; accuracy is ~1 ulp on [-30, 30] which covers the gelu use.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d max_x = _mm256_set1_pd(708.0);
    const __m256d min_x = _mm256_set1_pd(-708.0);

    x = _mm256_min_pd(_mm256_max_pd(x, min_x), max_x);

    __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
    r = _mm256_fnmadd_pd(k, ln2_lo, r);

    // Horner evaluation of sum_{i=0..13} r^i/i!
    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    __m128i k32 = _mm256_cvtpd_epi32(k);
    __m256i k64 = _mm256_cvtepi32_epi64(k32);
    __m256i pow2 = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(pow2));
}

// tanh(x) = sign(x) * (1-t)/(1+t), t = exp(-2|x|), mirroring the reference.
inline __m256d tanh_pd(__m256d x) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d sgn = _mm256_and_pd(x, sign_mask);
    __m256d ax = _mm256_andnot_pd(sign_mask, x);
    __m256d t = exp_pd(_mm256_mul_pd(ax, _mm256_set1_pd(-2.0)));
    __m256d one = _mm256_set1_pd(1.0);
    __m256d r = _mm256_div_pd(_mm256_sub_pd(one, t), _mm256_add_pd(one, t));
    return _mm256_or_pd(r, sgn);
}

const __m256d kGeluC0 = _mm256_set1_pd(mlmc::kernels::ref::detail::kGeluC0);
const __m256d kGeluC1 = _mm256_set1_pd(mlmc::kernels::ref::detail::kGeluC1);

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sumsq(const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (; i + 8 <= n; i += 8) {
        __m256d a = _mm256_loadu_pd(x + i);
        __m256d b = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scal(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

namespace {

// u .* v for interleaved complex lanes:
// [ur*vr - ui*vi, ur*vi + ui*vr] = addsub(dup_re(u)*v, dup_im(u)*swap(v)).
inline __m256d cmul_lanes(__m256d u, __m256d v) {
    __m256d ure = _mm256_movedup_pd(u);
    __m256d uim = _mm256_permute_pd(u, 0xF);
    __m256d vsw = _mm256_permute_pd(v, 0x5);
    return _mm256_addsub_pd(_mm256_mul_pd(ure, v), _mm256_mul_pd(uim, vsw));
}

// conj(u) .* v: same with the imaginary part of u negated.
inline __m256d cmulc_lanes(__m256d u, __m256d v) {
    const __m256d neg = _mm256_set1_pd(-0.0);
    __m256d ure = _mm256_movedup_pd(u);
    __m256d uim = _mm256_xor_pd(_mm256_permute_pd(u, 0xF), neg);
    __m256d vsw = _mm256_permute_pd(v, 0x5);
    return _mm256_addsub_pd(_mm256_mul_pd(ure, v), _mm256_mul_pd(uim, vsw));
}

}  // namespace

void cmul_acc(const std::complex<double>* w, const std::complex<double>* z,
              std::complex<double>* y, std::size_t n) {
    const double* wp = reinterpret_cast<const double*>(w);
    const double* zp = reinterpret_cast<const double*>(z);
    double* yp = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d d = cmul_lanes(_mm256_loadu_pd(wp + 2 * i), _mm256_loadu_pd(zp + 2 * i));
        _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), d));
    }
    for (; i < n; ++i) {
        const double wr = w[i].real(), wi = w[i].imag();
        const double zr = z[i].real(), zi = z[i].imag();
        y[i] += std::complex<double>(wr * zr - wi * zi, wr * zi + wi * zr);
    }
}

void cmulc_acc(const std::complex<double>* w, const std::complex<double>* g,
               std::complex<double>* t, std::size_t n) {
    const double* wp = reinterpret_cast<const double*>(w);
    const double* gp = reinterpret_cast<const double*>(g);
    double* tp = reinterpret_cast<double*>(t);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d d = cmulc_lanes(_mm256_loadu_pd(wp + 2 * i), _mm256_loadu_pd(gp + 2 * i));
        _mm256_storeu_pd(tp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(tp + 2 * i), d));
    }
    for (; i < n; ++i) {
        const double wr = w[i].real(), wi = w[i].imag();
        const double gr = g[i].real(), gi = g[i].imag();
        t[i] += std::complex<double>(wr * gr + wi * gi, wr * gi - wi * gr);
    }
}

void couter_acc(double a, const std::complex<double>* g, const std::complex<double>* z,
                std::complex<double>* dw, std::size_t n) {
    const double* gp = reinterpret_cast<const double*>(g);
    const double* zp = reinterpret_cast<const double*>(z);
    double* dp = reinterpret_cast<double*>(dw);
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        // g * conj(z) = conj(z) * g
        __m256d d = cmulc_lanes(_mm256_loadu_pd(zp + 2 * i), _mm256_loadu_pd(gp + 2 * i));
        d = _mm256_mul_pd(va, d);
        _mm256_storeu_pd(dp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(dp + 2 * i), d));
    }
    for (; i < n; ++i) {
        const double gr = g[i].real(), gi = g[i].imag();
        const double zr = z[i].real(), zi = z[i].imag();
        dw[i] += std::complex<double>(a * (gr * zr + gi * zi), a * (gi * zr - gr * zi));
    }
}

void gelu(const double* x, double* y, std::size_t n) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d v2 = _mm256_mul_pd(v, v);
        __m256d v3 = _mm256_mul_pd(v2, v);
        __m256d u = _mm256_mul_pd(kGeluC0, _mm256_fmadd_pd(kGeluC1, v3, v));
        __m256d t = tanh_pd(u);
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_mul_pd(half, v), _mm256_add_pd(one, t)));
    }
    for (; i < n; ++i) {
        const double v = x[i];
        const double u = ref::detail::kGeluC0 * (v + ref::detail::kGeluC1 * v * v * v);
        y[i] = 0.5 * v * (1.0 + ref::detail::tanh_via_exp(u));
    }
}

void gelu_vjp(const double* x, const double* g, double* dx, std::size_t n) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d three_c1 = _mm256_set1_pd(3.0 * mlmc::kernels::ref::detail::kGeluC1);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d v2 = _mm256_mul_pd(v, v);
        __m256d v3 = _mm256_mul_pd(v2, v);
        __m256d u = _mm256_mul_pd(kGeluC0, _mm256_fmadd_pd(kGeluC1, v3, v));
        __m256d t = tanh_pd(u);
        __m256d du = _mm256_mul_pd(kGeluC0, _mm256_fmadd_pd(three_c1, v2, one));
        __m256d sech2 = _mm256_fnmadd_pd(t, t, one);  // 1 - t^2
        __m256d d = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_mul_pd(half, v), sech2), du,
                                    _mm256_mul_pd(half, _mm256_add_pd(one, t)));
        _mm256_storeu_pd(dx + i, _mm256_mul_pd(_mm256_loadu_pd(g + i), d));
    }
    for (; i < n; ++i) {
        const double v = x[i];
        const double u = ref::detail::kGeluC0 * (v + ref::detail::kGeluC1 * v * v * v);
        const double t = ref::detail::tanh_via_exp(u);
        const double du = ref::detail::kGeluC0 * (1.0 + 3.0 * ref::detail::kGeluC1 * v * v);
        dx[i] = g[i] * (0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * du);
    }
}

void adam_step(double* theta, double* m, double* v, const double* g,
               std::size_t n, double alpha, double beta1, double beta2,
               double eps, double c1, double c2) {
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vom1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d vom2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vc1 = _mm256_set1_pd(c1);
    const __m256d vc2 = _mm256_set1_pd(c2);
    const __m256d veps = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d gi = _mm256_loadu_pd(g + i);
        __m256d mi = _mm256_fmadd_pd(vom1, gi, _mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)));
        __m256d vi = _mm256_fmadd_pd(vom2, _mm256_mul_pd(gi, gi),
                                     _mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        __m256d mhat = _mm256_mul_pd(mi, vc1);
        __m256d vhat = _mm256_mul_pd(vi, vc2);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d upd = _mm256_div_pd(_mm256_mul_pd(va, mhat), denom);
        _mm256_storeu_pd(theta + i, _mm256_sub_pd(_mm256_loadu_pd(theta + i), upd));
    }
    for (; i < n; ++i) {
        const double gi = g[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
        v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
        theta[i] -= alpha * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
    }
}

}  // namespace mlmc::kernels::avx2

#endif  // MLMC_HAVE_AVX2_KERNELS
