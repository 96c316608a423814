#include "mlmc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace mlmc::fft {

namespace {

enum class Kind { r2c2d, c2r2d, r2c1d, c2r1d, dct2d, dct1d };

struct PlanEntry {
    fftw_plan plan = nullptr;
    AlignedVec<double> rbuf;
    AlignedVec<std::complex<double>> cbuf;
};

std::mutex g_mutex;
std::map<std::pair<Kind, int>, PlanEntry>& cache() {
    static std::map<std::pair<Kind, int>, PlanEntry> c;
    return c;
}

fftw_complex* fc(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

const PlanEntry& get_plan(Kind kind, int r) {
    std::lock_guard<std::mutex> lock(g_mutex);
    auto key = std::make_pair(kind, r);
    auto it = cache().find(key);
    if (it != cache().end()) return it->second;

    PlanEntry e;
    const std::size_t n1 = static_cast<std::size_t>(r);
    switch (kind) {
        case Kind::r2c2d:
            e.rbuf.resize(n1 * n1);
            e.cbuf.resize(spectrum_size_2d(r));
            e.plan = fftw_plan_dft_r2c_2d(r, r, e.rbuf.data(), fc(e.cbuf.data()), FFTW_ESTIMATE);
            break;
        case Kind::c2r2d:
            e.rbuf.resize(n1 * n1);
            e.cbuf.resize(spectrum_size_2d(r));
            e.plan = fftw_plan_dft_c2r_2d(r, r, fc(e.cbuf.data()), e.rbuf.data(), FFTW_ESTIMATE);
            break;
        case Kind::r2c1d:
            e.rbuf.resize(n1);
            e.cbuf.resize(spectrum_size_1d(r));
            e.plan = fftw_plan_dft_r2c_1d(r, e.rbuf.data(), fc(e.cbuf.data()), FFTW_ESTIMATE);
            break;
        case Kind::c2r1d:
            e.rbuf.resize(n1);
            e.cbuf.resize(spectrum_size_1d(r));
            e.plan = fftw_plan_dft_c2r_1d(r, fc(e.cbuf.data()), e.rbuf.data(), FFTW_ESTIMATE);
            break;
        case Kind::dct2d:
            e.rbuf.resize(n1 * n1);
            e.plan = fftw_plan_r2r_2d(r, r, e.rbuf.data(), e.rbuf.data(), FFTW_REDFT00,
                                      FFTW_REDFT00, FFTW_ESTIMATE);
            break;
        case Kind::dct1d:
            e.rbuf.resize(n1);
            e.plan = fftw_plan_r2r_1d(r, e.rbuf.data(), e.rbuf.data(), FFTW_REDFT00, FFTW_ESTIMATE);
            break;
    }
    auto [pos, inserted] = cache().emplace(key, std::move(e));
    (void)inserted;
    return pos->second;
}

}  // namespace

void rfft2(int r, const double* in, std::complex<double>* out) {
    const PlanEntry& e = get_plan(Kind::r2c2d, r);
    fftw_execute_dft_r2c(e.plan, const_cast<double*>(in), fc(out));
}

void irfft2(int r, std::complex<double>* in, double* out) {
    const PlanEntry& e = get_plan(Kind::c2r2d, r);
    fftw_execute_dft_c2r(e.plan, fc(in), out);
}

void rfft1(int r, const double* in, std::complex<double>* out) {
    const PlanEntry& e = get_plan(Kind::r2c1d, r);
    fftw_execute_dft_r2c(e.plan, const_cast<double*>(in), fc(out));
}

void irfft1(int r, std::complex<double>* in, double* out) {
    const PlanEntry& e = get_plan(Kind::c2r1d, r);
    fftw_execute_dft_c2r(e.plan, fc(in), out);
}

void dct1_2d(int r, const double* in, double* out) {
    const PlanEntry& e = get_plan(Kind::dct2d, r);
    if (in != out) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(r) * r; ++i) out[i] = in[i];
    }
    fftw_execute_r2r(e.plan, out, out);
}

void dct1_1d(int r, const double* in, double* out) {
    const PlanEntry& e = get_plan(Kind::dct1d, r);
    if (in != out) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(r); ++i) out[i] = in[i];
    }
    fftw_execute_r2r(e.plan, out, out);
}

Transform::Transform(int dim, int r) {
    if (dim == 2) {
        fwd_ = &get_plan(Kind::r2c2d, r);
        bwd_ = &get_plan(Kind::c2r2d, r);
    } else {
        fwd_ = &get_plan(Kind::r2c1d, r);
        bwd_ = &get_plan(Kind::c2r1d, r);
    }
}

void Transform::forward(const double* in, std::complex<double>* out) const {
    const auto* e = static_cast<const PlanEntry*>(fwd_);
    fftw_execute_dft_r2c(e->plan, const_cast<double*>(in), fc(out));
}

void Transform::backward(std::complex<double>* in, double* out) const {
    const auto* e = static_cast<const PlanEntry*>(bwd_);
    fftw_execute_dft_c2r(e->plan, fc(in), out);
}

}  // namespace mlmc::fft
