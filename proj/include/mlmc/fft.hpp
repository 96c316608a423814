#pragma once

#include <complex>
#include <cstddef>
#include <cstdlib>
#include <new>

// Thin wrapper over FFTW double-precision transforms with a process-wide plan
// cache (FFTW_ESTIMATE plans, so algorithm choice is deterministic). All
// transforms are unnormalized, FFTW sign conventions:
//   forward  (r2c):  sum_x f(x) e^{-2*pi*i*k*x/n}
//   backward (c2r):  sum_k F(k) e^{+2*pi*i*k*x/n}
// Buffers passed in must come from AlignedVec (64-byte alignment).

namespace mlmc::fft {

// Minimal 64-byte-aligned buffer; FFTW plans record buffer alignment, so all
// execution arrays share this allocator.
template <typename T>
class AlignedVec {
  public:
    AlignedVec() = default;
    explicit AlignedVec(std::size_t n) { resize(n); }
    AlignedVec(const AlignedVec& other) { *this = other; }
    AlignedVec& operator=(const AlignedVec& other) {
        if (this != &other) {
            resize(other.size_);
            for (std::size_t i = 0; i < size_; ++i) data_[i] = other.data_[i];
        }
        return *this;
    }
    AlignedVec(AlignedVec&& other) noexcept
        : data_(other.data_), size_(other.size_), cap_(other.cap_) {
        other.data_ = nullptr;
        other.size_ = 0;
        other.cap_ = 0;
    }
    AlignedVec& operator=(AlignedVec&& other) noexcept {
        if (this != &other) {
            release();
            data_ = other.data_;
            size_ = other.size_;
            cap_ = other.cap_;
            other.data_ = nullptr;
            other.size_ = 0;
            other.cap_ = 0;
        }
        return *this;
    }
    ~AlignedVec() { release(); }

    // Grow-only: shrinking keeps the allocation so resolution switches on hot
    // paths do not reallocate.
    void resize(std::size_t n) {
        if (n <= cap_) {
            size_ = n;
            return;
        }
        T* fresh = static_cast<T*>(::operator new[](n * sizeof(T), std::align_val_t(64)));
        for (std::size_t i = 0; i < n; ++i) new (fresh + i) T();
        release();
        data_ = fresh;
        size_ = n;
        cap_ = n;
    }
    void fill(const T& v) {
        for (std::size_t i = 0; i < size_; ++i) data_[i] = v;
    }

    T* data() { return data_; }
    const T* data() const { return data_; }
    std::size_t size() const { return size_; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

  private:
    void release() {
        if (data_) ::operator delete[](data_, std::align_val_t(64));
        data_ = nullptr;
        size_ = 0;
        cap_ = 0;
    }
    T* data_ = nullptr;
    std::size_t size_ = 0;
    std::size_t cap_ = 0;
};

inline std::size_t half_cols(int r) { return static_cast<std::size_t>(r / 2 + 1); }
inline std::size_t spectrum_size_2d(int r) { return static_cast<std::size_t>(r) * half_cols(r); }
inline std::size_t spectrum_size_1d(int r) { return half_cols(r); }

// 2D r x r real -> r x (r/2+1) complex.
void rfft2(int r, const double* in, std::complex<double>* out);
// 2D inverse; FFTW's multidimensional c2r clobbers the input array.
void irfft2(int r, std::complex<double>* in, double* out);

void rfft1(int r, const double* in, std::complex<double>* out);
void irfft1(int r, std::complex<double>* in, double* out);

// DCT-I (FFTW REDFT00) applied along every axis, unnormalized.
void dct1_2d(int r, const double* in, double* out);
void dct1_1d(int r, const double* in, double* out);

// Cached plan pair for repeated transforms of one size (avoids the plan-cache
// lookup on hot paths). backward() clobbers its complex input.
class Transform {
  public:
    Transform() = default;
    Transform(int dim, int r);
    void forward(const double* in, std::complex<double>* out) const;
    void backward(std::complex<double>* in, double* out) const;

  private:
    const void* fwd_ = nullptr;
    const void* bwd_ = nullptr;
};

}  // namespace mlmc::fft
