#pragma once

// FFTW plan cache and aligned storage shared by the spectral code.

#include <fftw3.h>

#include <cstddef>
#include <new>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat::detail {

template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) {}
    T* allocate(std::size_t n) {
        void* p = fftw_malloc(n * sizeof(T));
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { fftw_free(p); }
    template <class U>
    bool operator==(const FftwAllocator<U>&) const { return true; }
};

using rvec = std::vector<double, FftwAllocator<double>>;
using cvec = std::vector<cplx, FftwAllocator<cplx>>;

// Unnormalized 2D transforms on an m x m grid.  Half spectra are m x (m/2+1).
class Fft2 {
public:
    explicit Fft2(int m);
    ~Fft2();
    Fft2(const Fft2&) = delete;
    Fft2& operator=(const Fft2&) = delete;

    int m() const { return m_; }
    int half() const { return m_ / 2 + 1; }

    void r2c(const double* in, cplx* out) const;
    // destroys `in`
    void c2r(cplx* in, double* out) const;
    void forward(const cplx* in, cplx* out) const;
    void backward(const cplx* in, cplx* out) const;

private:
    int m_;
    fftw_plan r2c_ = nullptr, c2r_ = nullptr, fwd_ = nullptr, bwd_ = nullptr;
};

// Cached per size; safe to call from several threads.
const Fft2& fft2(int m);

}  // namespace muskat::detail
