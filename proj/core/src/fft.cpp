#include "fft.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace muskat::detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* fc(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }
}  // namespace

Fft2::Fft2(int m) : m_(m) {
    const std::size_t nr = std::size_t(m) * m;
    const std::size_t nh = std::size_t(m) * (m / 2 + 1);
    rvec r(nr);
    cvec h(nh), a(nr), b(nr);
    const unsigned flags = FFTW_ESTIMATE;
    r2c_ = fftw_plan_dft_r2c_2d(m, m, r.data(), fc(h.data()), flags);
    c2r_ = fftw_plan_dft_c2r_2d(m, m, fc(h.data()), r.data(), flags);
    fwd_ = fftw_plan_dft_2d(m, m, fc(a.data()), fc(b.data()), FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_2d(m, m, fc(a.data()), fc(b.data()), FFTW_BACKWARD, flags);
}

Fft2::~Fft2() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
}

void Fft2::r2c(const double* in, cplx* out) const {
    fftw_execute_dft_r2c(r2c_, const_cast<double*>(in), fc(out));
}
void Fft2::c2r(cplx* in, double* out) const { fftw_execute_dft_c2r(c2r_, fc(in), out); }
void Fft2::forward(const cplx* in, cplx* out) const { fftw_execute_dft(fwd_, fc(in), fc(out)); }
void Fft2::backward(const cplx* in, cplx* out) const { fftw_execute_dft(bwd_, fc(in), fc(out)); }

const Fft2& fft2(int m) {
    // mutex first so it outlives the cache at exit
    std::mutex& mtx = planner_mutex();
    static std::map<int, std::unique_ptr<Fft2>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, std::make_unique<Fft2>(m)).first;
    return *it->second;
}

}  // namespace muskat::detail
