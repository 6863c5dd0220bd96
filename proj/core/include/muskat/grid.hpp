#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace muskat {

using cplx = std::complex<double>;

// Square periodic box [0,l)^2 sampled on n x n points.  Sample (i,j) sits at
// x = (i h, j h), row-major, i running along x1.
struct Grid {
    int n = 128;
    double l = 32.0;

    Grid() = default;
    Grid(int n_, double l_);

    double h() const { return l / n; }
    std::size_t size() const { return std::size_t(n) * std::size_t(n); }
    // signed wave number of array index p
    int wave(int p) const { return p < n / 2 ? p : p - n; }
    double xi(int p) const;
    bool nyquist(int p) const { return p == n / 2; }
    double xi_max() const;

    bool operator==(const Grid& o) const { return n == o.n && l == o.l; }
};

struct RealField {
    Grid grid;
    std::vector<double> v;

    RealField() = default;
    explicit RealField(const Grid& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

    double& operator()(int i, int j) { return v[std::size_t(i) * grid.n + j]; }
    double operator()(int i, int j) const { return v[std::size_t(i) * grid.n + j]; }
};

// Coefficients c_k with f(x) = sum_k c_k exp(i xi_k . x) (mean-value convention).
struct SpectralField {
    Grid grid;
    std::vector<cplx> c;

    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid(g), c(g.size(), cplx(0.0)) {}

    cplx& operator()(int p, int q) { return c[std::size_t(p) * grid.n + q]; }
    const cplx& operator()(int p, int q) const { return c[std::size_t(p) * grid.n + q]; }
};

struct MultiplierTable {
    Grid grid;
    std::vector<cplx> m;

    MultiplierTable() = default;
    explicit MultiplierTable(const Grid& g) : grid(g), m(g.size(), cplx(0.0)) {}

    cplx& operator()(int p, int q) { return m[std::size_t(p) * grid.n + q]; }
    const cplx& operator()(int p, int q) const { return m[std::size_t(p) * grid.n + q]; }
};

// Fixed-order pairwise summation; the result does not depend on threading.
double pairwise_sum(std::span<const double> x);

RealField operator+(const RealField& a, const RealField& b);
RealField operator-(const RealField& a, const RealField& b);
RealField operator*(double s, const RealField& a);
SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);

// Discrete L2 norm of samples, sqrt(h^2 sum f^2).
double l2_norm(const RealField& f);
double l2_inner(const RealField& a, const RealField& b);
double max_abs(const RealField& f);

}  // namespace muskat
