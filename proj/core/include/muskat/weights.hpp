#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat {

enum class WeightKind { Unit, LogPow, TailBuilt };

// A weight kappa >= 1.  LogPow(a) is log(4 + r)^a.  TailBuilt stores levels
// eta_j at radii r_j, interpolated linearly in log(4 + r) (through the origin
// of that variable below r_0, constant past the last radius) and
// kappa = max(1, sqrt(eta)).
class Weight {
public:
    static Weight unit();
    static Weight log_pow(double a);
    static Weight tail_built(std::vector<double> radii, std::vector<double> levels);
    // Skips the admissibility check; for negative controls only.
    static Weight tail_built_unchecked(std::vector<double> radii, std::vector<double> levels);

    // "kind=unit", "kind=log_pow;a=0.375", "kind=tail_built;breakpoints=..;levels=.."
    static Weight parse(const std::string& spec);
    std::string spec() const;

    double operator()(double r) const;
    WeightKind kind() const { return kind_; }
    double exponent() const { return a_; }
    const std::vector<double>& breakpoints() const { return r_; }
    const std::vector<double>& levels() const { return eta_; }

private:
    WeightKind kind_ = WeightKind::Unit;
    double a_ = 0.0;
    std::vector<double> r_, eta_;
    double eta_at(double r) const;
};

struct ValidationReport {
    bool monotone = false;      // (H1)
    bool doubling = false;      // (H2)
    bool log_bounded = false;   // (H3)
    double c0 = 0.0;            // measured sup kappa(2r)/kappa(r)
    bool pass() const { return monotone && doubling && log_bounded; }
};

// 400 log-uniform radii on [1e-3, 1e6].
std::vector<double> default_radii(int count = 400, double lo = 1e-3, double hi = 1e6);

// Throws std::domain_error when kappa < 1 at any sample.
ValidationReport validate_admissible(const Weight& k, const std::vector<double>& radii);

struct PhiValue {
    double phi;
    double rel_err;
    bool flagged;
};
// phi(lambda) = 4 pi int_0^inf (1 - cos r) r^{-5/2} kappa(lambda / r) dr
PhiValue phi_value(const Weight& k, double lambda);
// The kappa = 1 value 4 pi int (1 - cos r) r^{-5/2} dr.
double phi_unit();

class PhiTable {
public:
    PhiTable(const Weight& k, std::vector<double> lambdas);
    // Grid |xi| values merged with a log-spaced refinement of [1e-3, 1e6].
    static std::shared_ptr<const PhiTable> for_grid(const Weight& k, const Grid& g, int per_decade = 20);
    static std::vector<double> log_nodes(int per_decade, double lo = 1e-3, double hi = 1e6);

    // Monotone cubic interpolation in log(lambda); exact at table nodes.
    double operator()(double lambda) const;
    const Weight& weight() const { return w_; }
    const std::vector<double>& lambdas() const { return lam_; }
    const std::vector<double>& values() const { return phi_; }
    const std::vector<double>& errors() const { return err_; }
    bool any_flagged() const { return flagged_; }
    double phi0() const { return phi_zero_; }

    // |xi|^s phi(|xi|)^p, zero at xi = 0 and on Nyquist lines.
    MultiplierTable symbol(const Grid& g, double s, int p = 1) const;

private:
    Weight w_;
    std::vector<double> lam_, phi_, err_;
    double phi_zero_ = 0.0;
    bool flagged_ = false;
    std::shared_ptr<const void> interp_;
};

// min and max of phi(lambda)/kappa(lambda) over the table nodes in [lo, hi].
std::pair<double, double> equivalence_constants(const PhiTable& p, double lo = 1e-3, double hi = 1e6);

struct GrowthReport {
    double sigma = 0.0;
    double c_kappa = 0.0;    // smallest C with r^s k(1/r) <= C mu^s k(1/mu), r <= mu
    double c_kappa2 = 0.0;   // same with kappa^2
    double lo = 0.0, hi = 0.0;
};
GrowthReport weight_growth_check(const Weight& k, double sigma, double lo = 1e-4, double hi = 1e4,
                                 int count = 240);
// C_sigma over nested ranges 10^{+-2}, 10^{+-4}, 10^{+-6}; bounded when the
// last widening changes it by less than 5%.
struct GrowthSweep {
    std::vector<GrowthReport> ranges;
    bool bounded = false;
};
GrowthSweep weight_growth_sweep(const Weight& k, double sigma);

struct RadialTable {
    std::vector<double> r, omega;
};
RadialTable read_radial_table(const std::string& path);

// Dyadic tail-threshold construction for a radial density omega on R^2.
Weight build_weight_from_spectrum(const RadialTable& omega);
// int eta(|x|) omega(x) dx and int omega dx by trapezoid sums over the table.
std::pair<double, double> enhanced_integral(const Weight& k, const RadialTable& omega);

}  // namespace muskat
