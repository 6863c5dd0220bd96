#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "muskat/quadrature.hpp"
#include "muskat/spectral.hpp"
#include "muskat/weights.hpp"

namespace muskat {

// Orders of the homogeneous Sobolev norms carried by every record.
inline constexpr std::array<double, 7> kRecordOrders{0.75, 0.875, 2.0, 2.125, 2.25, 25.0 / 12.0, 2.5};

struct DiagnosticsRecord {
    double t = 0.0;
    double A_phi = 0.0;   // |<D>^{2,phi} f|^2
    double B_phi = 0.0;   // |<D>^{5/2,phi} f|^2
    double Z_phi = 0.0;   // |<D>^{3,phi} f|^2
    double mu_phi = 1.0;  // 1 / phi(B/A), 1 at f = 0
    double sup_f = 0.0;
    double lip_f = 0.0;
    std::array<double, 7> hs{};
    double dissipation = 0.0;
    QuadFlags flags;
};

std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);
// Number of columns written per row.
int csv_columns();

// Energies and norms of f.  The dissipation pairing needs -L(f)f; pass it when
// already available, otherwise it is evaluated with q.
DiagnosticsRecord record(const RealField& f, const PhiTable& phi, const QuadratureSpec& q, double t = 0.0,
                         const RealField* rhs = nullptr);
DiagnosticsRecord record(const RealField& f, const Weight& w, const QuadratureSpec& q, double t = 0.0);

struct Pairing {
    double value = 0.0;   // int L(f)f <D>^{4,phi^2} f
    double split = 0.0;   // <<D>^{3/2,phi} L(f)f, <D>^{5/2,phi} f>
    QuadFlags flags;
};
Pairing dissipation_pairing(const RealField& f, const PhiTable& phi, const QuadratureSpec& q,
                            const RealField* rhs = nullptr);

// Coercive parts of the pairing bound under the two Lipschitz normalizations.
struct PairingBound {
    double cubic = 0.0;     // B / (1 + lip^3)
    double bracket = 0.0;   // B / (1 + lip^2)^{3/2}
    double error = 0.0;     // A^{1/2} (1 + A) B mu
};
PairingBound pairing_bound(const DiagnosticsRecord& r);

enum class DifferenceOrder { First, Second, TaylorRemoved };

// m(xi) = int K(alpha . xi) kappa^gamma(1/|alpha|) dalpha / |alpha|^{2+2b} with
// K = |1 - e^{-iu}|^2, |2 - 2 cos u|^2 or |1 - e^{-iu} - iu|^2.
struct KernelSpec {
    DifferenceOrder order = DifferenceOrder::First;
    double b = 0.5;
    int kappa_power = 0;   // 0, 2 or 4
    Weight weight = Weight::unit();

    // throws std::invalid_argument when the integral diverges
    void validate() const;
    // "order=first,b=0.5,gamma=2"; the weight comes separately
    static KernelSpec parse(const std::string& text, const Weight& w = Weight::unit());
    std::string spec() const;
};

struct KernelValue {
    double m = 0.0;
    double abserr = 0.0;
};
// Adaptive angular and radial quadrature, independent of any grid.
KernelValue difference_kernel_multiplier(const KernelSpec& k, const Vec2& xi);
std::vector<KernelValue> difference_kernel_multiplier(const KernelSpec& k, const std::vector<Vec2>& xi);

// |f|_{H^s} / (mu A^{5/2-s} B^{s-2}) for s in (2, 5/2).
double interpolation_probe(const RealField& f, const PhiTable& phi, double s);

struct LipschitzReport {
    double lip = 0.0;
    double bound = 0.0;   // 1 + |f|_inf + A log(2 + B)^{(1-2a)/2}
    double ratio = 0.0;
};
// a is read from the weight: its exponent for LogPow, 0 otherwise.
LipschitzReport lipschitz_probe(const RealField& f, const PhiTable& phi);

}  // namespace muskat
