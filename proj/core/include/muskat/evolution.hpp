#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "muskat/diagnostics.hpp"
#include "muskat/fields.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/weights.hpp"

namespace muskat {

struct InitialData {
    enum class Kind { Zero, Gaussian, MultiBump, ModeSum, FromFile };
    Kind kind = Kind::Zero;
    double amplitude = 0.0;
    double width = 1.0;
    Vec2 center{16.0, 16.0};
    std::vector<Bump> bumps;
    std::vector<Mode> modes;
    std::string path;   // n x n samples, whitespace separated, row-major

    RealField realize(const Grid& g) const;
};

struct SimConfig {
    Grid grid;
    double epsilon = 0.1;
    Weight weight = Weight::unit();
    QuadratureSpec quad;
    double dt_initial = 0.1;
    double cfl = 0.4;
    double t_end = 1.0;
    int record_every = 1;
    int checkpoint_every = 0;   // 0 disables
    InitialData initial;
    bool linear_only = false;   // drop the nonlinear residual
    double beta0 = 1e-2;        // Hoelder exponent of the sup-norm slack monitor

    // throws std::invalid_argument naming the offending field
    void validate() const;
    double viscosity() const;   // 1 / |log eps|
};

struct SimState {
    double t = 0.0;
    SpectralField fhat;
    long step = 0;
    std::vector<DiagnosticsRecord> history;
    double epsilon = 0.1;
};

// Convolution with eps^-2 chi(|x|/eps), chi normalized to unit mass.
RealField mollify_initial(const RealField& f0, double eps);
// Transform of the unit-mass bump at |xi| = rho, eps = 1.
double bump_transform(double rho);

SimState initial_state(const SimConfig& cfg);

struct StepInfo {
    double dt = 0.0;
    int halvings = 0;
    RealField rhs;   // N_eps(f) at the start of the step
};
// One integrating-factor Euler step of
//   f_t = -(nu |xi|^2 + |xi|) f + [N_eps(f) + <D> f].
// Throws std::runtime_error when a norm passes 1e12 or turns non-finite.
SimState step(const SimState& s, const SimConfig& cfg, StepInfo* info = nullptr);
// Time step chosen from the current state.
double choose_dt(const SimState& s, const SimConfig& cfg);

struct RunResult {
    SimState state;
    std::string csv;
    std::string status;    // "completed" or "aborted: ..."
    bool aborted = false;
    // monitors
    bool beyond_log_window = false;        // t exceeded |log eps|
    double max_sup_excess = 0.0;           // max step increase of |f|_inf over the slack
};
// Runs to t_end.  Records every record_every steps (and at both ends); writes
// diagnostics.csv and checkpoints under out_dir when it is not empty.
RunResult run(const SimConfig& cfg, const std::string& out_dir = "");
// Continues from a saved state.
RunResult run_from(SimState s, const SimConfig& cfg, const std::string& out_dir = "");

// "MUSKATCK1", n, l, t, step, epsilon, weight spec, then the coefficients.
void checkpoint_save(const SimState& s, const Weight& w, const std::string& path);
SimState checkpoint_load(const std::string& path, const Grid& expect);
// Weight spec stored in a checkpoint.
std::string checkpoint_weight(const std::string& path);

// Two-column (t, value) files for A_phi, B_phi, lip_f, sup_f and dissipation.
std::vector<std::string> export_plot_data(const std::string& run_dir);

// Atomic write: temporary file, then rename.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace muskat
