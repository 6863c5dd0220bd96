#include "numerics.hpp"

#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_expint.h>

#include <mutex>

namespace muskat::detail {

void quiet_gsl() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

Integrator::Integrator(std::size_t limit) : limit_(limit) {
    quiet_gsl();
    ws_ = gsl_integration_workspace_alloc(limit);
    cycle_ = gsl_integration_workspace_alloc(limit);
}

Integrator::~Integrator() {
    gsl_integration_workspace_free(ws_);
    gsl_integration_workspace_free(cycle_);
}

double sine_integral(double x) {
    quiet_gsl();
    return gsl_sf_Si(x);
}
double cosine_integral(double x) {
    quiet_gsl();
    return gsl_sf_Ci(x);
}
double bessel_j0(double x) { return gsl_sf_bessel_J0(x); }
double bessel_j1(double x) { return gsl_sf_bessel_J1(x); }

}  // namespace muskat::detail
