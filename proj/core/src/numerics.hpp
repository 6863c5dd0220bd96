#pragma once

// Thin wrappers over GSL adaptive quadrature and special functions.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <memory>
#include <type_traits>

namespace muskat::detail {

struct QuadResult {
    double value = 0.0;
    double abserr = 0.0;
    int status = 0;
    // roundoff limits leave the error estimate meaningful
    bool trusted() const { return status == 0 || status == GSL_EROUND; }
};

void quiet_gsl();

class Integrator {
public:
    explicit Integrator(std::size_t limit = 4000);
    ~Integrator();
    Integrator(const Integrator&) = delete;
    Integrator& operator=(const Integrator&) = delete;

    template <class F>
    QuadResult qags(F&& f, double a, double b, double epsabs, double epsrel) {
        gsl_function g{&call<F>, vp(f)};
        QuadResult r;
        r.status = gsl_integration_qags(&g, a, b, epsabs, epsrel, limit_, ws_, &r.value, &r.abserr);
        return r;
    }
    template <class F>
    QuadResult qag(F&& f, double a, double b, double epsabs, double epsrel, int key = GSL_INTEG_GAUSS41) {
        gsl_function g{&call<F>, vp(f)};
        QuadResult r;
        r.status = gsl_integration_qag(&g, a, b, epsabs, epsrel, limit_, key, ws_, &r.value, &r.abserr);
        return r;
    }
    template <class F>
    QuadResult qagiu(F&& f, double a, double epsabs, double epsrel) {
        gsl_function g{&call<F>, vp(f)};
        QuadResult r;
        r.status = gsl_integration_qagiu(&g, a, epsabs, epsrel, limit_, ws_, &r.value, &r.abserr);
        return r;
    }
    // int_a^inf f(x) cos(omega x) dx
    template <class F>
    QuadResult qawf_cos(F&& f, double a, double omega, double epsabs) {
        return qawf(f, a, omega, epsabs, GSL_INTEG_COSINE);
    }
    template <class F>
    QuadResult qawf_sin(F&& f, double a, double omega, double epsabs) {
        return qawf(f, a, omega, epsabs, GSL_INTEG_SINE);
    }

private:
    template <class T>
    static void* vp(T& x) {
        return const_cast<void*>(static_cast<const void*>(&x));
    }
    template <class F>
    static double call(double x, void* p) {
        return (*static_cast<std::remove_reference_t<F>*>(p))(x);
    }
    template <class F>
    QuadResult qawf(F& f, double a, double omega, double epsabs, gsl_integration_qawo_enum kind);

    std::size_t limit_;
    gsl_integration_workspace* ws_;
    gsl_integration_workspace* cycle_;
};

template <class F>
QuadResult Integrator::qawf(F& f, double a, double omega, double epsabs, gsl_integration_qawo_enum kind) {
    gsl_integration_qawo_table* t = gsl_integration_qawo_table_alloc(omega, 1.0, kind, 30);
    gsl_function g{&call<F&>, vp(f)};
    QuadResult r;
    r.status = gsl_integration_qawf(&g, a, epsabs, limit_, ws_, cycle_, t, &r.value, &r.abserr);
    gsl_integration_qawo_table_free(t);
    return r;
}

double sine_integral(double x);
double cosine_integral(double x);  // x > 0
double bessel_j0(double x);
double bessel_j1(double x);

}  // namespace muskat::detail
