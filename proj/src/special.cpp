#include "special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

namespace slabgreen::special {
namespace {

void quiet() {
    static const bool once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}

template <int (*F)(double, gsl_sf_result*)>
double call(double x) {
    quiet();
    gsl_sf_result r;
    if (F(x, &r) != GSL_SUCCESS) return 0.0;
    return r.val;
}

}  // namespace

double i0_scaled(double x) { return call<gsl_sf_bessel_I0_scaled_e>(x); }
double i1_scaled(double x) { return call<gsl_sf_bessel_I1_scaled_e>(x); }
double k0_scaled(double x) { return call<gsl_sf_bessel_K0_scaled_e>(x); }
double k1_scaled(double x) { return call<gsl_sf_bessel_K1_scaled_e>(x); }

}  // namespace slabgreen::special
