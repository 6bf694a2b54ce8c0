#pragma once

// Exponentially scaled modified Bessel functions (GSL backed).
namespace slabgreen::special {

double i0_scaled(double x);  // e^{-x} I0(x)
double i1_scaled(double x);  // e^{-x} I1(x)
double k0_scaled(double x);  // e^{x} K0(x)
double k1_scaled(double x);  // e^{x} K1(x)

}  // namespace slabgreen::special
