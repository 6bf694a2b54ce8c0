#pragma once

#include <vector>

namespace slabgreen {

// Target x = (r, 0, z), source y = (rho cos phi, rho sin phi, l).
struct AxiPair {
    double r = 1.0;
    double z = 0.5;
    double rho = 1.0;
    double l = 0.5;
};

// Elliptic: per-image complete elliptic integrals.
// Modal: sine/Bessel eigen-expansion in z, valid for |rho - r| > 0.
// Quadrature: adaptive quadrature in phi of the pointwise kernel.
enum class AngularPath { Auto, Elliptic, Modal, Quadrature };

// Auto switches from Elliptic to Modal at this radial separation.
inline constexpr double kAngularModalSwitch = 0.1;

struct RadialPair {
    double d_rho = 0.0;  // integral of |dG/drho|
    double d_r = 0.0;    // integral of |dG/dr|
};

// int_0^{2pi} cos(phi) (A + B sin^2(phi/2))^{-1/2} dphi and its partial derivatives.
struct RingIntegral {
    double value = 0.0;
    double dA = 0.0;
    double dB = 0.0;
};
RingIntegral ring_cos(double A, double B);

// int_0^{2pi} |G| dphi.
double angular_abs_G(const AxiPair& p, double tol = 1e-10);

// int_0^{2pi} |dG/drho| dphi and int_0^{2pi} |dG/dr| dphi.
RadialPair angular_abs_gradG(const AxiPair& p, double tol = 1e-10);

// int_0^{2pi} G cos(phi) dphi, evaluated by the closed-form path and by quadrature;
// throws PathDisagreement when they differ by more than 2 tol.
double angular_cos_G(const AxiPair& p, double tol = 1e-10);

// int_0^{2pi} dG/drho cos(phi) dphi, cross-checked like angular_cos_G.
double angular_cos_gradG(const AxiPair& p, double tol = 1e-10);

// Single-path evaluations. Auto picks Modal when |rho - r| >= kAngularModalSwitch, else Elliptic.
double cos_G_path(const AxiPair& p, double tol, AngularPath path = AngularPath::Auto);
double cos_gradG_path(const AxiPair& p, double tol, AngularPath path = AngularPath::Auto);

// Contribution of the n = 0 image pair to cos_G (the free-space charge and its first reflection).
double cos_G_direct(const AxiPair& p);

// Contribution of all images with n != 0 to cos_G.
double cos_G_remainder(const AxiPair& p, double tol);

// Coefficients c_k, k = 1..K, with cos kernel = 2 sum_k sin(k pi z) sin(k pi l) c_k:
// c_k = I1(k pi r<) K1(k pi r>), or its rho-derivative when `gradient`. K is chosen so the
// dropped modes contribute at most `target` pointwise. Requires rho != r.
std::vector<double> ring_modal_coefficients(double r, double rho, double target, bool gradient);

// Near the target ring, cos_G = w ln(dist) + R with w = -1/(pi sqrt(dist^2 + 4 rho r)) and dist the
// distance in the (rho, l) plane. Returns the limit of R at (rho, l) = (r, z).
double cos_G_log_regular_part(double r, double z, double tol);

}  // namespace slabgreen
