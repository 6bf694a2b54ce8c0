#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "slabgreen/fields.hpp"

namespace slabgreen {

// Radial cutoff: 0 below inner_zero and above outer_zero, 1 on [inner_one, outer_one],
// quintic smoothstep transitions (C2, with vanishing first and second derivatives at the joints).
struct CutoffProfile {
    double inner_zero = 0.0, inner_one = 0.0, outer_one = 0.0, outer_zero = 0.0;

    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;
};

// Support [3r0/4, 5r0/4], identically one on [7r0/8, 9r0/8]. Throws RadiusTooSmall for r0 <= 4.
CutoffProfile make_annulus_cutoff(double r0);

// curl curl of u^theta e_theta, theta component: d_z w^r - d_r w^z with w the grid vorticity.
AxiScalarField swirl_source(const AxiScalarField& utheta);

struct ReconstructionTerms {
    double i1 = 0.0;         // int cosG (d_l w^rho - d_rho w^l) psi rho
    double i2 = 0.0;         // int d_rho cosG psi' u rho
    double i3 = 0.0;         // int cosG (psi'' + psi'/rho) u rho
    double i2_direct = 0.0;  // int cosG psi' d_rho u rho (before the integration by parts)

    double value() const { return i1 + 2.0 * i2 + i3; }
    double direct_value() const { return i1 - 2.0 * i2_direct - i3; }
};

// Tensor trapezoid evaluation of the cutoff Green representation of a slab swirl field.
// `source` is the curl-curl data, `u` the swirl itself; both on the same slab grid covering supp psi.
// Kernel values are exact up to `tol` per node: columns with |rho - r| >= kAngularModalSwitch use the
// modal expansion (separable, transformed once here), nearer columns the elliptic image sum. The log
// singularity of the kernel at the target is subtracted and integrated in closed form.
class SwirlReconstructor {
public:
    SwirlReconstructor(const AxiScalarField& source, const AxiScalarField& u, const CutoffProfile& psi, double tol);

    // Throws SupportMismatch unless r lies in [psi.inner_one, psi.outer_one] and 0 < z < 1.
    ReconstructionTerms at(double r, double z) const;

    const AxiGrid& grid() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// u^theta(r, z) from the three-term representation, with the source computed by swirl_source.
ReconstructionTerms reconstruct_swirl(const AxiScalarField& utheta, double r, double z, const CutoffProfile& psi,
                                      double tol);

// Max over targets of |u psi - (I1 - 2 I2_direct - I3)|: both sides of the Green representation of
// -Delta(v psi) = psi curl curl v - 2 grad psi . grad v - v Delta psi.
double direct_identity_check(const AxiScalarField& utheta, const CutoffProfile& psi,
                             const std::vector<std::pair<double, double>>& targets, double tol);

// int_0^X int_0^Y ln sqrt(x^2 + y^2) dy dx for X, Y >= 0.
double log_corner_integral(double X, double Y);

}  // namespace slabgreen
