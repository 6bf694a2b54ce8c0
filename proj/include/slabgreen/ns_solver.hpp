#pragma once

#include <utility>
#include <vector>

#include "slabgreen/fields.hpp"

namespace slabgreen {

struct SolverConfig {
    bool periodic = false;  // false: walls at z = 0, 1; true: 2pi-periodic in z
    double r_max = 64.0;
    int n_r = 1024;
    int n_z = 64;
    double eps = 1e-2;           // forcing amplitude
    double forcing_radius = 0.0; // 0 selects r_max / 16
    double dtau = 1e4;           // pseudo-time step
    double beta = 1.0;           // artificial compressibility; pressure rows relax with 1/(beta dtau)
    double gamma = 1.0;          // weight of the fourth-difference pressure damping
    double tol = 1e-8;           // max pointwise residual at convergence
    int max_iter = 200;

    double support() const { return forcing_radius > 0.0 ? forcing_radius : r_max / 16.0; }
    AxiGrid grid() const { return {r_max, n_r, n_z, periodic}; }
    void validate() const;
};

// Divergence-free forcing eps * (curl of r^2 B(r) S(z) e_theta / r, r B(r) T(z) e_theta),
// B = (1 - (r/R)^2)^4 truncated at R = cfg.support().
AxiVectorField make_forcing(const SolverConfig& cfg);

struct SolveResult {
    AxiVectorField u;
    AxiScalarField p;
    int iterations = 0;     // residual evaluations
    double residual = 0.0;  // max over all non-Dirichlet rows
};

// Steady solve by implicit pseudo-time stepping with a frozen Stokes operator (defect correction).
SolveResult solve_steady(const SolverConfig& cfg);

// Residual of the discrete system the solver drives to zero: momentum equations at
// non-Dirichlet nodes and the damped continuity equation at every node.
NsResidual solver_residual(const AxiVectorField& u, const AxiScalarField& p, const SolverConfig& cfg);

struct Diagnostics {
    double dirichlet_energy = 0.0;
    std::vector<std::pair<double, double>> annulus_energy;        // (R, energy in R <= r <= 2R)
    double gamma_interior_max = 0.0;
    double gamma_boundary_max = 0.0;
    double gamma_max_principle_residual = 0.0;  // max(0, interior - boundary) outside the forcing
    double p1 = 0.0;
    double head_pressure_max = 0.0;             // max Q on r >= forcing support
    double head_pressure_min = 0.0;
    double head_equation_residual = 0.0;        // max |-Delta Q + u.grad Q + |w|^2| outside the forcing
    std::vector<std::pair<double, double>> pressure_oscillation;  // (R, max |p(r,z) - p(R,z)|)
    double max_dz_p = 0.0;
    double poincare_ur_l2 = 0.0;     // int |u^r|^2 r dr dz (periodic mode)
    double poincare_dz_ur_l2 = 0.0;  // int |d_z u^r|^2 r dr dz
    double poincare_ratio = 0.0;
    double momentum_residual = 0.0;
    double continuity_residual = 0.0;  // damped continuity, as solved
    double divergence_max = 0.0;       // undamped divergence_axisym
    bool has_boundary_identities = false;
    BoundaryIdentityReport boundary;
    DecayFit decay_utheta, decay_wrz, decay_jomega;
    bool decay_utheta_ok = false, decay_wrz_ok = false, decay_jomega_ok = false;
};

// Throws NotConverged when the solver residual exceeds 10 tol.
Diagnostics run_diagnostics(const AxiVectorField& u, const AxiScalarField& p, const SolverConfig& cfg);

}  // namespace slabgreen
