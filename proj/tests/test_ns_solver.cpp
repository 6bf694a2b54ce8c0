#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "slabgreen/errors.hpp"
#include "slabgreen/ns_solver.hpp"

using namespace slabgreen;

namespace {

SolverConfig small(bool periodic, double eps) {
    SolverConfig c;
    c.periodic = periodic;
    c.r_max = 16.0;
    c.n_r = 128;
    c.n_z = 16;
    c.eps = eps;
    return c;
}

}  // namespace

TEST_CASE("zero forcing is an exact fixed point") {
    for (bool periodic : {false, true}) {
        const SolverConfig c = small(periodic, 0.0);
        const SolveResult s = solve_steady(c);
        CHECK(s.iterations == 1);
        CHECK(s.residual == 0.0);
        CHECK(s.u.ur.max_abs() == 0.0);
        CHECK(s.u.ut.max_abs() == 0.0);
        CHECK(s.u.uz.max_abs() == 0.0);
        CHECK(s.p.max_abs() == 0.0);
        const Diagnostics d = run_diagnostics(s.u, s.p, c);
        CHECK(d.dirichlet_energy == 0.0);
        CHECK(d.gamma_max_principle_residual == 0.0);
        CHECK(d.head_pressure_max == 0.0);
        CHECK(d.head_pressure_min == 0.0);
        for (const auto& [R, osc] : d.pressure_oscillation) CHECK(osc == 0.0);
    }
}

TEST_CASE("forcing is divergence free and excites every component") {
    const SolverConfig c = small(false, 1e-3);
    const AxiVectorField f = make_forcing(c);
    CHECK(f.ur.max_abs() > 0.0);
    CHECK(f.ut.max_abs() > 0.0);
    CHECK(f.uz.max_abs() > 0.0);
    const AxiGrid g = c.grid();
    for (int i = 0; i <= g.n_r; ++i)
        for (int j = 0; j < g.nz_nodes(); ++j)
            if (g.r(i) >= c.support()) {
                CHECK(f.ur(i, j) == 0.0);
                CHECK(f.ut(i, j) == 0.0);
                CHECK(f.uz(i, j) == 0.0);
            }
}

TEST_CASE("linear response: energy doubles fourfold when the forcing doubles") {
    const SolveResult a = solve_steady(small(false, 1e-3));
    const SolveResult b = solve_steady(small(false, 2e-3));
    const double ea = run_diagnostics(a.u, a.p, small(false, 1e-3)).dirichlet_energy;
    const double eb = run_diagnostics(b.u, b.p, small(false, 2e-3)).dirichlet_energy;
    MESSAGE("energy ratio " << eb / ea);
    CHECK(eb / ea >= 3.6);
    CHECK(eb / ea <= 4.4);
}

TEST_CASE("energy exponent in both modes") {
    for (bool periodic : {false, true}) {
        double lx[3], ly[3];
        int k = 0;
        for (double eps : {1e-3, 2e-3, 4e-3}) {
            const SolverConfig c = small(periodic, eps);
            const SolveResult s = solve_steady(c);
            lx[k] = std::log(eps);
            ly[k] = std::log(run_diagnostics(s.u, s.p, c).dirichlet_energy);
            ++k;
        }
        const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
        double sxy = 0, sxx = 0;
        for (int i = 0; i < 3; ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
        MESSAGE(std::string(periodic ? "periodic" : "slab") << " exponent " << sxy / sxx);
        CHECK(std::abs(sxy / sxx - 2.0) <= 0.2);
    }
}

TEST_CASE("converged run: residuals, Gamma, annulus energy, pressure") {
    const SolverConfig c = small(false, 1e-3);
    const SolveResult s = solve_steady(c);
    CHECK(s.residual <= c.tol);
    const Diagnostics d = run_diagnostics(s.u, s.p, c);
    CHECK(d.continuity_residual <= c.tol);
    CHECK(d.momentum_residual <= c.tol);
    CHECK(d.gamma_max_principle_residual <= 10 * c.tol);
    CHECK(d.gamma_interior_max <= d.gamma_boundary_max + 10 * c.tol);
    REQUIRE(d.annulus_energy.size() >= 2);
    for (std::size_t i = 1; i < d.annulus_energy.size(); ++i)
        if (d.annulus_energy[i - 1].first >= c.support()) CHECK(d.annulus_energy[i].second <= d.annulus_energy[i - 1].second);
    for (const auto& [R, osc] : d.pressure_oscillation) CHECK(std::isfinite(osc));
    CHECK(std::isfinite(d.max_dz_p));
    CHECK(d.max_dz_p <= 1.0 * c.eps);
    CHECK(d.has_boundary_identities);
}

TEST_CASE("periodic mode: Poincare bound for the radial velocity") {
    const SolverConfig c = small(true, 1e-3);
    const SolveResult s = solve_steady(c);
    const Diagnostics d = run_diagnostics(s.u, s.p, c);
    // u^r has zero mean over a period, so int |u^r|^2 <= C int |d_z u^r|^2. With central differences
    // the lowest mode's derivative is sin(h)/h, so the discrete constant is (h / sin h)^2.
    const double h = 2.0 * std::numbers::pi / c.n_z;
    const double C = std::pow(h / std::sin(h), 2);
    MESSAGE("Poincare ratio " << d.poincare_ratio << ", discrete constant " << C);
    CHECK(d.poincare_ur_l2 > 0.0);
    CHECK(d.poincare_ratio <= C * (1.0 + 1e-6));
    CHECK(d.poincare_ratio > 0.9);
}

TEST_CASE("configuration and convergence errors") {
    SolverConfig c = small(false, 1e-3);
    c.eps = -1.0;
    CHECK_THROWS_AS(solve_steady(c), InvalidArgument);
    c = small(false, 1e-3);
    c.forcing_radius = 4.0;
    CHECK_THROWS_AS(solve_steady(c), InvalidArgument);
    c = small(false, 1e-3);
    c.tol = 0.0;
    CHECK_THROWS_AS(solve_steady(c), InvalidArgument);

    c = small(false, 1e-3);
    c.tol = 1e-30;
    c.max_iter = 2;
    CHECK_THROWS_AS(solve_steady(c), NoConvergence);

    c = small(false, 1e-3);
    const SolveResult s = solve_steady(c);
    AxiVectorField u = s.u;
    u.ut(10, 5) += 1.0;
    CHECK_THROWS_AS(run_diagnostics(u, s.p, c), NotConverged);
    SolverConfig other = c;
    other.n_r = 64;
    CHECK_THROWS_AS(run_diagnostics(s.u, s.p, other), InvalidArgument);
}

TEST_CASE("strong forcing blows up or fails to converge") {
    SolverConfig c = small(false, 1e9);
    c.max_iter = 50;
    bool failed = false;
    try {
        solve_steady(c);
    } catch (const BlowUp&) {
        failed = true;
    } catch (const NoConvergence&) {
        failed = true;
    }
    CHECK(failed);
}
