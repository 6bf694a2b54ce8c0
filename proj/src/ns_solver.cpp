#include "slabgreen/ns_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "slabgreen/errors.hpp"

namespace slabgreen {
namespace {

enum Var { UR = 0, UT = 1, UZ = 2, P = 3 };

using Triplets = std::vector<Eigen::Triplet<double>>;
using SpMat = Eigen::SparseMatrix<double>;

struct Tap {
    int offset;  // node index along the stencil direction (absolute)
    double c;
};

// Stencil lists mirroring fields.cpp, absolute indices along the direction.
std::vector<Tap> taps_dr(const AxiGrid& g, int i, Parity parity) {
    const int n = g.n_r;
    const double h = g.hr();
    if (i == 0) return parity == Parity::Odd ? std::vector<Tap>{{1, 1.0 / h}} : std::vector<Tap>{};
    if (i < n) return {{i - 1, -0.5 / h}, {i + 1, 0.5 / h}};
    return {{n, 1.5 / h}, {n - 1, -2.0 / h}, {n - 2, 0.5 / h}};
}

std::vector<Tap> taps_drr(const AxiGrid& g, int i, Parity parity) {
    const int n = g.n_r;
    const double h2 = g.hr() * g.hr();
    if (i == 0) {
        if (parity == Parity::Odd) return {{0, -2.0 / h2}};
        return {{0, -2.0 / h2}, {1, 2.0 / h2}};
    }
    if (i < n) return {{i - 1, 1.0 / h2}, {i, -2.0 / h2}, {i + 1, 1.0 / h2}};
    return {{n, 2.0 / h2}, {n - 1, -5.0 / h2}, {n - 2, 4.0 / h2}, {n - 3, -1.0 / h2}};
}

std::vector<Tap> taps_dz(const AxiGrid& g, int j) {
    const double h = g.hz();
    if (g.periodic) {
        const int nz = g.nz_nodes();
        return {{(j + nz - 1) % nz, -0.5 / h}, {(j + 1) % nz, 0.5 / h}};
    }
    const int m = g.n_z;
    if (j == 0) return {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
    if (j == m) return {{m, 1.5 / h}, {m - 1, -2.0 / h}, {m - 2, 0.5 / h}};
    return {{j - 1, -0.5 / h}, {j + 1, 0.5 / h}};
}

std::vector<Tap> taps_dzz(const AxiGrid& g, int j) {
    const double h2 = g.hz() * g.hz();
    if (g.periodic) {
        const int nz = g.nz_nodes();
        return {{(j + nz - 1) % nz, 1.0 / h2}, {j, -2.0 / h2}, {(j + 1) % nz, 1.0 / h2}};
    }
    const int m = g.n_z;
    if (j == 0) return {{0, 2.0 / h2}, {1, -5.0 / h2}, {2, 4.0 / h2}, {3, -1.0 / h2}};
    if (j == m) return {{m, 2.0 / h2}, {m - 1, -5.0 / h2}, {m - 2, 4.0 / h2}, {m - 3, -1.0 / h2}};
    return {{j - 1, 1.0 / h2}, {j, -2.0 / h2}, {j + 1, 1.0 / h2}};
}

struct System {
    AxiGrid g;
    SolverConfig cfg;
    SpMat A;       // linear part of the steady residual
    SpMat M;       // A plus pseudo-time diagonal
    AxiVectorField forcing;

    int col(int i, int j, Var v) const { return 4 * static_cast<int>(g.index(i, j)) + v; }
    bool dirichlet(int i, int j, Var v) const {
        if (v == P) return false;
        if (i == g.n_r || g.is_wall(j)) return true;
        return i == 0 && (v == UR || v == UT);
    }
};

void add_radial(Triplets& t, const System& s, int row, int /*i*/, int j, Var v, const std::vector<Tap>& taps, double scale) {
    for (const Tap& tp : taps) t.emplace_back(row, s.col(tp.offset, j, v), scale * tp.c);
}
void add_vertical(Triplets& t, const System& s, int row, int i, int /*j*/, Var v, const std::vector<Tap>& taps, double scale) {
    for (const Tap& tp : taps) t.emplace_back(row, s.col(i, tp.offset, v), scale * tp.c);
}

// -(Delta - 1/r^2) on an odd component at an off-axis node.
void add_neg_lap_swirl(Triplets& t, const System& s, int row, int i, int j, Var v) {
    const double r = s.g.r(i);
    add_radial(t, s, row, i, j, v, taps_drr(s.g, i, Parity::Odd), -1.0);
    add_radial(t, s, row, i, j, v, taps_dr(s.g, i, Parity::Odd), -1.0 / r);
    t.emplace_back(row, s.col(i, j, v), 1.0 / (r * r));
    add_vertical(t, s, row, i, j, v, taps_dzz(s.g, j), -1.0);
}

void add_neg_lap_scalar(Triplets& t, const System& s, int row, int i, int j, Var v) {
    if (i == 0) {
        add_radial(t, s, row, i, j, v, taps_drr(s.g, 0, Parity::Even), -2.0);
    } else {
        add_radial(t, s, row, i, j, v, taps_drr(s.g, i, Parity::Even), -1.0);
        add_radial(t, s, row, i, j, v, taps_dr(s.g, i, Parity::Even), -1.0 / s.g.r(i));
    }
    add_vertical(t, s, row, i, j, v, taps_dzz(s.g, j), -1.0);
}

void add_divergence(Triplets& t, const System& s, int row, int i, int j) {
    const AxiGrid& g = s.g;
    const int n = g.n_r;
    const double h = g.hr();
    if (i == 0) {
        t.emplace_back(row, s.col(1, j, UR), 1.0 / h);
        t.emplace_back(row, s.col(2, j, UR), 0.5 / h);
    } else {
        const auto taps = i < n ? taps_dr(g, i, Parity::Odd) : taps_dr(g, n, Parity::Odd);
        add_radial(t, s, row, i, j, UR, taps, 1.0);
        t.emplace_back(row, s.col(i, j, UR), 1.0 / g.r(i));
    }
    add_vertical(t, s, row, i, j, UZ, taps_dz(g, j), 1.0);
}

// gamma W^{-1} sum_dir c_dir L_dir^T W L_dir acting on p.
void add_pressure_damping(Triplets& t, const System& s) {
    const AxiGrid& g = s.g;
    const std::vector<double> wr = compatibility_weights_r(g), wz = compatibility_weights_z(g);
    const double hr2 = g.hr() * g.hr(), hz2 = g.hz() * g.hz();
    const double drc = 1.0 / (2.0 / hr2 + 2.0 / hz2);
    const double cr = drc / hr2, cz = drc / hz2;
    const double gamma = s.cfg.gamma;
    auto weight = [&](int i, int j) { return wr[i] * wz[j]; };
    auto apply = [&](const std::array<std::pair<int, int>, 3>& nodes, double c, double wc) {
        const double L[3] = {1.0, -2.0, 1.0};
        for (int a = 0; a < 3; ++a) {
            const auto [ia, ja] = nodes[a];
            const double scale = gamma * c * wc / weight(ia, ja);
            for (int b = 0; b < 3; ++b) {
                const auto [ib, jb] = nodes[b];
                t.emplace_back(s.col(ia, ja, P), s.col(ib, jb, P), scale * L[a] * L[b]);
            }
        }
    };
    const int nz = g.nz_nodes();
    for (int i = 0; i <= g.n_r; ++i) {
        for (int j = 0; j < nz; ++j) {
            if (i >= 1 && i < g.n_r) apply({{{i - 1, j}, {i, j}, {i + 1, j}}}, cr, weight(i, j));
            if (g.periodic) {
                apply({{{i, (j + nz - 1) % nz}, {i, j}, {i, (j + 1) % nz}}}, cz, weight(i, j));
            } else if (j >= 1 && j < g.n_z) {
                apply({{{i, j - 1}, {i, j}, {i, j + 1}}}, cz, weight(i, j));
            }
        }
    }
}

System assemble(const SolverConfig& cfg) {
    System s{cfg.grid(), cfg, {}, {}, make_forcing(cfg)};
    const AxiGrid& g = s.g;
    const int N = 4 * static_cast<int>(g.size());
    Triplets t;
    t.reserve(static_cast<std::size_t>(N) * 12);
    for (int i = 0; i <= g.n_r; ++i) {
        for (int j = 0; j < g.nz_nodes(); ++j) {
            for (Var v : {UR, UT, UZ}) {
                const int row = s.col(i, j, v);
                if (s.dirichlet(i, j, v)) {
                    t.emplace_back(row, row, 1.0);
                    continue;
                }
                if (v == UR) {
                    add_neg_lap_swirl(t, s, row, i, j, UR);
                    add_radial(t, s, row, i, j, P, taps_dr(g, i, Parity::Even), 1.0);
                } else if (v == UT) {
                    add_neg_lap_swirl(t, s, row, i, j, UT);
                } else {
                    add_neg_lap_scalar(t, s, row, i, j, UZ);
                    add_vertical(t, s, row, i, j, P, taps_dz(g, j), 1.0);
                }
            }
            add_divergence(t, s, s.col(i, j, P), i, j);
        }
    }
    add_pressure_damping(t, s);
    s.A.resize(N, N);
    s.A.setFromTriplets(t.begin(), t.end());
    Triplets d;
    d.reserve(N);
    for (int i = 0; i <= g.n_r; ++i) {
        for (int j = 0; j < g.nz_nodes(); ++j) {
            for (Var v : {UR, UT, UZ})
                if (!s.dirichlet(i, j, v)) d.emplace_back(s.col(i, j, v), s.col(i, j, v), 1.0 / cfg.dtau);
            d.emplace_back(s.col(i, j, P), s.col(i, j, P), 1.0 / (cfg.beta * cfg.dtau));
        }
    }
    SpMat D(N, N);
    D.setFromTriplets(d.begin(), d.end());
    s.M = s.A + D;
    s.M.makeCompressed();
    return s;
}

Eigen::VectorXd pack(const System& s, const AxiVectorField& u, const AxiScalarField& p) {
    Eigen::VectorXd x(4 * static_cast<Eigen::Index>(s.g.size()));
    for (std::size_t k = 0; k < s.g.size(); ++k) {
        x[4 * k + UR] = u.ur.v[k];
        x[4 * k + UT] = u.ut.v[k];
        x[4 * k + UZ] = u.uz.v[k];
        x[4 * k + P] = p.v[k];
    }
    return x;
}

void unpack(const System& s, const Eigen::VectorXd& x, AxiVectorField& u, AxiScalarField& p) {
    for (std::size_t k = 0; k < s.g.size(); ++k) {
        u.ur.v[k] = x[4 * k + UR];
        u.ut.v[k] = x[4 * k + UT];
        u.uz.v[k] = x[4 * k + UZ];
        p.v[k] = x[4 * k + P];
    }
}

Eigen::VectorXd residual(const System& s, const AxiVectorField& u, const AxiScalarField& p) {
    const AxiGrid& g = s.g;
    Eigen::VectorXd R = s.A * pack(s, u, p);
    const AxiScalarField ur_r = d_r(u.ur, Parity::Odd), ur_z = d_z(u.ur);
    const AxiScalarField ut_r = d_r(u.ut, Parity::Odd), ut_z = d_z(u.ut);
    const AxiScalarField uz_r = d_r(u.uz, Parity::Even), uz_z = d_z(u.uz);
    for (int i = 0; i <= g.n_r; ++i) {
        const double inv_r = i == 0 ? 0.0 : 1.0 / g.r(i);
        for (int j = 0; j < g.nz_nodes(); ++j) {
            const double ur = u.ur(i, j), ut = u.ut(i, j), uz = u.uz(i, j);
            if (!s.dirichlet(i, j, UR))
                R[s.col(i, j, UR)] += ur * ur_r(i, j) + uz * ur_z(i, j) - ut * ut * inv_r - s.forcing.ur(i, j);
            if (!s.dirichlet(i, j, UT))
                R[s.col(i, j, UT)] += ur * ut_r(i, j) + uz * ut_z(i, j) + ur * ut * inv_r - s.forcing.ut(i, j);
            if (!s.dirichlet(i, j, UZ))
                R[s.col(i, j, UZ)] += ur * uz_r(i, j) + uz * uz_z(i, j) - s.forcing.uz(i, j);
        }
    }
    return R;
}

double max_velocity(const AxiVectorField& u) {
    return std::max({u.ur.max_abs(), u.ut.max_abs(), u.uz.max_abs()});
}

}  // namespace

void SolverConfig::validate() const {
    grid().validate();
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be finite and nonnegative");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (!(dtau > 0.0) || !(beta > 0.0) || !(gamma >= 0.0)) throw InvalidArgument("dtau, beta must be positive, gamma >= 0");
    if (max_iter < 1) throw InvalidArgument("max_iter must be positive");
    if (!(support() > 0.0) || support() > r_max / 8.0 + 1e-12)
        throw InvalidArgument("forcing support must lie inside r < r_max/8");
}

AxiVectorField make_forcing(const SolverConfig& cfg) {
    cfg.validate();
    const AxiGrid g = cfg.grid();
    AxiVectorField f(g);
    const double R = cfg.support();
    const double pi = std::numbers::pi;
    for (int i = 0; i <= g.n_r; ++i) {
        const double r = g.r(i);
        if (r >= R) continue;
        const double s = 1.0 - (r / R) * (r / R);
        const double B = s * s * s * s;
        const double dB = -8.0 * r / (R * R) * s * s * s;
        for (int j = 0; j < g.nz_nodes(); ++j) {
            const double z = g.z(j);
            double S, dS, T;
            if (cfg.periodic) {
                S = std::sin(z);
                dS = std::cos(z);
                T = std::cos(z);
            } else {
                S = std::sin(pi * z) * std::sin(pi * z);
                dS = pi * std::sin(2.0 * pi * z);
                T = std::sin(pi * z);
            }
            f.ur(i, j) = -cfg.eps * r * B * dS;
            f.ut(i, j) = cfg.eps * r * B * T;
            f.uz(i, j) = cfg.eps * (2.0 * B + r * dB) * S;
        }
    }
    return f;
}

NsResidual solver_residual(const AxiVectorField& u, const AxiScalarField& p, const SolverConfig& cfg) {
    const System s = assemble(cfg);
    if (!(u.grid == s.g) || !(p.grid == s.g)) throw InvalidArgument("field grid does not match the solver config");
    const Eigen::VectorXd R = residual(s, u, p);
    NsResidual out{AxiScalarField(s.g), AxiScalarField(s.g), AxiScalarField(s.g), AxiScalarField(s.g)};
    for (std::size_t k = 0; k < s.g.size(); ++k) {
        out.r_mom.v[k] = R[4 * k + UR];
        out.t_mom.v[k] = R[4 * k + UT];
        out.z_mom.v[k] = R[4 * k + UZ];
        out.continuity.v[k] = R[4 * k + P];
    }
    return out;
}

SolveResult solve_steady(const SolverConfig& cfg) {
    cfg.validate();
    const AxiGrid g = cfg.grid();
    SolveResult res{AxiVectorField(g), AxiScalarField(g), 0, 0.0};
    if (cfg.eps == 0.0) {
        res.iterations = 1;
        return res;
    }
    const System s = assemble(cfg);
    Eigen::UmfPackLU<SpMat> lu;
    lu.compute(s.M);
    if (lu.info() != Eigen::Success) throw NoConvergence("sparse factorization failed");
    Eigen::VectorXd x = pack(s, res.u, res.p);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const Eigen::VectorXd R = residual(s, res.u, res.p);
        res.iterations = it;
        res.residual = R.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(res.residual)) throw BlowUp("residual is not finite");
        if (res.residual <= cfg.tol) return res;
        const Eigen::VectorXd dx = lu.solve(R);
        x -= dx;
        unpack(s, x, res.u, res.p);
        if (max_velocity(res.u) > 1e6) throw BlowUp("velocity exceeded 1e6");
    }
    throw NoConvergence("residual " + std::to_string(res.residual) + " above tolerance after " +
                        std::to_string(cfg.max_iter) + " iterations");
}

Diagnostics run_diagnostics(const AxiVectorField& u, const AxiScalarField& p, const SolverConfig& cfg) {
    cfg.validate();
    const AxiGrid& g = u.grid;
    const NsResidual sr = solver_residual(u, p, cfg);
    Diagnostics d;
    d.momentum_residual = sr.max_momentum();
    d.continuity_residual = sr.continuity.max_abs();
    if (sr.max_all() > 10.0 * cfg.tol)
        throw NotConverged("solver residual " + std::to_string(sr.max_all()) + " exceeds 10 tol");
    d.divergence_max = divergence_axisym(u).max_abs();

    const double two_pi = 2.0 * std::numbers::pi;
    const AxiScalarField gn = grad_norm_sq(u);
    d.dirichlet_energy = two_pi * integrate_rz(gn, true);
    const double hr = g.hr(), hz = g.hz();
    auto zweight = [&](int j) { return g.is_wall(j) ? 0.5 : 1.0; };
    for (double R = 1.0; 2.0 * R <= g.r_max + 1e-12; R *= 2.0) {
        const int i0 = static_cast<int>(std::lround(R / hr)), i1 = static_cast<int>(std::lround(2.0 * R / hr));
        double e = 0.0;
        for (int i = i0; i <= i1; ++i) {
            const double wr = (i == i0 || i == i1 ? 0.5 : 1.0) * g.r(i);
            for (int j = 0; j < g.nz_nodes(); ++j) e += wr * zweight(j) * gn(i, j);
        }
        d.annulus_energy.emplace_back(R, two_pi * e * hr * hz);
    }

    // Gamma on the region outside the forcing, r >= support
    const int i_f = std::min(g.n_r, static_cast<int>(std::ceil(cfg.support() / hr - 1e-9)));
    const AxiScalarField gam = gamma_of(u);
    for (int i = i_f; i <= g.n_r; ++i) {
        for (int j = 0; j < g.nz_nodes(); ++j) {
            const double a = std::abs(gam(i, j));
            const bool boundary = i == i_f || i == g.n_r || g.is_wall(j);
            if (boundary) d.gamma_boundary_max = std::max(d.gamma_boundary_max, a);
            else d.gamma_interior_max = std::max(d.gamma_interior_max, a);
        }
    }
    d.gamma_max_principle_residual = std::max(0.0, d.gamma_interior_max - d.gamma_boundary_max);

    // far-field pressure level over the outer half of the grid
    {
        const int ih = static_cast<int>(std::lround(0.5 * g.r_max / hr));
        double s = 0.0, w = 0.0;
        for (int i = ih; i <= g.n_r; ++i) {
            const double wr = (i == ih || i == g.n_r ? 0.5 : 1.0) * g.r(i);
            for (int j = 0; j < g.nz_nodes(); ++j) {
                s += wr * zweight(j) * p(i, j);
                w += wr * zweight(j);
            }
        }
        d.p1 = s / w;
    }
    AxiScalarField Q(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double ur = u.ur.v[k], ut = u.ut.v[k], uz = u.uz.v[k];
        Q.v[k] = 0.5 * (ur * ur + ut * ut + uz * uz) + p.v[k] - d.p1;
    }
    d.head_pressure_max = -HUGE_VAL;
    d.head_pressure_min = HUGE_VAL;
    for (int i = i_f; i <= g.n_r; ++i) {
        for (int j = 0; j < g.nz_nodes(); ++j) {
            d.head_pressure_max = std::max(d.head_pressure_max, Q(i, j));
            d.head_pressure_min = std::min(d.head_pressure_min, Q(i, j));
        }
    }
    {
        const AxiVectorField w = curl_axisym(u);
        const AxiScalarField lq = laplacian_scalar(Q), qr = d_r(Q, Parity::Even), qz = d_z(Q);
        for (int i = i_f + 1; i < g.n_r; ++i) {
            for (int j = 0; j < g.nz_nodes(); ++j) {
                if (g.is_wall(j)) continue;
                const double w2 = w.ur(i, j) * w.ur(i, j) + w.ut(i, j) * w.ut(i, j) + w.uz(i, j) * w.uz(i, j);
                const double e = -lq(i, j) + u.ur(i, j) * qr(i, j) + u.uz(i, j) * qz(i, j) + w2;
                d.head_equation_residual = std::max(d.head_equation_residual, std::abs(e));
            }
        }
        const AxiScalarField pz = d_z(p);
        d.max_dz_p = pz.max_abs();

        for (double R : {8.0, 16.0, 32.0}) {
            if (2.0 * R > g.r_max + 1e-12) break;
            const int i0 = static_cast<int>(std::lround(R / hr)), i1 = static_cast<int>(std::lround(2.0 * R / hr));
            double osc = 0.0;
            for (int i = i0; i <= i1; ++i)
                for (int j = 0; j < g.nz_nodes(); ++j) osc = std::max(osc, std::abs(p(i, j) - p(i0, j)));
            d.pressure_oscillation.emplace_back(R, osc);
        }

        if (g.periodic) {
            AxiScalarField ur2(g), dz2(g);
            const AxiScalarField urz = d_z(u.ur);
            for (std::size_t k = 0; k < g.size(); ++k) {
                ur2.v[k] = u.ur.v[k] * u.ur.v[k];
                dz2.v[k] = urz.v[k] * urz.v[k];
            }
            d.poincare_ur_l2 = integrate_rz(ur2, true);
            d.poincare_dz_ur_l2 = integrate_rz(dz2, true);
            d.poincare_ratio = d.poincare_dz_ur_l2 > 0.0 ? d.poincare_ur_l2 / d.poincare_dz_ur_l2 : 0.0;
        } else {
            d.has_boundary_identities = true;
            d.boundary = boundary_identities(u);
        }

        const double r1 = g.r_max / 8.0, r2 = g.r_max / 2.0;
        try {
            d.decay_utheta = fit_decay(u.ut, r1, r2);
            d.decay_utheta_ok = true;
        } catch (const WindowDegenerate&) {
        }
        try {
            d.decay_wrz = fit_decay({&w.ur, &w.uz}, r1, r2);
            d.decay_wrz_ok = true;
        } catch (const WindowDegenerate&) {
        }
        try {
            const AxiScalarField J = d_z(w.ur), Om = d_r(w.uz, Parity::Even);
            d.decay_jomega = fit_decay({&J, &Om}, r1, r2);
            d.decay_jomega_ok = true;
        } catch (const WindowDegenerate&) {
        }
    }
    return d;
}

}  // namespace slabgreen
