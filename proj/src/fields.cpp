#include "slabgreen/fields.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include "json.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "slabgreen/errors.hpp"

namespace slabgreen {

using json = nlohmann::json;

double AxiGrid::extent() const { return periodic ? 2.0 * std::numbers::pi : 1.0; }
double AxiGrid::z0() const { return periodic ? -std::numbers::pi : 0.0; }

void AxiGrid::validate() const {
    if (n_r < 8 || n_z < 8) throw GridTooCoarse("grid needs n_r, n_z >= 8");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidArgument("r_max must be positive");
}

double AxiScalarField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

namespace {

void require_same(const AxiGrid& a, const AxiGrid& b) {
    if (!(a == b)) throw InvalidArgument("fields live on different grids");
}

}  // namespace

AxiScalarField d_r(const AxiScalarField& f, Parity parity) {
    const AxiGrid& g = f.grid;
    g.validate();
    AxiScalarField out(g);
    const int n = g.n_r, nz = g.nz_nodes();
    const double h = g.hr();
    for (int j = 0; j < nz; ++j) {
        out(0, j) = parity == Parity::Odd ? f(1, j) / h : 0.0;
        for (int i = 1; i < n; ++i) out(i, j) = (f(i + 1, j) - f(i - 1, j)) / (2.0 * h);
        out(n, j) = (3.0 * f(n, j) - 4.0 * f(n - 1, j) + f(n - 2, j)) / (2.0 * h);
    }
    return out;
}

AxiScalarField d_rr(const AxiScalarField& f, Parity parity) {
    const AxiGrid& g = f.grid;
    g.validate();
    AxiScalarField out(g);
    const int n = g.n_r, nz = g.nz_nodes();
    const double h2 = g.hr() * g.hr();
    for (int j = 0; j < nz; ++j) {
        out(0, j) = parity == Parity::Odd ? -2.0 * f(0, j) / h2 : 2.0 * (f(1, j) - f(0, j)) / h2;
        for (int i = 1; i < n; ++i) out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / h2;
        out(n, j) = (2.0 * f(n, j) - 5.0 * f(n - 1, j) + 4.0 * f(n - 2, j) - f(n - 3, j)) / h2;
    }
    return out;
}

AxiScalarField d_z(const AxiScalarField& f) {
    const AxiGrid& g = f.grid;
    g.validate();
    AxiScalarField out(g);
    const int nz = g.nz_nodes();
    const double h = g.hz();
    for (int i = 0; i < g.nr_nodes(); ++i) {
        if (g.periodic) {
            for (int j = 0; j < nz; ++j) out(i, j) = (f(i, (j + 1) % nz) - f(i, (j + nz - 1) % nz)) / (2.0 * h);
            continue;
        }
        const int m = g.n_z;
        out(i, 0) = (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) / (2.0 * h);
        for (int j = 1; j < m; ++j) out(i, j) = (f(i, j + 1) - f(i, j - 1)) / (2.0 * h);
        out(i, m) = (3.0 * f(i, m) - 4.0 * f(i, m - 1) + f(i, m - 2)) / (2.0 * h);
    }
    return out;
}

AxiScalarField d_zz(const AxiScalarField& f) {
    const AxiGrid& g = f.grid;
    g.validate();
    AxiScalarField out(g);
    const int nz = g.nz_nodes();
    const double h2 = g.hz() * g.hz();
    for (int i = 0; i < g.nr_nodes(); ++i) {
        if (g.periodic) {
            for (int j = 0; j < nz; ++j)
                out(i, j) = (f(i, (j + 1) % nz) - 2.0 * f(i, j) + f(i, (j + nz - 1) % nz)) / h2;
            continue;
        }
        const int m = g.n_z;
        out(i, 0) = (2.0 * f(i, 0) - 5.0 * f(i, 1) + 4.0 * f(i, 2) - f(i, 3)) / h2;
        for (int j = 1; j < m; ++j) out(i, j) = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / h2;
        out(i, m) = (2.0 * f(i, m) - 5.0 * f(i, m - 1) + 4.0 * f(i, m - 2) - f(i, m - 3)) / h2;
    }
    return out;
}

AxiScalarField laplacian_scalar(const AxiScalarField& f) {
    const AxiGrid& g = f.grid;
    const AxiScalarField fr = d_r(f, Parity::Even), frr = d_rr(f, Parity::Even), fzz = d_zz(f);
    AxiScalarField out(g);
    for (int i = 0; i < g.nr_nodes(); ++i) {
        for (int j = 0; j < g.nz_nodes(); ++j) {
            out(i, j) = i == 0 ? 2.0 * frr(i, j) + fzz(i, j) : frr(i, j) + fr(i, j) / g.r(i) + fzz(i, j);
        }
    }
    return out;
}

AxiScalarField laplacian_swirl(const AxiScalarField& f) {
    const AxiGrid& g = f.grid;
    const AxiScalarField fr = d_r(f, Parity::Odd), frr = d_rr(f, Parity::Odd), fzz = d_zz(f);
    AxiScalarField out(g);
    for (int i = 1; i < g.nr_nodes(); ++i) {
        const double r = g.r(i);
        for (int j = 0; j < g.nz_nodes(); ++j) out(i, j) = frr(i, j) + fr(i, j) / r - f(i, j) / (r * r) + fzz(i, j);
    }
    return out;
}

AxiVectorField curl_axisym(const AxiVectorField& u) {
    const AxiGrid& g = u.grid;
    g.validate();
    AxiVectorField w(g);
    const AxiScalarField ut_z = d_z(u.ut), ut_r = d_r(u.ut, Parity::Odd);
    const AxiScalarField ur_z = d_z(u.ur), uz_r = d_r(u.uz, Parity::Even);
    for (int i = 0; i < g.nr_nodes(); ++i) {
        for (int j = 0; j < g.nz_nodes(); ++j) {
            w.ur(i, j) = -ut_z(i, j);
            w.ut(i, j) = ur_z(i, j) - uz_r(i, j);
            w.uz(i, j) = i == 0 ? 2.0 * ut_r(i, j) : ut_r(i, j) + u.ut(i, j) / g.r(i);
        }
    }
    return w;
}

AxiScalarField divergence_axisym(const AxiVectorField& u) {
    const AxiGrid& g = u.grid;
    g.validate();
    const AxiScalarField uz_z = d_z(u.uz);
    AxiScalarField out(g);
    const int n = g.n_r;
    const double h = g.hr();
    for (int j = 0; j < g.nz_nodes(); ++j) {
        // axis: 2 d_r u^r, written so that the compatibility weights close exactly
        out(0, j) = (2.0 * u.ur(1, j) + u.ur(2, j)) / (2.0 * h) + uz_z(0, j);
        for (int i = 1; i < n; ++i)
            out(i, j) = (u.ur(i + 1, j) - u.ur(i - 1, j)) / (2.0 * h) + u.ur(i, j) / g.r(i) + uz_z(i, j);
        out(n, j) = (3.0 * u.ur(n, j) - 4.0 * u.ur(n - 1, j) + u.ur(n - 2, j)) / (2.0 * h) + u.ur(n, j) / g.r(n) +
                    uz_z(n, j);
    }
    return out;
}

AxiScalarField gamma_of(const AxiVectorField& u) {
    const AxiGrid& g = u.grid;
    AxiScalarField out(g);
    for (int i = 0; i < g.nr_nodes(); ++i)
        for (int j = 0; j < g.nz_nodes(); ++j) out(i, j) = g.r(i) * u.ut(i, j);
    return out;
}

std::vector<double> compatibility_weights_r(const AxiGrid& g) {
    g.validate();
    const int n = g.n_r;
    const double h = g.hr();
    std::vector<double> w(n + 1);
    w[0] = h / 8.0;
    w[1] = 7.0 * h / 8.0;
    for (int i = 2; i <= n - 2; ++i) w[i] = g.r(i);
    w[n] = 0.5 * g.r(n) / (2.0 - h / g.r(n - 1));
    w[n - 1] = g.r(n - 1) + w[n];
    return w;
}

std::vector<double> compatibility_weights_z(const AxiGrid& g) {
    g.validate();
    std::vector<double> w(g.nz_nodes(), 1.0);
    if (!g.periodic) {
        const int m = g.n_z;
        w[0] = w[m] = 0.25;
        w[1] = w[m - 1] = 1.25;
    }
    return w;
}

BoundaryIdentityReport boundary_identities(const AxiVectorField& u) {
    const AxiGrid& g = u.grid;
    if (g.periodic) throw ModeMismatch("boundary identities apply to the slab mode only");
    const AxiVectorField w = curl_axisym(u);
    // d_z w^r = -d_zz u^theta; nesting two first-difference stencils at the wall would only be O(h)
    AxiScalarField wr_z = d_zz(u.ut);
    for (double& x : wr_z.v) x = -x;
    BoundaryIdentityReport rep;
    const int m = g.n_z;
    const double hz = g.hz();
    for (int i = 0; i < g.nr_nodes(); ++i) {
        for (int j : {0, m}) {
            rep.max_dz_wr_wall = std::max(rep.max_dz_wr_wall, std::abs(wr_z(i, j)));
            rep.max_wz_wall = std::max(rep.max_wz_wall, std::abs(w.uz(i, j)));
        }
        double s = 0.5 * (w.ur(i, 0) + w.ur(i, m));
        for (int j = 1; j < m; ++j) s += w.ur(i, j);
        rep.max_wr_column_integral = std::max(rep.max_wr_column_integral, std::abs(s * hz));
    }
    return rep;
}

double NsResidual::max_momentum() const {
    return std::max({r_mom.max_abs(), t_mom.max_abs(), z_mom.max_abs()});
}

double NsResidual::max_all() const { return std::max(max_momentum(), continuity.max_abs()); }

NsResidual ns_residual(const AxiVectorField& u, const AxiScalarField& p, const AxiVectorField* forcing) {
    const AxiGrid& g = u.grid;
    g.validate();
    require_same(g, p.grid);
    if (forcing) require_same(g, forcing->grid);
    const AxiScalarField ur_r = d_r(u.ur, Parity::Odd), ur_z = d_z(u.ur);
    const AxiScalarField ut_r = d_r(u.ut, Parity::Odd), ut_z = d_z(u.ut);
    const AxiScalarField uz_r = d_r(u.uz, Parity::Even), uz_z = d_z(u.uz);
    const AxiScalarField p_r = d_r(p, Parity::Even), p_z = d_z(p);
    const AxiScalarField lr = laplacian_swirl(u.ur), lt = laplacian_swirl(u.ut), lz = laplacian_scalar(u.uz);
    NsResidual res{AxiScalarField(g), AxiScalarField(g), AxiScalarField(g), divergence_axisym(u)};
    for (int i = 0; i < g.nr_nodes(); ++i) {
        const double inv_r = i == 0 ? 0.0 : 1.0 / g.r(i);
        for (int j = 0; j < g.nz_nodes(); ++j) {
            const double ur = u.ur(i, j), ut = u.ut(i, j), uz = u.uz(i, j);
            const double fr = forcing ? forcing->ur(i, j) : 0.0;
            const double ft = forcing ? forcing->ut(i, j) : 0.0;
            const double fz = forcing ? forcing->uz(i, j) : 0.0;
            res.r_mom(i, j) = ur * ur_r(i, j) + uz * ur_z(i, j) - ut * ut * inv_r + p_r(i, j) - lr(i, j) - fr;
            res.t_mom(i, j) = ur * ut_r(i, j) + uz * ut_z(i, j) + ur * ut * inv_r - lt(i, j) - ft;
            res.z_mom(i, j) = ur * uz_r(i, j) + uz * uz_z(i, j) + p_z(i, j) - lz(i, j) - fz;
        }
    }
    return res;
}

AxiScalarField grad_norm_sq(const AxiVectorField& u) {
    const AxiGrid& g = u.grid;
    const AxiScalarField ur_r = d_r(u.ur, Parity::Odd), ur_z = d_z(u.ur);
    const AxiScalarField ut_r = d_r(u.ut, Parity::Odd), ut_z = d_z(u.ut);
    const AxiScalarField uz_r = d_r(u.uz, Parity::Even), uz_z = d_z(u.uz);
    AxiScalarField out(g);
    for (int i = 0; i < g.nr_nodes(); ++i) {
        for (int j = 0; j < g.nz_nodes(); ++j) {
            const double hoop_r = i == 0 ? ur_r(i, j) : u.ur(i, j) / g.r(i);
            const double hoop_t = i == 0 ? ut_r(i, j) : u.ut(i, j) / g.r(i);
            auto sq = [](double x) { return x * x; };
            out(i, j) = sq(ur_r(i, j)) + sq(ur_z(i, j)) + sq(ut_r(i, j)) + sq(ut_z(i, j)) + sq(uz_r(i, j)) +
                        sq(uz_z(i, j)) + sq(hoop_r) + sq(hoop_t);
        }
    }
    return out;
}

double integrate_rz(const AxiScalarField& f, bool cylindrical) {
    const AxiGrid& g = f.grid;
    double total = 0.0;
    for (int i = 0; i < g.nr_nodes(); ++i) {
        const double wr = (i == 0 || i == g.n_r ? 0.5 : 1.0) * (cylindrical ? g.r(i) : 1.0);
        double col = 0.0;
        for (int j = 0; j < g.nz_nodes(); ++j) col += (g.is_wall(j) ? 0.5 : 1.0) * f(i, j);
        total += wr * col;
    }
    return total * g.hr() * g.hz();
}

MeanValueReport mean_value_check(const AxiVectorField& u, double r0, int stride) {
    const AxiGrid& g = u.grid;
    g.validate();
    if (!(r0 > 0.0) || r0 > 1.0) throw InvalidArgument("mean value radius must lie in (0,1]");
    if (stride < 1) throw InvalidArgument("stride must be positive");
    const double hr = g.hr(), hz = g.hz();
    const double zlo = g.z0(), zhi = g.z0() + g.extent();
    using Gauss = boost::math::quadrature::gauss<double, 16>;
    const auto& gx = Gauss::abscissa();
    const auto& gw = Gauss::weights();

    const AxiScalarField gn = grad_norm_sq(u);
    MeanValueReport rep;
    bool any_ball = false;
    const int reach_r = static_cast<int>(std::ceil(r0 / hr)), reach_z = static_cast<int>(std::ceil(r0 / hz));
    for (int i = stride; i < g.nr_nodes(); i += stride) {
        const double r = g.r(i);
        if (r + r0 > g.r_max) break;
        for (int j = 0; j < g.nz_nodes(); j += stride) {
            const double z = g.z(j);
            if (z - r0 < zlo - 1e-12 || z + r0 > zhi + 1e-12) continue;
            any_ball = true;
            ++rep.samples;
            // first pass: |u| integral, u_B, and volume
            struct Node {
                int k, m;
                double half_arc, weight;
            };
            std::vector<Node> nodes;
            double vol = 0.0, abs_int = 0.0;
            std::array<double, 3> mean{0.0, 0.0, 0.0};
            for (int k = std::max(0, i - reach_r); k <= std::min(g.n_r, i + reach_r); ++k) {
                const double rho = g.r(k);
                if (rho == 0.0) continue;
                for (int mm = j - reach_z; mm <= j + reach_z; ++mm) {
                    int m = mm;
                    if (g.periodic) m = ((mm % g.n_z) + g.n_z) % g.n_z;
                    else if (m < 0 || m > g.n_z) continue;
                    const double dz = (mm - j) * hz;
                    const double c = (r * r + rho * rho + dz * dz - r0 * r0) / (2.0 * r * rho);
                    if (c >= 1.0) continue;
                    const double half = std::acos(std::clamp(c, -1.0, 1.0));
                    const double w = rho * hr * hz;
                    nodes.push_back({k, m, half, w});
                    vol += 2.0 * half * w;
                    const double ur = u.ur(k, m), ut = u.ut(k, m), uz = u.uz(k, m);
                    abs_int += 2.0 * half * w * std::sqrt(ur * ur + ut * ut + uz * uz);
                    mean[0] += 2.0 * std::sin(half) * w * ur;
                    mean[1] += 2.0 * std::sin(half) * w * ut;
                    mean[2] += 2.0 * half * w * uz;
                }
            }
            if (vol <= 0.0) continue;
            for (double& c : mean) c /= vol;
            double osc = 0.0;
            for (const Node& nd : nodes) {
                const double ur = u.ur(nd.k, nd.m), ut = u.ut(nd.k, nd.m), uz = u.uz(nd.k, nd.m);
                double s = 0.0;
                for (std::size_t q = 0; q < gx.size(); ++q) {
                    for (double sign : {-1.0, 1.0}) {
                        if (q == 0 && sign > 0 && gx[0] == 0.0) continue;
                        const double phi = sign * gx[q] * nd.half_arc;
                        const double c = std::cos(phi), sn = std::sin(phi);
                        const double vx = ur * c - ut * sn - mean[0];
                        const double vy = ur * sn + ut * c - mean[1];
                        const double vz = uz - mean[2];
                        s += gw[q] * std::sqrt(vx * vx + vy * vy + vz * vz);
                    }
                }
                osc += s * nd.half_arc * nd.weight;
            }
            const double ux = u.ur(i, j), uy = u.ut(i, j), uzz = u.uz(i, j);
            const double mag = std::sqrt(ux * ux + uy * uy + uzz * uzz);
            const double gmag = std::sqrt(gn(i, j));
            const double rv = abs_int > 0.0 ? mag / (abs_int / (r0 * r0 * r0)) : 0.0;
            const double rg = osc > 0.0 ? gmag / (osc / (r0 * r0 * r0 * r0)) : 0.0;
            if (rv > rep.ratio_value) {
                rep.ratio_value = rv;
                rep.worst_r = r;
                rep.worst_z = z;
            }
            rep.ratio_gradient = std::max(rep.ratio_gradient, rg);
        }
    }
    if (!any_ball) throw BallOutsideDomain("no sample ball of radius r0 fits inside the grid");
    return rep;
}

DecayFit fit_decay_profile(const std::vector<double>& r, const std::vector<double>& g, double r1, double r2,
                           bool fit_beta) {
    if (r.size() != g.size()) throw InvalidArgument("profile arrays differ in length");
    if (!(r1 > 1.0) || !(r2 > r1)) throw WindowDegenerate("window must satisfy 1 < r1 < r2");
    double gmax = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k)
        if (std::isfinite(g[k])) gmax = std::max(gmax, std::abs(g[k]));
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * gmax;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (r[k] < r1 || r[k] > r2 || !std::isfinite(g[k])) continue;
        const double a = std::abs(g[k]);
        if (!(a > floor)) continue;
        xs.push_back(r[k]);
        ys.push_back(std::log(a));
    }
    const int cols = fit_beta ? 3 : 2;
    if (static_cast<int>(xs.size()) < cols + 1) throw WindowDegenerate("too few samples above the noise floor");
    Eigen::MatrixXd A(xs.size(), cols);
    Eigen::VectorXd b(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double lr = std::log(xs[k]);
        A(k, 0) = lr;
        A(k, 1) = 1.0;
        if (fit_beta) A(k, 2) = std::log(lr);
        b(k) = ys[k];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    DecayFit fit;
    fit.alpha = c(0);
    fit.beta = fit_beta ? c(2) : 0.0;
    fit.r1 = r1;
    fit.r2 = r2;
    fit.points = static_cast<int>(xs.size());
    fit.rms = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(xs.size()));
    return fit;
}

DecayFit fit_decay(const std::vector<const AxiScalarField*>& components, double r1, double r2, bool fit_beta) {
    if (components.empty()) throw InvalidArgument("fit_decay needs at least one component");
    const AxiGrid& g = components.front()->grid;
    for (const auto* c : components) require_same(g, c->grid);
    const double slack = 1e-9 * g.r_max;
    if (r1 < g.r_max / 8.0 - slack || r2 > g.r_max / 2.0 + slack)
        throw WindowDegenerate("window must lie inside [r_max/8, r_max/2]");
    std::vector<double> rs, prof;
    for (int i = 0; i < g.nr_nodes(); ++i) {
        double m = 0.0;
        for (int j = 0; j < g.nz_nodes(); ++j) {
            double s = 0.0;
            for (const auto* c : components) s += (*c)(i, j) * (*c)(i, j);
            m = std::max(m, std::sqrt(s));
        }
        rs.push_back(g.r(i));
        prof.push_back(m);
    }
    return fit_decay_profile(rs, prof, r1, r2, fit_beta);
}

DecayFit fit_decay(const AxiScalarField& g, double r1, double r2, bool fit_beta) {
    return fit_decay(std::vector<const AxiScalarField*>{&g}, r1, r2, fit_beta);
}

const AxiScalarField& FieldBundle::at(const std::string& name) const {
    for (const auto& [n, f] : components)
        if (n == name) return f;
    throw InvalidArgument("no component named " + name);
}

namespace {

std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s) {
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc()) throw InvalidArgument("malformed number in field file: " + std::string(s));
    return x;
}

}  // namespace

void save_fields(const std::string& path, const FieldBundle& b, FieldFormat format) {
    b.grid.validate();
    json header;
    header["grid"] = {{"r_max", b.grid.r_max}, {"n_r", b.grid.n_r}, {"n_z", b.grid.n_z}, {"periodic", b.grid.periodic}};
    header["mode"] = b.grid.periodic ? "periodic" : "slab";
    header["format"] = format == FieldFormat::Csv ? "csv" : "binary";
    header["components"] = json::array();
    for (const auto& [name, f] : b.components) {
        require_same(b.grid, f.grid);
        header["components"].push_back(name);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open " + path + " for writing");
    out << header.dump() << '\n';
    const AxiGrid& g = b.grid;
    if (format == FieldFormat::Csv) {
        out << "i,j";
        for (const auto& c : b.components) out << ',' << c.first;
        out << '\n';
        for (int i = 0; i < g.nr_nodes(); ++i) {
            for (int j = 0; j < g.nz_nodes(); ++j) {
                out << i << ',' << j;
                for (const auto& c : b.components) out << ',' << format_double(c.second(i, j));
                out << '\n';
            }
        }
    } else {
        for (const auto& c : b.components)
            out.write(reinterpret_cast<const char*>(c.second.v.data()),
                      static_cast<std::streamsize>(c.second.v.size() * sizeof(double)));
    }
    if (!out) throw InvalidArgument("write failed for " + path);
}

FieldBundle load_fields(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::string line;
    std::getline(in, line);
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw InvalidArgument("bad field header in " + path + ": " + e.what());
    }
    FieldBundle b;
    b.grid.r_max = header.at("grid").at("r_max").get<double>();
    b.grid.n_r = header.at("grid").at("n_r").get<int>();
    b.grid.n_z = header.at("grid").at("n_z").get<int>();
    b.grid.periodic = header.at("grid").at("periodic").get<bool>();
    b.grid.validate();
    for (const auto& name : header.at("components")) b.components.emplace_back(name.get<std::string>(), AxiScalarField(b.grid));
    const std::string fmt = header.at("format").get<std::string>();
    const AxiGrid& g = b.grid;
    if (fmt == "csv") {
        std::getline(in, line);  // column names
        for (std::size_t row = 0; row < g.size(); ++row) {
            if (!std::getline(in, line)) throw InvalidArgument("truncated field file " + path);
            std::vector<std::string_view> cells;
            std::string_view sv(line);
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = sv.find(',', start);
                cells.push_back(sv.substr(start, comma == std::string_view::npos ? sv.npos : comma - start));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            if (cells.size() != b.components.size() + 2) throw InvalidArgument("bad column count in " + path);
            const int i = static_cast<int>(parse_double(cells[0]));
            const int j = static_cast<int>(parse_double(cells[1]));
            if (i < 0 || i >= g.nr_nodes() || j < 0 || j >= g.nz_nodes()) throw InvalidArgument("node out of range");
            for (std::size_t c = 0; c < b.components.size(); ++c) b.components[c].second(i, j) = parse_double(cells[c + 2]);
        }
    } else if (fmt == "binary") {
        for (auto& c : b.components) {
            in.read(reinterpret_cast<char*>(c.second.v.data()), static_cast<std::streamsize>(c.second.v.size() * sizeof(double)));
            if (!in) throw InvalidArgument("truncated field file " + path);
        }
    } else {
        throw InvalidArgument("unknown field format " + fmt);
    }
    return b;
}

}  // namespace slabgreen
