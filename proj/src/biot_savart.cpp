#include "slabgreen/biot_savart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slabgreen/angular_kernels.hpp"
#include "slabgreen/errors.hpp"
#include "slabgreen/parallel.hpp"

namespace slabgreen {
namespace {

constexpr double kPi = std::numbers::pi;

double smooth(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smooth1(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
double smooth2(double t) { return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

// Bilinear interpolation on the grid.
double sample(const AxiScalarField& f, double r, double z) {
    const AxiGrid& g = f.grid;
    const double x = std::clamp(r / g.hr(), 0.0, static_cast<double>(g.n_r));
    const double y = std::clamp((z - g.z0()) / g.hz(), 0.0, static_cast<double>(g.nz_nodes() - 1));
    const int i = std::min(static_cast<int>(x), g.n_r - 1);
    const int j = std::min(static_cast<int>(y), g.nz_nodes() - 2);
    const double tx = x - i, ty = y - j;
    return (1 - tx) * ((1 - ty) * f(i, j) + ty * f(i, j + 1)) + tx * ((1 - ty) * f(i + 1, j) + ty * f(i + 1, j + 1));
}

}  // namespace

double CutoffProfile::value(double r) const {
    if (r <= inner_zero || r >= outer_zero) return 0.0;
    if (r < inner_one) return smooth((r - inner_zero) / (inner_one - inner_zero));
    if (r > outer_one) return smooth((outer_zero - r) / (outer_zero - outer_one));
    return 1.0;
}

double CutoffProfile::d1(double r) const {
    if (r <= inner_zero || r >= outer_zero) return 0.0;
    if (r < inner_one) {
        const double w = inner_one - inner_zero;
        return smooth1((r - inner_zero) / w) / w;
    }
    if (r > outer_one) {
        const double w = outer_zero - outer_one;
        return -smooth1((outer_zero - r) / w) / w;
    }
    return 0.0;
}

double CutoffProfile::d2(double r) const {
    if (r <= inner_zero || r >= outer_zero) return 0.0;
    if (r < inner_one) {
        const double w = inner_one - inner_zero;
        return smooth2((r - inner_zero) / w) / (w * w);
    }
    if (r > outer_one) {
        const double w = outer_zero - outer_one;
        return smooth2((outer_zero - r) / w) / (w * w);
    }
    return 0.0;
}

CutoffProfile make_annulus_cutoff(double r0) {
    if (!(r0 > 4.0)) throw RadiusTooSmall("annulus cutoff needs r0 > 4");
    return {0.75 * r0, 0.875 * r0, 1.125 * r0, 1.25 * r0};
}

AxiScalarField swirl_source(const AxiScalarField& utheta) {
    AxiVectorField v(utheta.grid);
    v.ut = utheta;
    const AxiVectorField w = curl_axisym(v);
    AxiScalarField s = d_z(w.ur);
    const AxiScalarField t = d_r(w.uz, Parity::Even);
    for (std::size_t k = 0; k < s.v.size(); ++k) s.v[k] -= t.v[k];
    return s;
}

double log_corner_integral(double X, double Y) {
    if (X < 0.0 || Y < 0.0) throw InvalidArgument("corner integral needs nonnegative extents");
    if (X == 0.0 || Y == 0.0) return 0.0;
    return 0.5 * (X * Y * (std::log(X * X + Y * Y) - 3.0) + X * X * std::atan(Y / X) + Y * Y * std::atan(X / Y));
}

struct SwirlReconstructor::Impl {
    AxiGrid grid;
    CutoffProfile psi;
    double tol = 0.0;
    double modal_tol = 0.0;
    int ka = 0, kb = 0;  // first and last column of the support
    int rows = 0;
    long kmax = 0;
    // Integrands per (column - ka, row): 0 source psi rho, 1 psi' u rho, 2 (psi'' + psi'/rho) u rho,
    // 3 psi' d_rho u rho.
    std::vector<double> g[4];
    // hat[f][(k - 1) * cols + c] = sum_j w_j sin(k pi l_j) g_f(c, j)
    std::vector<double> hat[4];
    std::vector<char> radial_active;  // column has psi' != 0
    std::vector<double> wr, wz;

    int cols() const { return kb - ka + 1; }
    std::size_t at(int c, int j) const { return static_cast<std::size_t>(c) * rows + j; }
};

SwirlReconstructor::SwirlReconstructor(const AxiScalarField& source, const AxiScalarField& u,
                                       const CutoffProfile& psi, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (!(source.grid == u.grid)) throw SupportMismatch("source and swirl grids differ");
    const AxiGrid& grid = u.grid;
    grid.validate();
    if (grid.periodic) throw SupportMismatch("reconstruction needs a slab grid");
    if (!(psi.inner_zero > 0.0 && psi.inner_zero < psi.inner_one && psi.inner_one <= psi.outer_one &&
          psi.outer_one < psi.outer_zero))
        throw InvalidArgument("cutoff radii out of order");
    if (grid.r_max < psi.outer_zero) throw SupportMismatch("grid does not cover the cutoff support");

    auto impl = std::make_shared<Impl>();
    Impl& m = *impl;
    m.grid = grid;
    m.psi = psi;
    m.tol = tol;
    m.modal_tol = 1e-6 * tol;
    const double hr = grid.hr(), hz = grid.hz();
    m.ka = static_cast<int>(std::floor(psi.inner_zero / hr));
    m.kb = std::min(grid.n_r, static_cast<int>(std::ceil(psi.outer_zero / hr)));
    m.rows = grid.nz_nodes();
    const int cols = m.cols();

    m.wr.assign(cols, hr);
    m.wr.front() *= 0.5;
    m.wr.back() *= 0.5;
    m.wz.assign(m.rows, hz);
    m.wz.front() *= 0.5;
    m.wz.back() *= 0.5;

    const AxiScalarField du = d_r(u, Parity::Odd);
    for (auto& gf : m.g) gf.assign(static_cast<std::size_t>(cols) * m.rows, 0.0);
    m.radial_active.assign(cols, 0);
    for (int c = 0; c < cols; ++c) {
        const int i = m.ka + c;
        const double rho = grid.r(i);
        const double p0 = psi.value(rho), p1 = psi.d1(rho), p2 = psi.d2(rho);
        m.radial_active[c] = p1 != 0.0;
        for (int j = 0; j < m.rows; ++j) {
            m.g[0][m.at(c, j)] = source(i, j) * p0 * rho;
            m.g[1][m.at(c, j)] = p1 * u(i, j) * rho;
            m.g[2][m.at(c, j)] = (p2 * rho + p1) * u(i, j);
            m.g[3][m.at(c, j)] = p1 * du(i, j) * rho;
        }
    }

    // Modal coefficients decay fastest for large radii and gaps, so the smallest radius of the
    // support at the switch gap needs the most modes.
    const double lo = psi.inner_zero;
    const double hi = lo + kAngularModalSwitch;
    m.kmax = static_cast<long>(std::max(ring_modal_coefficients(hi, lo, m.modal_tol, false).size(),
                                        ring_modal_coefficients(hi, lo, m.modal_tol, true).size()));
    std::vector<double> sines(static_cast<std::size_t>(m.kmax) * m.rows);
    for (long k = 1; k <= m.kmax; ++k)
        for (int j = 0; j < m.rows; ++j)
            sines[(k - 1) * m.rows + j] = m.wz[j] * std::sin(kPi * static_cast<double>(k) * grid.z(j));
    for (int f = 0; f < 4; ++f) {
        m.hat[f].assign(static_cast<std::size_t>(m.kmax) * cols, 0.0);
        for (int c = 0; c < cols; ++c) {
            if (f > 0 && !m.radial_active[c]) continue;
            const double* gc = &m.g[f][m.at(c, 0)];
            for (long k = 1; k <= m.kmax; ++k) {
                const double* sk = &sines[(k - 1) * m.rows];
                double acc = 0.0;
                for (int j = 0; j < m.rows; ++j) acc += sk[j] * gc[j];
                m.hat[f][(k - 1) * cols + c] = acc;
            }
        }
    }
    impl_ = std::move(impl);
}

const AxiGrid& SwirlReconstructor::grid() const { return impl_->grid; }

ReconstructionTerms SwirlReconstructor::at(double r, double z) const {
    const Impl& m = *impl_;
    if (!(r >= m.psi.inner_one && r <= m.psi.outer_one))
        throw SupportMismatch("target radius outside the band where the cutoff is one");
    if (!(z > 0.0 && z < 1.0)) throw SupportMismatch("target height must lie strictly inside the slab");

    const AxiGrid& grid = m.grid;
    const int cols = m.cols();
    const double hr = grid.hr(), hz = grid.hz();

    // Target node, if the target sits on the grid.
    const int it = static_cast<int>(std::lround(r / hr));
    const int jt = static_cast<int>(std::lround(z / hz));
    const bool on_node = std::abs(r - grid.r(it)) <= 1e-9 * hr && std::abs(z - grid.z(jt)) <= 1e-9 * hz;
    const int ct = it - m.ka;

    std::vector<double> target_sines(static_cast<std::size_t>(m.kmax));
    for (long k = 1; k <= m.kmax; ++k) target_sines[k - 1] = std::sin(kPi * static_cast<double>(k) * z);

    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (int c = 0; c < cols; ++c) {
        const double rho = grid.r(m.ka + c);
        const double gap = std::abs(rho - r);
        const bool radial = m.radial_active[c] != 0;
        if (gap >= kAngularModalSwitch) {
            const std::vector<double> cv = ring_modal_coefficients(r, rho, m.modal_tol, false);
            const long kv = std::min<long>(static_cast<long>(cv.size()), m.kmax);
            double s0 = 0.0, s2 = 0.0, s3 = 0.0;
            for (long k = kv; k >= 1; --k) {
                const double w = 2.0 * target_sines[k - 1] * cv[k - 1];
                const std::size_t idx = (k - 1) * cols + c;
                s0 += w * m.hat[0][idx];
                if (radial) {
                    s2 += w * m.hat[2][idx];
                    s3 += w * m.hat[3][idx];
                }
            }
            acc[0] += m.wr[c] * s0;
            acc[2] += m.wr[c] * s2;
            acc[3] += m.wr[c] * s3;
            if (radial) {
                const std::vector<double> cg = ring_modal_coefficients(r, rho, m.modal_tol, true);
                const long kg = std::min<long>(static_cast<long>(cg.size()), m.kmax);
                double s1 = 0.0;
                for (long k = kg; k >= 1; --k)
                    s1 += 2.0 * target_sines[k - 1] * cg[k - 1] * m.hat[1][(k - 1) * cols + c];
                acc[1] += m.wr[c] * s1;
            }
            continue;
        }
        for (int j = 1; j + 1 < m.rows; ++j) {
            if (on_node && c == ct && j == jt) continue;
            const AxiPair pair{r, z, rho, grid.z(j)};
            const double w = m.wr[c] * m.wz[j];
            const std::size_t idx = m.at(c, j);
            const double kernel = cos_G_path(pair, m.tol, AngularPath::Elliptic);
            acc[0] += w * kernel * m.g[0][idx];
            if (!radial) continue;
            acc[2] += w * kernel * m.g[2][idx];
            acc[3] += w * kernel * m.g[3][idx];
            acc[1] += w * cos_gradG_path(pair, m.tol, AngularPath::Elliptic) * m.g[1][idx];
        }
    }

    // Log singularity of the first term: subtract G0 ln(dist) on the grid and add its exact integral.
    double g_target;
    if (on_node) {
        g_target = m.g[0][m.at(ct, jt)];
    } else {
        const double x = (r - grid.r(m.ka)) / hr;
        const int c0 = std::clamp(static_cast<int>(x), 0, cols - 2);
        const double tx = x - c0;
        const double y = z / hz;
        const int j0 = std::clamp(static_cast<int>(y), 0, m.rows - 2);
        const double ty = y - j0;
        g_target = (1 - tx) * ((1 - ty) * m.g[0][m.at(c0, j0)] + ty * m.g[0][m.at(c0, j0 + 1)]) +
                   tx * ((1 - ty) * m.g[0][m.at(c0 + 1, j0)] + ty * m.g[0][m.at(c0 + 1, j0 + 1)]);
    }
    const double g0 = -g_target / (2.0 * kPi * r);
    if (g0 != 0.0) {
        double log_sum = 0.0;
        for (int c = 0; c < cols; ++c) {
            const double dr = grid.r(m.ka + c) - r;
            double col = 0.0;
            for (int j = 0; j < m.rows; ++j) {
                if (on_node && c == ct && j == jt) continue;
                const double dz = grid.z(j) - z;
                col += m.wz[j] * 0.5 * std::log(dr * dr + dz * dz);
            }
            log_sum += m.wr[c] * col;
        }
        const double x_lo = r - grid.r(m.ka), x_hi = grid.r(m.kb) - r;
        const double exact = log_corner_integral(x_lo, z) + log_corner_integral(x_lo, 1.0 - z) +
                             log_corner_integral(x_hi, z) + log_corner_integral(x_hi, 1.0 - z);
        acc[0] += g0 * (exact - log_sum);
    }
    if (on_node && g_target != 0.0)
        acc[0] += m.wr[ct] * m.wz[jt] * cos_G_log_regular_part(r, z, m.tol) * g_target;

    ReconstructionTerms t;
    t.i1 = acc[0];
    t.i2 = acc[1];
    t.i3 = acc[2];
    t.i2_direct = acc[3];
    return t;
}

ReconstructionTerms reconstruct_swirl(const AxiScalarField& utheta, double r, double z, const CutoffProfile& psi,
                                      double tol) {
    return SwirlReconstructor(swirl_source(utheta), utheta, psi, tol).at(r, z);
}

double direct_identity_check(const AxiScalarField& utheta, const CutoffProfile& psi,
                             const std::vector<std::pair<double, double>>& targets, double tol) {
    const SwirlReconstructor rec(swirl_source(utheta), utheta, psi, tol);
    const std::vector<double> err = parallel_map(targets.size(), [&](std::size_t k) {
        const auto [r, z] = targets[k];
        const ReconstructionTerms t = rec.at(r, z);
        return std::abs(sample(utheta, r, z) * psi.value(r) - t.direct_value());
    });
    double worst = 0.0;
    for (double e : err) worst = std::max(worst, e);
    return worst;
}

}  // namespace slabgreen
