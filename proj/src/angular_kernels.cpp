#include "slabgreen/angular_kernels.hpp"

#include <boost/math/special_functions/ellint_rd.hpp>
#include <boost/math/special_functions/ellint_rf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "slabgreen/errors.hpp"
#include "slabgreen/quadrature.hpp"
#include "slabgreen/slab_green.hpp"
#include "special.hpp"

namespace slabgreen {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv4Pi = 1.0 / (4.0 * std::numbers::pi);
constexpr int kSeriesTerms = 40;
constexpr long kMaxImages = 10000000;
constexpr long kMaxModes = 1000000;

// Coefficients of S(mu) = sum_j c_j mu^{2j+1}, the cos-moment of (1 - mu cos phi)^{-1/2}.
const std::array<double, kSeriesTerms>& series_coefficients() {
    static const std::array<double, kSeriesTerms> c = [] {
        std::array<double, kSeriesTerms> out{};
        double binom = 1.0;   // (1/2)_k / k!
        double moment = 2.0 * kPi;  // int cos^{2j} over [0,2pi], starting at j = 0
        for (int k = 0, j = 0; j < kSeriesTerms; ++k) {
            binom *= (0.5 + k) / (k + 1.0);  // now (1/2)_{k+1}/(k+1)!
            if (k % 2 == 0) {
                const int even = k + 2;  // power of cos in the moment
                moment *= (even - 1.0) / even;
                out[j++] = binom * moment;
            }
        }
        return out;
    }();
    return c;
}

struct SeriesEval {
    double s, ds;
};

SeriesEval ring_series(double mu) {
    const auto& c = series_coefficients();
    const double mu2 = mu * mu;
    double s = 0.0, ds = 0.0, pw = mu;
    for (int j = 0; j < kSeriesTerms; ++j) {
        const double term = c[j] * pw;
        s += term;
        ds += (2.0 * j + 1.0) * c[j] * pw / mu;
        if (term < 1e-18 * s) break;
        pw *= mu2;
    }
    return {s, ds};
}

void check_pair(const AxiPair& p) {
    if (!std::isfinite(p.r) || !std::isfinite(p.z) || !std::isfinite(p.rho) || !std::isfinite(p.l))
        throw InvalidArgument("non-finite pair");
    if (!(p.r > 0.0)) throw InvalidArgument("target radius must be positive");
    if (p.rho < 0.0) throw InvalidArgument("source radius must be nonnegative");
    if (p.z < 0.0 || p.z > 1.0 || p.l < 0.0 || p.l > 1.0) throw InvalidArgument("heights must lie in [0,1]");
    if (std::hypot(p.rho - p.r, p.z - p.l) < 1e-8) throw SingularPoint("source coincides with target ring");
}

// F(t) = ring_cos(delta^2 + t^2, B) and dF/drho, summed over the grouped image series.
struct RingImages {
    double delta, B, r, a, b;
    bool gradient;

    double F(double t) const {
        const RingIntegral ri = ring_cos(delta * delta + t * t, B);
        if (!gradient) return ri.value;
        return 2.0 * delta * ri.dA + 4.0 * r * ri.dB;
    }
    double group(double s) const { return F(2 * s + a) + F(2 * s - a) - F(2 * s - b) - F(2 * s + b); }
    double primary() const { return F(a) - F(b); }
    // Bound on sum_{n >= N} |group(n)|, N >= 2.
    double tail(long N) const {
        const double U = 2.0 * static_cast<double>(N) - 2.0;
        const double S2 = delta * delta + U * U;
        const double S = std::sqrt(S2);
        const double c = b * b - a * a;  // = 4 z l
        const double lead5 = 1.0 / (S2 * S2 * S) + 1.0 / (S2 * S * 6.0 * U);
        if (gradient) return c * 24.0 * (2.0 * std::abs(delta) + 4.0 * r) * lead5;
        const double lead3 = 1.0 / (S2 * S) + 1.0 / (2.0 * U * S);
        return c * std::min(48.0 * 0.25 * B * lead5, 4.0 * kPi * lead3);
    }
    double sum(double target, bool with_primary) const {
        long N = 2;
        while (kInv4Pi * tail(N) > target) {
            if (N > kMaxImages) throw TruncationFailure("ring image series did not reach tolerance");
            N = (N < 64) ? N + 1 : N + N / 8;
        }
        double acc = 0.0;
        for (long n = N - 1; n >= 2; --n) acc += group(static_cast<double>(n));
        const double q1 = (F(2.0 + a) - F(2.0 - b)) + (F(2.0 - a) - F(2.0 + b));
        acc += q1;
        if (with_primary) acc += primary();
        return kInv4Pi * acc;
    }
};

RingImages make_images(const AxiPair& p, bool gradient) {
    return {p.rho - p.r, 4.0 * p.rho * p.r, p.r, p.z - p.l, p.z + p.l, gradient};
}

// 2 sum_k sin(k pi z) sin(k pi l) c_k with c_k from ring_modal_coefficients.
double modal_cos(const AxiPair& p, double target, bool gradient) {
    const std::vector<double> c = ring_modal_coefficients(p.r, p.rho, target, gradient);
    double acc = 0.0;
    for (std::size_t k = c.size(); k >= 1; --k) {
        const double kp = kPi * static_cast<double>(k);
        acc += std::sin(kp * p.z) * std::sin(kp * p.l) * c[k - 1];
    }
    return 2.0 * acc;
}

double quad_target(double tol) { return 0.5 * tol; }

TruncationPolicy pointwise_policy(double tol) {
    TruncationPolicy pol;
    pol.target_abs_error = std::max(tol * 1e-2 / (2.0 * kPi), 1e-18);
    return pol;
}

// `kink_cos`: cos(phi) of an interior zero of a signed integrand taken in absolute value (ignored
// outside (-1, 1)).
std::vector<double> phi_breaks(const AxiPair& p, double kink_cos = 2.0) {
    std::vector<double> pts{0.0};
    if (kink_cos > -1.0 && kink_cos < 1.0) pts.push_back(std::acos(kink_cos));
    if (p.rho > 0.0) {
        const double kappa = std::abs(p.rho - p.r) / (2.0 * std::sqrt(p.rho * p.r));
        const double vert = std::abs(p.z - p.l) / (2.0 * std::sqrt(p.rho * p.r));
        for (double c : {kappa, vert, 4.0 * std::max(kappa, vert)})
            if (c > 1e-12 && c < kPi / 4.0) pts.push_back(c);
    }
    pts.push_back(kPi / 4.0);
    pts.push_back(kPi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

SlabPoint target_point(const AxiPair& p) { return {p.r, 0.0, p.z}; }
SlabPoint source_point(const AxiPair& p, double phi) {
    return {p.rho * std::cos(phi), p.rho * std::sin(phi), p.l};
}

// Integrand is even in phi, so integrate [0, pi] and double.
template <class F>
double phi_integral(const AxiPair& p, double tol, F&& f, double kink_cos = 2.0) {
    const QuadratureResult q = integrate_adaptive(f, phi_breaks(p, kink_cos), quad_target(tol) / 2.0);
    return 2.0 * q.value;
}

double quadrature_cos_G(const AxiPair& p, double tol) {
    const TruncationPolicy pol = pointwise_policy(tol);
    const SlabPoint x = target_point(p);
    return phi_integral(p, tol, [&](double phi) { return eval_G(x, source_point(p, phi), pol).value * std::cos(phi); });
}

double quadrature_cos_gradG(const AxiPair& p, double tol) {
    const TruncationPolicy pol = pointwise_policy(tol);
    const SlabPoint x = target_point(p);
    return phi_integral(p, tol, [&](double phi) {
        const double c = std::cos(phi), s = std::sin(phi);
        const GradientResult g = eval_gradG(x, source_point(p, phi), pol);
        return (g.value[2] * c + g.value[3] * s) * c;
    });
}

}  // namespace

RingIntegral ring_cos(double A, double B) {
    if (!(A > 0.0) || B < 0.0) throw InvalidArgument("ring_cos requires A > 0, B >= 0");
    RingIntegral out;
    if (B == 0.0) {
        out.value = 0.0;
        out.dA = 0.0;
        out.dB = kPi / (2.0 * A * std::sqrt(A));
        return out;
    }
    const double mu = B / (2.0 * A + B);
    if (mu <= 0.25) {
        const double C = A + 0.5 * B;
        const double rc = 1.0 / std::sqrt(C);
        const SeriesEval se = ring_series(mu);
        out.value = rc * se.s;
        const double dmu_dA = -B / (2.0 * C * C);
        const double dmu_dB = 1.0 / (2.0 * C) - B / (4.0 * C * C);
        out.dA = -0.5 * rc / C * se.s + rc * se.ds * dmu_dA;
        out.dB = -0.25 * rc / C * se.s + rc * se.ds * dmu_dB;
        return out;
    }
    const double sum = A + B;
    const double m = B / sum;
    const double mp = A / sum;
    const double rf = boost::math::ellint_rf(0.0, mp, 1.0);
    const double rd = boost::math::ellint_rd(0.0, mp, 1.0);
    const double K = rf;
    const double E = rf - m / 3.0 * rd;
    const double root = std::sqrt(sum);
    out.value = 4.0 * ((2.0 - m) * K - 2.0 * E) / (m * root);
    out.dA = -2.0 / (sum * root) * ((2.0 - m) * E - 2.0 * mp * K) / (m * mp);
    out.dB = (-0.5 * out.value - A * out.dA) / B;
    return out;
}

std::vector<double> ring_modal_coefficients(double r, double rho, double target, bool gradient) {
    if (!(r > 0.0) || !(rho > 0.0)) throw InvalidArgument("modal coefficients need positive radii");
    const double lo = std::min(rho, r), hi = std::max(rho, r);
    const double gap = hi - lo;
    if (!(gap > 0.0)) throw InvalidArgument("modal path requires rho != r");
    const double q = std::exp(-kPi * gap);
    const double root = std::sqrt(rho * r);
    auto term_bound = [&](long k) {
        const double kp = kPi * static_cast<double>(k);
        const double u = kp * lo, v = kp * hi;
        const double decay = std::exp(-kp * gap);
        if (gradient) return (1.0 + 0.25 / u) * (1.0 + 1.0 / v) * (1.0 + 1.0 / v) * decay / root;
        return (1.0 + 1.0 / v) * decay / (kp * root);
    };
    long K = 0;
    while (term_bound(K + 1) / (1.0 - q) > target) {
        if (++K > kMaxModes) throw TruncationFailure("modal ring series did not reach tolerance");
    }
    const bool source_inside = rho < r;
    std::vector<double> c(static_cast<std::size_t>(K));
    for (long k = 1; k <= K; ++k) {
        const double kp = kPi * static_cast<double>(k);
        const double u = kp * lo, v = kp * hi;
        const double e = std::exp(-(v - u));
        if (!gradient) {
            c[k - 1] = special::i1_scaled(u) * special::k1_scaled(v) * e;
            continue;
        }
        const double i0 = special::i0_scaled(u), i1 = special::i1_scaled(u);
        const double k0 = special::k0_scaled(v), k1 = special::k1_scaled(v);
        const double d = source_inside ? (i0 - i1 / u) * k1   // I1'(u) K1(v)
                                       : -i1 * (k0 + k1 / v);  // I1(u) K1'(v)
        c[k - 1] = kp * d * e;
    }
    return c;
}

double cos_G_log_regular_part(double r, double z, double tol) {
    if (!(r > 0.0) || !(z > 0.0) || !(z < 1.0)) throw InvalidArgument("target must satisfy r > 0, 0 < z < 1");
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    const RingImages img{0.0, 4.0 * r * r, r, 0.0, 2.0 * z, false};
    const double reflected = kInv4Pi * ring_cos(4.0 * z * z, 4.0 * r * r).value;
    return (std::log(8.0 * r) - 2.0) / (2.0 * kPi * r) - reflected + img.sum(0.5 * tol, false);
}

double cos_G_direct(const AxiPair& p) {
    check_pair(p);
    if (p.rho == 0.0) return 0.0;
    return kInv4Pi * make_images(p, false).primary();
}

double cos_G_remainder(const AxiPair& p, double tol) {
    check_pair(p);
    if (p.rho == 0.0) return 0.0;
    return make_images(p, false).sum(0.5 * tol, false);
}

double cos_G_path(const AxiPair& p, double tol, AngularPath path) {
    check_pair(p);
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (p.rho == 0.0) return 0.0;
    if (path == AngularPath::Auto)
        path = std::abs(p.rho - p.r) >= kAngularModalSwitch ? AngularPath::Modal : AngularPath::Elliptic;
    switch (path) {
        case AngularPath::Modal: return modal_cos(p, 0.5 * tol, false);
        case AngularPath::Quadrature: return quadrature_cos_G(p, tol);
        default: return make_images(p, false).sum(0.5 * tol, true);
    }
}

double cos_gradG_path(const AxiPair& p, double tol, AngularPath path) {
    check_pair(p);
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (p.rho == 0.0) return 0.0;
    if (path == AngularPath::Auto)
        path = std::abs(p.rho - p.r) >= kAngularModalSwitch ? AngularPath::Modal : AngularPath::Elliptic;
    switch (path) {
        case AngularPath::Modal: return modal_cos(p, 0.5 * tol, true);
        case AngularPath::Quadrature: return quadrature_cos_gradG(p, tol);
        default: return make_images(p, true).sum(0.5 * tol, true);
    }
}

double angular_cos_G(const AxiPair& p, double tol) {
    const double closed = cos_G_path(p, tol, AngularPath::Auto);
    if (p.rho == 0.0) return closed;
    const double quad = cos_G_path(p, tol, AngularPath::Quadrature);
    if (std::abs(closed - quad) > 2.0 * tol)
        throw PathDisagreement("closed form " + std::to_string(closed) + " vs quadrature " + std::to_string(quad));
    return closed;
}

double angular_cos_gradG(const AxiPair& p, double tol) {
    const double closed = cos_gradG_path(p, tol, AngularPath::Auto);
    if (p.rho == 0.0) return closed;
    const double quad = cos_gradG_path(p, tol, AngularPath::Quadrature);
    if (std::abs(closed - quad) > 2.0 * tol)
        throw PathDisagreement("closed form " + std::to_string(closed) + " vs quadrature " + std::to_string(quad));
    return closed;
}

double angular_abs_G(const AxiPair& p, double tol) {
    check_pair(p);
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    const TruncationPolicy pol = pointwise_policy(tol);
    const SlabPoint x = target_point(p);
    if (p.rho == 0.0) return 2.0 * kPi * std::abs(eval_G(x, source_point(p, 0.0), pol).value);
    return phi_integral(p, tol, [&](double phi) { return std::abs(eval_G(x, source_point(p, phi), pol).value); });
}

RadialPair angular_abs_gradG(const AxiPair& p, double tol) {
    check_pair(p);
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    const TruncationPolicy pol = pointwise_policy(tol);
    const SlabPoint x = target_point(p);
    RadialPair out;
    if (p.rho == 0.0) {
        const GradientResult g = eval_gradG(x, source_point(p, 0.0), pol);
        // |grad_{y'} G . (cos phi, sin phi)| integrates to 4 |grad_{y'} G|
        out.d_rho = 4.0 * std::hypot(g.value[2], g.value[3]);
        out.d_r = 2.0 * kPi * std::abs(g.value[0]);
        return out;
    }
    out.d_rho = phi_integral(p, tol, [&](double phi) {
        const GradientResult g = eval_gradG(x, source_point(p, phi), pol);
        return std::abs(g.value[2] * std::cos(phi) + g.value[3] * std::sin(phi));
    }, p.rho / p.r);  // dG/drho changes sign with rho - r cos(phi)
    out.d_r = phi_integral(p, tol, [&](double phi) {
        const GradientResult g = eval_gradG(x, source_point(p, phi), pol);
        return std::abs(g.value[0]);
    }, p.r / p.rho);  // and dG/dr with r - rho cos(phi)
    return out;
}

}  // namespace slabgreen
