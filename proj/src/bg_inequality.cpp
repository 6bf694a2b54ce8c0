#include "slabgreen/bg_inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "slabgreen/errors.hpp"
#include "slabgreen/parallel.hpp"

namespace slabgreen {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

// (1 - t^2)^4 on |t| < 1.
double bump(double t) {
    const double q = 1.0 - t * t;
    return q > 0.0 ? q * q * q * q : 0.0;
}

// Second-order first and second differences of samples spaced h (n + 1 values, stride s).
double first_diff(const double* f, int k, int n, std::size_t s, double h) {
    if (k == 0) return (-3.0 * f[0] + 4.0 * f[s] - f[2 * s]) / (2.0 * h);
    if (k == n) return (3.0 * f[n * s] - 4.0 * f[(n - 1) * s] + f[(n - 2) * s]) / (2.0 * h);
    return (f[(k + 1) * s] - f[(k - 1) * s]) / (2.0 * h);
}
double second_diff(const double* f, int k, int n, std::size_t s, double h) {
    if (k == 0) return (2.0 * f[0] - 5.0 * f[s] + 4.0 * f[2 * s] - f[3 * s]) / (h * h);
    if (k == n) return (2.0 * f[n * s] - 5.0 * f[(n - 1) * s] + 4.0 * f[(n - 2) * s] - f[(n - 3) * s]) / (h * h);
    return (f[(k + 1) * s] - 2.0 * f[k * s] + f[(k - 1) * s]) / (h * h);
}

double trapezoid_weight(int k, int n) { return (k == 0 || k == n) ? 0.5 : 1.0; }

double column_mean(const ThinDomainSample& s, int i) {
    double acc = 0.0;
    for (int j = 0; j <= s.n_z; ++j) acc += trapezoid_weight(j, s.n_z) * s.at(i, j);
    return acc / s.n_z;
}

double best_over_ladder(const std::function<double(double)>& ratio, double* arg) {
    double best = 0.0;
    for (double a : bg_amplitude_ladder()) {
        const double v = ratio(a);
        if (v > best) {
            best = v;
            if (arg) *arg = a;
        }
    }
    return best;
}

}  // namespace

std::string to_string(BgFamily f) {
    switch (f) {
        case BgFamily::ZeroTrace: return "trace";
        case BgFamily::ZeroMean: return "mean";
        default: return "none";
    }
}

BgFamily bg_family_from_string(const std::string& s) {
    if (s == "trace") return BgFamily::ZeroTrace;
    if (s == "mean") return BgFamily::ZeroMean;
    if (s == "none") return BgFamily::Unconstrained;
    throw InvalidArgument("unknown family '" + s + "' (expected trace, mean or none)");
}

double ThinDomainSample::constraint_residual() const {
    double worst = 0.0;
    for (int i = 0; i <= n_r; ++i) {
        if (family == BgFamily::ZeroTrace)
            worst = std::max({worst, std::abs(at(i, 0)), std::abs(at(i, n_z))});
        else if (family == BgFamily::ZeroMean)
            worst = std::max(worst, std::abs(column_mean(*this, i)));
    }
    return worst;
}

int bg_default_nr(double lambda) { return std::max(256, static_cast<int>(std::ceil(48.0 * lambda))); }

ThinDomainSample make_thin_sample(double lambda, BgFamily family, const std::function<double(double, double)>& f,
                                  std::string label, int n_r, int n_z) {
    if (!(lambda >= 1.0)) throw InvalidArgument("lambda must be at least 1");
    if (n_z < 4) throw InvalidArgument("need at least 4 intervals across the thin direction");
    ThinDomainSample s;
    s.lambda = lambda;
    s.n_r = n_r > 0 ? n_r : bg_default_nr(lambda);
    s.n_z = n_z;
    if (s.n_r < 4) throw InvalidArgument("need at least 4 radial intervals");
    s.family = family;
    s.label = std::move(label);
    s.values.resize(static_cast<std::size_t>(s.n_r + 1) * (n_z + 1));
    for (int i = 0; i <= s.n_r; ++i)
        for (int j = 0; j <= n_z; ++j) s.at(i, j) = f(s.r(i), s.z(j));
    if (family == BgFamily::ZeroMean) {
        for (int i = 0; i <= s.n_r; ++i) {
            const double m = column_mean(s, i);
            double scale = 0.0, left = 0.0;
            for (int j = 0; j <= n_z; ++j) {
                scale = std::max(scale, std::abs(s.at(i, j)));
                s.at(i, j) -= m;
                left = std::max(left, std::abs(s.at(i, j)));
            }
            // A column constant up to rounding projects to exactly zero.
            if (left <= 64.0 * std::numeric_limits<double>::epsilon() * scale)
                for (int j = 0; j <= n_z; ++j) s.at(i, j) = 0.0;
        }
    }
    return s;
}

BgNorms bg_norms(const ThinDomainSample& s) {
    const int nr = s.n_r, nz = s.n_z;
    const double hr = s.hr(), hz = s.hz();
    const std::size_t stride_r = static_cast<std::size_t>(nz + 1);
    BgNorms out;
    double l2 = 0.0, g2 = 0.0, d2 = 0.0;
    for (int i = 0; i <= nr; ++i) {
        const double wi = trapezoid_weight(i, nr);
        const double* col = &s.values[i * stride_r];
        for (int j = 0; j <= nz; ++j) {
            const double w = wi * trapezoid_weight(j, nz);
            const double f = col[j];
            const double fr = first_diff(&s.values[j], i, nr, stride_r, hr);
            const double fz = first_diff(col, j, nz, 1, hz);
            const double lap = second_diff(&s.values[j], i, nr, stride_r, hr) + second_diff(col, j, nz, 1, hz);
            out.sup = std::max(out.sup, std::abs(f));
            l2 += w * f * f;
            g2 += w * (fr * fr + fz * fz);
            d2 += w * lap * lap;
        }
    }
    const double area = hr * hz;
    out.l2 = std::sqrt(l2 * area);
    out.grad_l2 = std::sqrt(g2 * area);
    out.lap_l2 = std::sqrt(d2 * area);
    return out;
}

double bg_ratio_scaled(const BgNorms& n, double lambda, double amplitude) {
    const double a = std::abs(amplitude);
    return a * n.sup / ((1.0 + a * n.grad_l2) * std::sqrt(std::log(kE + a * n.lap_l2 / lambda)));
}

double bg_ratio_unrefined_scaled(const BgNorms& n, double amplitude) {
    const double a = std::abs(amplitude);
    const double h1 = std::hypot(n.l2, n.grad_l2);
    return a * n.sup / ((1.0 + a * h1) * std::sqrt(std::log(kE + a * n.lap_l2)));
}

double bg_ratio(const ThinDomainSample& s) {
    const BgNorms n = bg_norms(s);
    if (n.sup < 1e-14 && n.grad_l2 < 1e-14 && n.lap_l2 < 1e-14) throw DegenerateSample("sample is numerically zero");
    return bg_ratio_scaled(n, s.lambda, 1.0);
}

std::vector<double> bg_amplitude_ladder() {
    std::vector<double> a;
    for (int m = -20; m <= 20; ++m) a.push_back(std::exp2(0.5 * m));
    return a;
}

std::vector<ThinDomainSample> bg_family(double lambda, BgFamily family, bool negative_control) {
    const double L = lambda;
    auto x_of = [](double r) { return (r - 0.5) / 1.5; };
    struct Radial {
        std::string name;
        std::function<double(double)> f;
    };
    const std::vector<Radial> radial = {
        {"sin1", [&](double r) { return std::sin(kPi * x_of(r)); }},
        {"sin3", [&](double r) { return std::sin(3.0 * kPi * x_of(r)); }},
        {"gauss", [](double r) { return std::exp(-std::pow((r - 1.25) / 0.2, 2)); }},
        {"ramp", [](double r) { return r - 0.5; }},
    };
    std::vector<ThinDomainSample> out;
    if (negative_control) {
        // z-independent profiles; constants are left out since their ratio is unbounded in amplitude
        // on every domain.
        const BgFamily tag = BgFamily::Unconstrained;
        for (const auto& R : radial)
            out.push_back(make_thin_sample(L, tag, [&](double r, double) { return R.f(r); }, "flat-" + R.name));
        for (double s : {0.25, 0.5}) {
            out.push_back(make_thin_sample(L, tag, [&](double r, double) { return bump((r - 1.25) / s); },
                                           "flat-bump" + std::to_string(s).substr(0, 4)));
        }
        for (int k = 1; k <= 4; ++k)
            out.push_back(make_thin_sample(L, tag, [&](double r, double) { return std::sin(k * kPi * x_of(r)); },
                                           "flat-sinr" + std::to_string(k)));
        return out;
    }
    const bool trace = family == BgFamily::ZeroTrace;
    auto zprofile = [trace](int k, double zeta) {
        return trace ? std::sin(k * kPi * zeta) : std::cos(k * kPi * zeta);
    };
    const std::string zname = trace ? "sin" : "cos";
    for (int k = 1; k <= 4; ++k)
        for (const auto& R : radial)
            out.push_back(make_thin_sample(
                L, family, [&](double r, double z) { return zprofile(k, L * z) * R.f(r); },
                zname + std::to_string(k) + "-" + R.name));
    // Oscillation at the thin-direction frequency in r as well.
    for (int k = 1; k <= 2; ++k)
        out.push_back(make_thin_sample(
            L, family, [&](double r, double z) { return zprofile(k, L * z) * std::sin(k * kPi * L * (r - 0.5)); },
            "osc" + std::to_string(k)));
    // Fixed shapes rescaled isotropically to the thin domain: (r, z) -> (lambda (r - 5/4), lambda z).
    for (double s : {0.5, 1.0, 2.0})
        for (int k = 1; k <= 2; ++k)
            out.push_back(make_thin_sample(
                L, family, [&](double r, double z) { return bump(L * (r - 1.25) / s) * zprofile(k, L * z); },
                "scaled-bump" + std::to_string(s).substr(0, 3) + "-" + std::to_string(k)));
    return out;
}

BgSweepReport bg_sweep(BgFamily family, const std::vector<double>& lambdas, bool negative_control) {
    if (lambdas.size() < 3) throw InvalidArgument("sweep needs at least 3 lambdas");
    for (double l : lambdas)
        if (!(l >= 4.0)) throw InvalidArgument("sweep lambdas must be at least 4");
    BgSweepReport rep;
    rep.family = family;
    rep.negative_control = negative_control;
    for (double lambda : lambdas) {
        const std::vector<ThinDomainSample> members = bg_family(lambda, family, negative_control);
        const std::vector<BgNorms> norms =
            parallel_map(members.size(), [&](std::size_t k) { return bg_norms(members[k]); });
        BgLambdaResult res;
        res.lambda = lambda;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const BgNorms& n = norms[k];
            if (n.sup < 1e-14 && n.grad_l2 < 1e-14 && n.lap_l2 < 1e-14) {
                ++res.excluded;
                continue;
            }
            BgMemberResult m;
            m.label = members[k].label;
            m.ratio = best_over_ladder([&](double a) { return bg_ratio_scaled(n, lambda, a); }, &m.amplitude);
            if (m.ratio > res.max_ratio) {
                res.max_ratio = m.ratio;
                res.argmax = m.label;
            }
            res.members.push_back(std::move(m));
        }
        rep.per_lambda.push_back(std::move(res));
    }
    double lo = rep.per_lambda.front().max_ratio, hi = lo;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rep.per_lambda) {
        lo = std::min(lo, r.max_ratio);
        hi = std::max(hi, r.max_ratio);
        const double x = std::log(r.lambda), y = std::log(r.max_ratio);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rep.per_lambda.size());
    rep.max_over_min = lo > 0.0 ? hi / lo : INFINITY;
    rep.growth_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

double bg_unrefined_unit_square(int n) {
    std::vector<std::function<double(double, double)>> shapes;
    for (int k = 1; k <= 4; ++k)
        for (int m = 1; m <= 4; ++m)
            shapes.push_back([k, m](double x, double y) { return std::sin(k * kPi * x) * std::sin(m * kPi * y); });
    for (double s : {0.1, 0.2, 0.4})
        shapes.push_back([s](double x, double y) { return bump(std::hypot(x - 0.5, y - 0.5) / s); });
    shapes.push_back([](double, double) { return 1.0; });
    shapes.push_back([](double x, double y) { return x + 2.0 * y; });
    const std::vector<double> best = parallel_map(shapes.size(), [&](std::size_t k) {
        ThinDomainSample s = make_thin_sample(1.0, BgFamily::Unconstrained, shapes[k], "unit", n, n);
        s.r_lo = 0.0;
        s.r_hi = 1.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) s.at(i, j) = shapes[k](s.r(i), s.z(j));
        const BgNorms nn = bg_norms(s);
        return best_over_ladder([&](double a) { return bg_ratio_unrefined_scaled(nn, a); }, nullptr);
    });
    return *std::max_element(best.begin(), best.end());
}

}  // namespace slabgreen
