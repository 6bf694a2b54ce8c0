#include "slabgreen/slab_green.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slabgreen/errors.hpp"
#include "special.hpp"

namespace slabgreen {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv4Pi = 1.0 / (4.0 * std::numbers::pi);

// P(t) = (d^2+t^2)^{-1/2}
struct InvDist {
    double d2;
    static constexpr double eps = 1.0;
    static constexpr double k6 = 720.0;
    static constexpr double p6 = 7.0;
    double val(double t) const { return 1.0 / std::sqrt(d2 + t * t); }
    double d1(double t) const {
        const double r2 = d2 + t * t;
        return -t / (r2 * std::sqrt(r2));
    }
    double d3(double t) const {
        const double r2 = d2 + t * t;
        const double r = std::sqrt(r2);
        return -3.0 * t * (2.0 * t * t - 3.0 * d2) / (r2 * r2 * r2 * r);
    }
    // integral over [t1, t2] of P, t1, t2 > 0
    double integral(double t1, double t2) const {
        const double r1 = std::sqrt(d2 + t1 * t1);
        const double r2 = std::sqrt(d2 + t2 * t2);
        const double dt = t2 - t1;
        const double dr = dt * (t1 + t2) / (r1 + r2);
        return std::log1p((dt + dr) / (t1 + r1));
    }
};

// P(t) = (d^2+t^2)^{-3/2}
struct InvDistCubed {
    double d2;
    static constexpr double eps = 1.0;
    static constexpr double k6 = 20160.0;
    static constexpr double p6 = 9.0;
    double val(double t) const {
        const double r2 = d2 + t * t;
        return 1.0 / (r2 * std::sqrt(r2));
    }
    double d1(double t) const {
        const double r2 = d2 + t * t;
        return -3.0 * t / (r2 * r2 * std::sqrt(r2));
    }
    double d3(double t) const {
        const double r2 = d2 + t * t;
        return -15.0 * t * (4.0 * t * t - 3.0 * d2) / (r2 * r2 * r2 * r2 * std::sqrt(r2));
    }
    double tail(double t) const {
        const double r = std::sqrt(d2 + t * t);
        return 1.0 / (r * (r + t));
    }
    double integral(double t1, double t2) const { return tail(t1) - tail(t2); }
};

// P(t) = d/dt (d^2+t^2)^{-1/2}, odd in t
struct InvDistSlope {
    double d2;
    static constexpr double eps = -1.0;
    static constexpr double k6 = 720.0;
    static constexpr double p6 = 7.0;
    double val(double t) const {
        const double r2 = d2 + t * t;
        return -t / (r2 * std::sqrt(r2));
    }
    double d1(double t) const {
        const double r2 = d2 + t * t;
        return (2.0 * t * t - d2) / (r2 * r2 * std::sqrt(r2));
    }
    double d3(double t) const {
        const double r2 = d2 + t * t;
        const double t2 = t * t;
        return 3.0 * (8.0 * t2 * t2 - 24.0 * t2 * d2 + 3.0 * d2 * d2) / (r2 * r2 * r2 * r2 * std::sqrt(r2));
    }
    double integral(double t1, double t2) const { return 1.0 / std::sqrt(d2 + t2 * t2) - 1.0 / std::sqrt(d2 + t1 * t1); }
};

struct SeriesValue {
    double sum;
    double bound;
    long groups;
};

// Sum over n of P(2n+a) - P(2n-b), grouped: n = 0, then quadruples {n,-n}, n >= 1.
template <class P>
struct ImageSeries {
    P p;
    double a, b;
    double coef;  // difference-bound coefficient

    ImageSeries(P p_, double a_, double b_) : p(p_), a(a_), b(b_) {
        coef = (P::eps > 0) ? (b * b - a * a) : 2.0 * (std::abs(a) + b);
    }

    double head() const {
        constexpr double e = P::eps;
        return (p.val(a) - p.val(2.0 - b)) + (p.val(2.0 + a) - e * p.val(b)) + e * (p.val(2.0 - a) - p.val(2.0 + b));
    }
    double group(double s) const {
        constexpr double e = P::eps;
        return (p.val(2 * s + a) - p.val(2 * s - b)) + e * (p.val(2 * s - a) - p.val(2 * s + b));
    }
    double group_d1(double s) const {
        constexpr double e = P::eps;
        return 2.0 * ((p.d1(2 * s + a) - p.d1(2 * s - b)) + e * (p.d1(2 * s - a) - p.d1(2 * s + b)));
    }
    double group_d3(double s) const {
        constexpr double e = P::eps;
        return 8.0 * ((p.d3(2 * s + a) - p.d3(2 * s - b)) + e * (p.d3(2 * s - a) - p.d3(2 * s + b)));
    }
    double group_integral(long n) const {
        constexpr double e = P::eps;
        const double t = 2.0 * static_cast<double>(n);
        return 0.5 * (p.integral(t + a, t - b) + e * p.integral(t - a, t + b));
    }
    // Euler-Maclaurin remainder bound for the tail starting at n (n >= 2).
    double remainder(long n) const {
        const double u = 2.0 * static_cast<double>(n) - 2.0;
        const double q = 0.5 * P::p6;
        const double integral = std::pow(p.d2 + u * u, 1.0 - q) / (4.0 * (q - 1.0) * u);
        return (16.0 / 720.0) * coef * P::k6 * integral;
    }

    SeriesValue evaluate(double scale, const TruncationPolicy& policy) const {
        const double target = 0.5 * policy.target_abs_error;
        long n = 2;
        while (std::abs(scale) * remainder(n) > target) {
            if (n >= policy.max_terms)
                throw TruncationFailure("image series needs more than " + std::to_string(policy.max_terms) + " groups");
            n = (n < 64) ? n + 1 : n + n / 8;
        }
        double sum = head();
        for (long k = 2; k < n; ++k) sum += group(static_cast<double>(k));
        const double s = static_cast<double>(n);
        const double tail = group_integral(n) + 0.5 * group(s) - group_d1(s) / 12.0 + group_d3(s) / 720.0;
        sum += tail;
        return {sum, remainder(n), n};
    }
};

void check_point(const SlabPoint& p, const char* name) {
    if (!std::isfinite(p.x1) || !std::isfinite(p.x2) || !std::isfinite(p.x3))
        throw InvalidArgument(std::string(name) + " has non-finite coordinates");
    if (p.x3 < 0.0 || p.x3 > 1.0) throw InvalidArgument(std::string(name) + ".x3 outside [0,1]");
}

struct Geometry {
    double dx1, dx2, d, a, b;
};

Geometry geometry(const SlabPoint& x, const SlabPoint& y, const TruncationPolicy& policy) {
    check_point(x, "x");
    check_point(y, "y");
    if (!(policy.target_abs_error > 0.0) || policy.max_terms < 1)
        throw InvalidArgument("truncation policy requires target_abs_error > 0 and max_terms >= 1");
    Geometry g;
    g.dx1 = x.x1 - y.x1;
    g.dx2 = x.x2 - y.x2;
    g.d = std::hypot(g.dx1, g.dx2);
    g.a = x.x3 - y.x3;
    g.b = x.x3 + y.x3;
    if (std::hypot(g.d, g.a) < policy.singular_radius) throw SingularPoint("|x-y| below exclusion radius");
    return g;
}

bool use_modal(const Geometry& g, GreenMethod method) {
    if (method == GreenMethod::Modal) {
        if (g.d <= 0.0) throw InvalidArgument("modal expansion requires x' != y'");
        return true;
    }
    if (method == GreenMethod::Images) return false;
    return g.d >= kModalSwitchDistance;
}

// Smallest mode count K whose geometric tail bound falls below target.
template <class Bound>
long modal_count(Bound bound, double target, const TruncationPolicy& policy) {
    long k = 0;
    while (bound(k) > target) {
        if (++k > policy.max_terms) throw TruncationFailure("modal series exceeds max_terms");
    }
    return k;
}

}  // namespace

KernelResult eval_G(const SlabPoint& x, const SlabPoint& y, const TruncationPolicy& policy, GreenMethod method) {
    const Geometry g = geometry(x, y, policy);
    KernelResult out;
    if (use_modal(g, method)) {
        const double d = g.d;
        const double q = std::exp(-kPi * d);
        auto bound = [&](long k) {
            const double kk = static_cast<double>(k + 1);
            return std::sqrt(1.0 / (2.0 * kk * d)) * std::exp(-kk * kPi * d) / (kPi * (1.0 - q));
        };
        const long K = modal_count(bound, 0.5 * policy.target_abs_error, policy);
        double sum = 0.0;
        for (long k = K; k >= 1; --k) {
            const double kp = kPi * static_cast<double>(k);
            const double arg = kp * d;
            sum += std::sin(kp * x.x3) * std::sin(kp * y.x3) * special::k0_scaled(arg) * std::exp(-arg);
        }
        out.value = sum / kPi;
        out.error_bound = bound(K);
        out.terms_used = K;
        return out;
    }
    ImageSeries<InvDist> s(InvDist{g.d * g.d}, g.a, g.b);
    const SeriesValue v = s.evaluate(kInv4Pi, policy);
    out.value = kInv4Pi * v.sum;
    out.error_bound = kInv4Pi * v.bound;
    out.terms_used = v.groups;
    return out;
}

GradientResult eval_gradG(const SlabPoint& x, const SlabPoint& y, const TruncationPolicy& policy, GreenMethod method) {
    const Geometry g = geometry(x, y, policy);
    GradientResult out;
    double horiz = 0.0, horiz_bound = 0.0, vert = 0.0, vert_bound = 0.0;
    if (use_modal(g, method)) {
        const double d = g.d;
        const double q = std::sqrt(2.0) * std::exp(-kPi * d);
        auto bound_h = [&](long k) {
            const double kk = static_cast<double>(k + 1);
            const double t = kk * kPi * d;
            return kk * std::sqrt(1.0 / (2.0 * kk * d)) * (1.0 + 1.0 / t) * std::exp(-t) / (1.0 - q);
        };
        auto bound_v = [&](long k) {
            const double kk = static_cast<double>(k + 1);
            return kk * std::sqrt(1.0 / (2.0 * kk * d)) * std::exp(-kk * kPi * d) / (1.0 - q);
        };
        const double target = 0.5 * policy.target_abs_error;
        const long kh = modal_count(bound_h, target, policy);
        const long kv = modal_count(bound_v, target, policy);
        const long K = std::max(kh, kv);
        double sh = 0.0, sv = 0.0;
        for (long k = K; k >= 1; --k) {
            const double kk = static_cast<double>(k);
            const double kp = kPi * kk;
            const double arg = kp * d;
            const double e = std::exp(-arg);
            const double sx = std::sin(kp * x.x3);
            if (k <= kh) sh += kk * sx * std::sin(kp * y.x3) * special::k1_scaled(arg) * e;
            if (k <= kv) sv += kk * sx * std::cos(kp * y.x3) * special::k0_scaled(arg) * e;
        }
        // d/dx1 G = -(x1-y1)/d * sum sin sin k K1(k pi d)
        horiz = -sh / d;
        horiz_bound = bound_h(kh) / d;
        vert = sv;
        vert_bound = bound_v(kv);
        out.terms_used = K;
    } else {
        ImageSeries<InvDistCubed> sh(InvDistCubed{g.d * g.d}, g.a, g.b);
        ImageSeries<InvDistSlope> sv(InvDistSlope{g.d * g.d}, g.a, g.b);
        const double scale_h = kInv4Pi * std::max(std::abs(g.dx1), std::abs(g.dx2));
        const SeriesValue vh = sh.evaluate(scale_h > 0 ? scale_h : kInv4Pi, policy);
        const SeriesValue vv = sv.evaluate(kInv4Pi, policy);
        horiz = -kInv4Pi * vh.sum;
        horiz_bound = kInv4Pi * vh.bound;
        vert = -kInv4Pi * vv.sum;
        vert_bound = kInv4Pi * vv.bound;
        out.terms_used = std::max(vh.groups, vv.groups);
    }
    const double gx1 = horiz * g.dx1;
    const double gx2 = horiz * g.dx2;
    out.value = {gx1, gx2, -gx1, -gx2, vert};
    const double b1 = horiz_bound * std::abs(g.dx1);
    const double b2 = horiz_bound * std::abs(g.dx2);
    out.error_bound = {b1, b2, b1, b2, vert_bound};
    return out;
}

double tail_bound(long n_start, const SlabPoint& x, const SlabPoint& y) {
    if (n_start < 2) throw InvalidArgument("tail_bound requires n_start >= 2");
    check_point(x, "x");
    check_point(y, "y");
    const double d2 = (x.x1 - y.x1) * (x.x1 - y.x1) + (x.x2 - y.x2) * (x.x2 - y.x2);
    const double u = 2.0 * static_cast<double>(n_start) - 2.0;
    const double s = std::sqrt(d2 + u * u);
    const double c = 8.0 * x.x3 * y.x3;
    return kInv4Pi * c * (1.0 / (s * s * s) + 0.5 / (s * (s + u)));
}

double image_group(long n, const SlabPoint& x, const SlabPoint& y) {
    const double d2 = (x.x1 - y.x1) * (x.x1 - y.x1) + (x.x2 - y.x2) * (x.x2 - y.x2);
    ImageSeries<InvDist> s(InvDist{d2}, x.x3 - y.x3, x.x3 + y.x3);
    return s.group(static_cast<double>(n));
}

double image_head(const SlabPoint& x, const SlabPoint& y) {
    const double d2 = (x.x1 - y.x1) * (x.x1 - y.x1) + (x.x2 - y.x2) * (x.x2 - y.x2);
    const InvDist p{d2};
    return p.val(x.x3 - y.x3) - p.val(x.x3 + y.x3);
}

}  // namespace slabgreen
