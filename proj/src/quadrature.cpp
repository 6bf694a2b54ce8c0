#include "slabgreen/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <queue>
#include <string>

#include "slabgreen/errors.hpp"

namespace slabgreen {
namespace {

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using Gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& x = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double k = wk[0] * f0;
    double g = wg[0] * f0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double s = f(c - h * x[i]) + f(c + h * x[i]);
        k += wk[i] * s;
        // Gauss nodes sit at the even Kronrod indices
        if (i % 2 == 0) g += wg[i / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, const std::vector<double>& points,
                                    double abs_tol, int max_intervals) {
    if (points.size() < 2) throw InvalidArgument("integrate_adaptive needs at least two points");
    if (!(abs_tol > 0.0)) throw InvalidArgument("integrate_adaptive needs abs_tol > 0");
    std::priority_queue<Interval> heap;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        Interval iv = gk15(f, points[i], points[i + 1]);
        value += iv.value;
        error += iv.error;
        heap.push(iv);
    }
    int count = static_cast<int>(heap.size());
    while (error > abs_tol) {
        if (count >= max_intervals)
        {
            char msg[128];
            std::snprintf(msg, sizeof msg, "error estimate %.3e above tolerance %.3e after %d intervals", error,
                          abs_tol, count);
            throw QuadratureFailure(msg);
        }
        Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureFailure("interval collapsed below machine resolution");
        }
        Interval left = gk15(f, worst.a, mid);
        Interval right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // recompute sums to shed accumulated cancellation from the running updates
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, count};
}

}  // namespace slabgreen
