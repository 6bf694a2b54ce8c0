#include "slabgreen/estimate_verifier.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "slabgreen/angular_kernels.hpp"
#include "slabgreen/errors.hpp"
#include "slabgreen/parallel.hpp"
#include "slabgreen/slab_green.hpp"

namespace slabgreen {
namespace {

constexpr double kRhsFloor = 1e-14;

// Regime limits.
constexpr double kNearDistMin = 1e-3;
constexpr double kFarDistMax = 100.0;
constexpr double kRadiusMin = 5.0, kRadiusMax = 80.0;
constexpr double kGapMin = 1e-4;
constexpr double kHeightMin = 1e-6;

double log_uniform(double lo, double hi, double u) { return lo * std::pow(hi / lo, u); }

bool is_near(BoundId id) {
    return id == BoundId::A1_near || id == BoundId::A2_near || id == BoundId::L33_absG_near ||
           id == BoundId::L33_gradG_near;
}
bool is_slab_bound(BoundId id) {
    return id == BoundId::A1_near || id == BoundId::A1_far || id == BoundId::A2_near || id == BoundId::A2_far;
}

TruncationPolicy relative_policy(double rhs) {
    TruncationPolicy pol;
    pol.target_abs_error = std::max(1e-300, 1e-8 * rhs);
    return pol;
}

// Ring-regime coordinates from (r, gap, z, l, sign).
std::array<double, 4> ring_coords(double r, double gap, double z, double l, double sign_u) {
    const double rho = sign_u < 0.5 ? r - gap : r + gap;
    return {r, z, rho, l};
}

double far_gap_max(double r) { return 0.25 * r; }

// Near slab pair at full distance `dist`, direction angle theta = (pi/2) u_theta from the horizontal,
// lower height placed uniformly in its feasible range.
std::array<double, 4> slab_near_coords(double dist, double u_theta, double u_height) {
    const double theta = 0.5 * std::numbers::pi * u_theta;
    const double dz = dist * std::sin(theta);
    const double x3 = u_height * (1.0 - dz);
    return {dist * std::cos(theta), x3, x3 + dz, 0.0};
}

// Absolute-value integrals with a tolerance relative to the computed value: the far-field kernels
// are exponentially smaller than their comparators.
template <class F>
double relative_refine(double first_tol, F&& eval) {
    double tol = first_tol;
    double v = eval(tol);
    for (int pass = 0; pass < 80 && v < 1e4 * tol && tol > 1e-290; ++pass) {
        tol = v > 0.0 ? std::max(1e-300, 1e-6 * v) : std::max(1e-300, tol * 1e-4);
        v = eval(tol);
    }
    return v;
}

}  // namespace

std::string to_string(BoundId id) {
    switch (id) {
        case BoundId::A1_near: return "A1_near";
        case BoundId::A1_far: return "A1_far";
        case BoundId::A2_near: return "A2_near";
        case BoundId::A2_far: return "A2_far";
        case BoundId::L33_absG_near: return "L33_absG_near";
        case BoundId::L33_absG_far: return "L33_absG_far";
        case BoundId::L33_gradG_near: return "L33_gradG_near";
        case BoundId::L33_gradG_far: return "L33_gradG_far";
    }
    return "?";
}

std::vector<BoundId> all_bounds() {
    return {BoundId::A1_near,       BoundId::A1_far,       BoundId::A2_near,        BoundId::A2_far,
            BoundId::L33_absG_near, BoundId::L33_absG_far, BoundId::L33_gradG_near, BoundId::L33_gradG_far};
}

BoundId bound_from_string(const std::string& s) {
    for (BoundId id : all_bounds())
        if (to_string(id) == s) return id;
    throw InvalidArgument("unknown bound id '" + s + "'");
}

BoundSpec bound_spec(BoundId id) {
    const std::array<std::string, 4> slab{"d", "x3", "y3", ""};
    const std::array<std::string, 4> ring{"r", "z", "rho", "l"};
    switch (id) {
        case BoundId::A1_near:
            return {id, "|G|", "1/(d + |x3 - y3|)", "|x - y| in [1e-3, 1], direction and heights uniform", "1/|x - y|",
                    slab};
        case BoundId::A1_far: return {id, "|G|", "1/d^2", "d in [1, 100], x3, y3 in [0, 1]", "d", slab};
        case BoundId::A2_near:
            return {id, "|grad_{x',y'} G|", "1/(d^2 + |x3 - y3|^2)",
                    "|x - y| in [1e-3, 1], direction and heights uniform", "1/|x - y|", slab};
        case BoundId::A2_far:
            return {id, "|grad_{x',y'} G|", "1/d^3", "d in [1, 100], x3, y3 in [0, 1]", "d", slab};
        case BoundId::L33_absG_near:
            return {id, "int |G| dphi", "ln(1 + r/|rho - r|)/r",
                    "r in [5, 80], |rho - r| in [1e-4, 1), |z - l| in [1e-6, 1]", "1/|rho - r|", ring};
        case BoundId::L33_absG_far:
            return {id, "int |G| dphi", "1/(r |rho - r|)", "r in [5, 80], |rho - r| in [1, r/4]", "|rho - r|",
                    ring};
        case BoundId::L33_gradG_near:
            return {id, "max(int |d_rho G|, int |d_r G|) dphi", "1/(r (|rho - r| + |z - l|))",
                    "r in [5, 80], |rho - r| + |z - l| in [1e-4, 1)", "1/(|rho - r| + |z - l|)", ring};
        case BoundId::L33_gradG_far:
            return {id, "max(int |d_rho G|, int |d_r G|) dphi", "1/(r |rho - r|^2)",
                    "r in [5, 80], |rho - r| in [1, r/4]", "|rho - r|", ring};
    }
    throw InvalidArgument("unknown bound");
}

std::vector<std::array<double, 5>> shifted_sobol(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::array<double, 5> shift{};
    for (double& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    boost::random::sobol gen(5);
    const double scale = 1.0 / (static_cast<double>(gen.max()) + 1.0);
    std::vector<std::array<double, 5>> pts(static_cast<std::size_t>(std::max(n, 0)));
    for (auto& p : pts) {
        for (int d = 0; d < 5; ++d) {
            const double u = static_cast<double>(gen()) * scale + shift[d];
            p[d] = u - std::floor(u);
        }
    }
    return pts;
}

std::array<double, 4> regime_point(BoundId id, const std::array<double, 5>& u) {
    if (is_slab_bound(id)) {
        if (is_near(id)) return slab_near_coords(log_uniform(kNearDistMin, 1.0, u[0]), u[1], u[2]);
        return {log_uniform(1.0, kFarDistMax, u[0]), u[1], u[2], 0.0};
    }
    const double r = log_uniform(kRadiusMin, kRadiusMax, u[0]);
    if (id == BoundId::L33_gradG_near) {
        // The comparator scale |rho - r| + |z - l| is the log-sampled variable; u[4] also picks
        // which of the two heights is lower.
        const double scale = log_uniform(kGapMin, 1.0, u[1]);
        const double gap = scale * u[3];
        const double dz = scale - gap;
        const double lower = u[2] * (1.0 - dz);
        const double swap_u = 2.0 * u[4] - std::floor(2.0 * u[4]);
        const double z = swap_u < 0.5 ? lower : lower + dz;
        const double l = swap_u < 0.5 ? lower + dz : lower;
        return ring_coords(r, gap, z, l, u[4]);
    }
    if (id == BoundId::L33_absG_near) {
        // The worst case sits at z = l, so the height difference is log-sampled as well.
        const double gap = log_uniform(kGapMin, 1.0, u[1]);
        const double dz = log_uniform(kHeightMin, 1.0, u[3]);
        const double lower = u[2] * (1.0 - dz);
        const double swap_u = 2.0 * u[4] - std::floor(2.0 * u[4]);
        const double z = swap_u < 0.5 ? lower : lower + dz;
        const double l = swap_u < 0.5 ? lower + dz : lower;
        return ring_coords(r, gap, z, l, u[4]);
    }
    const double gap = is_near(id) ? log_uniform(kGapMin, 1.0, u[1]) : log_uniform(1.0, far_gap_max(r), u[1]);
    return ring_coords(r, gap, u[2], u[3], u[4]);
}

BoundSample evaluate_bound(BoundId id, const std::array<double, 4>& c) {
    BoundSample s;
    s.coords = c;
    if (is_slab_bound(id)) {
        const double d = c[0], dz = std::abs(c[1] - c[2]);
        const SlabPoint x{0.0, 0.0, c[1]}, y{d, 0.0, c[2]};
        switch (id) {
            case BoundId::A1_near:
                s.rhs = 1.0 / (d + dz);
                s.asym = 1.0 / std::hypot(d, dz);
                break;
            case BoundId::A1_far: s.rhs = 1.0 / (d * d); s.asym = d; break;
            case BoundId::A2_near:
                s.rhs = 1.0 / (d * d + dz * dz);
                s.asym = std::sqrt(s.rhs);
                break;
            default: s.rhs = 1.0 / (d * d * d); s.asym = d; break;
        }
        if (s.rhs < kRhsFloor) return s;
        TruncationPolicy pol = relative_policy(s.rhs);
        if (!is_near(id)) pol.target_abs_error = 1e-300;
        if (id == BoundId::A1_near || id == BoundId::A1_far) {
            s.lhs = std::abs(eval_G(x, y, pol).value);
        } else {
            const GradientResult g = eval_gradG(x, y, pol);
            s.lhs = std::sqrt(g.value[0] * g.value[0] + g.value[1] * g.value[1] + g.value[2] * g.value[2] +
                              g.value[3] * g.value[3]);
        }
    } else {
        const AxiPair p{c[0], c[1], c[2], c[3]};
        const double r = p.r, gap = std::abs(p.rho - p.r), dz = std::abs(p.z - p.l);
        switch (id) {
            case BoundId::L33_absG_near: s.rhs = std::log1p(r / gap) / r; s.asym = 1.0 / gap; break;
            case BoundId::L33_absG_far: s.rhs = 1.0 / (r * gap); s.asym = gap; break;
            case BoundId::L33_gradG_near: s.rhs = 1.0 / (r * (gap + dz)); s.asym = 1.0 / (gap + dz); break;
            default: s.rhs = 1.0 / (r * gap * gap); s.asym = gap; break;
        }
        if (s.rhs < kRhsFloor) return s;
        const double tol = 1e-6 * s.rhs;
        if (id == BoundId::L33_absG_near || id == BoundId::L33_absG_far) {
            s.lhs = relative_refine(tol, [&](double t) { return angular_abs_G(p, t); });
        } else {
            s.lhs = relative_refine(tol, [&](double t) {
                const RadialPair g = angular_abs_gradG(p, t);
                return std::max(g.d_rho, g.d_r);
            });
        }
    }
    s.ratio = s.lhs / s.rhs;
    return s;
}

double trend_slope(const std::vector<BoundSample>& samples, std::vector<std::pair<double, double>>* bins) {
    struct Bin {
        double log_sum = 0.0;
        int count = 0;
        double max_ratio = 0.0;
    };
    std::map<long, Bin> by_decade;
    for (const BoundSample& s : samples) {
        if (s.rhs < kRhsFloor || !(s.asym > 0.0)) continue;
        const double lv = std::log(s.asym);
        Bin& b = by_decade[static_cast<long>(std::floor(std::log10(s.asym)))];
        b.log_sum += lv;
        ++b.count;
        b.max_ratio = std::max(b.max_ratio, s.ratio);
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& [decade, b] : by_decade) {
        (void)decade;
        if (b.max_ratio > 0.0) pts.emplace_back(b.log_sum / b.count, b.max_ratio);
    }
    if (bins) {
        bins->clear();
        for (const auto& [lx, m] : pts) bins->emplace_back(std::exp(lx), m);
    }
    if (pts.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [lx, m] : pts) {
        const double ly = std::log(m);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BoundReport summarize_bound(BoundId id, std::uint64_t seed, const std::vector<BoundSample>& samples) {
    BoundReport rep;
    rep.id = id;
    rep.seed = seed;
    rep.n_samples = static_cast<int>(samples.size());
    bool have = false;
    for (const BoundSample& s : samples) {
        if (s.rhs < kRhsFloor) {
            ++rep.discarded;
            continue;
        }
        if (!have || s.ratio > rep.empirical_constant) {
            rep.empirical_constant = s.ratio;
            rep.argmax = s;
            have = true;
        }
    }
    if (!have) throw RegimeEmpty("no admissible samples in the regime of " + to_string(id));
    rep.trend_slope = trend_slope(samples, &rep.binned_maxima);
    return rep;
}

BoundReport verify_bound(BoundId id, int n, std::uint64_t seed, std::vector<BoundSample>* samples) {
    if (n < 100) throw InvalidArgument("verify_bound needs at least 100 samples");
    const std::vector<std::array<double, 5>> pts = shifted_sobol(n, seed);
    std::vector<BoundSample> s = parallel_map(pts.size(), [&](std::size_t k) {
        return evaluate_bound(id, regime_point(id, pts[k]));
    });
    BoundReport rep = summarize_bound(id, seed, s);
    if (samples) *samples = std::move(s);
    return rep;
}

std::vector<SweepPoint> regime_sweep(BoundId id, const std::string& axis, const std::vector<double>& grid,
                                     int n_per_point, std::uint64_t seed) {
    if (n_per_point < 1) throw InvalidArgument("need at least one sample per sweep point");
    const bool slab = is_slab_bound(id);
    const bool near = is_near(id);
    const bool valid_axis = slab ? (axis == "d" || (axis == "dist" && near)) : (axis == "gap" || axis == "r");
    if (!valid_axis) throw InvalidArgument("axis '" + axis + "' does not belong to " + to_string(id));
    const std::vector<std::array<double, 5>> pts = shifted_sobol(n_per_point, seed);
    std::vector<SweepPoint> out;
    for (double v : grid) {
        bool inside;
        if (axis == "d") inside = near ? (v >= kNearDistMin && v < 1.0) : (v >= 1.0);
        else if (axis == "dist") inside = v >= kNearDistMin && v <= 1.0;
        else if (axis == "r") inside = v >= kRadiusMin && v <= kRadiusMax;
        else inside = near ? (v >= kGapMin && v < 1.0) : (v >= 1.0 && v <= far_gap_max(kRadiusMax));
        if (!inside) throw RegimeEmpty("sweep value outside the regime of " + to_string(id));
        const std::vector<BoundSample> s = parallel_map(pts.size(), [&](std::size_t k) {
            const auto& u = pts[k];
            std::array<double, 4> c;
            if (axis == "d") {
                c = {v, u[1], u[2], 0.0};
            } else if (axis == "dist") {
                c = slab_near_coords(v, u[1], u[2]);
            } else if (axis == "r") {
                const double gap = near ? log_uniform(kGapMin, 1.0, u[1]) : log_uniform(1.0, far_gap_max(v), u[1]);
                c = ring_coords(v, gap, u[2], u[3], u[4]);
            } else {
                // Radii for which the gap is admissible.
                const double r_lo = near ? kRadiusMin : std::max(kRadiusMin, 4.0 * v);
                c = ring_coords(log_uniform(r_lo, kRadiusMax, u[0]), v, u[2], u[3], u[4]);
            }
            return evaluate_bound(id, c);
        });
        SweepPoint sp;
        sp.value = v;
        sp.samples = static_cast<int>(s.size());
        for (const BoundSample& b : s)
            if (b.rhs >= kRhsFloor) sp.max_ratio = std::max(sp.max_ratio, b.ratio);
        out.push_back(sp);
    }
    return out;
}

}  // namespace slabgreen
