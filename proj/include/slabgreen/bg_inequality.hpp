#pragma once

#include <functional>
#include <string>
#include <vector>

namespace slabgreen {

enum class BgFamily {
    ZeroTrace,      // f = 0 at z = 0 and z = 1/lambda
    ZeroMean,       // int f dz = 0 at every r
    Unconstrained,  // neither; negative control
};

std::string to_string(BgFamily f);
BgFamily bg_family_from_string(const std::string& s);  // "trace", "mean", "none"

// Node values on [r_lo, r_hi] x [0, 1/lambda], j fastest.
struct ThinDomainSample {
    double lambda = 1.0;
    double r_lo = 0.5, r_hi = 2.0;
    int n_r = 256, n_z = 64;  // intervals
    BgFamily family = BgFamily::ZeroTrace;
    std::string label;
    std::vector<double> values;

    double hr() const { return (r_hi - r_lo) / n_r; }
    double hz() const { return 1.0 / (lambda * n_z); }
    double r(int i) const { return r_lo + i * hr(); }
    double z(int j) const { return j * hz(); }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * (n_z + 1) + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * (n_z + 1) + j]; }
    // Max violation of the family constraint (boundary values or trapezoid column means).
    double constraint_residual() const;
};

// Radial nodes used for a given lambda: enough to resolve features of width 1/lambda in r.
int bg_default_nr(double lambda);
inline constexpr int kBgThinNodes = 64;

// Samples f on the thin domain; ZeroMean samples are projected to zero column means (columns that
// are constant up to rounding become exactly zero).
ThinDomainSample make_thin_sample(double lambda, BgFamily family, const std::function<double(double, double)>& f,
                                  std::string label, int n_r = 0, int n_z = kBgThinNodes);

// Discrete norms: max-node, trapezoid L2 of f, grad f and (d_rr + d_zz) f over dr dz.
struct BgNorms {
    double sup = 0.0;
    double l2 = 0.0;
    double grad_l2 = 0.0;
    double lap_l2 = 0.0;
};
BgNorms bg_norms(const ThinDomainSample& s);

// sup / [(1 + grad) sqrt(log(e + lap / lambda))] for amplitude * f. Throws DegenerateSample when
// every norm is below 1e-14.
double bg_ratio(const ThinDomainSample& s);
double bg_ratio_scaled(const BgNorms& n, double lambda, double amplitude);

// Unrefined form on a fixed domain: sup / [(1 + ||f||_H1) sqrt(log(e + lap))].
double bg_ratio_unrefined_scaled(const BgNorms& n, double amplitude);

struct BgMemberResult {
    std::string label;
    double ratio = 0.0;      // best over the amplitude ladder
    double amplitude = 0.0;  // maximizing amplitude
};

struct BgLambdaResult {
    double lambda = 0.0;
    double max_ratio = 0.0;
    std::string argmax;
    int excluded = 0;  // degenerate members
    std::vector<BgMemberResult> members;
};

struct BgSweepReport {
    BgFamily family = BgFamily::ZeroTrace;
    bool negative_control = false;
    std::vector<BgLambdaResult> per_lambda;
    double max_over_min = 0.0;
    double growth_exponent = 0.0;  // least-squares slope of log max_ratio against log lambda
};

// Amplitudes 2^(m/2), m = -20..20.
std::vector<double> bg_amplitude_ladder();

// Test family at one lambda (>= 16 shapes). The negative control replaces the family by
// z-independent profiles, which satisfy neither hypothesis.
std::vector<ThinDomainSample> bg_family(double lambda, BgFamily family, bool negative_control = false);

// Requires >= 3 lambdas, each >= 4. Members are evaluated in parallel; reductions are ordered.
BgSweepReport bg_sweep(BgFamily family, const std::vector<double>& lambdas, bool negative_control = false);

// Empirical constant of the unrefined inequality over tensor sines and bumps on the unit square.
double bg_unrefined_unit_square(int n = 128);

}  // namespace slabgreen
