#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace slabgreen {

enum class BoundId {
    A1_near,
    A1_far,
    A2_near,
    A2_far,
    L33_absG_near,
    L33_absG_far,
    L33_gradG_near,
    L33_gradG_far,
};

std::string to_string(BoundId id);
BoundId bound_from_string(const std::string& s);  // throws InvalidArgument
std::vector<BoundId> all_bounds();

struct BoundSpec {
    BoundId id;
    std::string lhs;
    std::string rhs;
    std::string regime;
    std::string asymptotic_variable;
    std::array<std::string, 4> coordinate_names;  // empty when the coordinate is unused
};
BoundSpec bound_spec(BoundId id);

struct BoundSample {
    std::array<double, 4> coords{};  // (d, x3, y3, -) for A bounds, (r, z, rho, l) for L33 bounds
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double asym = 0.0;  // value of the asymptotic variable
};

// Evaluates one sample; coords as in BoundSample.
BoundSample evaluate_bound(BoundId id, const std::array<double, 4>& coords);

struct BoundReport {
    BoundId id = BoundId::A1_near;
    std::uint64_t seed = 0;
    int n_samples = 0;
    int discarded = 0;  // rhs below 1e-14
    double empirical_constant = 0.0;
    BoundSample argmax;
    double trend_slope = 0.0;
    std::vector<std::pair<double, double>> binned_maxima;  // (mean log-variable bin center, max ratio)
};

// Shifted Sobol points in [0,1)^5: the first n points of one sequence, so reports for growing n
// are nested. The shift is drawn from a 64-bit Mersenne twister seeded with `seed`.
std::vector<std::array<double, 5>> shifted_sobol(int n, std::uint64_t seed);

// Maps unit-cube points to the regime of the bound.
std::array<double, 4> regime_point(BoundId id, const std::array<double, 5>& u);

// n >= 100. Ratios are evaluated in parallel and reduced in sample order.
BoundReport verify_bound(BoundId id, int n, std::uint64_t seed, std::vector<BoundSample>* samples = nullptr);

// Report over an explicit sample list (used for nested prefixes).
BoundReport summarize_bound(BoundId id, std::uint64_t seed, const std::vector<BoundSample>& samples);

// Least-squares slope of log(max ratio) against the mean log variable over decade bins.
double trend_slope(const std::vector<BoundSample>& samples, std::vector<std::pair<double, double>>* bins = nullptr);

struct SweepPoint {
    double value = 0.0;
    double max_ratio = 0.0;
    int samples = 0;
};

// Axes: "d" (horizontal distance) and, for the near A bounds, "dist" (full distance);
// "gap" (|rho - r|) and "r" for the L33 bounds. Every grid value must lie in the regime; the far slab
// regime is d >= 1 without the upper cap used for random sampling.
std::vector<SweepPoint> regime_sweep(BoundId id, const std::string& axis, const std::vector<double>& grid,
                                     int n_per_point, std::uint64_t seed);

}  // namespace slabgreen
