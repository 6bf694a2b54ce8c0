#pragma once

#include <array>

namespace slabgreen {

struct SlabPoint {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;  // vertical coordinate in [0,1]
};

struct TruncationPolicy {
    double target_abs_error = 1e-10;
    long max_terms = 1000000;
    double singular_radius = 1e-8;
};

struct KernelResult {
    double value = 0.0;
    double error_bound = 0.0;  // certified truncation bound
    long terms_used = 0;
};

// Components ordered d/dx1, d/dx2, d/dy1, d/dy2, d/dy3.
struct GradientResult {
    std::array<double, 5> value{};
    std::array<double, 5> error_bound{};
    long terms_used = 0;
};

// Images: grouped image series with an Euler-Maclaurin tail and certified remainder.
// Modal: sine/K0 eigenfunction series in x3, used for horizontal distance >= 1.
enum class GreenMethod { Auto, Images, Modal };

inline constexpr double kModalSwitchDistance = 1.0;

// Dirichlet Green's function of -Laplace on R^2 x [0,1].
KernelResult eval_G(const SlabPoint& x, const SlabPoint& y, const TruncationPolicy& policy = {},
                    GreenMethod method = GreenMethod::Auto);

GradientResult eval_gradG(const SlabPoint& x, const SlabPoint& y, const TruncationPolicy& policy = {},
                          GreenMethod method = GreenMethod::Auto);

// Upper bound on (1/4pi) |sum_{n >= n_start} Q_n|, the grouped tail of eval_G.
double tail_bound(long n_start, const SlabPoint& x, const SlabPoint& y);

// Grouped quadruple Q_n of the image series of G (without the 1/4pi factor), n >= 1.
double image_group(long n, const SlabPoint& x, const SlabPoint& y);

// n = 0 term of the image series of G (without the 1/4pi factor).
double image_head(const SlabPoint& x, const SlabPoint& y);

}  // namespace slabgreen
