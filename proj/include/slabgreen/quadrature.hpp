#pragma once

#include <functional>
#include <vector>

namespace slabgreen {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // Kronrod-Gauss difference estimate, summed over intervals
    int intervals = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod integration. `points` is the sorted
// list of interval ends including both limits; the interval with the largest
// error estimate is bisected until the total estimate falls below abs_tol.
// Throws QuadratureFailure when max_intervals is reached first.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, const std::vector<double>& points,
                                    double abs_tol, int max_intervals = 4000);

}  // namespace slabgreen
