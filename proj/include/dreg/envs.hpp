#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dreg/core.hpp"

namespace dreg {

// A fully materialized run environment: one loss oracle per round plus the
// constants the step-size builders need. Generating the rounds up front keeps
// data synthesis out of the timed learner loops.
struct EnvRounds {
    std::vector<SmoothConvexOracle> rounds;
    FeasibleDomain domain = FeasibleDomain::box(vec{-1.0}, vec{1.0});
    double G = 0.0;
    double L = 0.0;
    bool nonnegative = true;
    // underlying regression models, one per round (piecewise environment only)
    std::vector<vec> true_models;
};

// Scalar square-loss drills on the interval [-1, 1].
//
// which = 1 (odd horizon): slope drifts linearly through zero, so consecutive
// gradients differ by O(1/T) and the total gradient variation is at most 4/T.
// which = 2 (even horizon): slopes alternate between two values and the
// target flips sign at midpoint; every round is minimized exactly at +1 or
// -1, so the best comparator loss is zero while the variation stays Theta(T).
EnvRounds make_quadratic_instance(int which, std::size_t T);

// Streaming least squares with abrupt model switches: features are uniform in
// a gamma-ball, labels come from a stage-wise constant model uniform in a
// (diameter/2)-ball plus uniform [0, 0.1] noise. The learner's domain is the
// (diameter/2)-ball, which contains every stage model.
EnvRounds make_piecewise_regression(std::uint64_t seed, std::size_t T, std::size_t d,
                                    double gamma, double diameter, std::size_t stage_len);

// Square losses over rows of a CSV file (header row required; the last column
// is the label, the rest are features). Features get one global rescale so
// every row satisfies ||x|| <= gamma.
EnvRounds make_csv_regression(const std::string& path, double gamma,
                              const FeasibleDomain& domain);

}  // namespace dreg
