#pragma once

#include <string>
#include <vector>

#include "dreg/core.hpp"

namespace dreg {

// Comparator points u_1..u_T used on the right-hand side of dynamic regret,
// tagged with where they came from (minimizers, true models, fixed point, ...).
struct ComparatorSequence {
    std::vector<vec> points;
    std::string provenance;
};

struct RegretReport {
    double cumulative_loss = 0.0;
    double comparator_loss = 0.0;
    double dynamic_regret = 0.0;  // always cumulative_loss - comparator_loss
};

// sum of consecutive euclidean distances, from the second point on
double path_length(const ComparatorSequence& u);
double squared_path_length(const ComparatorSequence& u);

// Sum over rounds of the squared sup-norm gradient change between
// consecutive losses. The analytic form is exact and only available for
// scalar square losses on a one-dimensional domain; it throws otherwise.
double gradient_variation_analytic(const std::vector<SmoothConvexOracle>& fs,
                                   const FeasibleDomain& domain);

// Sampled lower bound on the same quantity. Sample points are drawn from a
// fixed nested sequence, so increasing the count never decreases the result.
double gradient_variation_grid(const std::vector<SmoothConvexOracle>& fs,
                               const FeasibleDomain& domain, std::size_t samples);

// Sum of sup |f_t - f_{t-1}|; exact scalar form and sampled fallback.
double function_variation_analytic(const std::vector<SmoothConvexOracle>& fs,
                                   const FeasibleDomain& domain);
double function_variation_grid(const std::vector<SmoothConvexOracle>& fs,
                               const FeasibleDomain& domain, std::size_t samples);

// Per-round minimizers over the domain, closed form for scalar square losses.
ComparatorSequence comparator_minimizers(const std::vector<SmoothConvexOracle>& fs,
                                         const FeasibleDomain& domain);

ComparatorSequence fixed_comparators(const vec& point, std::size_t rounds,
                                     std::string provenance = "fixed point");

// F_T: cumulative comparator loss
double small_loss(const std::vector<SmoothConvexOracle>& fs, const ComparatorSequence& u);

RegretReport dynamic_regret(double cumulative_loss,
                            const std::vector<SmoothConvexOracle>& fs,
                            const ComparatorSequence& u);

// trajectory quantity: sum over t>=2 of ||g_t - g_{t-1}||^2
double empirical_variation(const std::vector<vec>& gradients);

}  // namespace dreg
