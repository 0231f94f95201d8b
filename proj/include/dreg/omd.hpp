#pragma once

#include <functional>
#include <utility>

#include "dreg/core.hpp"

namespace dreg {

enum class Regularizer { euclidean, negative_entropy };

// Auxiliary iterate of optimistic mirror descent. The decision of a round is
// derived from x_hat and the optimism; the realized gradient then advances
// x_hat itself.
struct OmdState {
    vec x_hat;
    double step_size = 0.0;
};

// Bregman divergence of the regularizer: squared-distance/2 for euclidean,
// generalized KL for negative entropy.
double bregman(const vec& x, const vec& y, Regularizer reg);

// phase 1: x_t = argmin_X  eta*<M, x> + D(x, x_hat)
vec omd_decide(const OmdState& state, const vec& optimism, const FeasibleDomain& domain,
               Regularizer reg);

// phase 2: x_hat <- argmin_X  eta*<g, x> + D(x, x_hat)
void omd_update(OmdState& state, const vec& gradient, const FeasibleDomain& domain,
                Regularizer reg);

// Both phases in order. The callback receives x_t and must return the
// gradient evaluated there, which is all the information phase 2 may use.
std::pair<vec, OmdState> omd_two_step(OmdState state, const vec& optimism,
                                      const std::function<vec(const vec&)>& gradient_at,
                                      const FeasibleDomain& domain, Regularizer reg);

// Closed-form optimistic hedge over n experts:
//   w_i  proportional to  prior_i * exp(-eps * (cum_losses_i + optimism_i)).
// Empty prior means uniform. Exponents are max-shifted before exp so large
// losses cannot underflow the whole weight vector.
vec hedge_closed_form(const vec& cum_losses, const vec& optimism, double eps,
                      const vec& prior = {});

// Allocation-free kernel behind hedge_closed_form; prior may be nullptr for
// uniform. out must hold n doubles and may alias nothing.
void hedge_weights_into(const double* cum_losses, const double* optimism, std::size_t n,
                        double eps, const double* prior, double* out);

}  // namespace dreg
