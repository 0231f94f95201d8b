#include "dreg/omd.hpp"

#include <cmath>

namespace dreg {

namespace {

void require_simplex_domain(const FeasibleDomain& domain, const char* what) {
    if (domain.kind() != FeasibleDomain::Kind::simplex) {
        throw ValueError(std::string(what) + ": entropy regularizer needs the simplex domain");
    }
}

void require_open_simplex(const vec& x, const char* what) {
    for (double xi : x) {
        if (!(xi > 0.0)) {
            throw ValueError(std::string(what) +
                             ": entropy iterate has a non-positive coordinate");
        }
    }
}

// x <- normalize(x_hat .* exp(-eta * cost)), the entropy mirror step
void entropy_step(const vec& x_hat, double eta, const vec& cost, vec& out) {
    std::size_t n = x_hat.size();
    out.resize(n);
    double max_e = -HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::log(x_hat[i]) - eta * cost[i];
        if (out[i] > max_e) max_e = out[i];
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(out[i] - max_e);
        z += out[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= z;
}

}  // namespace

double bregman(const vec& x, const vec& y, Regularizer reg) {
    require_same_dim(x.size(), y, "bregman");
    require_finite(x, "bregman x");
    require_finite(y, "bregman y");
    if (reg == Regularizer::euclidean) {
        return 0.5 * sqdist(x, y);
    }
    // generalized KL, sum x*log(x/y) - x + y; reduces to plain KL on the simplex
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) throw ValueError("bregman: negative coordinate under entropy");
        if (x[i] == 0.0) {
            s += y[i];
            continue;
        }
        if (!(y[i] > 0.0)) {
            throw ValueError("bregman: zero reference coordinate under entropy");
        }
        s += x[i] * std::log(x[i] / y[i]) - x[i] + y[i];
    }
    return s;
}

vec omd_decide(const OmdState& state, const vec& optimism, const FeasibleDomain& domain,
               Regularizer reg) {
    require_same_dim(state.x_hat.size(), optimism, "omd_decide");
    require_finite(optimism, "omd_decide optimism");
    if (!(state.step_size > 0.0)) throw ValueError("omd_decide: step size must be positive");

    if (reg == Regularizer::euclidean) {
        vec x(state.x_hat.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = state.x_hat[i] - state.step_size * optimism[i];
        }
        domain.project_in_place(x);
        return x;
    }
    require_simplex_domain(domain, "omd_decide");
    require_open_simplex(state.x_hat, "omd_decide");
    vec x;
    entropy_step(state.x_hat, state.step_size, optimism, x);
    return x;
}

void omd_update(OmdState& state, const vec& gradient, const FeasibleDomain& domain,
                Regularizer reg) {
    require_same_dim(state.x_hat.size(), gradient, "omd_update");
    require_finite(gradient, "omd_update gradient");
    if (!(state.step_size > 0.0)) throw ValueError("omd_update: step size must be positive");

    if (reg == Regularizer::euclidean) {
        for (std::size_t i = 0; i < state.x_hat.size(); ++i) {
            state.x_hat[i] -= state.step_size * gradient[i];
        }
        domain.project_in_place(state.x_hat);
        return;
    }
    require_simplex_domain(domain, "omd_update");
    require_open_simplex(state.x_hat, "omd_update");
    vec next;
    entropy_step(state.x_hat, state.step_size, gradient, next);
    state.x_hat = std::move(next);
}

std::pair<vec, OmdState> omd_two_step(OmdState state, const vec& optimism,
                                      const std::function<vec(const vec&)>& gradient_at,
                                      const FeasibleDomain& domain, Regularizer reg) {
    vec x = omd_decide(state, optimism, domain, reg);
    vec g = gradient_at(x);
    omd_update(state, g, domain, reg);
    return {std::move(x), std::move(state)};
}

void hedge_weights_into(const double* cum_losses, const double* optimism, std::size_t n,
                        double eps, const double* prior, double* out) {
    double max_e = -HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i) {
        double e = -eps * (cum_losses[i] + (optimism ? optimism[i] : 0.0));
        if (prior) e += std::log(prior[i]);
        out[i] = e;
        if (e > max_e) max_e = e;
    }
    // exponentiation separated from the normalizing sum so the exp loop can
    // vectorize; the sum keeps its index order
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(out[i] - max_e);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += out[i];
    for (std::size_t i = 0; i < n; ++i) out[i] /= z;
}

vec hedge_closed_form(const vec& cum_losses, const vec& optimism, double eps,
                      const vec& prior) {
    std::size_t n = cum_losses.size();
    if (n == 0) throw ValueError("hedge: no experts");
    require_same_dim(n, optimism, "hedge optimism");
    require_finite(cum_losses, "hedge losses");
    require_finite(optimism, "hedge optimism");
    require_finite(eps, "hedge rate");
    if (eps < 0.0) throw ValueError("hedge: learning rate must be nonnegative");
    if (!prior.empty()) {
        require_same_dim(n, prior, "hedge prior");
        for (double p : prior) {
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw ValueError("hedge: prior entries must be positive");
            }
        }
    }
    vec w(n);
    hedge_weights_into(cum_losses.data(), optimism.data(), n, eps,
                       prior.empty() ? nullptr : prior.data(), w.data());
    return w;
}

}  // namespace dreg
