#include "dreg/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace dreg {

namespace {

void require_positive(double x, const char* what) {
    require_finite(x, what);
    if (!(x > 0.0)) throw ValueError(std::string(what) + ": must be positive");
}

std::size_t grid_count(double ratio) {
    // N = ceil(log2(ratio)/2) + 1, never below one base
    if (!(ratio > 0.0) || !std::isfinite(ratio)) return 1;
    double n = std::ceil(0.5 * std::log2(ratio)) + 1.0;
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

StepSizePool geometric_pool(double base, std::size_t count, double cap) {
    StepSizePool p;
    p.cap = cap;
    p.etas.reserve(count);
    double eta = base;
    for (std::size_t i = 0; i < count; ++i) {
        p.etas.push_back(std::min(eta, cap));
        eta *= 2.0;
    }
    // clamping can flatten the tail into one value; keep a single copy
    p.etas.erase(std::unique(p.etas.begin(), p.etas.end()), p.etas.end());
    return p;
}

void check_pool_inputs(double G, double D, double L, double T) {
    require_positive(G, "pool G");
    require_positive(D, "pool D");
    require_positive(L, "pool L");
    require_positive(T, "pool T");
}

// ---- flat-row helpers ------------------------------------------------------

inline double dot_rows(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += a[j] * b[j];
    return s;
}

// out = sum_i w_i * rows_i
void combine_rows(vec& out, const vec& w, const std::vector<double>& rows, std::size_t d) {
    std::fill(out.begin(), out.end(), 0.0);
    const double* r = rows.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
        double wi = w[i];
        const double* row = r + i * d;
        for (std::size_t j = 0; j < d; ++j) out[j] += wi * row[j];
    }
}

}  // namespace

StepSizePool build_pool_sword(double G, double D, double L, double T) {
    check_pool_inputs(G, D, L, T);
    double base = std::sqrt(D * D / (8.0 * G * G * T));
    std::size_t count = grid_count(G * G * T / (2.0 * D * D * L * L));
    return geometric_pool(base, count, 1.0 / (4.0 * L));
}

StepSizePool build_pool_swordpp(double G, double D, double L, double T) {
    check_pool_inputs(G, D, L, T);
    double base = std::sqrt(D * D / (8.0 * G * G * T));
    std::size_t count = grid_count(G * G * T / (8.0 * D * D * L * L));
    return geometric_pool(base, count, 1.0 / (8.0 * L));
}

StepSizePool build_pool_ader(double G, double D, double L, double T) {
    check_pool_inputs(G, D, L, T);
    // same grid as the one-gradient ensemble, but the stability cap comes from
    // gradient descent itself rather than smoothness
    double base = std::sqrt(D * D / (8.0 * G * G * T));
    std::size_t count = grid_count(G * G * T / (8.0 * D * D * L * L));
    return geometric_pool(base, count, D / G);
}

// ---- OGD -------------------------------------------------------------------

double ogd_default_step(double G, double D, double T) {
    require_positive(G, "ogd G");
    require_positive(D, "ogd D");
    require_positive(T, "ogd T");
    return D / (G * std::sqrt(T));
}

OgdState make_ogd(const FeasibleDomain& domain, double eta) {
    require_positive(eta, "ogd step size");
    OgdState s;
    s.x = domain.project(vec(domain.dim(), 0.0));
    s.eta = eta;
    return s;
}

void ogd_round_into(OgdState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain,
                    bool with_loss, RoundOutcome& out) {
    out.decision = s.x;
    out.loss = with_loss ? f.value(s.x) : 0.0;
    out.value_queries = with_loss ? 1 : 0;
    out.gradient_queries = 1;
    out.diagnostics.reset();

    vec g = f.gradient(s.x);
    for (std::size_t j = 0; j < s.x.size(); ++j) s.x[j] -= s.eta * g[j];
    domain.project_in_place(s.x);
}

RoundOutcome ogd_round(OgdState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain) {
    RoundOutcome out;
    ogd_round_into(s, f, domain, true, out);
    return out;
}

// ---- single-step-size optimistic descent ------------------------------------

OegdState make_oegd(const FeasibleDomain& domain, double eta, double L) {
    require_positive(eta, "step size");
    require_finite(L, "smoothness");
    OegdState s;
    s.x_hat = domain.project(vec(domain.dim(), 0.0));
    s.prev_grad.assign(domain.dim(), 0.0);
    s.eta = eta;
    s.step_size_warning = (L > 0.0) && (eta > 1.0 / (4.0 * L));
    return s;
}

void oegd_round_into(OegdState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain,
                     bool with_loss, RoundOutcome& out) {
    std::size_t d = s.x_hat.size();
    // decide against the last observed gradient, then absorb the fresh one
    out.decision.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        out.decision[j] = s.x_hat[j] - s.eta * s.prev_grad[j];
    }
    domain.project_in_place(out.decision);
    out.loss = with_loss ? f.value(out.decision) : 0.0;
    out.value_queries = with_loss ? 1 : 0;
    out.gradient_queries = 1;
    out.diagnostics.reset();

    vec g = f.gradient(out.decision);
    for (std::size_t j = 0; j < d; ++j) s.x_hat[j] -= s.eta * g[j];
    domain.project_in_place(s.x_hat);
    s.prev_grad = std::move(g);
}

RoundOutcome oegd_round(OegdState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain) {
    RoundOutcome out;
    oegd_round_into(s, f, domain, true, out);
    return out;
}

// ---- ensembles ---------------------------------------------------------------

EnsembleState make_ensemble(const EnsembleConfig& cfg, const FeasibleDomain& domain) {
    if (cfg.pool.etas.empty()) throw ValueError("ensemble: step-size pool is empty");
    for (double eta : cfg.pool.etas) require_positive(eta, "ensemble step size");
    require_positive(cfg.G, "ensemble G");
    require_positive(cfg.D, "ensemble D");
    if (cfg.algo != EnsembleAlgorithm::ader) require_positive(cfg.L, "ensemble L");
    if (cfg.fixed_meta_rate && !(*cfg.fixed_meta_rate >= 0.0)) {
        throw ValueError("ensemble: fixed meta rate must be nonnegative");
    }
    if (cfg.variant_decision_gradient && cfg.algo != EnsembleAlgorithm::sword) {
        throw ValueError("ensemble: the variant decision gradient only applies to sword");
    }

    EnsembleState s;
    s.cfg = cfg;
    s.dim = domain.dim();
    s.n = cfg.pool.size();
    s.ln_n = std::log(static_cast<double>(s.n));
    double D2 = cfg.D * cfg.D;
    switch (cfg.algo) {
        case EnsembleAlgorithm::sword:
            s.lambda = 0.0;
            s.rate_cap = 1.0 / (4.0 * D2 * cfg.L);
            s.rate_coef = 2.0 * D2;
            s.declared_gradient_budget =
                static_cast<std::int64_t>(s.n) + 1 +
                (cfg.variant_decision_gradient ? static_cast<std::int64_t>(s.n) : 0);
            break;
        case EnsembleAlgorithm::swordpp:
            s.lambda = cfg.lambda < 0.0 ? 2.0 * cfg.L : cfg.lambda;
            s.rate_cap = 1.0 / (8.0 * D2 * cfg.L);
            s.rate_coef = D2;
            s.declared_gradient_budget = 1;
            break;
        case EnsembleAlgorithm::ader:
            s.lambda = 0.0;
            s.rate_cap = 0.0;  // self-confident schedule without a clamp
            s.rate_coef = D2;
            s.declared_gradient_budget = 1;
            break;
    }

    vec start = domain.project(vec(s.dim, 0.0));
    s.x_hat.resize(s.n * s.dim);
    for (std::size_t i = 0; i < s.n; ++i) {
        std::memcpy(s.x_hat.data() + i * s.dim, start.data(), s.dim * sizeof(double));
    }
    s.x_cur = s.x_hat;
    s.x_next = s.x_hat;
    s.x_prev = s.x_hat;

    s.weights.assign(s.n, 1.0 / static_cast<double>(s.n));
    s.weights_prev = s.weights;
    s.cum_feedback.assign(s.n, 0.0);
    s.cur_m.assign(s.n, 0.0);
    s.next_m.assign(s.n, 0.0);
    s.feedback.assign(s.n, 0.0);

    s.combined.assign(s.dim, 0.0);
    combine_rows(s.combined, s.weights, s.x_cur, s.dim);
    s.combined_prev = s.combined;
    s.grad.assign(s.dim, 0.0);
    s.grad_prev.assign(s.dim, 0.0);
    if (cfg.algo == EnsembleAlgorithm::sword) {
        s.base_grads.assign(s.n * s.dim, 0.0);
        s.xbar.assign(s.dim, 0.0);
    }
    s.rate_accum = 0.0;
    s.min_switch_slack = std::numeric_limits<double>::infinity();

    double r0 = cfg.fixed_meta_rate
                    ? *cfg.fixed_meta_rate
                    : std::sqrt(s.ln_n);  // denominator guard is 1 before any feedback
    if (!cfg.fixed_meta_rate && s.rate_cap > 0.0) r0 = std::min(r0, s.rate_cap);
    s.cur_rate = r0;
    s.next_rate = r0;
    return s;
}

namespace {

double self_confident_rate(const EnsembleState& s) {
    if (s.cfg.fixed_meta_rate) return *s.cfg.fixed_meta_rate;
    double r = std::sqrt(s.ln_n / (1.0 + s.rate_coef * s.rate_accum));
    if (s.rate_cap > 0.0 && r > s.rate_cap) r = s.rate_cap;
    return r;
}

void snapshot_diagnostics(EnsembleState& s, const SmoothConvexOracle& f, RoundOutcome& out) {
    RoundDiagnostics diag;
    diag.weights = s.weights;
    diag.optimism_terms.assign(s.cur_m.begin(), s.cur_m.end());
    diag.meta_rate = s.cur_rate;
    diag.base_true_losses.resize(s.n);
    thread_local vec point;
    for (std::size_t i = 0; i < s.n; ++i) {
        point.assign(s.x_cur.begin() + i * s.dim, s.x_cur.begin() + (i + 1) * s.dim);
        diag.base_true_losses[i] = f.value(point);
    }
    out.value_queries += static_cast<std::int64_t>(s.n);
    out.diagnostics = std::move(diag);
}

void finish_diagnostics(EnsembleState& s, RoundOutcome& out) {
    out.diagnostics->feedback_losses.assign(s.feedback.begin(), s.feedback.end());
}

void sword_impl(EnsembleState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain,
                RoundOutcome& out) {
    const std::size_t n = s.n, d = s.dim;
    const double* etas = s.cfg.pool.etas.data();
    bool diag = s.cfg.record_diagnostics;

    combine_rows(s.combined, s.weights, s.x_cur, d);
    out.decision = s.combined;
    out.loss = 0.0;
    out.value_queries = 0;
    out.diagnostics.reset();
    if (diag) {
        out.loss = f.value(s.combined);
        out.value_queries = 1;
        snapshot_diagnostics(s, f, out);
    }

    // per-base gradients, plus their weighted average as the meta feedback
    // direction (coincides with the gradient at the combined decision for
    // every affine-gradient loss in this artifact)
    thread_local vec point;
    for (std::size_t i = 0; i < n; ++i) {
        point.assign(s.x_cur.begin() + i * d, s.x_cur.begin() + (i + 1) * d);
        vec g = f.gradient(point);
        std::memcpy(s.base_grads.data() + i * d, g.data(), d * sizeof(double));
    }
    std::fill(s.grad.begin(), s.grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double wi = s.weights[i];
        const double* gi = s.base_grads.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) s.grad[j] += wi * gi[j];
    }

    std::int64_t grad_queries = static_cast<std::int64_t>(n);

    // surrogate feedback, base updates, next decisions
    for (std::size_t i = 0; i < n; ++i) {
        const double* xc = s.x_cur.data() + i * d;
        double* xh = s.x_hat.data() + i * d;
        double* xn = s.x_next.data() + i * d;
        const double* gi = s.base_grads.data() + i * d;
        double eta = etas[i];

        s.feedback[i] = dot_rows(s.grad.data(), xc, d);

        for (std::size_t j = 0; j < d; ++j) xh[j] -= eta * gi[j];
        domain.project_span(xh, d);

        if (!s.cfg.variant_decision_gradient) {
            for (std::size_t j = 0; j < d; ++j) xn[j] = xh[j] - eta * gi[j];
        } else {
            point.assign(xh, xh + d);
            vec gv = f.gradient(point);
            ++grad_queries;
            for (std::size_t j = 0; j < d; ++j) xn[j] = xh[j] - eta * gv[j];
        }
        domain.project_span(xn, d);
    }

    // optimism for the next weight update, evaluated at the weighted average
    // of the upcoming base decisions under the current weights
    combine_rows(s.xbar, s.weights, s.x_next, d);
    vec go = f.gradient(s.xbar);
    ++grad_queries;
    for (std::size_t i = 0; i < n; ++i) {
        s.next_m[i] = dot_rows(go.data(), s.x_next.data() + i * d, d);
    }

    s.rate_accum += sqdist(s.grad, s.grad_prev);
    s.next_rate = self_confident_rate(s);

    for (std::size_t i = 0; i < n; ++i) s.cum_feedback[i] += s.feedback[i];
    if (diag) {
        finish_diagnostics(s, out);
        s.weights_prev = s.weights;
    }
    hedge_weights_into(s.cum_feedback.data(), s.next_m.data(), n, s.next_rate, nullptr,
                       s.weights.data());

    std::swap(s.x_prev, s.x_cur);
    std::swap(s.x_cur, s.x_next);
    std::swap(s.combined_prev, s.combined);
    std::swap(s.grad_prev, s.grad);
    std::swap(s.cur_m, s.next_m);
    s.cur_rate = s.next_rate;
    ++s.round;
    out.gradient_queries = grad_queries;
}

void swordpp_impl(EnsembleState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain,
                  RoundOutcome& out) {
    const std::size_t n = s.n, d = s.dim;
    const double* etas = s.cfg.pool.etas.data();
    bool diag = s.cfg.record_diagnostics;

    combine_rows(s.combined, s.weights, s.x_cur, d);
    out.decision = s.combined;
    out.loss = 0.0;
    out.value_queries = 0;
    out.diagnostics.reset();
    if (diag) {
        out.loss = f.value(s.combined);
        out.value_queries = 1;
        snapshot_diagnostics(s, f, out);
    }

    vec g = f.gradient(s.combined);

    double switch_base = 0.0;  // sum_i w_i ||x_{t,i} - x_{t-1,i}||^2
    for (std::size_t i = 0; i < n; ++i) {
        const double* xc = s.x_cur.data() + i * d;
        const double* xp = s.x_prev.data() + i * d;
        double* xh = s.x_hat.data() + i * d;
        double* xn = s.x_next.data() + i * d;
        double eta = etas[i];

        // one pass for both reductions the surrogate needs: the linear term
        // at the current point and the correction to the previous one
        double lin = 0.0, corr = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            lin += g[j] * xc[j];
            double dj = xc[j] - xp[j];
            corr += dj * dj;
        }
        s.feedback[i] = lin + s.lambda * corr;
        if (diag) switch_base += s.weights[i] * corr;

        // both steps move against the same fresh gradient: first the
        // auxiliary iterate, then the decision for the next round
        for (std::size_t j = 0; j < d; ++j) xh[j] -= eta * g[j];
        domain.project_span(xh, d);
        for (std::size_t j = 0; j < d; ++j) xn[j] = xh[j] - eta * g[j];
        domain.project_span(xn, d);

        // same fusion for the optimism entry, which guesses the next round's
        // surrogate at the next decision
        double mlin = 0.0, mcorr = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            mlin += g[j] * xn[j];
            double dj = xn[j] - xc[j];
            mcorr += dj * dj;
        }
        s.next_m[i] = mlin + s.lambda * mcorr;
    }

    if (diag) {
        double l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) l1 += std::abs(s.weights[i] - s.weights_prev[i]);
        double slack = 2.0 * switch_base + 2.0 * s.cfg.D * s.cfg.D * l1 * l1 -
                       sqdist(s.combined, s.combined_prev);
        out.diagnostics->switch_slack = slack;
        if (slack < s.min_switch_slack) s.min_switch_slack = slack;
    }

    if (s.round >= 1) s.rate_accum += sqdist(g, s.grad_prev);
    s.next_rate = self_confident_rate(s);

    for (std::size_t i = 0; i < n; ++i) s.cum_feedback[i] += s.feedback[i];
    if (diag) {
        finish_diagnostics(s, out);
        s.weights_prev = s.weights;
    }
    hedge_weights_into(s.cum_feedback.data(), s.next_m.data(), n, s.next_rate, nullptr,
                       s.weights.data());

    std::swap(s.x_prev, s.x_cur);
    std::swap(s.x_cur, s.x_next);
    std::swap(s.combined_prev, s.combined);
    s.grad_prev = std::move(g);
    std::swap(s.cur_m, s.next_m);
    s.cur_rate = s.next_rate;
    ++s.round;
    out.gradient_queries = 1;
}

void ader_impl(EnsembleState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain,
               RoundOutcome& out) {
    const std::size_t n = s.n, d = s.dim;
    const double* etas = s.cfg.pool.etas.data();
    bool diag = s.cfg.record_diagnostics;

    combine_rows(s.combined, s.weights, s.x_cur, d);
    out.decision = s.combined;
    out.loss = 0.0;
    out.value_queries = 0;
    out.diagnostics.reset();
    if (diag) {
        out.loss = f.value(s.combined);
        out.value_queries = 1;
        snapshot_diagnostics(s, f, out);
    }

    vec g = f.gradient(s.combined);

    for (std::size_t i = 0; i < n; ++i) {
        const double* xc = s.x_cur.data() + i * d;
        double* xn = s.x_next.data() + i * d;
        double eta = etas[i];

        s.feedback[i] = dot_rows(g.data(), xc, d);
        for (std::size_t j = 0; j < d; ++j) xn[j] = xc[j] - eta * g[j];
        domain.project_span(xn, d);
    }

    s.rate_accum += sqnorm(g);
    s.next_rate = self_confident_rate(s);

    for (std::size_t i = 0; i < n; ++i) s.cum_feedback[i] += s.feedback[i];
    if (diag) {
        finish_diagnostics(s, out);
        s.weights_prev = s.weights;
    }
    // plain hedge: no optimism stream
    hedge_weights_into(s.cum_feedback.data(), nullptr, n, s.next_rate, nullptr,
                       s.weights.data());

    std::swap(s.x_prev, s.x_cur);
    std::swap(s.x_cur, s.x_next);
    std::swap(s.combined_prev, s.combined);
    s.grad_prev = std::move(g);
    s.cur_rate = s.next_rate;
    ++s.round;
    out.gradient_queries = 1;
}

}  // namespace

void ensemble_round_into(EnsembleState& s, const SmoothConvexOracle& f,
                         const FeasibleDomain& domain, RoundOutcome& out) {
    switch (s.cfg.algo) {
        case EnsembleAlgorithm::sword:
            sword_impl(s, f, domain, out);
            return;
        case EnsembleAlgorithm::swordpp:
            swordpp_impl(s, f, domain, out);
            return;
        case EnsembleAlgorithm::ader:
            ader_impl(s, f, domain, out);
            return;
    }
}

namespace {

RoundOutcome named_round(EnsembleState& s, const SmoothConvexOracle& f,
                         const FeasibleDomain& domain, EnsembleAlgorithm expect,
                         const char* what) {
    if (s.cfg.algo != expect) {
        throw ValueError(std::string(what) + ": state was built for a different algorithm");
    }
    RoundOutcome out;
    ensemble_round_into(s, f, domain, out);
    return out;
}

}  // namespace

RoundOutcome sword_round(EnsembleState& s, const SmoothConvexOracle& f,
                         const FeasibleDomain& domain) {
    return named_round(s, f, domain, EnsembleAlgorithm::sword, "sword_round");
}

RoundOutcome swordpp_round(EnsembleState& s, const SmoothConvexOracle& f,
                           const FeasibleDomain& domain) {
    return named_round(s, f, domain, EnsembleAlgorithm::swordpp, "swordpp_round");
}

RoundOutcome ader_round(EnsembleState& s, const SmoothConvexOracle& f,
                        const FeasibleDomain& domain) {
    return named_round(s, f, domain, EnsembleAlgorithm::ader, "ader_round");
}

}  // namespace dreg
