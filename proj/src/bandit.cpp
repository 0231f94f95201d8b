#include "dreg/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "dreg/omd.hpp"

namespace dreg {

namespace {

void require_positive(double x, const char* what) {
    require_finite(x, what);
    if (!(x > 0.0)) throw ValueError(std::string(what) + ": must be positive");
}

std::size_t grid_count(double ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) return 1;
    double n = std::ceil(0.5 * std::log2(ratio)) + 1.0;
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

double estimator_scale(BanditMode mode, double L, double T, std::size_t d) {
    if (mode == BanditMode::zero) return 0.0;
    if (!(T >= 2.0)) throw ConfigError("bandit pool: horizon must be at least 2");
    double dd = static_cast<double>(d);
    return 3.0 * std::sqrt(dd * dd * dd * std::log(T)) * L;  // C * L
}

inline double dot_rows(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += a[j] * b[j];
    return s;
}

inline double sqdist_rows(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double x = a[j] - b[j];
        s += x * x;
    }
    return s;
}

}  // namespace

double finite_difference(double value_plus, double value_minus, double delta) {
    require_finite(value_plus, "finite_difference");
    require_finite(value_minus, "finite_difference");
    require_finite(delta, "finite_difference delta");
    if (delta == 0.0) throw ValueError("finite_difference: probe radius is zero");
    return (value_plus - value_minus) / (2.0 * delta);
}

std::pair<vec, vec> estimate_gradient(double v, const TwoPointQuery& query, const vec& M,
                                      std::size_t d) {
    require_finite(v, "estimate_gradient v");
    require_same_dim(d, M, "estimate_gradient optimism");
    if (query.coord >= d) throw ValueError("estimate_gradient: coordinate out of range");
    vec g = M;
    g[query.coord] += static_cast<double>(d) * (v - M[query.coord]);
    vec next = M;
    next[query.coord] = v;
    return {std::move(g), std::move(next)};
}

BanditOptimism make_bandit_optimism(BanditMode mode, std::size_t dim, double G) {
    if (dim == 0) throw ValueError("bandit optimism: empty dimension");
    require_positive(G, "bandit optimism G");
    BanditOptimism o;
    o.mode = mode;
    o.M.assign(dim, 0.0);
    o.M_var.assign(dim, 0.0);
    o.gamma = 0.5;
    double dd = static_cast<double>(dim);
    o.hedge_rate = 1.0 / (4.0 * dd * dd * G * G);
    return o;
}

BanditOptimism learn_best_optimism(BanditOptimism state, const vec& g_tilde,
                                   const vec& next_variation_optimism) {
    if (state.mode != BanditMode::best) {
        throw ValueError("learn_best_optimism: state is not in best mode");
    }
    require_same_dim(state.M.size(), g_tilde, "learn_best_optimism estimator");
    require_same_dim(state.M.size(), next_variation_optimism, "learn_best_optimism tracker");

    state.cum_loss_var += 0.5 * sqdist(g_tilde, state.M_var);
    state.cum_loss_zero += 0.5 * sqnorm(g_tilde);

    double ev = -state.hedge_rate * state.cum_loss_var;
    double ez = -state.hedge_rate * state.cum_loss_zero;
    double mx = std::max(ev, ez);
    double wv = std::exp(ev - mx);
    double wz = std::exp(ez - mx);
    state.gamma = wv / (wv + wz);

    state.M_var = next_variation_optimism;
    state.M.resize(state.M_var.size());
    for (std::size_t j = 0; j < state.M.size(); ++j) state.M[j] = state.gamma * state.M_var[j];
    return state;
}

StepSizePool build_pool_bandit(BanditMode mode, double G, double D, double L, double T,
                               std::size_t d) {
    require_positive(G, "bandit pool G");
    require_positive(D, "bandit pool D");
    require_positive(L, "bandit pool L");
    require_positive(T, "bandit pool T");
    if (d == 0) throw ValueError("bandit pool: empty dimension");

    double d4 = std::pow(static_cast<double>(d), 4.0);
    double base = std::sqrt(D * D / (8.0 * G * G * T * d4));
    std::size_t count = grid_count(G * G * T * d4 / (8.0 * D * D * L * L));
    double cap;
    if (mode == BanditMode::zero) {
        cap = 1.0 / (8.0 * L);
    } else {
        cap = 1.0 / (4.0 * estimator_scale(mode, L, T, d));
    }

    StepSizePool p;
    p.cap = cap;
    p.etas.reserve(count);
    double eta = base;
    for (std::size_t i = 0; i < count; ++i) {
        p.etas.push_back(std::min(eta, cap));
        eta *= 2.0;
    }
    p.etas.erase(std::unique(p.etas.begin(), p.etas.end()), p.etas.end());
    return p;
}

double bandit_correction(BanditMode mode, double L, double T, std::size_t d) {
    require_positive(L, "bandit correction L");
    if (mode == BanditMode::zero) return 2.0 * L;
    return estimator_scale(mode, L, T, d);
}

double bandit_rate_cap(BanditMode mode, double D, double L, double T, std::size_t d) {
    if (mode == BanditMode::zero) return 0.0;
    require_positive(D, "bandit rate cap D");
    return 1.0 / (4.0 * estimator_scale(mode, L, T, d) * D * D);
}

BanditState make_sword_bandit(const BanditConfig& cfg, const FeasibleDomain& domain) {
    if (cfg.pool.etas.empty()) throw ValueError("bandit: step-size pool is empty");
    for (double eta : cfg.pool.etas) require_positive(eta, "bandit step size");
    require_positive(cfg.G, "bandit G");
    require_positive(cfg.D, "bandit D");
    require_positive(cfg.L, "bandit L");
    require_positive(cfg.delta, "bandit probe radius");
    require_finite(cfg.lambda, "bandit correction");
    if (cfg.lambda < 0.0) throw ValueError("bandit correction: must be nonnegative");

    double rho = domain.origin_inradius();
    if (!(rho > 0.0)) {
        throw ValueError("bandit: domain must contain the origin in its interior");
    }
    double alpha = cfg.alpha ? *cfg.alpha : cfg.delta / rho + 1e-9;
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ValueError("bandit: shrink factor out of range; probe radius too large?");
    }

    BanditState s;
    s.cfg = cfg;
    s.domain = domain;
    s.shrunk = FeasibleDomain::scaled(domain, 1.0 - alpha);
    s.alpha = alpha;
    s.dim = domain.dim();
    s.n = cfg.pool.size();
    s.ln_n = std::log(static_cast<double>(s.n));
    s.opt = make_bandit_optimism(cfg.mode, s.dim, cfg.G);

    vec start = s.shrunk.project(vec(s.dim, 0.0));
    s.y_hat.resize(s.n * s.dim);
    for (std::size_t i = 0; i < s.n; ++i) {
        std::memcpy(s.y_hat.data() + i * s.dim, start.data(), s.dim * sizeof(double));
    }
    s.y_cur = s.y_hat;
    s.y_next = s.y_hat;
    s.y_prev = s.y_hat;

    s.weights.assign(s.n, 1.0 / static_cast<double>(s.n));
    s.cum_feedback.assign(s.n, 0.0);
    s.cur_m.assign(s.n, 0.0);
    s.next_m.assign(s.n, 0.0);
    s.feedback.assign(s.n, 0.0);
    s.y_bar.assign(s.dim, 0.0);
    s.g_tilde.assign(s.dim, 0.0);

    double r0 = std::sqrt(s.ln_n);
    if (cfg.rate_cap > 0.0) r0 = std::min(r0, cfg.rate_cap);
    s.cur_rate = r0;
    s.next_rate = r0;
    s.coord_rng = CounterRng{cfg.seed};
    return s;
}

void sword_bandit_round_into(BanditState& s, const SmoothConvexOracle& f, RoundOutcome& out) {
    const std::size_t n = s.n, d = s.dim;
    const double* etas = s.cfg.pool.etas.data();
    std::int64_t t = s.round + 1;

    std::fill(s.y_bar.begin(), s.y_bar.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double wi = s.weights[i];
        const double* row = s.y_cur.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) s.y_bar[j] += wi * row[j];
    }

    std::size_t coord = s.coord_rng.index_at(static_cast<std::uint64_t>(t), d);
    s.last_query.coord = coord;
    s.last_query.delta = s.cfg.delta;
    s.last_query.x_plus = s.y_bar;
    s.last_query.x_plus[coord] += s.cfg.delta;
    s.last_query.x_minus = s.y_bar;
    s.last_query.x_minus[coord] -= s.cfg.delta;

    if (!s.domain.contains(s.last_query.x_plus) || !s.domain.contains(s.last_query.x_minus)) {
        throw ValueError("bandit: committed point left the domain; shrink factor too small");
    }

    double v_plus = f.value(s.last_query.x_plus);
    double v_minus = f.value(s.last_query.x_minus);
    double v = finite_difference(v_plus, v_minus, s.cfg.delta);

    out.decision = s.y_bar;
    out.loss = 0.5 * (v_plus + v_minus);
    out.value_queries = 2;
    out.gradient_queries = 0;
    out.diagnostics.reset();
    if (s.cfg.record_diagnostics) {
        RoundDiagnostics diag;
        diag.weights = s.weights;
        diag.optimism_terms.assign(s.cur_m.begin(), s.cur_m.end());
        diag.meta_rate = s.cur_rate;
        out.diagnostics = std::move(diag);
    }

    // estimator around the optimism in play, then the per-mode optimism step
    double dv = static_cast<double>(d) * (v - s.opt.M[coord]);
    s.g_tilde = s.opt.M;
    s.g_tilde[coord] += dv;
    double dev = dv * dv;  // squared deviation between estimator and optimism
    s.cum_dev_played += dev;

    switch (s.cfg.mode) {
        case BanditMode::variation:
            s.opt.M[coord] = v;
            break;
        case BanditMode::zero:
            break;
        case BanditMode::best: {
            s.cum_dev_var += sqdist(s.g_tilde, s.opt.M_var);
            s.cum_dev_zero += sqnorm(s.g_tilde);
            vec tracker_next = s.opt.M_var;
            tracker_next[coord] = v;
            s.opt = learn_best_optimism(std::move(s.opt), s.g_tilde, tracker_next);
            break;
        }
    }

    s.rate_accum += dev;
    s.next_rate = std::sqrt(s.ln_n / (1.0 + s.cfg.D * s.cfg.D * s.rate_accum));
    if (s.cfg.rate_cap > 0.0 && s.next_rate > s.cfg.rate_cap) s.next_rate = s.cfg.rate_cap;

    const vec& m_play = s.opt.M;  // optimism for the next round's decisions
    for (std::size_t i = 0; i < n; ++i) {
        const double* yc = s.y_cur.data() + i * d;
        const double* yp = s.y_prev.data() + i * d;
        double* yh = s.y_hat.data() + i * d;
        double* yn = s.y_next.data() + i * d;
        double eta = etas[i];

        s.feedback[i] = dot_rows(s.g_tilde.data(), yc, d) +
                        s.cfg.lambda * sqdist_rows(yc, yp, d);

        for (std::size_t j = 0; j < d; ++j) yh[j] -= eta * s.g_tilde[j];
        s.shrunk.project_span(yh, d);
        for (std::size_t j = 0; j < d; ++j) yn[j] = yh[j] - eta * m_play[j];
        s.shrunk.project_span(yn, d);

        s.next_m[i] = dot_rows(m_play.data(), yn, d) + s.cfg.lambda * sqdist_rows(yn, yc, d);
    }

    for (std::size_t i = 0; i < n; ++i) s.cum_feedback[i] += s.feedback[i];
    if (out.diagnostics) {
        out.diagnostics->feedback_losses.assign(s.feedback.begin(), s.feedback.end());
    }
    hedge_weights_into(s.cum_feedback.data(), s.next_m.data(), n, s.next_rate, nullptr,
                       s.weights.data());

    std::swap(s.y_prev, s.y_cur);
    std::swap(s.y_cur, s.y_next);
    std::swap(s.cur_m, s.next_m);
    s.cur_rate = s.next_rate;
    ++s.round;
}

RoundOutcome sword_bandit_round(BanditState& s, const SmoothConvexOracle& f) {
    RoundOutcome out;
    sword_bandit_round_into(s, f, out);
    return out;
}

}  // namespace dreg
