#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "doctest.h"
#include "dreg/core.hpp"
#include "dreg/envs.hpp"
#include "dreg/learners.hpp"
#include "dreg/metrics.hpp"
#include "dreg/omd.hpp"
#include "dreg/rng.hpp"
#include "oracles.hpp"

using dreg::EnsembleAlgorithm;
using dreg::EnsembleConfig;
using dreg::EnsembleState;
using dreg::FeasibleDomain;
using dreg::RoundOutcome;
using dreg::SmoothConvexOracle;
using dreg::StepSizePool;
using dreg::ValueError;
using dreg::vec;

namespace {

constexpr double kEta1 = 0.02209708691207961;  // sqrt(4 / 8192)

testref::ScalarSeq seq_of(const dreg::EnvRounds& env) {
    testref::ScalarSeq s;
    for (const auto& f : env.rounds) {
        s.a.push_back(f.scalar_coeffs->first);
        s.b.push_back(f.scalar_coeffs->second);
    }
    return s;
}

SmoothConvexOracle linear_oracle(double slope) {
    SmoothConvexOracle f;
    f.value_fn = [slope](const vec& x) { return slope * x[0]; };
    f.gradient_fn = [slope](const vec&) { return vec{slope}; };
    f.grad_bound = std::abs(slope);
    return f;
}

SmoothConvexOracle constant_oracle(double level) {
    SmoothConvexOracle f;
    f.value_fn = [level](const vec&) { return level; };
    f.gradient_fn = [](const vec& x) { return vec(x.size(), 0.0); };
    f.nonnegative = level >= 0.0;
    return f;
}

}  // namespace

TEST_CASE("step-size pools at the worked parameters") {
    double b = std::sqrt(4.0 / 8192.0);
    CHECK(b == doctest::Approx(kEta1).epsilon(1e-14));

    auto sword = dreg::build_pool_sword(1.0, 2.0, 1.0, 1024.0);
    CHECK(sword.cap == 0.25);
    CHECK(sword.etas == std::vector<double>{b, 2.0 * b, 4.0 * b, 8.0 * b, 0.25});

    auto swpp = dreg::build_pool_swordpp(1.0, 2.0, 1.0, 1024.0);
    CHECK(swpp.cap == 0.125);
    CHECK(swpp.etas == std::vector<double>{b, 2.0 * b, 4.0 * b, 0.125});

    auto ader = dreg::build_pool_ader(1.0, 2.0, 1.0, 1024.0);
    CHECK(ader.cap == 2.0);
    CHECK(ader.etas == std::vector<double>{b, 2.0 * b, 4.0 * b, 8.0 * b});

    // tiny horizons collapse to a single clamped base
    CHECK(dreg::build_pool_swordpp(1.0, 2.0, 1.0, 2.0).etas == std::vector<double>{0.125});
    CHECK(dreg::build_pool_swordpp(1.0, 2.0, 1.0, 8.0).etas == std::vector<double>{0.125});
}

TEST_CASE("step-size pools double up to the cap") {
    dreg::Rng rng(81);
    for (int it = 0; it < 200; ++it) {
        double G = rng.uniform(0.1, 4.0);
        double D = rng.uniform(0.5, 5.0);
        double L = rng.uniform(0.05, 3.0);
        double T = std::floor(rng.uniform(2.0, 1e5));
        for (int which = 0; which < 3; ++which) {
            StepSizePool p = which == 0   ? dreg::build_pool_sword(G, D, L, T)
                             : which == 1 ? dreg::build_pool_swordpp(G, D, L, T)
                                          : dreg::build_pool_ader(G, D, L, T);
            REQUIRE(p.size() >= 1);
            for (std::size_t i = 0; i < p.size(); ++i) {
                CHECK(p.etas[i] > 0.0);
                CHECK(p.etas[i] <= p.cap);
                if (i > 0) {
                    CHECK(p.etas[i] > p.etas[i - 1]);
                    // geometric until the single clamped tail entry
                    if (p.etas[i] != p.cap) CHECK(p.etas[i] == 2.0 * p.etas[i - 1]);
                }
            }
        }
    }
    CHECK_THROWS_AS(dreg::build_pool_sword(0.0, 2.0, 1.0, 100.0), ValueError);
    CHECK_THROWS_AS(dreg::build_pool_swordpp(1.0, -2.0, 1.0, 100.0), ValueError);
    CHECK_THROWS_AS(dreg::build_pool_ader(1.0, 2.0, 0.0, 100.0), ValueError);
}

TEST_CASE("ogd steps, projections, and defaults") {
    CHECK(dreg::ogd_default_step(2.0, 2.0, 100.0) == 0.1);
    CHECK_THROWS_AS(dreg::make_ogd(FeasibleDomain::box({-1.0}, {1.0}), 0.0), ValueError);

    auto box = FeasibleDomain::box({-1.0}, {1.0});
    auto started = dreg::make_ogd(FeasibleDomain::box({0.5}, {1.0}), 0.1);
    CHECK(started.x == vec{0.5});

    // one unit step lands on the minimizer of x^2/2
    testref::ScalarSeq stat{{1.0, 1.0}, {0.0, 0.0}, -1.0, 1.0};
    auto fs = testref::seq_oracles(stat, 1.0, 1.0);
    auto s = dreg::make_ogd(box, 1.0);
    s.x = {1.0};
    auto out = dreg::ogd_round(s, fs[0], box);
    CHECK(out.decision == vec{1.0});
    CHECK(out.loss == 0.5);
    CHECK(dreg::ogd_round(s, fs[1], box).decision == vec{0.0});

    // zero gradients leave the iterate alone
    auto flat = constant_oracle(1.0);
    auto sf = dreg::make_ogd(box, 0.5);
    sf.x = {0.25};
    for (int t = 0; t < 10; ++t) CHECK(dreg::ogd_round(sf, flat, box).decision == vec{0.25});

    // a minimizer outside the box pins the iterate to the wall
    SmoothConvexOracle far_target;
    far_target.value_fn = [](const vec& x) { return 0.5 * (x[0] - 5.0) * (x[0] - 5.0); };
    far_target.gradient_fn = [](const vec& x) { return vec{x[0] - 5.0}; };
    auto sp = dreg::make_ogd(box, 0.3);
    sp.x = {1.0};
    for (int t = 0; t < 25; ++t) CHECK(dreg::ogd_round(sp, far_target, box).decision == vec{1.0});
}

TEST_CASE("optimistic descent trace on a stationary quadratic") {
    auto box = FeasibleDomain::box({-1.0}, {1.0});
    testref::ScalarSeq stat{{1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, -1.0, 1.0};
    auto fs = testref::seq_oracles(stat, 1.0, 1.0);

    auto s = dreg::make_oegd(box, 0.25, 1.0);
    CHECK_FALSE(s.step_size_warning);
    s.x_hat = {1.0};

    // the first decision is the auxiliary iterate itself
    auto r1 = dreg::oegd_round(s, fs[0], box);
    CHECK(r1.decision == vec{1.0});
    CHECK(r1.loss == 0.5);
    CHECK(s.x_hat == vec{0.75});
    CHECK(s.prev_grad == vec{1.0});

    auto r2 = dreg::oegd_round(s, fs[1], box);
    CHECK(r2.decision == vec{0.5});
    CHECK(r2.loss == 0.125);
}

TEST_CASE("step-size warning tracks the stability range") {
    auto box = FeasibleDomain::box({-1.0}, {1.0});
    CHECK(dreg::make_oegd(box, 0.26, 1.0).step_size_warning);
    CHECK_FALSE(dreg::make_oegd(box, 0.25, 1.0).step_size_warning);
    CHECK_FALSE(dreg::make_oegd(box, 10.0, 0.0).step_size_warning);
    CHECK_THROWS_AS(dreg::make_oegd(box, 0.0, 1.0), ValueError);
}

TEST_CASE("optimistic descent regret certificate") {
    // regret <= eta (G^2 + 2 V_T) + (D^2 + 2 D P_T) / (2 eta) for every pool
    // step size against every comparator sequence
    dreg::Rng rng(82);
    auto box = FeasibleDomain::box({-1.0}, {1.0});
    double D = 2.0;
    std::size_t T = 200;

    for (int rep = 0; rep < 25; ++rep) {
        testref::ScalarSeq seq = testref::random_seq(rng, T, 1.0);
        if (rep == 0) {
            // stationary corner: V_T and P_T both vanish
            for (std::size_t t = 1; t < T; ++t) {
                seq.a[t] = seq.a[0];
                seq.b[t] = seq.b[0];
            }
        }
        double G = testref::seq_G(seq);
        double L = testref::seq_L(seq);
        double VT = testref::seq_variation(seq);
        auto fs = testref::seq_oracles(seq, G, L);
        auto pool = dreg::build_pool_sword(G, D, L, static_cast<double>(T));

        for (double eta : pool.etas) {
            auto s = dreg::make_oegd(box, eta, L);
            CHECK_FALSE(s.step_size_warning);
            std::vector<double> losses(T);
            for (std::size_t t = 0; t < T; ++t) losses[t] = dreg::oegd_round(s, fs[t], box).loss;
            double cum = 0.0;
            for (double l : losses) cum += l;

            for (int cmp = 0; cmp < 50; ++cmp) {
                double step = (cmp == 0) ? 0.0 : rng.uniform(0.0, 0.5);
                double u = rng.uniform(-1.0, 1.0);
                double comp_loss = 0.0, path = 0.0;
                for (std::size_t t = 0; t < T; ++t) {
                    if (t > 0) {
                        double next = std::clamp(u + step * rng.gaussian(), -1.0, 1.0);
                        path += std::abs(next - u);
                        u = next;
                    }
                    comp_loss += testref::seq_value(seq, t, u);
                }
                double bound = eta * (G * G + 2.0 * VT) + (D * D + 2.0 * D * path) / (2.0 * eta);
                CHECK(cum - comp_loss <= bound + 1e-6);
            }
        }
    }
}

TEST_CASE("optimistic hedge certificate") {
    // meta regret <= eps sum ||l - m||_inf^2 + ln(N)/eps
    //               - (1/4eps) sum ||p_t - p_{t-1}||_1^2
    dreg::Rng rng(83);
    std::size_t N = 8, T = 300;
    for (int rep = 0; rep < 40; ++rep) {
        double eps = rng.uniform(0.05, 2.0);
        vec cum(N, 0.0), p_prev;
        double played = 0.0, adapt = 0.0, shrink = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            vec loss(N), m(N);
            for (std::size_t i = 0; i < N; ++i) {
                loss[i] = rng.uniform(-1.0, 1.0);
                m[i] = rng.uniform(-1.0, 1.0);
            }
            vec p = dreg::hedge_closed_form(cum, m, eps);
            played += dreg::dot(p, loss);
            double gap = 0.0;
            for (std::size_t i = 0; i < N; ++i) gap = std::max(gap, std::abs(loss[i] - m[i]));
            adapt += gap * gap;
            if (t > 0) {
                double l1 = 0.0;
                for (std::size_t i = 0; i < N; ++i) l1 += std::abs(p[i] - p_prev[i]);
                shrink += l1 * l1;
            }
            p_prev = std::move(p);
            for (std::size_t i = 0; i < N; ++i) cum[i] += loss[i];
        }
        double best = *std::min_element(cum.begin(), cum.end());
        double rhs = eps * adapt + std::log(static_cast<double>(N)) / eps -
                     shrink / (4.0 * eps);
        CHECK(rhs - (played - best) >= -1e-9);
    }
}

namespace {

struct EnsembleTrace {
    std::vector<double> losses;                       // true loss of the played decision
    std::vector<std::vector<double>> base_losses;     // true loss of every base decision
    std::vector<double> switch_slacks;
    EnsembleState state;
};

EnsembleTrace run_with_diagnostics(EnsembleAlgorithm algo, const dreg::EnvRounds& env,
                                   const StepSizePool& pool, double lambda = -1.0,
                                   std::optional<double> fixed_rate = {}) {
    EnsembleConfig cfg;
    cfg.algo = algo;
    cfg.pool = pool;
    cfg.G = env.G;
    cfg.D = env.domain.diameter();
    cfg.L = env.L;
    cfg.lambda = lambda;
    cfg.fixed_meta_rate = fixed_rate;
    cfg.record_diagnostics = true;
    EnsembleTrace trace{{}, {}, {}, dreg::make_ensemble(cfg, env.domain)};
    RoundOutcome out;
    for (const auto& f : env.rounds) {
        dreg::ensemble_round_into(trace.state, f, env.domain, out);
        trace.losses.push_back(out.loss);
        trace.base_losses.push_back(out.diagnostics->base_true_losses);
        trace.switch_slacks.push_back(out.diagnostics->switch_slack);
    }
    return trace;
}

}  // namespace

TEST_CASE("regret splits into meta and base parts against every base") {
    auto env = dreg::make_quadratic_instance(1, 101);
    auto u = dreg::comparator_minimizers(env.rounds, env.domain);
    double T = 101.0;

    for (auto algo :
         {EnsembleAlgorithm::sword, EnsembleAlgorithm::swordpp, EnsembleAlgorithm::ader}) {
        StepSizePool pool = algo == EnsembleAlgorithm::sword
                                ? dreg::build_pool_sword(env.G, 2.0, env.L, T)
                            : algo == EnsembleAlgorithm::swordpp
                                ? dreg::build_pool_swordpp(env.G, 2.0, env.L, T)
                                : dreg::build_pool_ader(env.G, 2.0, env.L, T);
        auto trace = run_with_diagnostics(algo, env, pool);

        double regret = 0.0;
        for (std::size_t t = 0; t < env.rounds.size(); ++t) {
            regret += trace.losses[t] - env.rounds[t].value(u.points[t]);
        }
        for (std::size_t i = 0; i < pool.size(); ++i) {
            double meta = 0.0, base = 0.0;
            for (std::size_t t = 0; t < env.rounds.size(); ++t) {
                double comparator = env.rounds[t].value(u.points[t]);
                meta += trace.losses[t] - trace.base_losses[t][i];
                base += trace.base_losses[t][i] - comparator;
            }
            CHECK(std::abs(regret - (meta + base)) <= 1e-9);
        }
    }
}

TEST_CASE("sword meta regret under a pinned rate stays below its certificate") {
    auto env = dreg::make_quadratic_instance(1, 201);
    double D = 2.0, T = 201.0;
    auto pool = dreg::build_pool_sword(env.G, D, env.L, T);
    REQUIRE(pool.size() == 5);

    double VT = testref::seq_variation(seq_of(env));
    double G2V = env.G * env.G + VT;
    double lnN = std::log(static_cast<double>(pool.size()));
    double rate = std::min(1.0 / (4.0 * D * D * env.L),
                           std::sqrt(lnN / (2.0 * D * D * G2V)));
    auto trace = run_with_diagnostics(EnsembleAlgorithm::sword, env, pool, -1.0, rate);

    double bound = 2.0 * D * std::sqrt(2.0 * G2V * lnN) + 8.0 * D * D * env.L * lnN;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        double meta = 0.0;
        for (std::size_t t = 0; t < env.rounds.size(); ++t) {
            meta += trace.losses[t] - trace.base_losses[t][i];
        }
        CHECK(meta <= bound + 1e-6);
    }
}

TEST_CASE("combined-decision switches are covered by base switches plus weight motion") {
    auto env = dreg::make_quadratic_instance(1, 201);
    auto pool = dreg::build_pool_swordpp(env.G, 2.0, env.L, 201.0);
    auto trace = run_with_diagnostics(EnsembleAlgorithm::swordpp, env, pool);

    double seen_min = trace.switch_slacks[0];
    for (double slack : trace.switch_slacks) {
        CHECK(slack >= -1e-9);
        seen_min = std::min(seen_min, slack);
    }
    CHECK(trace.state.min_switch_slack == seen_min);
}

namespace {

std::int64_t run_counting_grads(EnsembleAlgorithm algo, const dreg::EnvRounds& env,
                                const StepSizePool& pool, bool diagnostics, bool variant,
                                std::int64_t& value_total) {
    EnsembleConfig cfg;
    cfg.algo = algo;
    cfg.pool = pool;
    cfg.G = env.G;
    cfg.D = env.domain.diameter();
    cfg.L = env.L;
    cfg.variant_decision_gradient = variant;
    cfg.record_diagnostics = diagnostics;
    auto s = dreg::make_ensemble(cfg, env.domain);
    for (const auto& f : env.rounds) f.reset_counters();
    RoundOutcome out;
    std::int64_t from_outcomes = 0;
    for (const auto& f : env.rounds) {
        dreg::ensemble_round_into(s, f, env.domain, out);
        from_outcomes += out.gradient_queries;
        CHECK(out.gradient_queries == s.declared_gradient_budget);
    }
    std::int64_t grad_total = 0;
    value_total = 0;
    for (const auto& f : env.rounds) {
        grad_total += f.gradient_queries;
        value_total += f.value_queries;
    }
    CHECK(grad_total == from_outcomes);
    return grad_total;
}

}  // namespace

TEST_CASE("gradient budgets are exact and unchanged by diagnostics") {
    auto env = dreg::make_quadratic_instance(1, 101);
    std::int64_t T = 101;
    auto sword_pool = dreg::build_pool_sword(env.G, 2.0, env.L, 101.0);
    auto swpp_pool = dreg::build_pool_swordpp(env.G, 2.0, env.L, 101.0);
    auto ader_pool = dreg::build_pool_ader(env.G, 2.0, env.L, 101.0);
    auto N = static_cast<std::int64_t>(sword_pool.size());

    std::int64_t values = 0;
    CHECK(run_counting_grads(EnsembleAlgorithm::sword, env, sword_pool, false, false, values) ==
          (N + 1) * T);
    CHECK(values == 0);
    CHECK(run_counting_grads(EnsembleAlgorithm::sword, env, sword_pool, true, false, values) ==
          (N + 1) * T);
    CHECK(values == (N + 1) * T);  // one combined plus one per base, each round
    CHECK(run_counting_grads(EnsembleAlgorithm::sword, env, sword_pool, false, true, values) ==
          (2 * N + 1) * T);

    CHECK(run_counting_grads(EnsembleAlgorithm::swordpp, env, swpp_pool, false, false, values) ==
          T);
    CHECK(values == 0);
    CHECK(run_counting_grads(EnsembleAlgorithm::swordpp, env, swpp_pool, true, false, values) ==
          T);

    CHECK(run_counting_grads(EnsembleAlgorithm::ader, env, ader_pool, false, false, values) == T);
    CHECK(values == 0);

    // the single-iterate baselines spend one gradient per round
    for (const auto& f : env.rounds) f.reset_counters();
    auto box = env.domain;
    auto ogd = dreg::make_ogd(box, 0.1);
    RoundOutcome out;
    for (const auto& f : env.rounds) dreg::ogd_round_into(ogd, f, box, false, out);
    std::int64_t g = 0, v = 0;
    for (const auto& f : env.rounds) {
        g += f.gradient_queries;
        v += f.value_queries;
    }
    CHECK(g == T);
    CHECK(v == 0);

    for (const auto& f : env.rounds) f.reset_counters();
    auto oegd = dreg::make_oegd(box, 0.25, env.L);
    for (const auto& f : env.rounds) dreg::oegd_round_into(oegd, f, box, true, out);
    g = 0;
    v = 0;
    for (const auto& f : env.rounds) {
        g += f.gradient_queries;
        v += f.value_queries;
    }
    CHECK(g == T);
    CHECK(v == T);
}

TEST_CASE("single-base ensembles collapse to their base algorithms") {
    auto env = dreg::make_quadratic_instance(1, 101);
    auto box = env.domain;
    StepSizePool one{{0.05}, 0.25};

    // sword with one base walks the optimistic-descent trajectory
    {
        EnsembleConfig cfg;
        cfg.algo = EnsembleAlgorithm::sword;
        cfg.pool = one;
        cfg.G = env.G;
        cfg.D = 2.0;
        cfg.L = env.L;
        auto s = dreg::make_ensemble(cfg, box);
        auto o = dreg::make_oegd(box, 0.05, env.L);
        RoundOutcome a, b;
        for (const auto& f : env.rounds) {
            dreg::ensemble_round_into(s, f, box, a);
            dreg::oegd_round_into(o, f, box, false, b);
            CHECK(s.weights == vec{1.0});
            CHECK(dreg::dist2(a.decision, b.decision) <= 1e-12);
        }
    }

    // one-base swordpp equals optimistic descent on its own linearized losses
    {
        EnsembleConfig cfg;
        cfg.algo = EnsembleAlgorithm::swordpp;
        cfg.pool = one;
        cfg.G = env.G;
        cfg.D = 2.0;
        cfg.L = env.L;
        auto s = dreg::make_ensemble(cfg, box);
        RoundOutcome a, b;
        std::vector<vec> decisions, grads;
        for (const auto& f : env.rounds) {
            dreg::ensemble_round_into(s, f, box, a);
            decisions.push_back(a.decision);
            grads.push_back(f.gradient(a.decision));
        }
        auto o = dreg::make_oegd(box, 0.05, env.L);
        for (std::size_t t = 0; t < decisions.size(); ++t) {
            vec g = grads[t];
            SmoothConvexOracle surrogate;
            surrogate.value_fn = [g](const vec& x) { return dreg::dot(g, x); };
            surrogate.gradient_fn = [g](const vec&) { return g; };
            dreg::oegd_round_into(o, surrogate, box, false, b);
            CHECK(dreg::dist2(decisions[t], b.decision) <= 1e-12);
        }
    }

    // one-base ader is plain projected gradient descent
    {
        EnsembleConfig cfg;
        cfg.algo = EnsembleAlgorithm::ader;
        cfg.pool = one;
        cfg.G = env.G;
        cfg.D = 2.0;
        auto s = dreg::make_ensemble(cfg, box);
        auto o = dreg::make_ogd(box, 0.05);
        RoundOutcome a, b;
        for (const auto& f : env.rounds) {
            dreg::ensemble_round_into(s, f, box, a);
            dreg::ogd_round_into(o, f, box, false, b);
            CHECK(dreg::dist2(a.decision, b.decision) <= 1e-12);
        }
    }
}

TEST_CASE("duplicated step sizes share the weight forever") {
    auto env = dreg::make_quadratic_instance(1, 101);
    EnsembleConfig cfg;
    cfg.algo = EnsembleAlgorithm::sword;
    cfg.pool = StepSizePool{{0.1, 0.1}, 0.25};
    cfg.G = env.G;
    cfg.D = 2.0;
    cfg.L = env.L;
    auto s = dreg::make_ensemble(cfg, env.domain);
    RoundOutcome out;
    for (const auto& f : env.rounds) {
        dreg::ensemble_round_into(s, f, env.domain, out);
        CHECK(s.weights == vec{0.5, 0.5});
    }
}

TEST_CASE("indistinguishable feedback keeps the meta weights uniform") {
    auto box = FeasibleDomain::box({-1.0}, {1.0});
    auto flat = constant_oracle(1.0);
    for (auto algo : {EnsembleAlgorithm::sword, EnsembleAlgorithm::ader}) {
        EnsembleConfig cfg;
        cfg.algo = algo;
        cfg.pool = StepSizePool{{0.02, 0.04, 0.08, 0.16}, 0.25};
        cfg.G = 1.0;
        cfg.D = 2.0;
        cfg.L = 1.0;
        auto s = dreg::make_ensemble(cfg, box);
        RoundOutcome out;
        for (int t = 0; t < 60; ++t) {
            dreg::ensemble_round_into(s, flat, box, out);
            CHECK(s.weights == vec{0.25, 0.25, 0.25, 0.25});
        }
    }
}

TEST_CASE("weight mass migrates to the fast base after a loss flip") {
    // linear pull to the left wall for half the horizon, then to the right:
    // the larger step size tracks both walls sooner and ends up dominant
    auto box = FeasibleDomain::box({-1.0}, {1.0});
    auto pool = dreg::build_pool_ader(1.0, 2.0, 1.0, 128.0);
    REQUIRE(pool.size() == 2);

    EnsembleConfig cfg;
    cfg.algo = EnsembleAlgorithm::ader;
    cfg.pool = pool;
    cfg.G = 1.0;
    cfg.D = 2.0;
    auto s = dreg::make_ensemble(cfg, box);
    auto up = linear_oracle(1.0);
    auto down = linear_oracle(-1.0);
    RoundOutcome out;
    for (int t = 0; t < 128; ++t) {
        dreg::ensemble_round_into(s, t < 64 ? up : down, box, out);
    }
    CHECK(s.weights[1] > 0.5);
}

TEST_CASE("one-gradient ensemble converges on a fixed target") {
    auto box = FeasibleDomain::box({-1.0}, {1.0});
    testref::ScalarSeq stat;
    stat.a.assign(1000, 1.0);
    stat.b.assign(1000, 0.3);
    auto fs = testref::seq_oracles(stat, 1.3, 1.0);

    EnsembleConfig cfg;
    cfg.algo = EnsembleAlgorithm::swordpp;
    cfg.pool = dreg::build_pool_swordpp(1.3, 2.0, 1.0, 1000.0);
    cfg.G = 1.3;
    cfg.D = 2.0;
    cfg.L = 1.0;
    auto s = dreg::make_ensemble(cfg, box);
    for (const auto& f : fs) f.reset_counters();

    RoundOutcome out;
    double cum100 = 0.0, cum1000 = 0.0;
    for (std::size_t t = 0; t < 1000; ++t) {
        dreg::ensemble_round_into(s, fs[t], box, out);
        double loss = testref::seq_value(stat, t, out.decision[0]);
        cum1000 += loss;
        if (t < 100) cum100 += loss;
    }
    // the minimizer is interior with zero loss, so cumulative loss is regret
    CHECK(cum1000 / cum100 < 1.2);

    std::int64_t grads = 0;
    for (const auto& f : fs) grads += f.gradient_queries;
    CHECK(grads == 1000);
}

TEST_CASE("ensemble construction validation") {
    auto box = FeasibleDomain::box({-1.0}, {1.0});
    EnsembleConfig cfg;
    cfg.algo = EnsembleAlgorithm::swordpp;
    cfg.G = 1.0;
    cfg.D = 2.0;
    cfg.L = 1.0;

    CHECK_THROWS_AS(dreg::make_ensemble(cfg, box), ValueError);  // empty pool
    cfg.pool = StepSizePool{{0.1, 0.0}, 0.25};
    CHECK_THROWS_AS(dreg::make_ensemble(cfg, box), ValueError);
    cfg.pool = StepSizePool{{0.1}, 0.25};

    cfg.variant_decision_gradient = true;
    CHECK_THROWS_AS(dreg::make_ensemble(cfg, box), ValueError);
    cfg.variant_decision_gradient = false;

    cfg.fixed_meta_rate = -0.5;
    CHECK_THROWS_AS(dreg::make_ensemble(cfg, box), ValueError);
    cfg.fixed_meta_rate.reset();

    cfg.L = 0.0;
    CHECK_THROWS_AS(dreg::make_ensemble(cfg, box), ValueError);
    cfg.algo = EnsembleAlgorithm::ader;
    CHECK_NOTHROW(dreg::make_ensemble(cfg, box));  // ader has no smoothness input

    cfg.G = 0.0;
    CHECK_THROWS_AS(dreg::make_ensemble(cfg, box), ValueError);
    cfg.G = 1.0;

    auto s = dreg::make_ensemble(cfg, box);
    auto flat = constant_oracle(1.0);
    CHECK_THROWS_AS(dreg::swordpp_round(s, flat, box), ValueError);
    CHECK_NOTHROW(dreg::ader_round(s, flat, box));
}
