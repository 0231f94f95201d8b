#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "dreg/core.hpp"
#include "dreg/learners.hpp"
#include "dreg/rng.hpp"

namespace dreg {

// How the two-point learner guesses the next gradient estimate: track the
// last observation per coordinate (variation), guess nothing (zero), or mix
// the two with a learned coefficient (best).
enum class BanditMode { variation, zero, best };

// The pair of points committed in one round: center +/- delta along a
// uniformly drawn coordinate axis.
struct TwoPointQuery {
    vec x_plus;
    vec x_minus;
    std::size_t coord = 0;
    double delta = 0.0;
};

// central difference (value_plus - value_minus) / (2 delta)
double finite_difference(double value_plus, double value_minus, double delta);

// One-coordinate estimator around the optimism:
//   g = d*(v - M[coord])*e_coord + M,
// and the recursion that keeps M as the latest observation per coordinate:
//   M'[coord] = v, other entries unchanged.
std::pair<vec, vec> estimate_gradient(double v, const TwoPointQuery& query, const vec& M,
                                      std::size_t d);

struct BanditOptimism {
    BanditMode mode = BanditMode::zero;
    vec M;      // optimism in play this round
    vec M_var;  // the coordinate-tracking expert stream (best mode)
    double gamma = 0.5;
    double cum_loss_var = 0.0;
    double cum_loss_zero = 0.0;
    double hedge_rate = 0.0;
};

BanditOptimism make_bandit_optimism(BanditMode mode, std::size_t dim, double G);

// Two-expert hedge between the coordinate tracker and the zero guess, scored
// by half squared deviation from the realized estimator. Advances the tracker
// stream to next_variation_optimism and re-mixes M for the next round.
BanditOptimism learn_best_optimism(BanditOptimism state, const vec& g_tilde,
                                   const vec& next_variation_optimism);

StepSizePool build_pool_bandit(BanditMode mode, double G, double D, double L, double T,
                               std::size_t d);
// deviation-correction coefficient for the surrogate losses
double bandit_correction(BanditMode mode, double L, double T, std::size_t d);
// clamp on the self-confident meta rate; 0 means uncapped
double bandit_rate_cap(BanditMode mode, double D, double L, double T, std::size_t d);

struct BanditConfig {
    BanditMode mode = BanditMode::zero;
    StepSizePool pool;
    double G = 0.0;
    double D = 0.0;
    double L = 0.0;
    double lambda = 0.0;
    double rate_cap = 0.0;  // 0 means uncapped
    double delta = 0.0;     // probe radius
    // shrink factor override; the default keeps both probes feasible exactly
    std::optional<double> alpha;
    std::uint64_t seed = 0;
    bool record_diagnostics = false;
};

struct BanditState {
    BanditConfig cfg;
    FeasibleDomain domain = FeasibleDomain::box(vec{-1.0}, vec{1.0});
    FeasibleDomain shrunk = FeasibleDomain::box(vec{-1.0}, vec{1.0});
    double alpha = 0.0;
    std::size_t dim = 0;
    std::size_t n = 0;
    double ln_n = 0.0;

    BanditOptimism opt;
    std::vector<double> y_hat;
    std::vector<double> y_cur;
    std::vector<double> y_next;
    std::vector<double> y_prev;
    vec weights;
    vec cum_feedback;
    vec cur_m;
    vec next_m;
    vec feedback;
    vec y_bar;
    vec g_tilde;
    double cur_rate = 0.0;
    double next_rate = 0.0;
    double rate_accum = 0.0;
    CounterRng coord_rng;
    std::int64_t round = 0;

    // deviation tallies for the optimism-tracking certificates
    double cum_dev_played = 0.0;
    double cum_dev_var = 0.0;
    double cum_dev_zero = 0.0;

    TwoPointQuery last_query;
};

BanditState make_sword_bandit(const BanditConfig& cfg, const FeasibleDomain& domain);

RoundOutcome sword_bandit_round(BanditState& s, const SmoothConvexOracle& f);
void sword_bandit_round_into(BanditState& s, const SmoothConvexOracle& f, RoundOutcome& out);

}  // namespace dreg
