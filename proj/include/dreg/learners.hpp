#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dreg/core.hpp"
#include "dreg/omd.hpp"

namespace dreg {

// Geometric grid of base step sizes, clamped at the stability cap.
struct StepSizePool {
    std::vector<double> etas;
    double cap = 0.0;

    std::size_t size() const { return etas.size(); }
};

StepSizePool build_pool_sword(double G, double D, double L, double T);
StepSizePool build_pool_swordpp(double G, double D, double L, double T);
StepSizePool build_pool_ader(double G, double D, double L, double T);

// Everything a single round produces. The loss and the per-base observations
// are only populated when the learner runs with diagnostics on; the plain
// path leaves them empty so timing measures algorithm work alone.
struct RoundDiagnostics {
    vec weights;                            // meta weights used for this decision
    std::vector<double> base_true_losses;   // loss value at every base decision
    std::vector<double> feedback_losses;    // surrogate losses fed to the meta learner
    std::vector<double> optimism_terms;     // optimism entries the current weights saw
    double meta_rate = 0.0;                 // learning rate the current weights saw
    double switch_slack = 0.0;              // per-round decision-switch inequality slack
};

struct RoundOutcome {
    vec decision;
    double loss = 0.0;
    std::int64_t gradient_queries = 0;
    std::int64_t value_queries = 0;
    std::optional<RoundDiagnostics> diagnostics;
};

// ---- single-iterate baselines ---------------------------------------------

double ogd_default_step(double G, double D, double T);

struct OgdState {
    vec x;
    double eta = 0.0;
};

OgdState make_ogd(const FeasibleDomain& domain, double eta);
RoundOutcome ogd_round(OgdState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain);
void ogd_round_into(OgdState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain,
                    bool with_loss, RoundOutcome& out);

struct OegdState {
    vec x_hat;
    vec prev_grad;
    double eta = 0.0;
    bool step_size_warning = false;  // eta exceeds the 1/(4L) stability range
};

OegdState make_oegd(const FeasibleDomain& domain, double eta, double L);
RoundOutcome oegd_round(OegdState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain);
void oegd_round_into(OegdState& s, const SmoothConvexOracle& f, const FeasibleDomain& domain,
                     bool with_loss, RoundOutcome& out);

// ---- step-size ensembles ---------------------------------------------------

enum class EnsembleAlgorithm { sword, swordpp, ader };

struct EnsembleConfig {
    EnsembleAlgorithm algo = EnsembleAlgorithm::swordpp;
    StepSizePool pool;
    double G = 0.0;
    double D = 0.0;
    double L = 0.0;
    double lambda = -1.0;  // deviation-correction coefficient; negative picks the default
    // pins the meta learning rate for certificate runs instead of the
    // self-confident schedule
    std::optional<double> fixed_meta_rate;
    // evaluate the phase-1 gradient at the fresh auxiliary iterate (costs one
    // extra gradient per base per round)
    bool variant_decision_gradient = false;
    bool record_diagnostics = false;
};

// One meta-plus-bases learner. Per-base iterates live in flat row-major
// buffers (base i occupies [i*dim, (i+1)*dim)) so a round is a handful of
// linear passes.
struct EnsembleState {
    EnsembleConfig cfg;
    std::size_t dim = 0;
    std::size_t n = 0;
    double ln_n = 0.0;
    double lambda = 0.0;
    double rate_cap = 0.0;   // <= 0 means uncapped
    double rate_coef = 0.0;  // multiplier on the deviation sum inside the rate

    std::vector<double> x_hat;   // auxiliary iterates
    std::vector<double> x_cur;   // decisions of the current round
    std::vector<double> x_next;  // decisions being prepared for the next round
    std::vector<double> x_prev;  // decisions of the previous round

    vec weights;
    vec weights_prev;
    vec cum_feedback;
    vec cur_m;      // optimism the current weights were computed against
    vec next_m;     // optimism for the next weight update
    vec feedback;   // scratch: this round's surrogate losses
    double cur_rate = 0.0;
    double next_rate = 0.0;

    vec combined;
    vec combined_prev;
    vec grad;        // last gradient fed to the bases
    vec grad_prev;
    vec base_grads;  // sword: per-base gradients, flat
    vec xbar;        // sword: weighted average of the upcoming base decisions
    double rate_accum = 0.0;
    double min_switch_slack = 0.0;
    std::int64_t round = 0;
    std::int64_t declared_gradient_budget = 0;  // per-round gradient queries
};

EnsembleState make_ensemble(const EnsembleConfig& cfg, const FeasibleDomain& domain);

RoundOutcome sword_round(EnsembleState& s, const SmoothConvexOracle& f,
                         const FeasibleDomain& domain);
RoundOutcome swordpp_round(EnsembleState& s, const SmoothConvexOracle& f,
                           const FeasibleDomain& domain);
RoundOutcome ader_round(EnsembleState& s, const SmoothConvexOracle& f,
                        const FeasibleDomain& domain);
void ensemble_round_into(EnsembleState& s, const SmoothConvexOracle& f,
                         const FeasibleDomain& domain, RoundOutcome& out);

}  // namespace dreg
