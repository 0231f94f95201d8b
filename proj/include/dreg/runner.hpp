#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dreg/config.hpp"
#include "dreg/envs.hpp"
#include "dreg/metrics.hpp"

namespace dreg {

// Everything one (algorithm, seed) run produced, before any file is written.
// The query vectors are cumulative per round, as emitted in the CSVs.
struct RunRecord {
    AlgorithmKind algo = AlgorithmKind::ogd;
    BanditMode bandit_mode = BanditMode::variation;  // sword_bandit runs only
    std::uint64_t seed = 0;
    std::vector<double> cum_loss;
    std::vector<double> dyn_regret;
    std::vector<double> weights_entropy;
    std::vector<std::int64_t> grad_queries;
    std::vector<std::int64_t> value_queries;
    double wall_ms = 0.0;
    double comparator_path_length = 0.0;
    double grad_variation = 0.0;
    bool grad_variation_empirical = false;  // trajectory V-bar instead of analytic
    double small_loss = 0.0;
    std::int64_t total_grad_queries = 0;
    std::int64_t total_value_queries = 0;
};

struct RunOutput {
    std::vector<std::string> files;
    std::vector<RunRecord> records;
    std::uint64_t config_hash = 0;
};

// Runs every (algorithm, seed) pair of the config and writes one CSV per run,
// one per-algorithm aggregate (mean/std across seeds per round), and one
// summary CSV. check_bounds additionally replays the certified inequalities
// on the drifting quadratic instance and emits a certificates CSV. Any error
// removes every file the call created before rethrowing.
RunOutput run_experiment(const ExperimentConfig& cfg, bool check_bounds = false);

// Reads summary CSVs, groups rows per (file, algorithm), and tabulates
// mean/std of final cumulative loss and wall time over seeds. With exactly
// two inputs a difference row per shared algorithm is appended. Returns the
// human-readable table; the machine-readable version goes to out_csv_path.
std::string compare_records(const std::vector<std::string>& paths,
                            const std::string& out_csv_path);

}  // namespace dreg
