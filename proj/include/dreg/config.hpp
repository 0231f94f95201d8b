#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dreg/bandit.hpp"
#include "dreg/core.hpp"

namespace dreg {

enum class AlgorithmKind { ogd, ader, oegd, sword, swordpp, sword_bandit };
enum class ComparatorKind { minimizers, true_models, fixed, none };
enum class EnvKind { quadratic1, quadratic2, piecewise, csv };

AlgorithmKind parse_algorithm(const std::string& name);
const char* algorithm_name(AlgorithmKind kind);
const char* comparator_name(ComparatorKind kind);
const char* env_name(EnvKind kind);
const char* bandit_mode_name(BanditMode mode);

struct EnvironmentSpec {
    EnvKind kind = EnvKind::quadratic1;
    std::size_t dim = 5;             // piecewise
    double gamma = 1.0;              // piecewise, csv feature radius
    double diameter = 2.0;           // piecewise decision-ball diameter
    std::size_t stage_length = 1000; // piecewise
    std::string path;                // csv
    std::uint64_t seed = 0;          // mixed with the run seed for piecewise
};

// Per-algorithm knobs. Absent optionals fall back to the built-in defaults.
struct AlgorithmOverrides {
    std::optional<double> ogd_eta;
    std::optional<double> oegd_eta;
    bool sword_variant_decision_gradient = false;
    std::optional<double> swordpp_lambda;
    std::optional<double> bandit_delta;   // default 1/T floored at 1e-8
    std::optional<double> bandit_alpha;   // default keeps the probes feasible
    BanditMode bandit_mode = BanditMode::variation;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::size_t horizon = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<AlgorithmKind> algorithms;
    ComparatorKind comparators = ComparatorKind::minimizers;
    std::string out_dir = ".";
    EnvironmentSpec env;
    AlgorithmOverrides overrides;
    bool record_diagnostics = false;
    bool kahan = false;
};

// Parses the `key = value` dialect: [section] headers, # comments, lists in
// brackets. Unknown sections, unknown keys, duplicate keys, and ill-typed
// values all raise ConfigError with the offending line.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Canonical serialization: every field as a sorted `section.key = value`
// line, numbers in shortest round-trip form. The config hash is FNV-1a 64
// over these bytes, so it is stable across platforms.
std::string canonical_config(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace dreg
