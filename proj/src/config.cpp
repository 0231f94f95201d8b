#include "dreg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace dreg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct Line {
    std::string section;
    std::string key;
    std::string value;
    std::size_t number = 0;
};

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
    std::ostringstream os;
    os << source << ":" << line << ": " << msg;
    throw ConfigError(os.str());
}

double to_double(const Line& ln, const std::string& source) {
    double out = 0.0;
    const char* b = ln.value.data();
    const char* e = b + ln.value.size();
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc() || res.ptr != e) {
        fail(source, ln.number, "key '" + ln.key + "' needs a number, got '" + ln.value + "'");
    }
    return out;
}

std::uint64_t to_uint(const Line& ln, const std::string& source, const std::string& text) {
    std::uint64_t out = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc() || res.ptr != e) {
        fail(source, ln.number,
             "key '" + ln.key + "' needs a nonnegative integer, got '" + text + "'");
    }
    return out;
}

bool to_bool(const Line& ln, const std::string& source) {
    if (ln.value == "true") return true;
    if (ln.value == "false") return false;
    fail(source, ln.number, "key '" + ln.key + "' needs true or false, got '" + ln.value + "'");
}

std::vector<std::string> to_list(const Line& ln, const std::string& source) {
    std::string v = ln.value;
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') fail(source, ln.number, "unterminated list for key '" + ln.key + "'");
        v = v.substr(1, v.size() - 2);
    }
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= v.size()) {
        std::size_t comma = v.find(',', start);
        std::string item = trim(comma == std::string::npos ? v.substr(start)
                                                           : v.substr(start, comma - start));
        if (!item.empty()) items.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (items.empty()) fail(source, ln.number, "key '" + ln.key + "' needs a nonempty list");
    return items;
}

void append_double(std::string& out, double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

bool has_algorithm(const ExperimentConfig& cfg, AlgorithmKind kind) {
    return std::find(cfg.algorithms.begin(), cfg.algorithms.end(), kind) !=
           cfg.algorithms.end();
}

}  // namespace

AlgorithmKind parse_algorithm(const std::string& name) {
    if (name == "ogd") return AlgorithmKind::ogd;
    if (name == "ader") return AlgorithmKind::ader;
    if (name == "oegd") return AlgorithmKind::oegd;
    if (name == "sword") return AlgorithmKind::sword;
    if (name == "swordpp") return AlgorithmKind::swordpp;
    if (name == "sword_bandit") return AlgorithmKind::sword_bandit;
    throw ConfigError("unknown algorithm '" + name +
                      "' (expected ogd, ader, oegd, sword, swordpp, or sword_bandit)");
}

const char* algorithm_name(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::ogd: return "ogd";
        case AlgorithmKind::ader: return "ader";
        case AlgorithmKind::oegd: return "oegd";
        case AlgorithmKind::sword: return "sword";
        case AlgorithmKind::swordpp: return "swordpp";
        case AlgorithmKind::sword_bandit: return "sword_bandit";
    }
    return "?";
}

const char* comparator_name(ComparatorKind kind) {
    switch (kind) {
        case ComparatorKind::minimizers: return "minimizers";
        case ComparatorKind::true_models: return "true_models";
        case ComparatorKind::fixed: return "fixed";
        case ComparatorKind::none: return "none";
    }
    return "?";
}

const char* env_name(EnvKind kind) {
    switch (kind) {
        case EnvKind::quadratic1: return "quadratic1";
        case EnvKind::quadratic2: return "quadratic2";
        case EnvKind::piecewise: return "piecewise";
        case EnvKind::csv: return "csv";
    }
    return "?";
}

const char* bandit_mode_name(BanditMode mode) {
    switch (mode) {
        case BanditMode::variation: return "variation";
        case BanditMode::zero: return "zero";
        case BanditMode::best: return "best";
    }
    return "?";
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
    ExperimentConfig cfg;
    bool saw_horizon = false;
    bool saw_env_kind = false;
    std::map<std::string, std::size_t> seen;  // qualified key -> first line

    std::string section;
    std::size_t number = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++number;
        std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(source, number, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "environment" &&
                section != "overrides" && section != "diagnostics") {
                fail(source, number, "unknown section [" + section + "]");
            }
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(source, number, "expected 'key = value'");
        Line ln;
        ln.section = section;
        ln.key = trim(line.substr(0, eq));
        ln.value = trim(line.substr(eq + 1));
        ln.number = number;
        if (ln.key.empty()) fail(source, number, "empty key");
        if (ln.value.empty()) fail(source, number, "empty value for key '" + ln.key + "'");
        if (section.empty()) fail(source, number, "key '" + ln.key + "' outside any section");

        std::string qualified = section + "." + ln.key;
        auto [it, inserted] = seen.emplace(qualified, number);
        if (!inserted) {
            fail(source, number,
                 "duplicate key '" + ln.key + "' (first set on line " +
                     std::to_string(it->second) + ")");
        }

        if (section == "experiment") {
            if (ln.key == "name") {
                cfg.name = ln.value;
            } else if (ln.key == "horizon") {
                cfg.horizon = static_cast<std::size_t>(to_uint(ln, source, ln.value));
                saw_horizon = true;
            } else if (ln.key == "seeds") {
                for (const auto& item : to_list(ln, source)) {
                    cfg.seeds.push_back(to_uint(ln, source, item));
                }
            } else if (ln.key == "algorithms") {
                for (const auto& item : to_list(ln, source)) {
                    AlgorithmKind kind;
                    try {
                        kind = parse_algorithm(item);
                    } catch (const ConfigError& e) {
                        fail(source, number, e.what());
                    }
                    if (has_algorithm(cfg, kind)) {
                        fail(source, number, "algorithm '" + item + "' listed twice");
                    }
                    cfg.algorithms.push_back(kind);
                }
            } else if (ln.key == "comparators") {
                if (ln.value == "minimizers") cfg.comparators = ComparatorKind::minimizers;
                else if (ln.value == "true_models") cfg.comparators = ComparatorKind::true_models;
                else if (ln.value == "fixed") cfg.comparators = ComparatorKind::fixed;
                else if (ln.value == "none") cfg.comparators = ComparatorKind::none;
                else fail(source, number, "unknown comparator kind '" + ln.value + "'");
            } else if (ln.key == "out_dir") {
                cfg.out_dir = ln.value;
            } else {
                fail(source, number, "unknown key '" + ln.key + "' in [experiment]");
            }
        } else if (section == "environment") {
            if (ln.key == "kind") {
                if (ln.value == "quadratic1") cfg.env.kind = EnvKind::quadratic1;
                else if (ln.value == "quadratic2") cfg.env.kind = EnvKind::quadratic2;
                else if (ln.value == "piecewise") cfg.env.kind = EnvKind::piecewise;
                else if (ln.value == "csv") cfg.env.kind = EnvKind::csv;
                else fail(source, number, "unknown environment kind '" + ln.value + "'");
                saw_env_kind = true;
            } else if (ln.key == "dim") {
                cfg.env.dim = static_cast<std::size_t>(to_uint(ln, source, ln.value));
            } else if (ln.key == "gamma") {
                cfg.env.gamma = to_double(ln, source);
            } else if (ln.key == "diameter") {
                cfg.env.diameter = to_double(ln, source);
            } else if (ln.key == "stage_length") {
                cfg.env.stage_length = static_cast<std::size_t>(to_uint(ln, source, ln.value));
            } else if (ln.key == "path") {
                cfg.env.path = ln.value;
            } else if (ln.key == "seed") {
                cfg.env.seed = to_uint(ln, source, ln.value);
            } else {
                fail(source, number, "unknown key '" + ln.key + "' in [environment]");
            }
        } else if (section == "overrides") {
            if (ln.key == "ogd.eta") {
                cfg.overrides.ogd_eta = to_double(ln, source);
            } else if (ln.key == "oegd.eta") {
                cfg.overrides.oegd_eta = to_double(ln, source);
            } else if (ln.key == "sword.variant_decision_gradient") {
                cfg.overrides.sword_variant_decision_gradient = to_bool(ln, source);
            } else if (ln.key == "swordpp.lambda") {
                cfg.overrides.swordpp_lambda = to_double(ln, source);
            } else if (ln.key == "bandit.delta") {
                cfg.overrides.bandit_delta = to_double(ln, source);
            } else if (ln.key == "bandit.alpha") {
                cfg.overrides.bandit_alpha = to_double(ln, source);
            } else if (ln.key == "bandit.mode") {
                if (ln.value == "variation") cfg.overrides.bandit_mode = BanditMode::variation;
                else if (ln.value == "zero") cfg.overrides.bandit_mode = BanditMode::zero;
                else if (ln.value == "best") cfg.overrides.bandit_mode = BanditMode::best;
                else fail(source, number, "unknown bandit mode '" + ln.value + "'");
            } else {
                fail(source, number, "unknown key '" + ln.key + "' in [overrides]");
            }
        } else {  // diagnostics
            if (ln.key == "record") {
                cfg.record_diagnostics = to_bool(ln, source);
            } else if (ln.key == "kahan") {
                cfg.kahan = to_bool(ln, source);
            } else {
                fail(source, number, "unknown key '" + ln.key + "' in [diagnostics]");
            }
        }
    }

    if (!saw_horizon) fail(source, number, "missing required key 'horizon' in [experiment]");
    if (cfg.horizon == 0) fail(source, number, "horizon must be at least 1");
    if (cfg.algorithms.empty()) {
        fail(source, number, "missing required key 'algorithms' in [experiment]");
    }
    if (!saw_env_kind) fail(source, number, "missing required key 'kind' in [environment]");
    if (cfg.seeds.empty()) cfg.seeds.push_back(1);

    if (cfg.env.kind == EnvKind::csv && cfg.env.path.empty()) {
        fail(source, number, "csv environment needs a 'path'");
    }
    if (cfg.env.kind == EnvKind::piecewise) {
        if (cfg.env.dim == 0) fail(source, number, "piecewise environment needs dim >= 1");
        if (!(cfg.env.gamma > 0.0)) fail(source, number, "gamma must be positive");
        if (!(cfg.env.diameter > 0.0)) fail(source, number, "diameter must be positive");
        if (cfg.env.stage_length == 0) fail(source, number, "stage_length must be >= 1");
    }
    if (cfg.comparators == ComparatorKind::true_models &&
        cfg.env.kind != EnvKind::piecewise) {
        fail(source, number, "true_models comparators need the piecewise environment");
    }
    if (cfg.comparators == ComparatorKind::minimizers &&
        (cfg.env.kind == EnvKind::piecewise || cfg.env.kind == EnvKind::csv)) {
        fail(source, number,
             "minimizers comparators need a quadratic environment; use true_models or fixed");
    }

    struct OverrideGate {
        bool set;
        AlgorithmKind needs;
        const char* key;
    };
    const OverrideGate gates[] = {
        {cfg.overrides.ogd_eta.has_value(), AlgorithmKind::ogd, "ogd.eta"},
        {cfg.overrides.oegd_eta.has_value(), AlgorithmKind::oegd, "oegd.eta"},
        {cfg.overrides.sword_variant_decision_gradient, AlgorithmKind::sword,
         "sword.variant_decision_gradient"},
        {cfg.overrides.swordpp_lambda.has_value(), AlgorithmKind::swordpp, "swordpp.lambda"},
        {cfg.overrides.bandit_delta.has_value(), AlgorithmKind::sword_bandit, "bandit.delta"},
        {cfg.overrides.bandit_alpha.has_value(), AlgorithmKind::sword_bandit, "bandit.alpha"},
        {seen.count("overrides.bandit.mode") > 0, AlgorithmKind::sword_bandit, "bandit.mode"},
    };
    for (const auto& gate : gates) {
        if (gate.set && !has_algorithm(cfg, gate.needs)) {
            fail(source, seen.count(std::string("overrides.") + gate.key)
                             ? seen[std::string("overrides.") + gate.key]
                             : number,
                 std::string("override '") + gate.key + "' set but " +
                     algorithm_name(gate.needs) + " is not in the run");
        }
    }
    if (cfg.overrides.ogd_eta && !(*cfg.overrides.ogd_eta > 0.0)) {
        fail(source, seen["overrides.ogd.eta"], "ogd.eta must be positive");
    }
    if (cfg.overrides.oegd_eta && !(*cfg.overrides.oegd_eta > 0.0)) {
        fail(source, seen["overrides.oegd.eta"], "oegd.eta must be positive");
    }
    if (cfg.overrides.swordpp_lambda && !(*cfg.overrides.swordpp_lambda >= 0.0)) {
        fail(source, seen["overrides.swordpp.lambda"], "swordpp.lambda must be nonnegative");
    }
    if (cfg.overrides.bandit_delta && !(*cfg.overrides.bandit_delta > 0.0)) {
        fail(source, seen["overrides.bandit.delta"], "bandit.delta must be positive");
    }
    if (cfg.overrides.bandit_alpha &&
        !(*cfg.overrides.bandit_alpha > 0.0 && *cfg.overrides.bandit_alpha < 1.0)) {
        fail(source, seen["overrides.bandit.alpha"], "bandit.alpha must be in (0, 1)");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string canonical_config(const ExperimentConfig& cfg) {
    std::vector<std::string> lines;
    auto put = [&lines](const std::string& key, const std::string& value) {
        lines.push_back(key + " = " + value);
    };
    auto put_num = [&put](const std::string& key, double value) {
        std::string s;
        append_double(s, value);
        put(key, s);
    };

    put("experiment.name", cfg.name);
    put("experiment.horizon", std::to_string(cfg.horizon));
    {
        std::string s = "[";
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(cfg.seeds[i]);
        }
        put("experiment.seeds", s + "]");
    }
    {
        std::string s = "[";
        for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
            if (i) s += ", ";
            s += algorithm_name(cfg.algorithms[i]);
        }
        put("experiment.algorithms", s + "]");
    }
    put("experiment.comparators", comparator_name(cfg.comparators));
    put("experiment.out_dir", cfg.out_dir);

    put("environment.kind", env_name(cfg.env.kind));
    put("environment.dim", std::to_string(cfg.env.dim));
    put_num("environment.gamma", cfg.env.gamma);
    put_num("environment.diameter", cfg.env.diameter);
    put("environment.stage_length", std::to_string(cfg.env.stage_length));
    put("environment.path", cfg.env.path);
    put("environment.seed", std::to_string(cfg.env.seed));

    if (cfg.overrides.ogd_eta) put_num("overrides.ogd.eta", *cfg.overrides.ogd_eta);
    if (cfg.overrides.oegd_eta) put_num("overrides.oegd.eta", *cfg.overrides.oegd_eta);
    put("overrides.sword.variant_decision_gradient",
        cfg.overrides.sword_variant_decision_gradient ? "true" : "false");
    if (cfg.overrides.swordpp_lambda) {
        put_num("overrides.swordpp.lambda", *cfg.overrides.swordpp_lambda);
    }
    if (cfg.overrides.bandit_delta) put_num("overrides.bandit.delta", *cfg.overrides.bandit_delta);
    if (cfg.overrides.bandit_alpha) put_num("overrides.bandit.alpha", *cfg.overrides.bandit_alpha);
    put("overrides.bandit.mode", bandit_mode_name(cfg.overrides.bandit_mode));

    put("diagnostics.record", cfg.record_diagnostics ? "true" : "false");
    put("diagnostics.kahan", cfg.kahan ? "true" : "false");

    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::string canon = canonical_config(cfg);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace dreg
