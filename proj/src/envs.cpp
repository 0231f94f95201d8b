#include "dreg/envs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "dreg/rng.hpp"

namespace dreg {

namespace {

// scalar square loss 0.5*(a x - b)^2 on a 1-d domain
SmoothConvexOracle scalar_square_loss(double a, double b, double G, double L) {
    SmoothConvexOracle f;
    f.value_fn = [a, b](const vec& x) {
        double r = a * x[0] - b;
        return 0.5 * r * r;
    };
    f.gradient_fn = [a, b](const vec& x) { return vec{a * (a * x[0] - b)}; };
    f.grad_bound = G;
    f.smoothness = L;
    f.nonnegative = true;
    f.scalar_coeffs = {a, b};
    return f;
}

// regression square loss 0.5*(y - <x, w>)^2 in the model variable w
SmoothConvexOracle regression_loss(vec x, double y, double G, double L) {
    SmoothConvexOracle f;
    auto xp = std::make_shared<const vec>(std::move(x));
    f.value_fn = [xp, y](const vec& w) {
        double r = dot(*xp, w) - y;
        return 0.5 * r * r;
    };
    f.gradient_fn = [xp, y](const vec& w) {
        const vec& feat = *xp;
        double r = dot(feat, w) - y;
        vec g(feat.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = r * feat[i];
        return g;
    };
    f.grad_bound = G;
    f.smoothness = L;
    f.nonnegative = true;
    return f;
}

// every oracle carries a handle to the env's feasible set so the query
// boundary can reject out-of-domain evaluations
void attach_domain(EnvRounds& env) {
    auto dom = std::make_shared<const FeasibleDomain>(env.domain);
    for (auto& f : env.rounds) f.domain = dom;
}

}  // namespace

EnvRounds make_quadratic_instance(int which, std::size_t T) {
    if (T == 0) throw ConfigError("quadratic instance: horizon must be positive");
    EnvRounds env;
    env.domain = FeasibleDomain::box(vec{-1.0}, vec{1.0});
    env.nonnegative = true;
    env.rounds.reserve(T);

    if (which == 1) {
        if (T % 2 == 0) {
            throw ConfigError("quadratic instance 1 needs an odd horizon");
        }
        // slope 0.5 - (t-1)/T sweeps from 0.5 to just past -0.5; G and L are
        // exact suprema of |a*(a*x - b)| and a^2 over the domain
        double amax = 0.5;
        env.G = amax * (amax + 1.0);
        env.L = amax * amax;
        for (std::size_t t = 1; t <= T; ++t) {
            double a = 0.5 - static_cast<double>(t - 1) / static_cast<double>(T);
            env.rounds.push_back(scalar_square_loss(a, 1.0, env.G, env.L));
        }
        attach_domain(env);
        return env;
    }
    if (which == 2) {
        if (T % 2 != 0) {
            throw ConfigError("quadratic instance 2 needs an even horizon");
        }
        env.G = 2.0;
        env.L = 1.0;
        std::size_t half = T / 2;
        for (std::size_t t = 1; t <= T; ++t) {
            double a = (t % 2 == 1) ? 1.0 : 0.5;
            double b = (t <= half) ? a : -a;
            env.rounds.push_back(scalar_square_loss(a, b, env.G, env.L));
        }
        attach_domain(env);
        return env;
    }
    throw ConfigError("quadratic instance: which must be 1 or 2");
}

EnvRounds make_piecewise_regression(std::uint64_t seed, std::size_t T, std::size_t d,
                                    double gamma, double diameter, std::size_t stage_len) {
    if (T == 0 || d == 0) throw ConfigError("piecewise regression: empty horizon or dimension");
    if (gamma <= 0.0 || diameter <= 0.0) {
        throw ConfigError("piecewise regression: gamma and diameter must be positive");
    }
    if (stage_len == 0) throw ConfigError("piecewise regression: stage length must be positive");

    EnvRounds env;
    double radius = diameter / 2.0;
    env.domain = FeasibleDomain::ball(vec(d, 0.0), radius);
    // |<x,w> - y| <= gamma*radius + (gamma*radius + 0.1), times ||x|| <= gamma
    env.G = gamma * (gamma * diameter + 0.1);
    env.L = gamma * gamma;
    env.nonnegative = true;
    env.rounds.reserve(T);
    env.true_models.reserve(T);

    Rng rng(seed);
    vec model;
    for (std::size_t t = 0; t < T; ++t) {
        if (t % stage_len == 0) model = rng.uniform_ball(d, radius);
        vec x = rng.uniform_ball(d, gamma);
        double y = dot(x, model) + rng.uniform(0.0, 0.1);
        env.rounds.push_back(regression_loss(std::move(x), y, env.G, env.L));
        env.true_models.push_back(model);
    }
    attach_domain(env);
    return env;
}

EnvRounds make_csv_regression(const std::string& path, double gamma,
                              const FeasibleDomain& domain) {
    if (gamma <= 0.0) throw ConfigError("csv regression: gamma must be positive");
    std::ifstream in(path);
    if (!in) throw IoError("csv regression: cannot open " + path);

    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) out.push_back(field);
        return out;
    };
    auto parse_field = [](const std::string& s, double& out) {
        const char* b = s.data();
        const char* e = b + s.size();
        while (b < e && (*b == ' ' || *b == '\t')) ++b;
        while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
        auto res = std::from_chars(b, e, out);
        return res.ec == std::errc() && res.ptr == e && b < e;
    };

    std::string line;
    if (!std::getline(in, line)) throw IoError("csv regression: empty file " + path);
    auto header = split(line);
    if (header.size() < 2) {
        throw IoError("csv regression: need at least one feature column and a label column");
    }
    {
        // a fully numeric first row means the header is missing
        double tmp;
        bool numeric = true;
        for (const auto& h : header) numeric = numeric && parse_field(h, tmp);
        if (numeric) throw IoError("csv regression: header row required in " + path);
    }
    std::size_t cols = header.size();
    std::size_t d = cols - 1;
    if (domain.dim() != d) {
        throw ConfigError("csv regression: domain dimension " + std::to_string(domain.dim()) +
                          " does not match feature count " + std::to_string(d));
    }

    std::vector<vec> features;
    std::vector<double> labels;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split(line);
        if (fields.size() != cols) {
            throw IoError("csv regression: row " + std::to_string(lineno) + " has " +
                          std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(cols));
        }
        vec x(d);
        for (std::size_t i = 0; i < d; ++i) {
            if (!parse_field(fields[i], x[i])) {
                throw IoError("csv regression: bad number at row " + std::to_string(lineno));
            }
        }
        double y;
        if (!parse_field(fields[d], y)) {
            throw IoError("csv regression: bad label at row " + std::to_string(lineno));
        }
        require_finite(x, "csv feature row");
        require_finite(y, "csv label");
        features.push_back(std::move(x));
        labels.push_back(y);
    }
    if (features.empty()) throw IoError("csv regression: no data rows in " + path);

    double max_norm = 0.0;
    for (const auto& x : features) max_norm = std::max(max_norm, norm2(x));
    double scale = (max_norm > gamma) ? gamma / max_norm : 1.0;
    if (scale != 1.0) {
        for (auto& x : features) {
            for (double& xi : x) xi *= scale;
        }
        max_norm *= scale;
    }

    // model magnitude bound from the domain geometry
    vec anchor = domain.project(vec(d, 0.0));
    double wmax = norm2(anchor) + domain.diameter();
    double ymax = 0.0;
    for (double y : labels) ymax = std::max(ymax, std::abs(y));

    EnvRounds env;
    env.domain = domain;
    env.L = max_norm * max_norm;
    env.G = max_norm * (max_norm * wmax + ymax);
    env.nonnegative = true;
    env.rounds.reserve(features.size());
    for (std::size_t t = 0; t < features.size(); ++t) {
        env.rounds.push_back(regression_loss(std::move(features[t]), labels[t], env.G, env.L));
    }
    attach_domain(env);
    return env;
}

}  // namespace dreg
