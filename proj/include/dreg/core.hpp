#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dreg {

using vec = std::vector<double>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad numeric input: non-finite values, dimension mismatch, out-of-range parameters
struct ValueError : Error {
    using Error::Error;
};

// malformed configuration or incompatible run settings
struct ConfigError : Error {
    using Error::Error;
};

// filesystem and CSV format problems
struct IoError : Error {
    using Error::Error;
};

bool all_finite(const vec& v);
void require_finite(const vec& v, const char* what);
void require_finite(double x, const char* what);
void require_same_dim(std::size_t expect, const vec& v, const char* what);

// The learner loops call these on 1-10 element vectors millions of times, so
// they live in the header where the compiler can inline and vectorize them.
inline double dot(const vec& a, const vec& b) {
    require_same_dim(a.size(), b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double sqnorm(const vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double norm2(const vec& v) {
    return std::sqrt(sqnorm(v));
}

inline double sqdist(const vec& a, const vec& b) {
    require_same_dim(a.size(), b, "sqdist");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist2(const vec& a, const vec& b) {
    return std::sqrt(sqdist(a, b));
}

// Feasible sets the optimizers project onto. Four kinds cover every
// environment in this artifact: euclidean balls, axis-aligned boxes,
// uniformly shrunk copies of another set, and the probability simplex.
class FeasibleDomain {
  public:
    enum class Kind { ball, box, scaled, simplex };

    static FeasibleDomain ball(vec center, double radius);
    static FeasibleDomain box(vec lower, vec upper);
    static FeasibleDomain scaled(FeasibleDomain inner, double factor);
    static FeasibleDomain simplex(std::size_t size);

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double diameter() const;

    // radius of the largest origin-centered euclidean ball inside the set,
    // 0 when the origin is outside or on the boundary
    double origin_inradius() const;

    bool contains(const vec& x, double tol = 0.0) const;
    vec project(const vec& x) const;
    void project_in_place(vec& x) const;
    // Same projection on a raw row of a flat buffer. This is the optimizer
    // hot path: entries are trusted to be finite (they come from validated
    // oracle outputs and earlier projections), and the euclidean-ball case
    // is inlined below. The vec overloads above stay fully checked.
    void project_span(double* x, std::size_t n) const;

  private:
    FeasibleDomain() = default;

    void project_span_general(double* x, std::size_t n) const;

    Kind kind_ = Kind::ball;
    std::size_t dim_ = 0;
    vec a_;  // ball center / box lower
    vec b_;  // box upper
    double radius_ = 0.0;
    double factor_ = 1.0;
    std::shared_ptr<const FeasibleDomain> inner_;
};

inline void FeasibleDomain::project_span(double* x, std::size_t n) const {
    if (n != dim_) {
        throw ValueError("project: dimension mismatch (expected " + std::to_string(dim_) +
                         ", got " + std::to_string(n) + ")");
    }
    if (kind_ == Kind::ball) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double di = x[i] - a_[i];
            d2 += di * di;
        }
        if (d2 > radius_ * radius_) {
            double scale = radius_ / std::sqrt(d2);
            for (std::size_t i = 0; i < n; ++i) x[i] = a_[i] + (x[i] - a_[i]) * scale;
        }
        return;
    }
    project_span_general(x, n);
}

// Queries slightly outside the feasible set still get served; beyond this
// slack the oracle rejects them, since the declared G/L certificates only
// cover the domain. The slack absorbs projection roundoff (a projected point
// can land an ulp past a ball boundary).
inline constexpr double kOracleDomainTol = 1e-9;

// Slack on the declared gradient-norm bound: the certified supremum plus
// room for dot-product roundoff in the oracle's own arithmetic.
inline constexpr double kOracleGradTol = 1e-9;

// One round's loss function plus the regularity constants the tuning
// formulas consume. value/gradient go through the counting wrappers below,
// which audit query budgets exactly and validate every query at the
// boundary: finite input of the right dimension, inside the domain when one
// is attached, finite output honoring the declared certificates (gradient
// norm within grad_bound, value nonnegative when flagged). Oracles are the
// user-extensible seam (custom environments plug in arbitrary closures), so
// the checks live here rather than in each caller.
struct SmoothConvexOracle {
    std::function<double(const vec&)> value_fn;
    std::function<vec(const vec&)> gradient_fn;
    double grad_bound = 0.0;   // G: largest euclidean gradient norm over the domain
    double smoothness = 0.0;   // L: gradients are L-lipschitz
    bool nonnegative = false;
    // set for scalar square losses 0.5*(a*x - b)^2; lets metrics run in closed form
    std::optional<std::pair<double, double>> scalar_coeffs;
    // feasible set the constants are certified on; null skips the membership check
    std::shared_ptr<const FeasibleDomain> domain;

    mutable std::int64_t value_queries = 0;
    mutable std::int64_t gradient_queries = 0;

    double value(const vec& x) const;
    vec gradient(const vec& x) const;
    void reset_counters() const;
};

}  // namespace dreg
