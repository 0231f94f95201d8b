#include "dreg/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dreg {

bool all_finite(const vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void require_finite(const vec& v, const char* what) {
    if (!all_finite(v)) {
        throw ValueError(std::string(what) + ": non-finite entry");
    }
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw ValueError(std::string(what) + ": non-finite value");
    }
}

void require_same_dim(std::size_t expect, const vec& v, const char* what) {
    if (v.size() != expect) {
        throw ValueError(std::string(what) + ": dimension mismatch (expected " +
                         std::to_string(expect) + ", got " + std::to_string(v.size()) + ")");
    }
}

// ---- FeasibleDomain -------------------------------------------------------

FeasibleDomain FeasibleDomain::ball(vec center, double radius) {
    require_finite(center, "ball center");
    require_finite(radius, "ball radius");
    if (center.empty()) throw ValueError("ball: empty center");
    if (radius <= 0.0) throw ValueError("ball: radius must be positive");
    FeasibleDomain d;
    d.kind_ = Kind::ball;
    d.dim_ = center.size();
    d.a_ = std::move(center);
    d.radius_ = radius;
    return d;
}

FeasibleDomain FeasibleDomain::box(vec lower, vec upper) {
    require_finite(lower, "box lower");
    require_finite(upper, "box upper");
    if (lower.empty()) throw ValueError("box: empty bounds");
    require_same_dim(lower.size(), upper, "box bounds");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i]) {
            throw ValueError("box: lower bound exceeds upper bound at coordinate " +
                             std::to_string(i));
        }
    }
    FeasibleDomain d;
    d.kind_ = Kind::box;
    d.dim_ = lower.size();
    d.a_ = std::move(lower);
    d.b_ = std::move(upper);
    return d;
}

FeasibleDomain FeasibleDomain::scaled(FeasibleDomain inner, double factor) {
    require_finite(factor, "scale factor");
    if (factor <= 0.0 || factor > 1.0) {
        throw ValueError("scaled: factor must lie in (0, 1]");
    }
    // shrinking toward the origin only makes sense when the origin belongs
    // to the inner set; otherwise the scaled copy drifts out of it
    vec origin(inner.dim(), 0.0);
    if (norm2(inner.project(origin)) > 1e-12) {
        throw ValueError("scaled: inner domain does not contain the origin");
    }
    FeasibleDomain d;
    d.kind_ = Kind::scaled;
    d.dim_ = inner.dim();
    d.factor_ = factor;
    d.inner_ = std::make_shared<const FeasibleDomain>(std::move(inner));
    return d;
}

FeasibleDomain FeasibleDomain::simplex(std::size_t size) {
    if (size == 0) throw ValueError("simplex: size must be at least 1");
    FeasibleDomain d;
    d.kind_ = Kind::simplex;
    d.dim_ = size;
    return d;
}

double FeasibleDomain::diameter() const {
    switch (kind_) {
        case Kind::ball:
            return 2.0 * radius_;
        case Kind::box:
            return dist2(a_, b_);
        case Kind::scaled:
            return factor_ * inner_->diameter();
        case Kind::simplex:
            return dim_ >= 2 ? std::sqrt(2.0) : 0.0;
    }
    return 0.0;
}

double FeasibleDomain::origin_inradius() const {
    switch (kind_) {
        case Kind::ball:
            return std::max(0.0, radius_ - norm2(a_));
        case Kind::box: {
            double r = a_.empty() ? 0.0 : -a_[0];
            for (std::size_t i = 0; i < dim_; ++i) {
                r = std::min(r, std::min(-a_[i], b_[i]));
            }
            return std::max(0.0, r);
        }
        case Kind::scaled:
            return factor_ * inner_->origin_inradius();
        case Kind::simplex:
            return 0.0;  // the simplex lives on an affine slice through e_i, not around 0
    }
    return 0.0;
}

bool FeasibleDomain::contains(const vec& x, double tol) const {
    if (x.size() != dim_) return false;
    switch (kind_) {
        case Kind::ball:
            return dist2(x, a_) <= radius_ + tol;
        case Kind::box:
            for (std::size_t i = 0; i < dim_; ++i) {
                if (x[i] < a_[i] - tol || x[i] > b_[i] + tol) return false;
            }
            return true;
        case Kind::scaled: {
            vec y(dim_);
            for (std::size_t i = 0; i < dim_; ++i) y[i] = x[i] / factor_;
            return inner_->contains(y, tol / factor_);
        }
        case Kind::simplex: {
            double sum = 0.0;
            for (double xi : x) {
                if (xi < -tol) return false;
                sum += xi;
            }
            // allow plain summation roundoff on top of the caller's tolerance
            return std::abs(sum - 1.0) <= tol + 1e-14 * static_cast<double>(dim_);
        }
    }
    return false;
}

namespace {

// Duchi et al. 2008 ("Efficient Projections onto the l1-Ball", Algorithm 1),
// specialized to the probability simplex.
void project_simplex(double* x, std::size_t n) {
    thread_local vec sorted;
    sorted.assign(x, x + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    double cumsum = 0.0;
    double theta = 0.0;
    std::size_t rho = 0;
    double rho_cumsum = 1.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumsum += sorted[j];
        double t = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - t > 0.0) {
            rho = j + 1;
            rho_cumsum = cumsum;
        }
    }
    theta = (rho_cumsum - 1.0) / static_cast<double>(rho == 0 ? 1 : rho);

    for (std::size_t i = 0; i < n; ++i) x[i] = std::max(x[i] - theta, 0.0);
}

}  // namespace

void FeasibleDomain::project_span_general(double* x, std::size_t n) const {
    switch (kind_) {
        case Kind::ball: {
            // normally taken care of by the inline fast path; kept correct
            // here so the dispatch stays self-contained
            double d2 = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                double d = x[i] - a_[i];
                d2 += d * d;
            }
            if (d2 > radius_ * radius_) {
                double scale = radius_ / std::sqrt(d2);
                for (std::size_t i = 0; i < dim_; ++i) {
                    x[i] = a_[i] + (x[i] - a_[i]) * scale;
                }
            }
            return;
        }
        case Kind::box:
            for (std::size_t i = 0; i < dim_; ++i) {
                x[i] = std::clamp(x[i], a_[i], b_[i]);
            }
            return;
        case Kind::scaled: {
            for (std::size_t i = 0; i < dim_; ++i) x[i] /= factor_;
            inner_->project_span(x, n);
            for (std::size_t i = 0; i < dim_; ++i) x[i] *= factor_;
            return;
        }
        case Kind::simplex:
            project_simplex(x, n);
            return;
    }
}

void FeasibleDomain::project_in_place(vec& x) const {
    require_finite(x, "project input");
    project_span(x.data(), x.size());
}

vec FeasibleDomain::project(const vec& x) const {
    vec y = x;
    project_in_place(y);
    return y;
}

// ---- SmoothConvexOracle ---------------------------------------------------

double SmoothConvexOracle::value(const vec& x) const {
    require_finite(x, "oracle value input");
    if (domain && !domain->contains(x, kOracleDomainTol)) {
        throw ValueError("oracle value input: outside the feasible domain");
    }
    ++value_queries;
    double v = value_fn(x);
    require_finite(v, "oracle value output");
    if (nonnegative && v < 0.0) {
        throw ValueError("oracle value output: negative despite the nonnegativity flag");
    }
    return v;
}

vec SmoothConvexOracle::gradient(const vec& x) const {
    require_finite(x, "oracle gradient input");
    if (domain && !domain->contains(x, kOracleDomainTol)) {
        throw ValueError("oracle gradient input: outside the feasible domain");
    }
    ++gradient_queries;
    vec g = gradient_fn(x);
    require_same_dim(x.size(), g, "oracle gradient output");
    require_finite(g, "oracle gradient output");
    if (grad_bound > 0.0 && norm2(g) > grad_bound + kOracleGradTol) {
        throw ValueError("oracle gradient output: norm exceeds the declared bound");
    }
    return g;
}

void SmoothConvexOracle::reset_counters() const {
    value_queries = 0;
    gradient_queries = 0;
}

}  // namespace dreg
