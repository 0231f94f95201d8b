#include "dreg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dreg/rng.hpp"

namespace dreg {

namespace {

bool all_scalar(const std::vector<SmoothConvexOracle>& fs) {
    for (const auto& f : fs) {
        if (!f.scalar_coeffs) return false;
    }
    return true;
}

// endpoints of a one-dimensional domain, recovered through projection
std::pair<double, double> interval_of(const FeasibleDomain& domain) {
    if (domain.dim() != 1) {
        throw ValueError("analytic metric needs a one-dimensional domain");
    }
    double lo = domain.project(vec{-1e100})[0];
    double hi = domain.project(vec{1e100})[0];
    return {lo, hi};
}

void require_analytic(const std::vector<SmoothConvexOracle>& fs, const FeasibleDomain& domain) {
    if (!all_scalar(fs) || domain.dim() != 1) {
        throw ValueError("closed-form metric needs scalar square losses on a 1-d domain");
    }
}

// Nested point sequence covering the domain: the prefix of any longer run is
// exactly a shorter run, which makes sampled suprema monotone in the count.
// One dimension walks endpoints then binary midpoints; higher dimensions use
// a fixed-seed stream whose overshoot draws project onto the boundary, where
// suprema of convex differences live.
std::vector<vec> sample_points(const FeasibleDomain& domain, std::size_t samples) {
    std::vector<vec> pts;
    pts.reserve(samples);
    if (domain.dim() == 1) {
        auto [lo, hi] = interval_of(domain);
        for (std::size_t k = 0; k < samples; ++k) {
            if (k == 0) {
                pts.push_back(vec{lo});
            } else if (k == 1) {
                pts.push_back(vec{hi});
            } else {
                // van der Corput radical inverse in base 2 of k-1
                std::size_t n = k - 1;
                double v = 0.0, denom = 0.5;
                while (n > 0) {
                    v += denom * static_cast<double>(n & 1);
                    n >>= 1;
                    denom *= 0.5;
                }
                pts.push_back(vec{lo + v * (hi - lo)});
            }
        }
        return pts;
    }
    Rng rng(0xd1e5u);
    vec center = domain.project(vec(domain.dim(), 0.0));
    double reach = domain.diameter();
    for (std::size_t k = 0; k < samples; ++k) {
        double stretch = (k % 3 == 0) ? 0.5 : 2.0;
        vec x(domain.dim());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = center[i] + stretch * reach * rng.gaussian();
        }
        domain.project_in_place(x);
        pts.push_back(std::move(x));
    }
    return pts;
}

}  // namespace

double path_length(const ComparatorSequence& u) {
    double s = 0.0;
    for (std::size_t t = 1; t < u.points.size(); ++t) {
        s += dist2(u.points[t - 1], u.points[t]);
    }
    return s;
}

double squared_path_length(const ComparatorSequence& u) {
    double s = 0.0;
    for (std::size_t t = 1; t < u.points.size(); ++t) {
        s += sqdist(u.points[t - 1], u.points[t]);
    }
    return s;
}

double gradient_variation_analytic(const std::vector<SmoothConvexOracle>& fs,
                                   const FeasibleDomain& domain) {
    require_analytic(fs, domain);
    auto [lo, hi] = interval_of(domain);
    double total = 0.0;
    for (std::size_t t = 1; t < fs.size(); ++t) {
        auto [a1, b1] = *fs[t].scalar_coeffs;
        auto [a0, b0] = *fs[t - 1].scalar_coeffs;
        // gradient difference is linear: (a1^2 - a0^2) x - (a1 b1 - a0 b0)
        double c = a1 * a1 - a0 * a0;
        double e = a1 * b1 - a0 * b0;
        double sup = std::max(std::abs(c * lo - e), std::abs(c * hi - e));
        total += sup * sup;
    }
    return total;
}

double gradient_variation_grid(const std::vector<SmoothConvexOracle>& fs,
                               const FeasibleDomain& domain, std::size_t samples) {
    if (samples == 0) throw ValueError("gradient_variation_grid: need at least one sample");
    auto pts = sample_points(domain, samples);
    double total = 0.0;
    for (std::size_t t = 1; t < fs.size(); ++t) {
        double best = 0.0;
        for (const auto& x : pts) {
            best = std::max(best, sqdist(fs[t].gradient(x), fs[t - 1].gradient(x)));
        }
        total += best;
    }
    return total;
}

double function_variation_analytic(const std::vector<SmoothConvexOracle>& fs,
                                   const FeasibleDomain& domain) {
    require_analytic(fs, domain);
    auto [lo, hi] = interval_of(domain);
    double total = 0.0;
    for (std::size_t t = 1; t < fs.size(); ++t) {
        auto [a1, b1] = *fs[t].scalar_coeffs;
        auto [a0, b0] = *fs[t - 1].scalar_coeffs;
        // difference of the two square losses is the quadratic A x^2 + B x + C
        double A = 0.5 * (a1 * a1 - a0 * a0);
        double B = -(a1 * b1 - a0 * b0);
        double C = 0.5 * (b1 * b1 - b0 * b0);
        auto eval = [&](double x) { return std::abs((A * x + B) * x + C); };
        double sup = std::max(eval(lo), eval(hi));
        if (A != 0.0) {
            double v = -B / (2.0 * A);
            if (v > lo && v < hi) sup = std::max(sup, eval(v));
        }
        total += sup;
    }
    return total;
}

double function_variation_grid(const std::vector<SmoothConvexOracle>& fs,
                               const FeasibleDomain& domain, std::size_t samples) {
    if (samples == 0) throw ValueError("function_variation_grid: need at least one sample");
    auto pts = sample_points(domain, samples);
    double total = 0.0;
    for (std::size_t t = 1; t < fs.size(); ++t) {
        double best = 0.0;
        for (const auto& x : pts) {
            best = std::max(best, std::abs(fs[t].value(x) - fs[t - 1].value(x)));
        }
        total += best;
    }
    return total;
}

ComparatorSequence comparator_minimizers(const std::vector<SmoothConvexOracle>& fs,
                                         const FeasibleDomain& domain) {
    require_analytic(fs, domain);
    ComparatorSequence u;
    u.provenance = "per-round minimizers";
    u.points.reserve(fs.size());
    for (const auto& f : fs) {
        auto [a, b] = *f.scalar_coeffs;
        // argmin of 0.5*(a x - b)^2 clipped to the domain; a flat loss (a = 0)
        // is minimized everywhere, take the projection of the origin
        vec point{a != 0.0 ? b / a : 0.0};
        domain.project_in_place(point);
        u.points.push_back(std::move(point));
    }
    return u;
}

ComparatorSequence fixed_comparators(const vec& point, std::size_t rounds,
                                     std::string provenance) {
    require_finite(point, "fixed comparator");
    ComparatorSequence u;
    u.provenance = std::move(provenance);
    u.points.assign(rounds, point);
    return u;
}

double small_loss(const std::vector<SmoothConvexOracle>& fs, const ComparatorSequence& u) {
    if (fs.size() != u.points.size()) {
        throw ValueError("small_loss: comparator count does not match round count");
    }
    double s = 0.0;
    for (std::size_t t = 0; t < fs.size(); ++t) {
        s += fs[t].value(u.points[t]);
    }
    return s;
}

RegretReport dynamic_regret(double cumulative_loss,
                            const std::vector<SmoothConvexOracle>& fs,
                            const ComparatorSequence& u) {
    RegretReport r;
    r.cumulative_loss = cumulative_loss;
    r.comparator_loss = small_loss(fs, u);
    r.dynamic_regret = r.cumulative_loss - r.comparator_loss;
    return r;
}

double empirical_variation(const std::vector<vec>& gradients) {
    double s = 0.0;
    for (std::size_t t = 1; t < gradients.size(); ++t) {
        s += sqdist(gradients[t - 1], gradients[t]);
    }
    return s;
}

}  // namespace dreg
