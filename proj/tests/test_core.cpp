#include <cmath>
#include <limits>
#include <memory>

#include "doctest.h"
#include "dreg/core.hpp"
#include "dreg/rng.hpp"
#include "oracles.hpp"

using dreg::FeasibleDomain;
using dreg::SmoothConvexOracle;
using dreg::ValueError;
using dreg::vec;

TEST_CASE("vector helpers") {
    CHECK(dreg::dot({1.0, 2.0}, {3.0, 4.0}) == 11.0);
    CHECK(dreg::sqnorm({3.0, 4.0}) == 25.0);
    CHECK(dreg::norm2({3.0, 4.0}) == 5.0);
    CHECK(dreg::sqdist({1.0, 1.0}, {4.0, 5.0}) == 25.0);
    CHECK(dreg::dist2({1.0, 1.0}, {4.0, 5.0}) == 5.0);
    CHECK_THROWS_AS(dreg::dot({1.0}, {1.0, 2.0}), ValueError);
    CHECK_THROWS_AS(dreg::sqdist({1.0}, {1.0, 2.0}), ValueError);
    CHECK(dreg::all_finite({1.0, -2.0}));
    CHECK_FALSE(dreg::all_finite({1.0, std::numeric_limits<double>::infinity()}));
}

TEST_CASE("ball projection") {
    auto b = FeasibleDomain::ball({0.0, 0.0}, 1.0);
    CHECK(dreg::dist2(b.project({3.0, 4.0}), {0.6, 0.8}) <= 1e-15);
    CHECK(b.project({0.2, -0.1}) == vec{0.2, -0.1});

    auto off = FeasibleDomain::ball({1.0, 1.0}, 2.0);
    vec p = off.project({1.0, 4.0});
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("box projection") {
    auto b = FeasibleDomain::box({-1.0, -1.0}, {1.0, 1.0});
    CHECK(b.project({0.5, -0.2}) == vec{0.5, -0.2});
    CHECK(b.project({2.0, -3.0}) == vec{1.0, -1.0});
    CHECK(b.project({0.3, 7.0}) == vec{0.3, 1.0});
}

TEST_CASE("simplex projection") {
    auto s2 = FeasibleDomain::simplex(2);
    CHECK(s2.project({0.8, 0.8}) == vec{0.5, 0.5});
    CHECK(s2.project({1.0, 0.0}) == vec{1.0, 0.0});
    CHECK(s2.project({2.0, 0.0}) == vec{1.0, 0.0});

    // against the bisection reference on random points
    dreg::Rng rng(41);
    for (int it = 0; it < 1000; ++it) {
        std::size_t d = 1 + rng.uniform_index(6);
        auto s = FeasibleDomain::simplex(d);
        vec x(d);
        for (double& xi : x) xi = rng.uniform(-2.0, 2.0);
        vec got = s.project(x);
        vec want = testref::simplex_project(x);
        CHECK(dreg::dist2(got, want) <= 1e-9);
        double sum = 0.0;
        for (double gi : got) {
            CHECK(gi >= 0.0);
            sum += gi;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("scaled projection") {
    auto half_ball = FeasibleDomain::scaled(FeasibleDomain::ball({0.0, 0.0}, 1.0), 0.5);
    CHECK(half_ball.project({1.0, 0.0}) == vec{0.5, 0.0});
    auto half_box = FeasibleDomain::scaled(FeasibleDomain::box({-1.0, -1.0}, {1.0, 1.0}), 0.5);
    CHECK(half_box.project({2.0, 2.0}) == vec{0.5, 0.5});
    CHECK(half_box.project({0.1, -0.3}) == vec{0.1, -0.3});
}

namespace {

FeasibleDomain random_domain(dreg::Rng& rng, std::size_t d, int kind) {
    switch (kind) {
        case 0: {
            vec c(d);
            for (double& ci : c) ci = rng.uniform(-1.0, 1.0);
            return FeasibleDomain::ball(std::move(c), rng.uniform(0.3, 2.0));
        }
        case 1: {
            vec lo(d), hi(d);
            for (std::size_t i = 0; i < d; ++i) {
                lo[i] = -rng.uniform(0.1, 2.0);
                hi[i] = rng.uniform(0.1, 2.0);
            }
            return FeasibleDomain::box(std::move(lo), std::move(hi));
        }
        case 2: {
            // inner set must contain the origin, so center the ball at 0
            return FeasibleDomain::scaled(FeasibleDomain::ball(vec(d, 0.0), rng.uniform(0.5, 2.0)),
                                          rng.uniform(0.1, 1.0));
        }
        default:
            return FeasibleDomain::simplex(d);
    }
}

}  // namespace

TEST_CASE("projection is idempotent, feasible, and nonexpansive") {
    dreg::Rng rng(42);
    for (int kind = 0; kind < 4; ++kind) {
        for (int it = 0; it < 1000; ++it) {
            std::size_t d = 1 + rng.uniform_index(6);
            auto dom = random_domain(rng, d, kind);
            vec x(d), y(d);
            for (std::size_t i = 0; i < d; ++i) {
                x[i] = 3.0 * rng.gaussian();
                y[i] = 3.0 * rng.gaussian();
            }
            vec px = dom.project(x);
            vec py = dom.project(y);
            CHECK(dom.contains(px, 1e-9));
            CHECK(dreg::dist2(dom.project(px), px) <= 1e-12);
            CHECK(dreg::dist2(px, py) <= dreg::dist2(x, y) + 1e-9);
        }
    }
}

TEST_CASE("diameter and origin inradius") {
    CHECK(FeasibleDomain::ball({0.0, 0.0}, 1.0).diameter() == 2.0);
    CHECK(FeasibleDomain::ball({0.0, 0.0}, 1.0).origin_inradius() == 1.0);
    CHECK(FeasibleDomain::ball({0.5, 0.0}, 1.0).origin_inradius() == 0.5);
    CHECK(FeasibleDomain::ball({3.0, 0.0}, 1.0).origin_inradius() == 0.0);

    auto box = FeasibleDomain::box({-1.0, -1.0}, {1.0, 1.0});
    CHECK(box.diameter() == std::sqrt(8.0));
    CHECK(box.origin_inradius() == 1.0);
    CHECK(FeasibleDomain::box({-0.25, -1.0}, {1.0, 1.0}).origin_inradius() == 0.25);
    // origin on the boundary leaves no interior ball
    CHECK(FeasibleDomain::box({0.0, -1.0}, {1.0, 1.0}).origin_inradius() == 0.0);

    auto half = FeasibleDomain::scaled(FeasibleDomain::ball({0.0}, 2.0), 0.5);
    CHECK(half.diameter() == 2.0);
    CHECK(half.origin_inradius() == 1.0);

    CHECK(FeasibleDomain::simplex(2).diameter() == std::sqrt(2.0));
    CHECK(FeasibleDomain::simplex(1).diameter() == 0.0);
    CHECK(FeasibleDomain::simplex(3).origin_inradius() == 0.0);
}

TEST_CASE("domain constructor validation") {
    CHECK_THROWS_AS(FeasibleDomain::ball({0.0}, 0.0), ValueError);
    CHECK_THROWS_AS(FeasibleDomain::ball({0.0}, -1.0), ValueError);
    CHECK_THROWS_AS(FeasibleDomain::ball({std::nan("")}, 1.0), ValueError);
    CHECK_THROWS_AS(FeasibleDomain::ball({}, 1.0), ValueError);
    CHECK_THROWS_AS(FeasibleDomain::box({1.0}, {0.5}), ValueError);
    CHECK_THROWS_AS(FeasibleDomain::box({0.0, 0.0}, {1.0}), ValueError);
    CHECK_THROWS_AS(FeasibleDomain::scaled(FeasibleDomain::ball({0.0}, 1.0), 0.0), ValueError);
    CHECK_THROWS_AS(FeasibleDomain::scaled(FeasibleDomain::ball({0.0}, 1.0), 1.5), ValueError);
    // factor 1 is a legal no-op shrink
    CHECK(FeasibleDomain::scaled(FeasibleDomain::ball({0.0}, 1.0), 1.0).diameter() == 2.0);
    // the inner set must contain the origin for the shrink to stay inside it
    CHECK_THROWS_AS(FeasibleDomain::scaled(FeasibleDomain::box({1.0}, {2.0}), 0.5), ValueError);
    CHECK_THROWS_AS(FeasibleDomain::simplex(0), ValueError);
}

TEST_CASE("projection input validation") {
    auto b = FeasibleDomain::ball({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(b.project({1.0}), ValueError);
    CHECK_THROWS_AS(b.project({1.0, std::nan("")}), ValueError);
    double row[3] = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(b.project_span(row, 3), ValueError);
}

TEST_CASE("domain membership tolerance") {
    auto s = FeasibleDomain::simplex(2);
    CHECK(s.contains({0.5, 0.5}));
    CHECK_FALSE(s.contains({0.6, 0.6}));
    CHECK(s.contains({0.5 + 1e-10, 0.5}, 1e-9));
    auto b = FeasibleDomain::ball({0.0}, 1.0);
    CHECK(b.contains({1.0}));
    CHECK_FALSE(b.contains({1.0 + 1e-6}));
    CHECK(b.contains({1.0 + 1e-6}, 1e-5));
}

namespace {

SmoothConvexOracle half_sqnorm_oracle() {
    SmoothConvexOracle f;
    f.value_fn = [](const vec& x) { return 0.5 * dreg::sqnorm(x); };
    f.gradient_fn = [](const vec& x) { return x; };
    f.smoothness = 1.0;
    f.nonnegative = true;
    return f;
}

}  // namespace

TEST_CASE("oracle query counting") {
    auto f = half_sqnorm_oracle();
    CHECK(f.value({1.0, 1.0}) == 1.0);
    f.value({0.0, 0.0});
    f.gradient({1.0, 0.0});
    f.gradient({0.0, 1.0});
    f.gradient({0.0, 0.0});
    CHECK(f.value_queries == 2);
    CHECK(f.gradient_queries == 3);
    f.reset_counters();
    CHECK(f.value_queries == 0);
    CHECK(f.gradient_queries == 0);
}

TEST_CASE("oracle boundary validation") {
    auto f = half_sqnorm_oracle();
    f.domain = std::make_shared<FeasibleDomain>(FeasibleDomain::ball({0.0, 0.0}, 1.0));

    // a rejected input never counts as a query
    CHECK_THROWS_AS(f.value({1.0 + 1e-6, 0.0}), ValueError);
    CHECK_THROWS_AS(f.gradient({1.0 + 1e-6, 0.0}), ValueError);
    CHECK(f.value_queries == 0);
    CHECK(f.gradient_queries == 0);

    // projection roundoff just past the boundary is served
    CHECK(f.value({1.0 + 5e-10, 0.0}) > 0.0);
    CHECK(f.gradient({1.0 + 5e-10, 0.0}).size() == 2);

    CHECK_THROWS_AS(f.value({std::nan(""), 0.0}), ValueError);
    CHECK_THROWS_AS(f.gradient({std::nan(""), 0.0}), ValueError);
}

TEST_CASE("oracle output validation") {
    SmoothConvexOracle f;
    f.value_fn = [](const vec& x) { return x[0]; };
    f.gradient_fn = [](const vec&) { return vec{1.0, 0.0}; };
    f.nonnegative = true;

    // output checks fire after the query is counted
    CHECK_THROWS_AS(f.value({-0.5, 0.0}), ValueError);
    CHECK(f.value_queries == 1);
    CHECK(f.value({0.5, 0.0}) == 0.5);

    f.nonnegative = false;
    CHECK(f.value({-0.5, 0.0}) == -0.5);

    SmoothConvexOracle g;
    g.value_fn = [](const vec&) { return std::numeric_limits<double>::quiet_NaN(); };
    g.gradient_fn = [](const vec&) { return vec{2.0, 0.0}; };
    CHECK_THROWS_AS(g.value({0.0, 0.0}), ValueError);

    g.grad_bound = 1.0;
    CHECK_THROWS_AS(g.gradient({0.0, 0.0}), ValueError);
    g.grad_bound = 0.0;  // zero disables the certificate check
    CHECK(g.gradient({0.0, 0.0}) == vec{2.0, 0.0});
    g.grad_bound = 2.0;  // the declared bound itself passes, plus roundoff slack
    CHECK(g.gradient({0.0, 0.0}) == vec{2.0, 0.0});

    SmoothConvexOracle h;
    h.value_fn = [](const vec&) { return 0.0; };
    h.gradient_fn = [](const vec&) { return vec{1.0}; };
    CHECK_THROWS_AS(h.gradient({0.0, 0.0}), ValueError);

    SmoothConvexOracle k;
    k.value_fn = [](const vec&) { return 0.0; };
    k.gradient_fn = [](const vec&) {
        return vec{std::numeric_limits<double>::infinity(), 0.0};
    };
    CHECK_THROWS_AS(k.gradient({0.0, 0.0}), ValueError);
}

TEST_CASE("nonnegative smooth losses bound their own gradients") {
    // ||grad f(x)||^2 <= 4 L f(x) for smooth nonnegative f
    dreg::Rng rng(43);
    for (int it = 0; it < 500; ++it) {
        std::size_t d = 1 + rng.uniform_index(5);
        auto q = testref::random_quad(rng, d, 3.0, 0.8);
        auto f = testref::quad_oracle(q);
        vec x = rng.uniform_ball(d, 1.5);
        double v = f.value(x);
        double g2 = dreg::sqnorm(f.gradient(x));
        CHECK(g2 <= 4.0 * q.L * v + 1e-9);
    }
}
