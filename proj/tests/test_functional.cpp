#include <cmath>

#include <doctest.h>

#include "bctl/error.hpp"
#include "bctl/functional_control.hpp"

using namespace bctl;

TEST_CASE("projection functional invariants") {
    const SineState u_hat{0.0, 0.0, 1.0};
    const FunctionalTarget t = projection_functional(u_hat, 2, 0.1);
    CHECK(t.y_hat == Vec{0.0, 0.0});
    const SineState v = t.F_inv({0.1, 0.0});
    CHECK(max_abs_diff(v, SineState{0.1, 0.0, 1.0}) == 0.0);
    const FunctionalCheck c = check_target(t, u_hat);
    CHECK(c.right_inverse_defect == 0.0);
    CHECK(c.centre_defect == 0.0);
    CHECK(c.lift_radius <= 0.1 * std::sqrt(std::acos(-1.0) / 2) + 1e-15);
    CHECK_THROWS_AS(projection_functional(u_hat, 0, 0.1), InvalidArgument);
}

TEST_CASE("ball helpers") {
    const auto pts = sample_ball({1.0, 2.0}, 0.5, 50, 1);
    CHECK(pts.size() == 50);
    CHECK(pts.front() == Vec{1.0, 2.0});
    for (const auto& p : pts) CHECK(std::hypot(p[0] - 1.0, p[1] - 2.0) <= 0.5 + 1e-15);
    const Vec c = clamp_to_ball({4.0, 2.0}, {1.0, 2.0}, 0.5);
    CHECK(c[0] == doctest::Approx(1.5));
    CHECK(sup_distance({1, 2}, {1.5, 1}) == 1.0);
}

TEST_CASE("brouwer_solve on closed-form maps") {
    const auto id = brouwer_solve([](const Vec& y) { return y; }, {0.3, -0.2}, 1.0);
    CHECK(id.converged);
    CHECK(id.evaluations == 1);

    const auto half = brouwer_solve([](const Vec& y) { return Vec{y[0] / 2, y[1] / 2}; }, {0.0, 0.0}, 1.0);
    CHECK(half.converged);
    CHECK(sup_distance(half.y, {0.0, 0.0}) < 1e-9);

    // Phi(y) = A y + b: the fixed point of Phi(y) = y_hat is A^{-1}(y_hat - b).
    auto affine = [](const Vec& y) {
        return Vec{1.1 * y[0] + 0.2 * y[1] + 0.05, -0.1 * y[0] + 0.9 * y[1] - 0.02};
    };
    const Vec y_hat{0.1, 0.2};
    const double det = 1.1 * 0.9 + 0.02;
    const Vec r{y_hat[0] - 0.05, y_hat[1] + 0.02};
    const Vec exact{(0.9 * r[0] - 0.2 * r[1]) / det, (0.1 * r[0] + 1.1 * r[1]) / det};
    for (bool secant : {false, true}) {
        BrouwerOptions o;
        o.secant = secant;
        o.tol = 1e-12;
        o.max_evals = 200;
        const auto res = brouwer_solve(affine, y_hat, 0.5, o);
        CHECK(res.converged);
        CHECK(sup_distance(res.y, exact) < 1e-10);
        if (secant) CHECK(res.evaluations < 15);
    }
}

TEST_CASE("brouwer_solve reports failure and uses the grid") {
    BrouwerOptions o;
    o.max_evals = 5;
    o.grid_fallback = false;
    const auto res = brouwer_solve([](const Vec& y) { return Vec{y[0] + 10.0}; }, {0.0}, 0.1, o);
    CHECK_FALSE(res.converged);
    CHECK(res.evaluations <= 5);

    // A discontinuous map with a fixed point the local iteration cannot find.
    auto step = [](const Vec& y) { return Vec{y[0] < 0.03 ? y[0] + 0.02 : y[0] - 0.5 * (y[0] - 0.03)}; };
    BrouwerOptions g;
    g.tol = 1e-7;
    g.max_evals = 400;
    const auto gr = brouwer_solve(step, {0.03}, 0.1, g);
    CHECK(gr.converged);
}

TEST_CASE("bisection agrees with brouwer_solve in one dimension") {
    auto phi = [](double y) { return y + 0.1 * std::sin(3 * y) + 0.02; };
    std::size_t n = 0;
    const double yb = bisect_scalar(phi, 0.0, 0.2, 1e-12, &n);
    CHECK(n > 10);
    BrouwerOptions o;
    o.tol = 1e-13;
    const auto res = brouwer_solve([&](const Vec& y) { return Vec{phi(y[0])}; }, {0.0}, 0.2, o);
    CHECK(std::abs(res.y[0] - yb) < 1e-8);
    CHECK_THROWS_AS(bisect_scalar([](double y) { return y + 1.0; }, 0.0, 0.2, 1e-9), ConvergenceError);
}

TEST_CASE("steer_functional rejects a radius that leaves the eps/2 ball") {
    const SineState u_hat{0.0, 0.0, 1.0};
    const FunctionalTarget t = projection_functional(u_hat, 2, 1.0);
    SolveConfig cfg;
    cfg.nu = 0.1;
    CHECK_THROWS_AS(steer_functional(SineState(), u_hat, t, 0.3, ControlSignal::zero(1.0),
                                     default_plan(u_hat, 0.3), cfg),
                    InvalidArgument);
    CHECK(default_functional_radius(0.3) * std::sqrt(std::acos(-1.0) / 2) == doctest::Approx(0.135));
}
