#include <cmath>
#include <random>

#include <doctest.h>

#include "bctl/control_calculus.hpp"
#include "bctl/convexify.hpp"
#include "bctl/error.hpp"
#include "quadrature.hpp"

using namespace bctl;

TEST_CASE("convex combination residual is state independent and below delta") {
    const double nu = 0.1;
    const ConvexCombo c = build_convex_combo(SineState{0.2, 0.0, 1.0}, 2, 0.1, nu);
    CHECK(c.residual_norm() <= 0.1 * (1 + 1e-12));
    CHECK(c.weights == std::vector<double>{0.5, 0.5});
    CHECK(ModeSubspace(2).contains(c.drift));
    for (const auto& z : c.shifts) CHECK(ModeSubspace(2).contains(z));
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    for (int i = 0; i < 5; ++i) {
        SineState u(6);
        for (std::size_t k = 1; k <= 6; ++k) u.at(k) = N(rng);
        CHECK(max_abs_diff(combo_residual(c, u, nu), c.residual) < 1e-10);
    }
    // The residual lives in mode 4.
    CHECK(ModeSubspace(4).contains(c.residual));
    CHECK(std::abs(c.residual.coeff(4)) > 0.0);
}

TEST_CASE("trivial combination and too small delta") {
    const ConvexCombo t = build_convex_combo(SineState{1.0, 2.0}, 2, 0.1, 0.1);
    CHECK(t.trivial());
    CHECK(max_abs_diff(t.drift, SineState{1.0, 2.0}) == 0.0);
    CHECK_THROWS_AS(build_convex_combo(SineState{0, 0, 1.0}, 2, 1e-14, 0.1), InvalidArgument);
    CHECK_THROWS_AS(build_convex_combo(SineState{0, 0, 1.0}, 1, 0.1, 0.1), InvalidArgument);
}

TEST_CASE("fast shift signal and one rung") {
    const ConvexCombo c = build_convex_combo(SineState::mode(3), 2, 0.1, 0.1);
    const ControlSignal z = fast_zeta(c, 8, 1.0);
    CHECK(z.piece_durations().size() == 16);
    CHECK(l2_norm(z.primitive(1.0)) < 1e-12);

    const ControlSignal eta1 = ControlSignal::piecewise(
        {0.5, 0.5}, {SineState{0.0, 0.0, 1.0}, SineState{0.5, 0.0, -1.0}});
    const Reduction r = reduce_control(eta1, 2, 4, 0.1, 0.1);
    CHECK(r.combos.size() == 2);
    CHECK(r.report.max_residual <= 0.1 * (1 + 1e-12));
    for (const auto& v : r.pair.eta.piece_values()) CHECK(ModeSubspace(2).contains(v));
    for (const auto& v : r.pair.zeta.piece_values()) CHECK(ModeSubspace(2).contains(v));
    const Reduction same = reduce_control(ControlSignal::constant(SineState{1.0, 1.0}, 1.0), 2, 4, 0.1, 0.1);
    CHECK(same.combos.empty());
}

TEST_CASE("one-rung gap shrinks with m") {
    SolveConfig cfg;
    cfg.nu = 0.1;
    cfg.dt = 1e-3;
    const ControlSignal eta1 = ControlSignal::constant(SineState::mode(3), 1.0);
    Reduction r8 = reduce_control(eta1, 2, 8, 0.01, cfg.nu);
    Reduction r32 = reduce_control(eta1, 2, 32, 0.01, cfg.nu);
    const double g8 = reduction_gap(r8, eta1, SineState(), ControlSignal::zero(1.0), cfg);
    const double g32 = reduction_gap(r32, eta1, SineState(), ControlSignal::zero(1.0), cfg);
    CHECK(r8.report.endpoint_gap.has_value());
    CHECK(g32 < 0.5 * g8);
}

TEST_CASE("moment-preserving ramps keep mean and mean square across jumps") {
    const ControlSignal z = ControlSignal::piecewise(
        {0.2, 0.2, 0.2, 0.2, 0.2},
        {SineState{0.0}, SineState{-2.0}, SineState{0.5}, SineState{3.0}, SineState{0.0}});
    const ControlSignal zm = mollify(z, 0.05, RampShape::moment_preserving);
    auto moments = [](const ControlSignal& f) {
        double m1 = 0.0, m2 = 0.0;
        std::vector<double> pts{0.0};
        for (double b : f.breakpoints()) pts.push_back(b);
        pts.push_back(f.horizon());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            for (int j = 0; j < 16; ++j) {
                const double a = pts[i] + (pts[i + 1] - pts[i]) * j / 16.0;
                const double b = pts[i] + (pts[i + 1] - pts[i]) * (j + 1) / 16.0;
                detail::gauss_panel([&](double t) { return f.value(t).coeff(1); }, a, b, m1);
                detail::gauss_panel([&](double t) { return std::pow(f.value(t).coeff(1), 2); }, a, b, m2);
            }
        }
        return std::pair{m1, m2};
    };
    const auto [a1, a2] = moments(z);
    const auto [b1, b2] = moments(zm);
    CHECK(b1 == doctest::Approx(a1).epsilon(1e-12));
    CHECK(b2 == doctest::Approx(a2).epsilon(1e-12));
    const auto [c1, c2] = moments(mollify(z, 0.05, RampShape::cosine));
    CHECK(c1 == doctest::Approx(a1).epsilon(1e-12));
    CHECK(c2 < a2 - 1e-3);
    const ControlSignal w = mollify(ControlSignal::constant(SineState{1.0}, 1.0), 0.1, RampShape::moment_preserving);
    CHECK(w.value(0.0).coeff(1) == 0.0);
    CHECK(std::abs(w.value(1.0, Side::left).coeff(1)) < 1e-15);
    CHECK(w.value(0.5).coeff(1) == 1.0);
    CHECK_THROWS_AS(mollify(z, 0.2), InvalidArgument);
}

TEST_CASE("single control reproduces the extended system") {
    SolveConfig cfg;
    cfg.nu = 0.1;
    cfg.dt = 2e-4;
    const ControlSignal eta = ControlSignal::constant(SineState{0.0, 0.5}, 1.0);
    const ControlSignal zeta = ControlSignal::piecewise(
        {0.5, 0.5}, {SineState{0.3, -0.2}, SineState{-0.3, 0.4}});
    const ControlSignal zhat = mollify(zeta, 0.1, RampShape::moment_preserving);
    const ControlSignal single = extend_to_single({eta, zeta}, 0.1, RampShape::moment_preserving);
    const SineState u0{0.5};
    const auto a = solve(u0, single, cfg).terminal();
    const auto b = solve_extended(u0, zhat, eta, cfg).terminal();
    CHECK(max_abs_diff(a, b) < 1e-9);
}

TEST_CASE("simplex approximation") {
    const ControlSignal g = ControlSignal::analytic(
        "g", {}, 1.0, [](double t) { return SineState{std::sin(3 * t), t - 0.5}; });
    const SimplexApprox s = piecewise_simplex_approx(g, 2, 4);
    const double C = s.vertex_scale;
    for (const auto& v : s.control.piece_values()) {
        const double a = std::abs(v.coeff(1)), b = std::abs(v.coeff(2));
        CHECK(((std::abs(a - C) < 1e-12 && b == 0.0) || (std::abs(b - C) < 1e-12 && a == 0.0)));
    }
    const ControlSignal avg = snap_uniform(g, 4);
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
        CHECK(max_abs_diff(s.control.primitive(t), avg.primitive(t)) < 1e-12);
    }
}
