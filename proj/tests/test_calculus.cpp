#include <cmath>
#include <numbers>

#include <doctest.h>

#include "bctl/control_calculus.hpp"
#include "bctl/error.hpp"

using namespace bctl;

TEST_CASE("relaxation norm of the alternating family is ||v|| T / (2m)") {
    const SineState v{1.0, 0.5};
    for (std::size_t m : {1u, 4u, 16u}) {
        const ControlSignal f = alternating_control(v, m, 2.0);
        CHECK(relaxation_norm(f, 0, 2.0) == doctest::Approx(l2_norm(v) * 2.0 / (2.0 * double(m))));
        CHECK(relaxation_norm(f, 1, 2.0) == doctest::Approx(sobolev_norm(v, 1) / double(m)));
    }
    CHECK(relaxation_norm(ControlSignal::zero(1.0), 0, 1.0) == 0.0);
}

TEST_CASE("relaxation norm of a smooth signal") {
    const ControlSignal g = ControlSignal::analytic(
        "cos", {}, 1.0, [](double t) { return SineState{std::cos(2 * std::numbers::pi * t)}; });
    // sup |sin(2 pi t)| / (2 pi) times ||sin x||.
    CHECK(relaxation_norm(g, 0, 1.0) ==
          doctest::Approx(std::sqrt(std::numbers::pi / 2) / (2 * std::numbers::pi)).epsilon(1e-6));
}

TEST_CASE("heat source solve agrees with the per-mode closed form") {
    SolveConfig c;
    c.nu = 0.1;
    c.dt = 0.05;
    c.modes = 4;
    const SineState v{1.0, 0.0, -2.0};
    const auto traj = heat_source_solve(ControlSignal::constant(v, 1.0), c);
    for (std::size_t k : {1u, 3u}) {
        const double lam = 0.1 * double(k * k);
        CHECK(traj.terminal().coeff(k) == doctest::Approx(v.coeff(k) * -std::expm1(-lam) / lam).epsilon(1e-13));
    }
    const ControlSignal g = ControlSignal::analytic("lin", {}, 1.0, [](double t) { return SineState{t}; });
    const auto tg = heat_source_solve(g, c);
    // int_0^1 e^{-lam (1-s)} s ds
    const double lam = 0.1, exact = (lam - 1 + std::exp(-lam)) / (lam * lam);
    CHECK(tg.terminal().coeff(1) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("Hoelder sweep and its exports") {
    SolveConfig c;
    c.nu = 0.1;
    c.dt = 1e-3;
    c.modes = 8;
    const auto rows = hoelder_sweep(SineState{1.0}, {4, 16}, c);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sample.relax_norm == doctest::Approx(4.0 * rows[1].sample.relax_norm));
    CHECK(rows[1].sample.ratio ==
          doctest::Approx(rows[1].sample.kf_norm / std::cbrt(rows[1].sample.relax_norm)));
    CHECK(hoelder_csv(rows).rfind("m,relax_norm,kf_norm,ratio\n4,", 0) == 0);
}

TEST_CASE("loglog slope") {
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), InvalidArgument);
}
