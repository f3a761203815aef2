#include <cmath>

#include <doctest.h>

#include "bctl/error.hpp"
#include "bctl/synthesis.hpp"

using namespace bctl;

TEST_CASE("large-space control reaches the smoothed target") {
    SolveConfig cfg;
    cfg.nu = 0.1;
    cfg.dt = 1e-3;
    const SineState u0{0.5}, u_hat{0.0, 1.0, 0.3};
    const auto ls = large_space_control(u0, u_hat, ControlSignal::zero(1.0), 0.01, 1.0, cfg.nu);
    CHECK(max_abs_diff(ls.predicted_terminal, heat_propagate(u_hat, 0.01, 1.0)) < 1e-15);
    CHECK(ls.deficit == doctest::Approx(smoothing_deficit(u_hat, 0.01)));
    const SineState end = solve(u0, ls.eta, cfg).terminal();
    CHECK(l2_norm(end - ls.predicted_terminal) < 1e-8);
    CHECK(verify(u0, ls.eta, u_hat, ControlSignal::zero(1.0), cfg) == doctest::Approx(ls.deficit).epsilon(1e-6));
}

TEST_CASE("smoothing deficit grows with mu") {
    const SineState u{1.0, 0.0, 0.5};
    CHECK(smoothing_deficit(u, 0.0) == 0.0);
    CHECK(smoothing_deficit(u, 0.01) < smoothing_deficit(u, 0.02));
}

TEST_CASE("truncation keeps the first N modes") {
    const ControlSignal f = ControlSignal::constant(SineState{1, 2, 3, 4}, 1.0);
    const ControlSignal t = truncate_control(f, 2);
    CHECK(max_abs_diff(t.value(0.5), SineState{1, 2}) == 0.0);
}

TEST_CASE("plan validation, JSON round trip and defaults") {
    SynthesisPlan p;
    CHECK_NOTHROW(p.validate());
    const SynthesisPlan q = plan_from_json(to_json(p));
    CHECK(to_json(q) == to_json(p));
    p.m_schedule = {4};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = SynthesisPlan{};
    p.window = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    const SynthesisPlan d = default_plan(SineState{0, 0, 1.0, 0.5}, 0.2);
    CHECK(d.N == 4);
    CHECK(d.m_schedule == std::vector<std::size_t>{1, 16});
    CHECK(smoothing_deficit(SineState{0, 0, 1.0, 0.5}, d.mu) <= 0.05 * (1 + 1e-9));
    CHECK(default_plan(SineState{1.0}, 0.2).N == 3);
    CHECK_THROWS_AS(default_plan(SineState{1.0}, 0.0), InvalidArgument);
}

TEST_CASE("one-rung synthesis to an E_3 target") {
    SolveConfig cfg;
    cfg.nu = 0.1;
    cfg.dt = 1e-3;
    const SineState u_hat{0.5, 0.0, 0.6};
    const SynthesisPlan plan = default_plan(u_hat, 0.2);
    const auto res = synthesize(SineState(), u_hat, ControlSignal::zero(1.0), plan, cfg);
    const auto& st = res.report.stages;
    REQUIRE(st.size() == 5);
    CHECK(st[0].stage == "large_space");
    CHECK(st[3].stage == "rung");
    CHECK(st.back().stage == "extension");
    for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i].in_space);
    CHECK(st.back().k == 2);
    CHECK(res.report.final_error < 0.2);
    CHECK(res.report.success);
    CHECK(l2_norm(res.report.final_state - u_hat) == doctest::Approx(res.report.final_error));
    SolveConfig check = cfg;
    check.dt = res.report.final_dt;
    check.min_steps_per_piece = plan.steps_per_ramp;
    CHECK(verify(SineState(), res.eta, u_hat, ControlSignal::zero(1.0), check) ==
          doctest::Approx(res.report.final_error).epsilon(1e-12));
    const auto j = to_json(res.report);
    CHECK(j["stages"].size() == st.size());
    CHECK(j.contains("suggested_knob"));
}
