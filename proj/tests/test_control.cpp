#include <cmath>

#include <doctest.h>

#include "bctl/control_calculus.hpp"
#include "bctl/error.hpp"
#include "bctl/io.hpp"

using namespace bctl;

TEST_CASE("piecewise signals: values, sides and primitive") {
    const ControlSignal f = ControlSignal::piecewise({0.25, 0.75}, {SineState{2.0}, SineState{-1.0}});
    CHECK(f.horizon() == doctest::Approx(1.0));
    CHECK(f.value(0.1).coeff(1) == 2.0);
    CHECK(f.value(0.25, Side::left).coeff(1) == 2.0);
    CHECK(f.value(0.25, Side::right).coeff(1) == -1.0);
    CHECK(f.primitive(1.0).coeff(1) == doctest::Approx(0.5 - 0.75));
    CHECK(f.breakpoints() == std::vector<double>{0.25});
    CHECK_THROWS_AS(ControlSignal::piecewise({0.5, -0.5}, {SineState{1.0}, SineState{1.0}}),
                    InvalidArgument);
}

TEST_CASE("sums keep piecewise structure on the merged partition") {
    const ControlSignal a = ControlSignal::piecewise({0.5, 0.5}, {SineState{1.0}, SineState{2.0}});
    const ControlSignal b = ControlSignal::piecewise({0.25, 0.75}, {SineState{0.0, 1.0}, SineState{0.0, -1.0}});
    const ControlSignal s = a + b;
    CHECK(s.is_piecewise_constant());
    CHECK(s.piece_durations().size() == 3);
    CHECK(max_abs_diff(s.value(0.6), SineState{2.0, -1.0}) == 0.0);
    CHECK(max_abs_diff((a - a).value(0.3), SineState(2)) == 0.0);
}

TEST_CASE("sampled and analytic variants") {
    const ControlSignal s = ControlSignal::sampled({0.0, 1.0}, {SineState{0.0}, SineState{2.0}});
    CHECK(s.value(0.25).coeff(1) == doctest::Approx(0.5));
    CHECK(s.primitive(1.0).coeff(1) == doctest::Approx(1.0));
    const ControlSignal g = ControlSignal::analytic(
        "ramp", {}, 2.0, [](double t) { return SineState{t}; });
    CHECK(g.primitive(2.0).coeff(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(l1_time_norm(g) == doctest::Approx(2.0 * std::sqrt(std::acos(-1.0) / 2)).epsilon(1e-10));
}

TEST_CASE("snapping averages over pieces") {
    const ControlSignal g = ControlSignal::analytic("lin", {}, 1.0, [](double t) { return SineState{t}; });
    const ControlSignal p = snap_uniform(g, 4);
    CHECK(p.piece_values()[0].coeff(1) == doctest::Approx(0.125));
    CHECK(p.piece_values()[3].coeff(1) == doctest::Approx(0.875));
    const ControlSignal q = snap_to_piecewise(g, 0.3);
    CHECK(q.piece_durations().size() == 4);
    CHECK(l2_time_distance(g, p) == doctest::Approx(std::sqrt(std::acos(-1.0) / 2 / 12.0) / 4).epsilon(1e-8));
}

TEST_CASE("control JSON and CSV") {
    const ControlSignal f = ControlSignal::piecewise({0.5, 0.5}, {SineState{1.0, 0.1}, SineState{0.0, 0.3}});
    const ControlSignal back = control_from_json(control_json(f));
    CHECK(back.piece_durations() == f.piece_durations());
    CHECK(back.piece_values()[1].vec() == f.piece_values()[1].vec());
    CHECK(control_csv(f) == "t,a1,a2\n0,1,0.10000000000000001\n0.5,0,0.29999999999999999\n1,0,0.29999999999999999\n");
    CHECK_THROWS_AS(control_from_json(nlohmann::json{{"kind", "x"}}), InvalidArgument);
}

TEST_CASE("force specs") {
    CHECK(l2_norm(parse_force_spec("zero", 1.0, 0.1).value(0.5)) == 0.0);
    CHECK(parse_force_spec("const:sin:2:3", 1.0, 0.1).value(0.2).coeff(2) == 3.0);
    const ControlSignal alt = parse_force_spec("alt:4:sin:1:1", 1.0, 0.1);
    CHECK(alt.piece_durations().size() == 8);
    const ControlSignal man = parse_force_spec("manufactured", 1.0, 0.1);
    // f(0) = -(w + nu w_xx) + B(w) = (-1 + 0.1) sin x + sin(2x)/2.
    CHECK(man.value(0.0).coeff(1) == doctest::Approx(-0.9));
    CHECK(man.value(0.0).coeff(2) == doctest::Approx(0.5));
    CHECK(man.primitive(1.0).coeff(1) == doctest::Approx(-0.9 * (1 - std::exp(-1.0))));
    CHECK_THROWS_AS(parse_force_spec("alt:0:sin:1:1", 1.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(parse_force_spec("wiggle", 1.0, 0.1), InvalidArgument);
}
