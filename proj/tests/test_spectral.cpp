#include <cmath>
#include <numbers>

#include <doctest.h>

#include "bctl/error.hpp"
#include "bctl/io.hpp"
#include "bctl/spectral.hpp"
#include "oracle_values.hpp"

using namespace bctl;

TEST_CASE("burgers_B matches the quadrature oracle") {
    const SineState u{1.0, 0.5, -0.3};
    const SineState b = burgers_B(u);
    REQUIRE(b.order() >= oracle::kBurgersB.size());
    for (std::size_t k = 1; k <= oracle::kBurgersB.size(); ++k) {
        CHECK(b.coeff(k) == doctest::Approx(oracle::kBurgersB[k - 1]).epsilon(1e-13));
    }
}

TEST_CASE("sym_product matches the quadrature oracle") {
    const SineState xi{0.0, 0.7, 0.0, -0.2};
    const SineState xp{0.4, 1.1};
    const SineState s = sym_product(xi, xp);
    for (std::size_t k = 1; k <= oracle::kSymProduct.size(); ++k) {
        CHECK(std::abs(s.coeff(k) - oracle::kSymProduct[k - 1]) < 1e-13);
    }
    CHECK(max_abs_diff(s, sym_product(xp, xi)) < 1e-15);
}

TEST_CASE("B(sin x) is sin(2x)/2") {
    const SineState b = burgers_B(SineState::mode(1));
    CHECK(max_abs_diff(b, SineState::mode(2, 0.5)) < 1e-15);
}

TEST_CASE("norms and semigroup") {
    const SineState u = SineState::mode(2, 1.0);
    const double h = std::sqrt(std::numbers::pi / 2);
    CHECK(l2_norm(u) == doctest::Approx(h));
    CHECK(sobolev_norm(u, 1) == doctest::Approx(2 * h));
    CHECK(sobolev_norm(u, -1) == doctest::Approx(h / 2));
    const SineState p = heat_propagate(SineState{1.0, 1.0}, 0.5, 0.2);
    CHECK(p.coeff(1) == doctest::Approx(std::exp(-0.1)));
    CHECK(p.coeff(2) == doctest::Approx(std::exp(-0.4)));
    CHECK(max_abs_diff(laplacian(SineState{1.0, 1.0, 1.0}), SineState{-1.0, -4.0, -9.0}) == 0.0);
}

TEST_CASE("sample and transform are inverse") {
    const SineState u{0.3, -1.2, 0.0, 0.75, 0.1};
    const auto v = sample(u, 17);
    const auto grid = interior_grid(17);
    for (std::size_t j = 0; j < grid.size(); ++j) CHECK(v[j] == doctest::Approx(u(grid[j])));
    CHECK(max_abs_diff(transform(v, 5), u) < 1e-14);
}

TEST_CASE("subspace membership") {
    ModeSubspace e2(2);
    CHECK(e2.contains(SineState{1.0, 2.0}));
    CHECK(e2.contains(SineState{1.0, 2.0, 1e-12}));
    CHECK_FALSE(e2.contains(SineState{1.0, 2.0, 1e-6}));
    CHECK_THROWS_AS(SineState(std::vector<double>{1.0, NAN}), InvalidArgument);
}

TEST_CASE("state spec round trip and errors") {
    const SineState u = parse_state_spec("sin:3:1+sin:4:0.5");
    CHECK(u.coeff(3) == 1.0);
    CHECK(u.coeff(4) == 0.5);
    CHECK(parse_state_spec(state_spec(u)).vec() == u.vec());
    CHECK(l2_norm(parse_state_spec("zero")) == 0.0);
    try {
        parse_state_spec("sin:x");
        FAIL("expected a parse error");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("sin:x") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_state_spec("sin:2:abc"), InvalidArgument);
    CHECK_THROWS_AS(parse_state_spec("cos:1:1"), InvalidArgument);
    CHECK(format_double(0.1) == "0.10000000000000001");
}
