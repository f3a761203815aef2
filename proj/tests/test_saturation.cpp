#include <doctest.h>

#include "bctl/error.hpp"
#include "bctl/saturation.hpp"

using namespace bctl;

TEST_CASE("product identity holds for j = 1..20") {
    for (std::size_t j = 1; j <= 20; ++j) CHECK(product_identity_error(j) <= 1e-14);
    CHECK(max_abs_diff(sym_product(SineState::mode(2), SineState::mode(1)), SineState{-0.5, 0.0, 1.5}) == 0.0);
}

TEST_CASE("sin 3x from E_1 and E_2") {
    const auto terms = decompose_in_F(SineState::mode(3), 2);
    REQUIRE(terms.size() == 1);
    CHECK(max_abs_diff(terms[0].eta_tilde, SineState{1.0 / 3.0}) < 1e-15);
    CHECK(max_abs_diff(terms[0].xi, SineState{0.0, -2.0 / 3.0}) < 1e-15);
    CHECK(max_abs_diff(reassemble(terms), SineState::mode(3)) < 1e-15);
}

TEST_CASE("decomposition of a general element of E_{k+1}") {
    const SineState eta{0.3, -1.0, 0.25, 2.0, -0.7};
    const auto terms = decompose_in_F(eta, 4);
    CHECK(max_abs_diff(reassemble(terms), eta) < 1e-14);
    for (const auto& t : terms) {
        CHECK(ModeSubspace(4).contains(t.eta_tilde));
        CHECK(ModeSubspace(4).contains(t.xi));
        CHECK(ModeSubspace(1).contains(t.xi_prime));
    }
    const auto flat = decompose_in_F(SineState{1.0, 2.0}, 2);
    REQUIRE(flat.size() == 1);
    CHECK(l2_norm(flat[0].xi) == 0.0);
    CHECK_THROWS_AS(decompose_in_F(SineState{0, 0, 0, 1.0}, 2), InvalidArgument);
}

TEST_CASE("saturation ladder up to E_11") {
    for (std::size_t k = 1; k <= 10; ++k) {
        FSpaceCertificate cert;
        CHECK(f_space(k, &cert).dim() == k + 1);
        CHECK(cert.max_reassembly_error <= 1e-12);
        CHECK(cert.max_leakage <= 1e-12);
        CHECK(cert.basis_terms.size() == k + 1);
    }
    CHECK(f_space(ModeSubspace(1), ModeSubspace(5)).dim() == 6);
    CHECK_THROWS_AS(f_space(ModeSubspace(2), ModeSubspace(3)), InvalidArgument);
    CHECK(saturation_hypothesis_holds(ModeSubspace(1), ModeSubspace(2)));
    CHECK_FALSE(saturation_hypothesis_holds(ModeSubspace(2), ModeSubspace(3)));
    CHECK(max_abs_diff(project(SineState{1, 2, 3}, 2), SineState{1, 2}) == 0.0);
}
