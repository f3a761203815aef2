#pragma once

#include <cstddef>
#include <vector>

#include "bctl/spectral.hpp"

namespace bctl {

/// Orthogonal projection onto E_k (the first k sine modes).
SineState project(const SineState& u, std::size_t k);

/// Largest coefficient error of
///   sym_product(sin jx, sin x) = ((j+1) sin((j+1)x) - (j-1) sin((j-1)x)) / 2.
double product_identity_error(std::size_t j);

/// One term eta_tilde - sym_product(xi, xi_prime) of an expansion in F(E_1, E_k).
struct FTerm {
    SineState eta_tilde;  // in E_k
    SineState xi;         // in E_k
    SineState xi_prime;   // in E_1
};

/// Sum of eta_tilde - sym_product(xi, xi_prime) over all terms.
SineState reassemble(const std::vector<FTerm>& terms);

/// Expansion of eta1 in E_{k+1} as terms with eta_tilde, xi in E_k and
/// xi_prime in E_1. The top coefficient c = a_{k+1} is carried by
///   xi = -2c/(k+1) sin(kx),  xi_prime = sin(x),
///   eta_tilde = P_k eta1 + c (k-1)/(k+1) sin((k-1)x).
/// When c == 0 the single term has eta_tilde = eta1 and zero xi, xi_prime.
/// Throws InvalidArgument unless eta1 lies in E_{k+1} and k >= 1.
std::vector<FTerm> decompose_in_F(const SineState& eta1, std::size_t k);

/// Evidence that F(E_1, E_k) = E_{k+1}: one expansion per basis vector
/// sin(jx), j = 1..k+1, plus the inclusion check sym_product(sin jx, sin x) in E_{k+1}.
struct FSpaceCertificate {
    std::size_t k = 0;
    std::vector<std::vector<FTerm>> basis_terms;  // basis_terms[j-1] spans sin(jx)
    double max_reassembly_error = 0.0;
    double max_leakage = 0.0;  // largest coefficient of sym_product(sin jx, sin x) above k+1
    /// For k == 1: ||B(E_1) outside E_2|| (B(sin x) = sin(2x)/2).
    double b_e1_leakage = 0.0;
};

/// F(E_1, E_k) for k >= 1, returned as E_{k+1}, with a certificate when
/// `cert` is non-null. Throws ConvergenceError if a check fails by more
/// than 1e-12.
ModeSubspace f_space(std::size_t k, FSpaceCertificate* cert = nullptr);

/// F(N, G) for mode subspaces. Only N = E_1 is supported; any other N throws
/// InvalidArgument.
ModeSubspace f_space(const ModeSubspace& N, const ModeSubspace& G,
                     FSpaceCertificate* cert = nullptr);

/// True when B(N) lies in G and N lies in G for N = E_n, G = E_g
/// (B(E_n) reaches E_{2n}).
bool saturation_hypothesis_holds(const ModeSubspace& N, const ModeSubspace& G) noexcept;

}  // namespace bctl
