#include "bctl/saturation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bctl/error.hpp"

namespace bctl {

SineState project(const SineState& u, std::size_t k) {
    return u.resized(k);
}

SineState reassemble(const std::vector<FTerm>& terms) {
    SineState out;
    for (const auto& t : terms) {
        out += t.eta_tilde;
        if (!t.xi.empty() && !t.xi_prime.empty()) out -= sym_product(t.xi, t.xi_prime);
    }
    return out;
}

double product_identity_error(std::size_t j) {
    if (j == 0) throw InvalidArgument("product_identity_error: j must be >= 1");
    SineState expected(j + 1);
    expected.at(j + 1) = 0.5 * double(j + 1);
    if (j >= 2) expected.at(j - 1) = -0.5 * double(j - 1);
    return max_abs_diff(sym_product(SineState::mode(j), SineState::mode(1)), expected);
}

std::vector<FTerm> decompose_in_F(const SineState& eta1, std::size_t k) {
    if (k == 0) throw InvalidArgument("decompose_in_F: k must be >= 1");
    if (!ModeSubspace(k + 1).contains(eta1)) {
        throw InvalidArgument("decompose_in_F: value has modes above " + std::to_string(k + 1));
    }
    const double c = eta1.coeff(k + 1);
    if (c == 0.0) return {FTerm{project(eta1, k), SineState(k), SineState(1)}};
    FTerm t;
    t.eta_tilde = project(eta1, k);
    if (k >= 2) t.eta_tilde.at(k - 1) += c * double(k - 1) / double(k + 1);
    t.xi = SineState::mode(k, -2.0 * c / double(k + 1));
    t.xi_prime = SineState::mode(1);
    return {t};
}

ModeSubspace f_space(std::size_t k, FSpaceCertificate* cert) {
    if (k == 0) throw InvalidArgument("f_space: k must be >= 1");
    FSpaceCertificate local;
    local.k = k;
    for (std::size_t j = 1; j <= k + 1; ++j) {
        const SineState e = SineState::mode(j, 1.0, k + 1);
        auto terms = decompose_in_F(e, k);
        local.max_reassembly_error =
            std::max(local.max_reassembly_error, max_abs_diff(reassemble(terms), e));
        local.basis_terms.push_back(std::move(terms));
        if (j <= k) {
            const SineState s = sym_product(SineState::mode(j), SineState::mode(1));
            for (std::size_t i = k + 2; i <= s.order(); ++i) {
                local.max_leakage = std::max(local.max_leakage, std::abs(s.coeff(i)));
            }
        }
    }
    if (k == 1) {
        const SineState b = burgers_B(SineState::mode(1));
        for (std::size_t i = 3; i <= b.order(); ++i) {
            local.b_e1_leakage = std::max(local.b_e1_leakage, std::abs(b.coeff(i)));
        }
    }
    const double worst =
        std::max({local.max_reassembly_error, local.max_leakage, local.b_e1_leakage});
    if (worst > 1e-12) {
        throw ConvergenceError("f_space: certificate failed for k=" + std::to_string(k));
    }
    if (cert) *cert = std::move(local);
    return ModeSubspace(k + 1);
}

ModeSubspace f_space(const ModeSubspace& N, const ModeSubspace& G, FSpaceCertificate* cert) {
    if (N.k != 1) {
        throw InvalidArgument("f_space: only N = E_1 is supported (got N = E_" +
                              std::to_string(N.k) + ")");
    }
    return f_space(G.k, cert);
}

bool saturation_hypothesis_holds(const ModeSubspace& N, const ModeSubspace& G) noexcept {
    return N.k <= G.k && 2 * N.k <= G.k;
}

}  // namespace bctl
