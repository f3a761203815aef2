#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace bctl {

/// A function on (0, pi) vanishing at both ends, stored by its sine coefficients:
/// u(x) = sum_{k=1..M} a_k sin(kx). Coefficient index k is 1-based in the
/// accessors; the raw storage is 0-based.
class SineState {
public:
    SineState() = default;
    /// Zero state of truncation order `order`.
    explicit SineState(std::size_t order);
    /// Throws InvalidArgument on non-finite coefficients.
    explicit SineState(std::vector<double> coeffs);
    SineState(std::initializer_list<double> coeffs);

    /// c * sin(kx) of order max(k, order).
    static SineState mode(std::size_t k, double c = 1.0, std::size_t order = 0);

    std::size_t order() const noexcept { return c_.size(); }
    bool empty() const noexcept { return c_.empty(); }

    /// Coefficient of sin(kx); zero beyond the stored order.
    double coeff(std::size_t k) const noexcept {
        return (k >= 1 && k <= c_.size()) ? c_[k - 1] : 0.0;
    }
    /// Mutable access; grows the state to order k when needed.
    double& at(std::size_t k);

    std::span<const double> coeffs() const noexcept { return c_; }
    std::span<double> coeffs() noexcept { return c_; }
    const std::vector<double>& vec() const noexcept { return c_; }

    /// Zero-pads or truncates to `order`.
    SineState resized(std::size_t order) const;
    /// Drops trailing coefficients with |a_k| <= tol.
    SineState trimmed(double tol = 0.0) const;

    /// Point value u(x).
    double operator()(double x) const noexcept;

    bool is_finite() const noexcept;

    SineState& operator+=(const SineState& o);
    SineState& operator-=(const SineState& o);
    SineState& operator*=(double s) noexcept;

    friend SineState operator+(SineState a, const SineState& b) { return a += b; }
    friend SineState operator-(SineState a, const SineState& b) { return a -= b; }
    friend SineState operator*(SineState a, double s) { return a *= s; }
    friend SineState operator*(double s, SineState a) { return a *= s; }
    friend SineState operator-(SineState a) { return a *= -1.0; }

private:
    std::vector<double> c_;
};

/// max_k |a_k - b_k| with the shorter state zero-padded.
double max_abs_diff(const SineState& a, const SineState& b) noexcept;

/// The span E_k of sin(x), ..., sin(kx).
struct ModeSubspace {
    std::size_t k = 1;

    /// Absolute coefficient tolerance used for membership tests.
    static constexpr double kMembershipTol = 1e-10;

    explicit ModeSubspace(std::size_t k_);
    bool contains(const SineState& u, double tol = kMembershipTol) const noexcept;
    std::size_t dim() const noexcept { return k; }
};

/// ||u||_s^2 = (pi/2) sum k^{2s} a_k^2, s in {-1, 0, 1, 2}.
double sobolev_norm(const SineState& u, int s);
/// L2 norm, i.e. sobolev_norm(u, 0).
double l2_norm(const SineState& u) noexcept;
/// L2 inner product on (0, pi).
double l2_dot(const SineState& a, const SineState& b) noexcept;

/// Heat semigroup exp(nu * tau * d_xx): mode k decays by exp(-nu k^2 tau).
SineState heat_propagate(const SineState& u, double tau, double nu);

/// Second derivative in x: mode k picks up -k^2.
SineState laplacian(const SineState& u);

/// xi * d_x(xi') + xi' * d_x(xi) = d_x(xi xi'), exact; result order is the sum
/// of the input orders.
SineState sym_product(const SineState& xi, const SineState& xi_prime);

/// B(u) = u d_x u = sym_product(u, u) / 2, exact.
SineState burgers_B(const SineState& u);

/// Coefficients 1..out.size() of B(u) for raw coefficients `u`; modes above
/// out.size() are discarded. Allocation-free kernel used by the integrators.
void burgers_B_into(std::span<const double> u, std::span<double> out) noexcept;

/// Interior grid x_j = j*pi/(n+1), j = 1..n.
std::vector<double> interior_grid(std::size_t n);

/// Values of u on the interior grid of n points; n must be >= 2*order+1.
std::vector<double> sample(const SineState& u, std::size_t n);

/// Inverse of `sample` (discrete sine transform); returns `order` coefficients.
/// values.size() must be >= 2*order+1.
SineState transform(std::span<const double> values, std::size_t order);

}  // namespace bctl
