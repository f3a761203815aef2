#include "bctl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bctl/error.hpp"

namespace bctl {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_finite(const std::vector<double>& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!std::isfinite(c[i])) {
            throw InvalidArgument("SineState coefficient a_" + std::to_string(i + 1) +
                                  " is not finite");
        }
    }
}

}  // namespace

SineState::SineState(std::size_t order) : c_(order, 0.0) {}

SineState::SineState(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    check_finite(c_);
}

SineState::SineState(std::initializer_list<double> coeffs) : c_(coeffs) {
    check_finite(c_);
}

SineState SineState::mode(std::size_t k, double c, std::size_t order) {
    if (k == 0) throw InvalidArgument("sine modes are indexed from 1");
    SineState s(std::max(k, order));
    s.c_[k - 1] = c;
    return s;
}

double& SineState::at(std::size_t k) {
    if (k == 0) throw InvalidArgument("sine modes are indexed from 1");
    if (k > c_.size()) c_.resize(k, 0.0);
    return c_[k - 1];
}

SineState SineState::resized(std::size_t order) const {
    SineState s(order);
    std::copy_n(c_.begin(), std::min(order, c_.size()), s.c_.begin());
    return s;
}

SineState SineState::trimmed(double tol) const {
    std::size_t n = c_.size();
    while (n > 0 && std::abs(c_[n - 1]) <= tol) --n;
    return resized(n);
}

double SineState::operator()(double x) const noexcept {
    double v = 0.0;
    for (std::size_t k = 0; k < c_.size(); ++k) v += c_[k] * std::sin(double(k + 1) * x);
    return v;
}

bool SineState::is_finite() const noexcept {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return std::isfinite(v); });
}

SineState& SineState::operator+=(const SineState& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

SineState& SineState::operator-=(const SineState& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

SineState& SineState::operator*=(double s) noexcept {
    for (double& v : c_) v *= s;
    return *this;
}

double max_abs_diff(const SineState& a, const SineState& b) noexcept {
    const std::size_t n = std::max(a.order(), b.order());
    double m = 0.0;
    for (std::size_t k = 1; k <= n; ++k) m = std::max(m, std::abs(a.coeff(k) - b.coeff(k)));
    return m;
}

ModeSubspace::ModeSubspace(std::size_t k_) : k(k_) {
    if (k_ == 0) throw InvalidArgument("mode subspace E_k needs k >= 1");
}

bool ModeSubspace::contains(const SineState& u, double tol) const noexcept {
    for (std::size_t j = k + 1; j <= u.order(); ++j) {
        if (std::abs(u.coeff(j)) > tol) return false;
    }
    return true;
}

double sobolev_norm(const SineState& u, int s) {
    if (s < -1 || s > 2) {
        throw InvalidArgument("sobolev_norm: order s=" + std::to_string(s) +
                              " unsupported; admissible orders are {-1, 0, 1, 2}");
    }
    double sum = 0.0;
    for (std::size_t k = 1; k <= u.order(); ++k) {
        const double a = u.coeff(k);
        sum += std::pow(double(k), 2 * s) * a * a;
    }
    return std::sqrt(kHalfPi * sum);
}

double l2_norm(const SineState& u) noexcept {
    double sum = 0.0;
    for (double a : u.coeffs()) sum += a * a;
    return std::sqrt(kHalfPi * sum);
}

double l2_dot(const SineState& a, const SineState& b) noexcept {
    const std::size_t n = std::min(a.order(), b.order());
    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) sum += a.coeff(k) * b.coeff(k);
    return kHalfPi * sum;
}

SineState heat_propagate(const SineState& u, double tau, double nu) {
    if (!(tau >= 0.0)) throw InvalidArgument("heat_propagate: tau must be >= 0");
    if (!(nu > 0.0)) throw InvalidArgument("heat_propagate: nu must be > 0");
    SineState out = u;
    auto c = out.coeffs();
    for (std::size_t k = 1; k <= c.size(); ++k) c[k - 1] *= std::exp(-nu * double(k * k) * tau);
    return out;
}

SineState laplacian(const SineState& u) {
    SineState out = u;
    auto c = out.coeffs();
    for (std::size_t k = 1; k <= c.size(); ++k) c[k - 1] *= -double(k * k);
    return out;
}

// sin(ix) sin(jx) = (cos((i-j)x) - cos((i+j)x)) / 2, so
// d_x[sin(ix) sin(jx)] = ((i+j) sin((i+j)x) - |i-j| sin(|i-j|x)) / 2.
SineState sym_product(const SineState& xi, const SineState& xi_prime) {
    const std::size_t p = xi.order();
    const std::size_t q = xi_prime.order();
    SineState out(p + q);
    auto c = out.coeffs();
    for (std::size_t i = 1; i <= p; ++i) {
        const double a = xi.coeff(i);
        if (a == 0.0) continue;
        for (std::size_t j = 1; j <= q; ++j) {
            const double ab = 0.5 * a * xi_prime.coeff(j);
            if (ab == 0.0) continue;
            c[i + j - 1] += double(i + j) * ab;
            if (i != j) {
                const std::size_t d = i > j ? i - j : j - i;
                c[d - 1] -= double(d) * ab;
            }
        }
    }
    return out;
}

SineState burgers_B(const SineState& u) {
    SineState out = sym_product(u, u);
    out *= 0.5;
    return out;
}

// B_n = (n/4) [ sum_{i+j=n} a_i a_j - 2 sum_{i-j=n} a_i a_j ].
void burgers_B_into(std::span<const double> u, std::span<double> out) noexcept {
    const std::size_t m = u.size();
    for (std::size_t n = 1; n <= out.size(); ++n) {
        double plus = 0.0;
        const std::size_t ilo = n > m ? n - m : 1;
        const std::size_t ihi = std::min(n - 1, m);
        for (std::size_t i = ilo; i <= ihi; ++i) plus += u[i - 1] * u[n - i - 1];
        double minus = 0.0;
        for (std::size_t j = 1; j + n <= m; ++j) minus += u[j + n - 1] * u[j - 1];
        out[n - 1] = 0.25 * double(n) * (plus - 2.0 * minus);
    }
}

std::vector<double> interior_grid(std::size_t n) {
    std::vector<double> x(n);
    const double h = std::numbers::pi / double(n + 1);
    for (std::size_t j = 0; j < n; ++j) x[j] = double(j + 1) * h;
    return x;
}

std::vector<double> sample(const SineState& u, std::size_t n) {
    if (n < 2 * u.order() + 1) {
        throw InvalidArgument("sample: grid of " + std::to_string(n) +
                              " points too coarse; need at least " +
                              std::to_string(2 * u.order() + 1));
    }
    const auto x = interior_grid(n);
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = u(x[j]);
    return v;
}

SineState transform(std::span<const double> values, std::size_t order) {
    const std::size_t n = values.size();
    if (n < 2 * order + 1) {
        throw InvalidArgument("transform: grid of " + std::to_string(n) +
                              " points too coarse; need at least " +
                              std::to_string(2 * order + 1));
    }
    const auto x = interior_grid(n);
    SineState out(order);
    auto c = out.coeffs();
    const double scale = 2.0 / double(n + 1);
    for (std::size_t k = 1; k <= order; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += values[j] * std::sin(double(k) * x[j]);
        c[k - 1] = scale * s;
    }
    return out;
}

}  // namespace bctl
