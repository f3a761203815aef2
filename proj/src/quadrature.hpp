#pragma once

#include <array>

namespace bctl::detail {

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

/// Integrates f over [a, b] with one 8-point Gauss-Legendre panel; f returns
/// anything supporting += and scalar *.
template <class F, class R>
void gauss_panel(F&& f, double a, double b, R& acc) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
        acc += (half * kGaussWeights[i]) * f(mid + half * kGaussNodes[i]);
    }
}

}  // namespace bctl::detail
