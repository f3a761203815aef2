#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "bctl/control_signal.hpp"
#include "bctl/solver.hpp"
#include "bctl/spectral.hpp"

namespace bctl {

/// A convex combination replacing a constant E_{k+1}-valued force eta1 by an
/// E_k-valued drift plus fast state shifts:
///   eta1 - B(u) = drift - sum_j w_j (B(u + z_j) - nu d_xx z_j) + residual
/// for every state u, with ||residual|| <= delta.
struct ConvexCombo {
    std::size_t k = 0;
    double delta = 0.0;
    double eps = 0.0;  ///< scale of the shifts; 0 when eta1 already lies in E_k
    SineState target;  ///< eta1
    SineState drift;
    std::vector<double> weights;
    std::vector<SineState> shifts;
    SineState residual;  ///< u-independent remainder eps^2 B(xi)

    double residual_norm() const { return l2_norm(residual); }
    bool trivial() const noexcept { return eps == 0.0; }
};

nlohmann::json to_json(const ConvexCombo& c);

/// Builds the two-point combination with shifts +-(eps xi + sin(x)/eps),
/// weights 1/2, drift eta_tilde + eps^{-2} B(sin x) and
/// eps = sqrt(delta / ||B(xi)||), where eta1 = eta_tilde - sym_product(xi, sin x).
/// Requires k >= 2 and eta1 in E_{k+1}. Throws InvalidArgument when delta is
/// so small that eps^{-2} would exceed 1e12 (the message names the smallest
/// achievable delta), and ConvergenceError if the probe check of the
/// residual identity fails.
ConvexCombo build_convex_combo(const SineState& eta1, std::size_t k, double delta, double nu);

/// eta1 - B(u) - (drift - sum_j w_j (B(u + z_j) - nu d_xx z_j)), evaluated exactly.
SineState combo_residual(const ConvexCombo& c, const SineState& u, double nu);

/// Piecewise-constant shift signal on [0, T]: m periods of length T/m, each
/// spending w_j T/m on shift z_j in order.
ControlSignal fast_zeta(const ConvexCombo& c, std::size_t m, double T);

/// An E_k-valued force together with a state-shift control for the extended
/// system d_t u - nu d_xx (u + zeta) + B(u + zeta) = h + eta.
struct ControlPair {
    ControlSignal eta;
    ControlSignal zeta;
};

struct ReductionReport {
    std::size_t k = 0;
    std::size_t m = 0;
    double delta = 0.0;
    std::vector<double> eps;         ///< per piece of eta1 (0 for pieces already in E_k)
    double max_residual = 0.0;       ///< largest ||residual|| over pieces
    double fm1_relax_norm = 0.0;     ///< relaxation norm of -nu d_xx (zeta - <zeta>)
    std::optional<double> endpoint_gap;
};

nlohmann::json to_json(const ReductionReport& r);

struct Reduction {
    ControlPair pair;
    std::vector<ConvexCombo> combos;  ///< one per piece of eta1
    ReductionReport report;
};

/// One rung: replaces a piecewise-constant E_{k+1}-valued eta1 by an
/// E_k-valued pair, convexifying every piece with its own combination and
/// m fast periods. A signal that is already E_k-valued comes back as
/// (eta1, 0). Throws InvalidArgument for non-piecewise input.
Reduction reduce_control(const ControlSignal& eta1, std::size_t k, std::size_t m, double delta,
                         double nu);

/// ||R_T(u0, h + eta, zeta) - R_T(u0, h + eta1)|| for the extended and the
/// original system; also stored in r.report.endpoint_gap.
double reduction_gap(Reduction& r, const ControlSignal& eta1, const SineState& u0,
                     const ControlSignal& h, const SolveConfig& cfg);

/// Transition profile used by the mollifier.
///  cosine:            z_a + (z_b - z_a)(1 - cos(pi s))/2 across each jump.
///  moment_preserving: A(s) z_a + A(1 - s) z_b with
///                     A(s) = (1 + cos(pi s))/2 + (sqrt(3) - 1) sin^2(pi s) cos(pi s).
///                     Over each transition the time averages of zeta_hat and of
///                     any quadratic expression in zeta_hat equal those of the
///                     step, so averaged nonlinear terms are unchanged. The rise
///                     at t = 0 and the fall at t = T use half of such a path
///                     through 0 (width ramp/2).
enum class RampShape { cosine, moment_preserving };

const char* to_string(RampShape s) noexcept;

/// Continuously differentiable version of a piecewise-constant zeta that
/// starts and ends at 0: every jump is replaced by a transition of width
/// `ramp` centred on it, and the rise at t = 0 and the fall at t = T take
/// `ramp` inside [0, T]. Throws InvalidArgument unless 1.5 * ramp is at most
/// the shortest piece of zeta.
ControlSignal mollify(const ControlSignal& zeta, double ramp, RampShape shape = RampShape::cosine);

/// Single control eta + d_t zeta_hat, zeta_hat = mollify(zeta, ramp, shape).
/// R_T(u0, h + result) = R_T(u0, h + eta, zeta_hat) exactly, because
/// zeta_hat vanishes at 0 and T. A zero zeta returns eta unchanged.
ControlSignal extend_to_single(const ControlPair& pair, double ramp,
                               RampShape shape = RampShape::cosine);

/// Approximation of an L2 control by a piecewise-constant one taking values
/// among the 2d vertices +-C e_l of a simplex in E_d, where C = M d and
/// M bounds the coefficients of eta on each of the s pieces. Every piece of
/// length T/s is split into sub-intervals whose lengths are the barycentric
/// weights of the piece average.
struct SimplexApprox {
    ControlSignal control;
    double vertex_scale = 0.0;  ///< C
    std::vector<std::vector<double>> weights;  ///< per piece, 2d weights plus slack on the zero vertex
};

SimplexApprox piecewise_simplex_approx(const ControlSignal& eta, std::size_t d, std::size_t s);

}  // namespace bctl
