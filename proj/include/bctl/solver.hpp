#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bctl/control_signal.hpp"
#include "bctl/spectral.hpp"

namespace bctl {

/// Discretisation of one Burgers run.
struct SolveConfig {
    double nu = 1.0;             ///< viscosity
    double T = 1.0;              ///< horizon
    double dt = 1e-3;            ///< largest time step; steps are also cut at control breakpoints
    std::size_t modes = 32;      ///< Galerkin truncation order M
    std::size_t record_every = 1;
    /// Every stretch between consecutive control breakpoints gets at least
    /// this many steps (the step there may drop below dt).
    std::size_t min_steps_per_piece = 1;

    /// Throws InvalidArgument on a bad configuration.
    void validate() const;
};

/// Recorded frames of a run; times[0] == 0 and times.back() == T.
struct Trajectory {
    std::vector<double> times;
    std::vector<SineState> states;

    const SineState& terminal() const { return states.back(); }
    std::size_t size() const noexcept { return times.size(); }
};

/// Solution of d_t u - nu d_xx u + u d_x u = f, u(0) = u0, on [0, T].
///
/// Galerkin truncation to cfg.modes sine modes with an integrating-factor
/// fourth-order Runge-Kutta scheme: the heat flow is integrated exactly and
/// RK4 is applied to the nonlinear term plus forcing. Steps never straddle a
/// control breakpoint. Throws SolverError when a coefficient exceeds 1e12,
/// turns non-finite, or the advective stability bound dt*M*sup|u| <= 2.8 is
/// violated.
Trajectory solve(const SineState& u0, const ControlSignal& f, const SolveConfig& cfg);

/// Solution of d_t u - nu d_xx (u + w) + (u + v) d_x (u + v) = f.
/// solve(u0, f, cfg) is solve_general(u0, 0, 0, f, cfg).
Trajectory solve_general(const SineState& u0, const ControlSignal& v, const ControlSignal& w,
                         const ControlSignal& f, const SolveConfig& cfg);

/// The extended system driven by a state-shift control zeta (v = w = zeta).
inline Trajectory solve_extended(const SineState& u0, const ControlSignal& zeta,
                                 const ControlSignal& f, const SolveConfig& cfg) {
    return solve_general(u0, zeta, zeta, f, cfg);
}

/// Forcing under which u(t) = e^{-t} w solves the equation:
/// f(t) = -e^{-t}(w + nu w_xx) + e^{-2t} B(w), with its closed-form primitive.
ControlSignal manufactured_forcing(const SineState& w, double nu, double T);

/// E(t) = ||u(t)||^2 + 2 nu int_0^t ||d_x u||^2 ds on the recorded frames,
/// time integral by the trapezoid rule.
std::vector<std::pair<double, double>> energy_profile(const Trajectory& traj, double nu);

/// sup_t ||u(t)|| + (int_0^T ||u(t)||_1^2 dt)^{1/2} on the recorded frames
/// (sup over frames, trapezoid rule in time).
double xt_norm(const Trajectory& traj);

/// CSV rows "t,a_1,...,a_M" with a header line.
std::string trajectory_csv(const Trajectory& traj);

/// JSON envelope: config metadata plus frames.
nlohmann::json trajectory_json(const Trajectory& traj, const SolveConfig& cfg);

}  // namespace bctl
