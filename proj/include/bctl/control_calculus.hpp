#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bctl/control_signal.hpp"
#include "bctl/solver.hpp"

namespace bctl {

/// Relaxation norm sup_{t in [0,T]} || int_0^t f ||_{H^s}.
///
/// The supremum runs over breakpoints and endpoints; smooth stretches of
/// non-piecewise signals are refined with 64 points each. Piecewise-constant
/// signals have piecewise-linear primitives, so breakpoints suffice.
double relaxation_norm(const ControlSignal& f, int s, double T);

/// Kf: the solution of d_t u - nu d_xx u = f with zero initial data.
/// Piecewise-constant forcings use the exact per-mode Duhamel formula;
/// other variants integrate the Duhamel integral with Gauss-Legendre panels
/// over each step. Frames follow cfg.dt (cut at breakpoints) and record_every.
Trajectory heat_source_solve(const ControlSignal& f, const SolveConfig& cfg);

struct HoelderSample {
    double kf_norm = 0.0;     ///< ||Kf||_{X_T}
    double relax_norm = 0.0;  ///< relaxation norm of order 0
    double ratio = 0.0;       ///< kf_norm / relax_norm^{1/3}; 0 when relax_norm == 0
};

HoelderSample hoelder_ratio(const ControlSignal& f, const SolveConfig& cfg);

/// f = +v on even and -v on odd subintervals of 2m equal subintervals of [0, T].
ControlSignal alternating_control(const SineState& v, std::size_t m, double T);

struct HoelderSweepRow {
    std::size_t m = 0;
    HoelderSample sample;
};

/// hoelder_ratio over the alternating family for each m.
std::vector<HoelderSweepRow> hoelder_sweep(const SineState& v, const std::vector<std::size_t>& ms,
                                           const SolveConfig& cfg);

/// CSV with header "m,relax_norm,kf_norm,ratio".
std::string hoelder_csv(const std::vector<HoelderSweepRow>& rows);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bctl
