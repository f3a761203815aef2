#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bctl/control_signal.hpp"
#include "bctl/convexify.hpp"
#include "bctl/solver.hpp"
#include "bctl/spectral.hpp"

namespace bctl {

/// Parameters of the end-to-end pipeline.
struct SynthesisPlan {
    double mu = 1e-3;              ///< smoothing time of the target, e^{mu d_xx} u_hat
    std::size_t N = 4;             ///< truncation order of the large-space control
    std::vector<std::size_t> m_schedule{1, 16};  ///< fast periods per piece, rungs N-1 down to 2
    double ramp = 1.0;             ///< ramp width as a fraction of the widest admissible one
    double delta = 0.1;            ///< convexification tolerance of every rung
    std::vector<double> delta_schedule{0.1, 0.3};  ///< optional per-rung override, rungs N-1 down to 2
    double epsilon = 0.2;          ///< target accuracy
    double window = 0.125;         ///< the large-space control acts on the last window*T of [0, T]
    std::size_t pieces = 32;       ///< pieces per window for the first piecewise-constant snap
    std::size_t ramp_pieces = 8;   ///< pieces per ramp when a rung output is snapped for the next rung
    std::size_t steps_per_ramp = 128;  ///< solver steps per ramp of a single-control solve
    std::size_t steps_per_piece = 8;   ///< solver steps per piece of an extended-system solve
    RampShape shape = RampShape::moment_preserving;
    double dt = 0.0;               ///< when positive, every solve uses this step

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;
    double rung_delta(std::size_t rung) const {
        return delta_schedule.empty() ? delta : delta_schedule.at(rung);
    }
};

nlohmann::json to_json(const SynthesisPlan& p);
/// Missing keys keep their defaults.
SynthesisPlan plan_from_json(const nlohmann::json& j);

/// Large-space control built from the interpolating trajectory
///   u_mu(t) = T^{-1}(t e^{mu d_xx} u_hat + (T - t) e^{t d_xx} u0),
///   eta_mu = d_t u_mu - nu d_xx u_mu + B(u_mu) - h,
/// evaluated in closed form. The uncontrolled heat factor e^{t d_xx} carries
/// no viscosity. Along u_mu the Burgers equation with force h + eta_mu is
/// satisfied exactly, so the predicted terminal state is e^{mu d_xx} u_hat.
struct LargeSpaceControl {
    ControlSignal eta;
    SineState predicted_terminal;
    double deficit = 0.0;  ///< ||e^{mu d_xx} u_hat - u_hat||, exact
};

LargeSpaceControl large_space_control(const SineState& u0, const SineState& u_hat,
                                      const ControlSignal& h, double mu, double T, double nu);

/// ||e^{mu d_xx} u_hat - u_hat||, strictly increasing in mu for u_hat != 0.
double smoothing_deficit(const SineState& u_hat, double mu);

/// Pointwise projection of every value onto E_N.
ControlSignal truncate_control(const ControlSignal& eta, std::size_t N);

/// Endpoint error of the original system: ||R_T(u0, h + eta) - u_hat||.
double verify(const SineState& u0, const ControlSignal& eta, const SineState& u_hat,
              const ControlSignal& h, const SolveConfig& cfg);

struct StageReport {
    std::string stage;          ///< "large_space", "truncation", "snap", "rung", "extension", "resnap"
    std::size_t k = 0;          ///< value space E_k of the control produced by this stage
    double endpoint_error = 0.0;  ///< ||R_T - u_hat|| for the control of this stage
    double max_outside = 0.0;   ///< largest coefficient above k among checked values
    bool in_space = true;       ///< max_outside <= 1e-10
    std::size_t pieces = 0;     ///< pieces of the piecewise-constant stage control (0 otherwise)
    double solve_dt = 0.0;
    std::optional<ReductionReport> reduction;
};

nlohmann::json to_json(const StageReport& s);

struct SynthesisReport {
    SynthesisPlan plan;
    std::vector<StageReport> stages;
    double large_space_deficit = 0.0;
    double final_error = 0.0;
    double final_dt = 0.0;  ///< step used for the final verification solve
    SineState final_state;  ///< R_T of that solve
    bool success = false;
    std::string dominant_stage;  ///< stage with the largest error increase
    std::string suggested_knob;  ///< mu, N, pieces, m or ramp
};

nlohmann::json to_json(const SynthesisReport& r);

struct SynthesisResult {
    ControlSignal eta;  ///< E_2-valued single control
    SynthesisReport report;
};

/// Steers u0 towards u_hat with an E_2-valued control:
/// uncontrolled flow on [0, T - window*T], then the large-space control
/// (truncated to E_N, snapped to pieces) on the rest, then for
/// k = N-1 down to 2 one reduction rung followed by the extension to a
/// single control, snapped again before the next rung.
/// Every stage is verified by a solve; `report.success` iff the final
/// error is below plan.epsilon. Solver failures propagate.
SynthesisResult synthesize(const SineState& u0, const SineState& u_hat, const ControlSignal& h,
                           const SynthesisPlan& plan, const SolveConfig& cfg);

/// Default plan for a target and accuracy: largest mu with deficit <= eps/4,
/// N the smallest order holding 99.9% of the target energy (at least 3),
/// m = 1 and delta = 0.1 on the first rung, m = 16 and delta = 0.3 below it,
/// and the remaining fields at their struct defaults.
SynthesisPlan default_plan(const SineState& u_hat, double epsilon);

}  // namespace bctl
