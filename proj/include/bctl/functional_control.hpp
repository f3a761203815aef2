#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bctl/control_signal.hpp"
#include "bctl/solver.hpp"
#include "bctl/spectral.hpp"
#include "bctl/synthesis.hpp"

namespace bctl {

using Vec = std::vector<double>;

/// A finite-dimensional terminal functional with a local right inverse on
/// the ball of radius `radius` around `y_hat`.
struct FunctionalTarget {
    std::size_t N = 0;
    std::function<Vec(const SineState&)> F;
    std::function<SineState(const Vec&)> F_inv;
    Vec y_hat;
    double radius = 0.0;
};

/// F(u) = first N sine coefficients, F_inv(y) = u_hat + sum_k (y_k - y_hat_k) sin kx.
FunctionalTarget projection_functional(const SineState& u_hat, std::size_t N, double r);

/// Radius for projection_functional whose lifted ball stays within
/// 0.9 eps/2 of the target in L2.
double default_functional_radius(double eps);

/// Uniform points of the closed ball of radius r around c (the centre first).
std::vector<Vec> sample_ball(const Vec& c, double r, std::size_t count, std::uint64_t seed);

/// Radial projection onto the closed ball.
Vec clamp_to_ball(const Vec& y, const Vec& c, double r);

double sup_distance(const Vec& a, const Vec& b);

struct BrouwerOptions {
    double tol = 1e-9;            ///< on |Phi(y) - y_hat|_inf
    std::size_t max_evals = 60;   ///< budget of Phi evaluations
    bool secant = true;           ///< Broyden updates of the step matrix (N <= 4)
    bool grid_fallback = true;    ///< grid refinement on the ball when stalled (N <= 2)
    std::size_t grid_points = 9;  ///< per axis
};

struct BrouwerResult {
    Vec y;         ///< best iterate
    Vec phi;       ///< Phi(y)
    double residual = 0.0;
    bool converged = false;
    std::size_t evaluations = 0;
    std::vector<Vec> iterates;     ///< accepted iterates, in order
    std::vector<double> residuals; ///< residual of each accepted iterate
    std::string method;            ///< "krasnoselskii", "secant" or "grid"
};

nlohmann::json to_json(const BrouwerResult& r);

/// Finds y in the ball with Phi(y) = y_hat. Starts at y_hat and iterates
/// y <- clamp(y - lambda J^{-1}(Phi(y) - y_hat)): J = I is the damped
/// Krasnoselskii step, halving lambda whenever the residual does not drop;
/// with `secant` J is refined by Broyden updates. When the damping stalls and
/// N <= 2 a grid search on shrinking boxes takes over. Returns the best
/// iterate; `converged` tells whether the tolerance was met.
BrouwerResult brouwer_solve(const std::function<Vec(const Vec&)>& phi, const Vec& y_hat, double r,
                            const BrouwerOptions& opt = {});

/// Root of phi(y) = y_hat on [y_hat - r, y_hat + r] by bisection; throws
/// ConvergenceError when the endpoints do not bracket a sign change.
double bisect_scalar(const std::function<double(double)>& phi, double y_hat, double r, double tol,
                     std::size_t* evaluations = nullptr);

struct FunctionalCheck {
    double right_inverse_defect = 0.0;  ///< max |F(F_inv(y)) - y|_inf over the sample
    double centre_defect = 0.0;         ///< ||F_inv(y_hat) - u_hat||
    double lift_radius = 0.0;           ///< max ||F_inv(y) - u_hat|| over the sample
};

/// Probes the target on `samples` points of its ball.
FunctionalCheck check_target(const FunctionalTarget& target, const SineState& u_hat,
                             std::size_t samples = 100, std::uint64_t seed = 7);

/// Phi(y) = F(R_T(u0, h + Psi(F_inv(y)))) with Psi(v) = synthesize(u0, v, h, plan, cfg).
/// Unless plan.dt is set, the first evaluation fixes the time step of every
/// later synthesis to the step of its final solve, so Phi is one deterministic
/// map. Values are cached on a 1e-9 grid in y.
class FunctionalMap {
public:
    FunctionalMap(SineState u0, FunctionalTarget target, ControlSignal h, SynthesisPlan plan,
                  SolveConfig cfg);

    Vec operator()(const Vec& y);

    /// The synthesis behind a cached point; throws InvalidArgument if y was never evaluated.
    const SynthesisResult& result(const Vec& y) const;
    /// max |Phi(y) - y|_inf over the cached points.
    double max_displacement() const;
    double pinned_dt() const noexcept { return plan_.dt; }
    std::size_t syntheses() const noexcept { return cache_.size(); }

private:
    struct Entry {
        Vec y;
        Vec phi;
        SynthesisResult result;
    };
    static std::vector<long long> key(const Vec& y);

    SineState u0_;
    FunctionalTarget target_;
    ControlSignal h_;
    SynthesisPlan plan_;
    SolveConfig cfg_;
    std::map<std::vector<long long>, Entry> cache_;
};

struct FunctionalReport {
    FunctionalCheck check;
    double epsilon = 0.0;
    double pinned_dt = 0.0;
    BrouwerResult brouwer;
    double max_displacement = 0.0;   ///< max |Phi(y) - y|_inf over evaluated y
    Vec final_values;                ///< F(u(T)) of the final solve
    double functional_residual = 0.0;  ///< |F(u(T)) - y_hat|_inf
    double final_distance = 0.0;       ///< ||u(T) - u_hat||, same solve
    bool success = false;
    std::optional<SynthesisReport> final_synthesis;
};

nlohmann::json to_json(const FunctionalReport& r);

struct FunctionalResult {
    ControlSignal eta;
    FunctionalReport report;
};

/// Steers u0 so that F(R_T(u0, h + eta)) = y_hat and ||R_T - u_hat|| < eps.
/// Psi(v) is synthesize(u0, v, h, plan, cfg); Phi(y) = F(R_T(u0, h + Psi(F_inv(y)))).
/// The first synthesis (at y_hat) fixes the time step for every later solve,
/// so Phi is one deterministic map. Phi values are cached on a 1e-9 grid.
/// Throws InvalidArgument when the target fails its checks or the lifted ball
/// is not inside the eps/2 ball around u_hat.
FunctionalResult steer_functional(const SineState& u0, const SineState& u_hat,
                                  const FunctionalTarget& target, double eps,
                                  const ControlSignal& h, SynthesisPlan plan,
                                  const SolveConfig& cfg, const BrouwerOptions& opt = {});

}  // namespace bctl
