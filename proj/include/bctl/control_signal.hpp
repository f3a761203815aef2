#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bctl/spectral.hpp"

namespace bctl {

enum class ControlKind { constant, piecewise_constant, sampled, analytic };

const char* to_string(ControlKind kind) noexcept;

/// Which one-sided value to take at a discontinuity.
enum class Side { right, left };

enum class Interpolation { linear, hold };

/// A time-dependent forcing on [0, T] with values in a sine-mode space.
///
/// Four variants are supported: constant, piecewise-constant, sampled
/// (time-stamped states with linear or hold interpolation) and analytic
/// (closed-form generator). Signals are immutable and cheap to copy; the
/// payload is shared.
class ControlSignal {
public:
    using Evaluator = std::function<SineState(double)>;

    /// Default: the zero control on [0, 1].
    ControlSignal();

    static ControlSignal zero(double horizon);
    static ControlSignal constant(SineState value, double horizon);
    /// Durations must be positive; the horizon is their sum.
    static ControlSignal piecewise(std::vector<double> durations, std::vector<SineState> values);
    /// Times must start at 0 and be strictly increasing; the horizon is the last time.
    static ControlSignal sampled(std::vector<double> times, std::vector<SineState> values,
                                 Interpolation interp = Interpolation::linear);
    /// Closed-form generator. `breakpoints` lists interior times where the
    /// generator is not smooth; `primitive` (optional) is t -> int_0^t f.
    static ControlSignal analytic(std::string name, nlohmann::json params, double horizon,
                                  Evaluator value, std::vector<double> breakpoints = {},
                                  Evaluator primitive = {});
    /// Analytic signal whose evaluator distinguishes one-sided limits at its
    /// breakpoints (used for sums and maps of discontinuous signals).
    using SidedEvaluator = std::function<SineState(double, Side)>;
    static ControlSignal analytic_sided(std::string name, double horizon, SidedEvaluator value,
                                        Evaluator primitive, std::vector<double> breakpoints);

    ControlKind kind() const noexcept;
    double horizon() const noexcept;
    /// Name of an analytic generator, or the variant name otherwise.
    const std::string& name() const noexcept;
    const nlohmann::json& params() const noexcept;

    /// Value at t in [0, T]. At a breakpoint, `side` picks the one-sided limit.
    SineState value(double t, Side side = Side::right) const;
    /// Writes the first out.size() coefficients of value(t, side) into `out`.
    void value_into(double t, std::span<double> out, Side side = Side::right) const;

    /// Sorted interior times (0 < t < T) where the signal jumps or kinks.
    std::vector<double> breakpoints() const;

    /// int_0^t f(r) dr. Closed form for constant, piecewise and sampled
    /// signals; analytic signals use their primitive when given, otherwise
    /// composite Gauss-Legendre quadrature between breakpoints.
    SineState primitive(double t) const;

    /// Highest sine mode any value can carry.
    std::size_t max_order() const;

    bool is_piecewise_constant() const noexcept;
    /// Piece durations and values; constant signals report one piece.
    /// Throws InvalidArgument for other variants.
    std::vector<double> piece_durations() const;
    std::vector<SineState> piece_values() const;

    /// Sample times and values of a sampled signal.
    const std::vector<double>& sample_times() const;
    const std::vector<SineState>& sample_values() const;
    Interpolation interpolation() const;

    struct Impl;

private:
    explicit ControlSignal(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// Pointwise sum f + g; horizons must agree. Piecewise inputs give a
/// piecewise result on the merged partition, otherwise an analytic signal.
ControlSignal operator+(const ControlSignal& f, const ControlSignal& g);
/// Pointwise scaling.
ControlSignal operator*(double s, const ControlSignal& f);
inline ControlSignal operator-(const ControlSignal& f, const ControlSignal& g) {
    return f + (-1.0) * g;
}

/// Applies a linear map to every value (e.g. a projection); the variant is kept.
ControlSignal map_values(const ControlSignal& f, const std::function<SineState(const SineState&)>& op,
                         const std::string& tag);

/// Piece-average approximation on a grid that contains every breakpoint of
/// `f` and subdivides each smooth stretch into pieces no longer than
/// `max_piece`. Consecutive pieces whose values agree to rounding are merged.
ControlSignal snap_to_piecewise(const ControlSignal& f, double max_piece);

/// Piece averages on the uniform grid of s pieces (ignores breakpoints).
ControlSignal snap_uniform(const ControlSignal& f, std::size_t pieces);

/// sqrt(int_0^T ||f(t) - g(t)||^2 dt), by composite Gauss-Legendre
/// quadrature on the union of both partitions.
double l2_time_distance(const ControlSignal& f, const ControlSignal& g,
                        std::size_t panels_per_piece = 4);

/// int_0^T ||f(t)|| dt.
double l1_time_norm(const ControlSignal& f, std::size_t panels_per_piece = 4);

}  // namespace bctl
