#include "bctl/control_signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bctl/error.hpp"
#include "quadrature.hpp"

namespace bctl {

struct ControlSignal::Impl {
    ControlKind kind = ControlKind::constant;
    double T = 1.0;
    std::string name;
    nlohmann::json params = nlohmann::json::object();

    // constant / piecewise: starts has n+1 entries, starts[n] == T.
    std::vector<double> starts;
    std::vector<SineState> values;
    std::vector<SineState> cum;  // primitive at each start

    // sampled
    std::vector<double> times;
    std::vector<SineState> samples;
    std::vector<SineState> scum;
    Interpolation interp = Interpolation::linear;

    // analytic
    ControlSignal::SidedEvaluator f;
    Evaluator F;
    std::vector<double> bps;

    std::size_t order = 0;

    std::size_t piece_index(double t, Side side) const {
        const std::size_t n = values.size();
        std::size_t i;
        if (side == Side::right) {
            i = std::size_t(std::upper_bound(starts.begin(), starts.end(), t) - starts.begin());
            i = i == 0 ? 0 : i - 1;
        } else {
            i = std::size_t(std::lower_bound(starts.begin(), starts.end(), t) - starts.begin());
            i = i == 0 ? 0 : i - 1;
        }
        return std::min(i, n - 1);
    }

    std::size_t sample_index(double t, Side side) const {
        std::size_t i;
        if (side == Side::right) {
            i = std::size_t(std::upper_bound(times.begin(), times.end(), t) - times.begin());
        } else {
            i = std::size_t(std::lower_bound(times.begin(), times.end(), t) - times.begin());
        }
        i = i == 0 ? 0 : i - 1;
        return std::min(i, times.size() - 2);
    }
};

namespace {

using Impl = ControlSignal::Impl;

void check_horizon(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("control horizon must be positive");
}

std::size_t max_order_of(const std::vector<SineState>& v) {
    std::size_t m = 0;
    for (const auto& s : v) m = std::max(m, s.order());
    return m;
}

// Gauss panels over [a, b] split at `cuts`, with `panels` panels per stretch.
template <class Fn>
SineState integrate_split(const Fn& fn, double a, double b, const std::vector<double>& cuts,
                          std::size_t panels) {
    SineState acc;
    if (b <= a) return acc;
    std::vector<double> pts{a};
    for (double c : cuts) {
        if (c > a && c < b) pts.push_back(c);
    }
    pts.push_back(b);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double h = (pts[i + 1] - pts[i]) / double(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double lo = pts[i] + double(p) * h;
            detail::gauss_panel(fn, lo, p + 1 == panels ? pts[i + 1] : lo + h, acc);
        }
    }
    return acc;
}

std::vector<double> merge_times(std::vector<double> a, const std::vector<double>& b, double T) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    const double tol = 1e-13 * T;
    std::vector<double> out;
    for (double t : a) {
        if (out.empty() || t - out.back() > tol) out.push_back(t);
    }
    return out;
}

}  // namespace

const char* to_string(ControlKind kind) noexcept {
    switch (kind) {
        case ControlKind::constant: return "constant";
        case ControlKind::piecewise_constant: return "piecewise_constant";
        case ControlKind::sampled: return "sampled";
        case ControlKind::analytic: return "analytic";
    }
    return "unknown";
}

ControlSignal::ControlSignal() : ControlSignal(zero(1.0)) {}

ControlSignal::ControlSignal(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ControlSignal ControlSignal::zero(double horizon) {
    return constant(SineState(), horizon);
}

ControlSignal ControlSignal::constant(SineState value, double horizon) {
    check_horizon(horizon);
    auto p = std::make_shared<Impl>();
    p->kind = ControlKind::constant;
    p->name = "constant";
    p->T = horizon;
    p->starts = {0.0, horizon};
    p->cum = {SineState(value.order()), value * horizon};
    p->order = value.order();
    p->values = {std::move(value)};
    return ControlSignal(std::move(p));
}

ControlSignal ControlSignal::piecewise(std::vector<double> durations, std::vector<SineState> values) {
    if (durations.empty() || durations.size() != values.size()) {
        throw InvalidArgument("piecewise control needs one value per duration (and at least one)");
    }
    auto p = std::make_shared<Impl>();
    p->kind = ControlKind::piecewise_constant;
    p->name = "piecewise_constant";
    p->starts.reserve(durations.size() + 1);
    p->cum.reserve(durations.size() + 1);
    p->starts.push_back(0.0);
    p->cum.emplace_back();
    double t = 0.0;
    for (std::size_t i = 0; i < durations.size(); ++i) {
        if (!(durations[i] > 0.0) || !std::isfinite(durations[i])) {
            throw InvalidArgument("piecewise control: duration #" + std::to_string(i) +
                                  " must be positive");
        }
        t += durations[i];
        p->starts.push_back(t);
        p->cum.push_back(p->cum.back() + values[i] * durations[i]);
    }
    p->T = t;
    p->order = max_order_of(values);
    p->values = std::move(values);
    return ControlSignal(std::move(p));
}

ControlSignal ControlSignal::sampled(std::vector<double> times, std::vector<SineState> values,
                                     Interpolation interp) {
    if (times.size() < 2 || times.size() != values.size()) {
        throw InvalidArgument("sampled control needs >= 2 samples, one value per time");
    }
    if (times.front() != 0.0) throw InvalidArgument("sampled control must start at t=0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidArgument("sampled control times must be strictly increasing");
        }
    }
    auto p = std::make_shared<Impl>();
    p->kind = ControlKind::sampled;
    p->name = "sampled";
    p->T = times.back();
    p->interp = interp;
    p->scum.emplace_back();
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double h = times[i + 1] - times[i];
        SineState inc = interp == Interpolation::linear ? 0.5 * h * (values[i] + values[i + 1])
                                                        : values[i] * h;
        p->scum.push_back(p->scum.back() + inc);
    }
    p->order = max_order_of(values);
    p->times = std::move(times);
    p->samples = std::move(values);
    return ControlSignal(std::move(p));
}

ControlSignal ControlSignal::analytic(std::string name, nlohmann::json params, double horizon,
                                      Evaluator value, std::vector<double> breakpoints,
                                      Evaluator primitive) {
    check_horizon(horizon);
    if (!value) throw InvalidArgument("analytic control needs an evaluator");
    auto p = std::make_shared<Impl>();
    p->kind = ControlKind::analytic;
    p->T = horizon;
    p->name = std::move(name);
    p->params = std::move(params);
    p->f = [v = std::move(value)](double t, Side) { return v(t); };
    p->F = std::move(primitive);
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double b : breakpoints) {
        if (b > 0.0 && b < horizon) p->bps.push_back(b);
    }
    for (int i = 0; i <= 16; ++i) {
        p->order = std::max(p->order, p->f(horizon * double(i) / 16.0, Side::right).order());
    }
    return ControlSignal(std::move(p));
}

ControlSignal ControlSignal::analytic_sided(std::string name, double horizon, SidedEvaluator value,
                                            Evaluator primitive, std::vector<double> breakpoints) {
    check_horizon(horizon);
    auto p = std::make_shared<Impl>();
    p->kind = ControlKind::analytic;
    p->T = horizon;
    p->name = std::move(name);
    p->f = std::move(value);
    p->F = std::move(primitive);
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double b : breakpoints) {
        if (b > 0.0 && b < horizon) p->bps.push_back(b);
    }
    for (int i = 0; i <= 16; ++i) {
        p->order = std::max(p->order, p->f(horizon * double(i) / 16.0, Side::right).order());
    }
    return ControlSignal(std::move(p));
}

ControlKind ControlSignal::kind() const noexcept { return impl_->kind; }
double ControlSignal::horizon() const noexcept { return impl_->T; }
const std::string& ControlSignal::name() const noexcept { return impl_->name; }
const nlohmann::json& ControlSignal::params() const noexcept { return impl_->params; }
std::size_t ControlSignal::max_order() const { return impl_->order; }

bool ControlSignal::is_piecewise_constant() const noexcept {
    return impl_->kind == ControlKind::constant || impl_->kind == ControlKind::piecewise_constant;
}

SineState ControlSignal::value(double t, Side side) const {
    const Impl& p = *impl_;
    switch (p.kind) {
        case ControlKind::constant:
        case ControlKind::piecewise_constant: return p.values[p.piece_index(t, side)];
        case ControlKind::sampled: {
            const std::size_t i = p.sample_index(t, side);
            if (p.interp == Interpolation::hold) return p.samples[i];
            const double w = (t - p.times[i]) / (p.times[i + 1] - p.times[i]);
            return (1.0 - w) * p.samples[i] + w * p.samples[i + 1];
        }
        case ControlKind::analytic: return p.f(t, side);
    }
    return {};
}

void ControlSignal::value_into(double t, std::span<double> out, Side side) const {
    const Impl& p = *impl_;
    std::fill(out.begin(), out.end(), 0.0);
    auto copy = [&](const SineState& s, double w) {
        const std::size_t n = std::min(out.size(), s.order());
        for (std::size_t k = 0; k < n; ++k) out[k] += w * s.coeffs()[k];
    };
    switch (p.kind) {
        case ControlKind::constant:
        case ControlKind::piecewise_constant: copy(p.values[p.piece_index(t, side)], 1.0); return;
        case ControlKind::sampled: {
            const std::size_t i = p.sample_index(t, side);
            if (p.interp == Interpolation::hold) {
                copy(p.samples[i], 1.0);
                return;
            }
            const double w = (t - p.times[i]) / (p.times[i + 1] - p.times[i]);
            copy(p.samples[i], 1.0 - w);
            copy(p.samples[i + 1], w);
            return;
        }
        case ControlKind::analytic: copy(p.f(t, side), 1.0); return;
    }
}

std::vector<double> ControlSignal::breakpoints() const {
    const Impl& p = *impl_;
    switch (p.kind) {
        case ControlKind::constant: return {};
        case ControlKind::piecewise_constant:
            return std::vector<double>(p.starts.begin() + 1, p.starts.end() - 1);
        case ControlKind::sampled:
            return std::vector<double>(p.times.begin() + 1, p.times.end() - 1);
        case ControlKind::analytic: return p.bps;
    }
    return {};
}

SineState ControlSignal::primitive(double t) const {
    const Impl& p = *impl_;
    t = std::clamp(t, 0.0, p.T);
    switch (p.kind) {
        case ControlKind::constant:
        case ControlKind::piecewise_constant: {
            const std::size_t i = p.piece_index(t, Side::right);
            return p.cum[i] + p.values[i] * (t - p.starts[i]);
        }
        case ControlKind::sampled: {
            const std::size_t i = p.sample_index(t, Side::right);
            const double h = t - p.times[i];
            if (p.interp == Interpolation::hold) return p.scum[i] + p.samples[i] * h;
            const SineState vt = value(t);
            return p.scum[i] + 0.5 * h * (p.samples[i] + vt);
        }
        case ControlKind::analytic: {
            if (p.F) return p.F(t);
            const std::size_t panels =
                std::max<std::size_t>(1, std::size_t(std::ceil(64.0 * t / p.T)));
            return integrate_split([&](double s) { return p.f(s, Side::right); }, 0.0, t, p.bps,
                                   panels);
        }
    }
    return {};
}

std::vector<double> ControlSignal::piece_durations() const {
    if (!is_piecewise_constant()) {
        throw InvalidArgument(std::string("piece_durations: signal is ") + to_string(kind()));
    }
    std::vector<double> d(impl_->values.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = impl_->starts[i + 1] - impl_->starts[i];
    return d;
}

std::vector<SineState> ControlSignal::piece_values() const {
    if (!is_piecewise_constant()) {
        throw InvalidArgument(std::string("piece_values: signal is ") + to_string(kind()));
    }
    return impl_->values;
}

const std::vector<double>& ControlSignal::sample_times() const {
    if (kind() != ControlKind::sampled) throw InvalidArgument("sample_times: not a sampled signal");
    return impl_->times;
}

const std::vector<SineState>& ControlSignal::sample_values() const {
    if (kind() != ControlKind::sampled) throw InvalidArgument("sample_values: not a sampled signal");
    return impl_->samples;
}

Interpolation ControlSignal::interpolation() const {
    if (kind() != ControlKind::sampled) throw InvalidArgument("interpolation: not a sampled signal");
    return impl_->interp;
}

ControlSignal operator+(const ControlSignal& f, const ControlSignal& g) {
    const double T = f.horizon();
    if (std::abs(T - g.horizon()) > 1e-9 * std::max(1.0, T)) {
        throw InvalidArgument("cannot add controls with different horizons");
    }
    if (f.is_piecewise_constant() && g.is_piecewise_constant()) {
        if (f.kind() == ControlKind::constant && g.kind() == ControlKind::constant) {
            return ControlSignal::constant(f.value(0.0) + g.value(0.0), T);
        }
        auto cut = [](const ControlSignal& s) {
            auto b = s.breakpoints();
            b.insert(b.begin(), 0.0);
            return b;
        };
        std::vector<double> pts = merge_times(cut(f), cut(g), T);
        std::vector<double> dur;
        std::vector<SineState> vals;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double a = pts[i];
            const double b = i + 1 < pts.size() ? pts[i + 1] : T;
            if (b - a <= 0.0) continue;
            const double mid = 0.5 * (a + b);
            dur.push_back(b - a);
            vals.push_back(f.value(mid) + g.value(mid));
        }
        return ControlSignal::piecewise(std::move(dur), std::move(vals));
    }
    auto bps = merge_times(f.breakpoints(), g.breakpoints(), T);
    auto impl_f = [f, g](double t, Side side) { return f.value(t, side) + g.value(t, side); };
    auto impl_F = [f, g](double t) { return f.primitive(t) + g.primitive(t); };
    return ControlSignal::analytic_sided("sum(" + f.name() + "," + g.name() + ")", T, impl_f,
                                         impl_F, std::move(bps));
}

ControlSignal operator*(double s, const ControlSignal& f) {
    return map_values(f, [s](const SineState& v) { return s * v; }, "scaled");
}

ControlSignal map_values(const ControlSignal& f, const std::function<SineState(const SineState&)>& op,
                         const std::string& tag) {
    switch (f.kind()) {
        case ControlKind::constant: return ControlSignal::constant(op(f.value(0.0)), f.horizon());
        case ControlKind::piecewise_constant: {
            auto vals = f.piece_values();
            for (auto& v : vals) v = op(v);
            return ControlSignal::piecewise(f.piece_durations(), std::move(vals));
        }
        case ControlKind::sampled: {
            auto vals = f.sample_values();
            for (auto& v : vals) v = op(v);
            return ControlSignal::sampled(f.sample_times(), std::move(vals), f.interpolation());
        }
        case ControlKind::analytic: {
            auto impl_f = [f, op](double t, Side side) { return op(f.value(t, side)); };
            auto impl_F = [f, op](double t) { return op(f.primitive(t)); };
            return ControlSignal::analytic_sided(tag + "(" + f.name() + ")", f.horizon(), impl_f,
                                                 impl_F, f.breakpoints());
        }
    }
    return f;
}

namespace {

SineState piece_average(const ControlSignal& f, double a, double b) {
    if (f.kind() == ControlKind::analytic) {
        SineState acc;
        detail::gauss_panel([&](double s) { return f.value(s); }, a, b, acc);
        return acc * (1.0 / (b - a));
    }
    return (f.primitive(b) - f.primitive(a)) * (1.0 / (b - a));
}

ControlSignal merge_equal(std::vector<double> dur, std::vector<SineState> vals) {
    std::vector<double> d;
    std::vector<SineState> v;
    for (std::size_t i = 0; i < dur.size(); ++i) {
        if (!v.empty() && max_abs_diff(v.back(), vals[i]) <=
                              1e-14 * (1.0 + max_abs_diff(vals[i], SineState()))) {
            d.back() += dur[i];
        } else {
            d.push_back(dur[i]);
            v.push_back(std::move(vals[i]));
        }
    }
    return ControlSignal::piecewise(std::move(d), std::move(v));
}

}  // namespace

ControlSignal snap_to_piecewise(const ControlSignal& f, double max_piece) {
    if (!(max_piece > 0.0)) throw InvalidArgument("snap_to_piecewise: max_piece must be positive");
    if (f.is_piecewise_constant()) return f;
    const double T = f.horizon();
    std::vector<double> pts{0.0};
    for (double b : f.breakpoints()) {
        if (b > pts.back() + 1e-12 * T && b < T * (1.0 - 1e-12)) pts.push_back(b);
    }
    pts.push_back(T);
    std::vector<double> dur;
    std::vector<SineState> vals;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double len = pts[i + 1] - pts[i];
        const auto n = std::max<std::size_t>(1, std::size_t(std::ceil(len / max_piece - 1e-9)));
        const double h = len / double(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double a = pts[i] + double(j) * h;
            const double b = j + 1 == n ? pts[i + 1] : a + h;
            dur.push_back(b - a);
            vals.push_back(piece_average(f, a, b));
        }
    }
    return merge_equal(std::move(dur), std::move(vals));
}

ControlSignal snap_uniform(const ControlSignal& f, std::size_t pieces) {
    if (pieces == 0) throw InvalidArgument("snap_uniform: need at least one piece");
    const double T = f.horizon();
    std::vector<double> dur(pieces, T / double(pieces));
    std::vector<SineState> vals(pieces);
    for (std::size_t r = 0; r < pieces; ++r) {
        const double a = T * double(r) / double(pieces);
        const double b = T * double(r + 1) / double(pieces);
        vals[r] = (f.primitive(b) - f.primitive(a)) * (1.0 / (b - a));
    }
    return ControlSignal::piecewise(std::move(dur), std::move(vals));
}

double l2_time_distance(const ControlSignal& f, const ControlSignal& g, std::size_t panels_per_piece) {
    const double T = f.horizon();
    auto cuts = merge_times(f.breakpoints(), g.breakpoints(), T);
    double acc = 0.0;
    auto sq = [&](double t) {
        const double d = l2_norm(f.value(t) - g.value(t));
        return d * d;
    };
    std::vector<double> pts{0.0};
    pts.insert(pts.end(), cuts.begin(), cuts.end());
    pts.push_back(T);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double h = (pts[i + 1] - pts[i]) / double(panels_per_piece);
        for (std::size_t p = 0; p < panels_per_piece; ++p) {
            detail::gauss_panel(sq, pts[i] + double(p) * h, pts[i] + double(p + 1) * h, acc);
        }
    }
    return std::sqrt(acc);
}

double l1_time_norm(const ControlSignal& f, std::size_t panels_per_piece) {
    const double T = f.horizon();
    std::vector<double> pts{0.0};
    for (double b : f.breakpoints()) pts.push_back(b);
    pts.push_back(T);
    double acc = 0.0;
    auto nrm = [&](double t) { return l2_norm(f.value(t)); };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double h = (pts[i + 1] - pts[i]) / double(panels_per_piece);
        for (std::size_t p = 0; p < panels_per_piece; ++p) {
            detail::gauss_panel(nrm, pts[i] + double(p) * h, pts[i] + double(p + 1) * h, acc);
        }
    }
    return acc;
}

}  // namespace bctl
