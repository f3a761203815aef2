#include "bctl/convexify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bctl/control_calculus.hpp"
#include "bctl/error.hpp"
#include "bctl/io.hpp"
#include "bctl/saturation.hpp"

namespace bctl {

namespace {

constexpr double kMaxInverseEpsSquared = 1e12;

nlohmann::json state_json(const SineState& u) { return u.vec(); }

}  // namespace

nlohmann::json to_json(const ConvexCombo& c) {
    nlohmann::json shifts = nlohmann::json::array();
    for (const auto& z : c.shifts) shifts.push_back(state_json(z));
    return {{"k", c.k},
            {"delta", c.delta},
            {"eps", c.eps},
            {"target", state_json(c.target)},
            {"drift", state_json(c.drift)},
            {"weights", c.weights},
            {"shifts", std::move(shifts)},
            {"residual_norm", c.residual_norm()}};
}

SineState combo_residual(const ConvexCombo& c, const SineState& u, double nu) {
    SineState avg;
    for (std::size_t j = 0; j < c.shifts.size(); ++j) {
        avg += c.weights[j] * (burgers_B(u + c.shifts[j]) - nu * laplacian(c.shifts[j]));
    }
    return (c.target - burgers_B(u)) - (c.drift - avg);
}

ConvexCombo build_convex_combo(const SineState& eta1, std::size_t k, double delta, double nu) {
    if (k < 2) throw InvalidArgument("build_convex_combo: k must be >= 2");
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw InvalidArgument("build_convex_combo: delta must be positive and finite");
    }
    const auto terms = decompose_in_F(eta1, k);
    const FTerm& t = terms.front();

    ConvexCombo c;
    c.k = k;
    c.delta = delta;
    c.target = eta1;
    c.weights = {0.5, 0.5};
    if (eta1.coeff(k + 1) == 0.0) {
        c.drift = t.eta_tilde;
        c.shifts = {SineState(k), SineState(k)};
        c.residual = SineState(k);
        return c;
    }
    const SineState b_xi = burgers_B(t.xi);
    const double b_norm = l2_norm(b_xi);
    c.eps = std::sqrt(delta / b_norm);
    if (!(c.eps > 0.0) || 1.0 / (c.eps * c.eps) > kMaxInverseEpsSquared) {
        throw InvalidArgument("build_convex_combo: delta " + format_double(delta) +
                              " is below the smallest achievable value " +
                              format_double(b_norm / kMaxInverseEpsSquared));
    }
    const double inv2 = 1.0 / (c.eps * c.eps);
    c.drift = t.eta_tilde + inv2 * burgers_B(t.xi_prime);
    const SineState z = c.eps * t.xi + (1.0 / c.eps) * t.xi_prime;
    c.shifts = {z, -z};
    c.residual = (c.eps * c.eps) * b_xi;

    const SineState probes[] = {SineState(k), SineState::mode(1) + SineState::mode(k, -0.5)};
    for (const auto& u : probes) {
        const SineState r = combo_residual(c, u, nu);
        const double scale = 1.0 + inv2 * l2_norm(burgers_B(t.xi_prime));
        if (l2_norm(r - c.residual) > 1e-9 * scale) {
            throw ConvergenceError("build_convex_combo: residual identity check failed");
        }
    }
    return c;
}

ControlSignal fast_zeta(const ConvexCombo& c, std::size_t m, double T) {
    if (m == 0) throw InvalidArgument("fast_zeta: m must be >= 1");
    if (!(T > 0.0)) throw InvalidArgument("fast_zeta: T must be positive");
    std::vector<double> d;
    std::vector<SineState> v;
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t j = 0; j < c.shifts.size(); ++j) {
            if (c.weights[j] <= 0.0) continue;
            d.push_back(c.weights[j] * T / double(m));
            v.push_back(c.shifts[j]);
        }
    }
    return ControlSignal::piecewise(std::move(d), std::move(v));
}

nlohmann::json to_json(const ReductionReport& r) {
    nlohmann::json j = {{"k", r.k},
                        {"m", r.m},
                        {"delta", r.delta},
                        {"eps", r.eps},
                        {"max_residual", r.max_residual},
                        {"fm1_relax_norm", r.fm1_relax_norm}};
    j["endpoint_gap"] = r.endpoint_gap ? nlohmann::json(*r.endpoint_gap) : nlohmann::json(nullptr);
    return j;
}

Reduction reduce_control(const ControlSignal& eta1, std::size_t k, std::size_t m, double delta,
                         double nu) {
    if (!eta1.is_piecewise_constant()) {
        throw InvalidArgument("reduce_control: eta1 must be piecewise constant");
    }
    if (m == 0) throw InvalidArgument("reduce_control: m must be >= 1");
    const auto durations = eta1.piece_durations();
    const auto values = eta1.piece_values();

    Reduction out;
    out.report.k = k;
    out.report.m = m;
    out.report.delta = delta;

    bool already = true;
    for (const auto& v : values) already = already && ModeSubspace(k).contains(v);
    if (already) {
        out.pair = {eta1, ControlSignal::zero(eta1.horizon())};
        out.report.eps.assign(values.size(), 0.0);
        return out;
    }

    std::vector<SineState> eta_vals;
    std::vector<double> zd;
    std::vector<SineState> zv;
    std::vector<SineState> fm1;
    for (std::size_t r = 0; r < values.size(); ++r) {
        SineState v = values[r];
        if (!ModeSubspace(k + 1).contains(v)) {
            throw InvalidArgument("reduce_control: piece " + std::to_string(r) +
                                  " has modes above " + std::to_string(k + 1));
        }
        ConvexCombo c = build_convex_combo(project(v, k + 1), k, delta, nu);
        eta_vals.push_back(c.drift);
        out.report.eps.push_back(c.eps);
        out.report.max_residual = std::max(out.report.max_residual, c.residual_norm());
        SineState mean_lap;
        for (std::size_t j = 0; j < c.shifts.size(); ++j) {
            mean_lap += c.weights[j] * laplacian(c.shifts[j]);
        }
        if (c.trivial()) {
            zd.push_back(durations[r]);
            zv.push_back(SineState(k));
            fm1.push_back(SineState(k));
        } else {
            const ControlSignal z = fast_zeta(c, m, durations[r]);
            const auto pd = z.piece_durations();
            const auto pv = z.piece_values();
            for (std::size_t i = 0; i < pd.size(); ++i) {
                zd.push_back(pd[i]);
                zv.push_back(pv[i]);
                fm1.push_back(nu * (mean_lap - laplacian(pv[i])));
            }
        }
        out.combos.push_back(std::move(c));
    }
    out.pair.eta = ControlSignal::piecewise(durations, std::move(eta_vals));
    out.pair.zeta = ControlSignal::piecewise(zd, std::move(zv));
    out.report.fm1_relax_norm =
        relaxation_norm(ControlSignal::piecewise(std::move(zd), std::move(fm1)), 0, eta1.horizon());
    return out;
}

double reduction_gap(Reduction& r, const ControlSignal& eta1, const SineState& u0,
                     const ControlSignal& h, const SolveConfig& cfg) {
    const SineState a = solve_extended(u0, r.pair.zeta, h + r.pair.eta, cfg).terminal();
    const SineState b = solve(u0, h + eta1, cfg).terminal();
    const double gap = l2_norm(a - b);
    r.report.endpoint_gap = gap;
    return gap;
}

const char* to_string(RampShape s) noexcept {
    return s == RampShape::cosine ? "cosine" : "moment_preserving";
}

namespace {

// Transition weight A(s) = (1 + cos(pi s))/2 + g sin^2(pi s) cos(pi s), g = sqrt(3) - 1.
// The path A(s) a + A(1 - s) b from a to b has the same time averages of the
// state and of every quadratic expression as the step from a to b at s = 1/2:
// mean of A is 1/2, mean of A^2 is 1/2 and mean of A(s) A(1 - s) is 0.
const double kRampGain = std::sqrt(3.0) - 1.0;

double ramp_weight(double s) {
    const double sn = std::sin(std::numbers::pi * s), cs = std::cos(std::numbers::pi * s);
    return 0.5 * (1.0 + cs) + kRampGain * sn * sn * cs;
}
double ramp_weight_slope(double s) {
    const double sn = std::sin(std::numbers::pi * s), cs = std::cos(std::numbers::pi * s);
    return std::numbers::pi * sn * (-0.5 + kRampGain * (2.0 * cs * cs - sn * sn));
}

enum class Profile { cosine, moment, rise, fall };

struct Transition {
    double start;
    double len;
    SineState from;
    SineState to;
    Profile profile;
};

class Mollifier {
public:
    Mollifier(const ControlSignal& zeta, double ramp, RampShape shape) : T_(zeta.horizon()) {
        if (!(ramp > 0.0)) throw InvalidArgument("mollify: ramp must be positive");
        const auto d = zeta.piece_durations();
        const auto v = zeta.piece_values();
        const double shortest = *std::min_element(d.begin(), d.end());
        if (1.5 * ramp > shortest * (1.0 + 1e-12)) {
            throw InvalidArgument("mollify: ramp " + format_double(ramp) +
                                  " too wide; 1.5*ramp must not exceed the shortest piece " +
                                  format_double(shortest));
        }
        std::size_t order = 0;
        for (const auto& z : v) order = std::max(order, z.order());
        const bool mp = shape == RampShape::moment_preserving;
        auto add = [&](double start, double len, const SineState& from, const SineState& to,
                       Profile p) {
            const SineState a = from.resized(order), b = to.resized(order);
            if (max_abs_diff(a, b) == 0.0) return;
            tr_.push_back({start, len, a, b, p});
        };
        const SineState zero(order);
        if (mp) {
            add(0.0, 0.5 * ramp, zero, v.front(), Profile::rise);
        } else {
            add(0.0, ramp, zero, v.front(), Profile::cosine);
        }
        double t = 0.0;
        for (std::size_t i = 0; i + 1 < d.size(); ++i) {
            t += d[i];
            add(t - 0.5 * ramp, ramp, v[i], v[i + 1], mp ? Profile::moment : Profile::cosine);
        }
        if (mp) {
            add(T_ - 0.5 * ramp, 0.5 * ramp, v.back(), zero, Profile::fall);
        } else {
            add(T_ - ramp, ramp, v.back(), zero, Profile::cosine);
        }
        order_ = order;
    }

    bool empty() const noexcept { return tr_.empty(); }
    double horizon() const noexcept { return T_; }

    std::vector<double> edges() const {
        std::vector<double> e;
        for (const auto& x : tr_) {
            e.push_back(x.start);
            e.push_back(x.start + x.len);
        }
        std::sort(e.begin(), e.end());
        std::vector<double> out;
        for (double x : e) {
            if (x > 1e-12 * T_ && x < T_ * (1.0 - 1e-12) && (out.empty() || x > out.back() + 1e-12 * T_)) {
                out.push_back(x);
            }
        }
        return out;
    }

    // zeta_hat(t) when derivative == false, d_t zeta_hat(t) otherwise.
    SineState eval(double t, bool derivative) const {
        auto it = std::upper_bound(tr_.begin(), tr_.end(), t,
                                   [](double x, const Transition& tr) { return x < tr.start; });
        if (it == tr_.begin()) return SineState(order_);
        const Transition& x = *(it - 1);
        double s = (t - x.start) / x.len;
        if (s > 1.0 + 1e-9) return derivative ? SineState(order_) : x.to;
        s = std::min(s, 1.0);
        // Weights (p, q) on (from, to) and their s-derivatives.
        double p = 0.0, q = 0.0, dp = 0.0, dq = 0.0;
        switch (x.profile) {
            case Profile::cosine:
                q = 0.5 * (1.0 - std::cos(std::numbers::pi * s));
                p = 1.0 - q;
                dq = 0.5 * std::numbers::pi * std::sin(std::numbers::pi * s);
                dp = -dq;
                break;
            case Profile::moment:
                p = ramp_weight(s);
                q = ramp_weight(1.0 - s);
                dp = ramp_weight_slope(s);
                dq = -ramp_weight_slope(1.0 - s);
                break;
            case Profile::rise:  // second half of the moment path from -to to to
                q = ramp_weight(0.5 - 0.5 * s) - ramp_weight(0.5 + 0.5 * s);
                dq = -0.5 * (ramp_weight_slope(0.5 - 0.5 * s) + ramp_weight_slope(0.5 + 0.5 * s));
                break;
            case Profile::fall:  // first half of the moment path from from to -from
                p = ramp_weight(0.5 * s) - ramp_weight(1.0 - 0.5 * s);
                dp = 0.5 * (ramp_weight_slope(0.5 * s) + ramp_weight_slope(1.0 - 0.5 * s));
                break;
        }
        if (derivative) return (dp / x.len) * x.from + (dq / x.len) * x.to;
        return p * x.from + q * x.to;
    }

private:
    double T_;
    std::vector<Transition> tr_;
    std::size_t order_ = 0;
};

}  // namespace

ControlSignal mollify(const ControlSignal& zeta, double ramp, RampShape shape) {
    if (!zeta.is_piecewise_constant()) throw InvalidArgument("mollify: zeta must be piecewise constant");
    auto m = std::make_shared<const Mollifier>(zeta, ramp, shape);
    return ControlSignal::analytic(
        "mollified_shift", {{"ramp", ramp}, {"shape", to_string(shape)}}, zeta.horizon(),
        [m](double t) { return m->eval(t, false); }, m->edges());
}

ControlSignal extend_to_single(const ControlPair& pair, double ramp, RampShape shape) {
    if (!pair.zeta.is_piecewise_constant()) {
        throw InvalidArgument("extend_to_single: zeta must be piecewise constant");
    }
    if (std::abs(pair.eta.horizon() - pair.zeta.horizon()) > 1e-9 * pair.eta.horizon()) {
        throw InvalidArgument("extend_to_single: eta and zeta horizons differ");
    }
    auto m = std::make_shared<const Mollifier>(pair.zeta, ramp, shape);
    if (m->empty()) return pair.eta;
    std::vector<double> cuts = m->edges();
    for (double b : pair.eta.breakpoints()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const ControlSignal eta = pair.eta;
    return ControlSignal::analytic_sided(
        "extended_single", eta.horizon(),
        [m, eta](double t, Side side) { return eta.value(t, side) + m->eval(t, true); },
        [m, eta](double t) { return eta.primitive(t) + m->eval(t, false); }, std::move(cuts));
}

SimplexApprox piecewise_simplex_approx(const ControlSignal& eta, std::size_t d, std::size_t s) {
    if (d == 0 || s == 0) throw InvalidArgument("piecewise_simplex_approx: d and s must be >= 1");
    const ControlSignal avg = snap_uniform(eta, s);
    const auto vals = avg.piece_values();
    double M = 0.0;
    for (const auto& v : vals) {
        if (!ModeSubspace(d).contains(v)) {
            throw InvalidArgument("piecewise_simplex_approx: control leaves E_" + std::to_string(d));
        }
        for (std::size_t l = 1; l <= d; ++l) M = std::max(M, std::abs(v.coeff(l)));
    }
    SimplexApprox out;
    if (M == 0.0) {
        out.control = ControlSignal::zero(eta.horizon());
        out.weights.assign(s, std::vector<double>(2 * d, 0.0));
        return out;
    }
    const double C = M * double(d);
    out.vertex_scale = C;
    const double piece = eta.horizon() / double(s);
    std::vector<double> durs;
    std::vector<SineState> states;
    for (const auto& v : vals) {
        std::vector<double> w(2 * d, 0.0);
        double used = 0.0;
        for (std::size_t l = 1; l <= d; ++l) {
            const double p = v.coeff(l) / C;
            w[2 * (l - 1) + (p >= 0 ? 0 : 1)] = std::abs(p);
            used += std::abs(p);
        }
        const double slack = std::max(0.0, 1.0 - used);
        w[0] += 0.5 * slack;
        w[1] += 0.5 * slack;
        for (std::size_t i = 0; i < 2 * d; ++i) {
            if (w[i] <= 0.0) continue;
            durs.push_back(w[i] * piece);
            states.push_back(SineState::mode(i / 2 + 1, i % 2 == 0 ? C : -C, d));
        }
        out.weights.push_back(std::move(w));
    }
    out.control = ControlSignal::piecewise(std::move(durs), std::move(states));
    return out;
}

}  // namespace bctl
