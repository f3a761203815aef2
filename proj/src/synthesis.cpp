#include "bctl/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bctl/error.hpp"
#include "bctl/saturation.hpp"
#include "quadrature.hpp"

namespace bctl {

namespace {

constexpr double kMembershipTol = ModeSubspace::kMembershipTol;

double coeff_sum(const SineState& u) {
    double s = 0.0;
    for (double c : u.coeffs()) s += std::abs(c);
    return s;
}

double shortest_piece(const ControlSignal& z) {
    const auto d = z.piece_durations();
    return *std::min_element(d.begin(), d.end());
}

double max_shift(const ControlSignal& z) {
    double s = 0.0;
    for (const auto& v : z.piece_values()) s = std::max(s, coeff_sum(v));
    return s;
}

// Largest coefficient above k among the piece values, or among values at the
// midpoints of all smooth stretches plus a uniform sample for other variants.
double outside_space(const ControlSignal& f, std::size_t k) {
    auto above = [k](const SineState& v) {
        double m = 0.0;
        for (std::size_t i = k + 1; i <= v.order(); ++i) m = std::max(m, std::abs(v.coeff(i)));
        return m;
    };
    double worst = 0.0;
    if (f.is_piecewise_constant()) {
        for (const auto& v : f.piece_values()) worst = std::max(worst, above(v));
        return worst;
    }
    std::vector<double> pts{0.0};
    for (double b : f.breakpoints()) pts.push_back(b);
    pts.push_back(f.horizon());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        worst = std::max(worst, above(f.value(0.5 * (pts[i] + pts[i + 1]))));
    }
    for (std::size_t i = 0; i <= 256; ++i) {
        worst = std::max(worst, above(f.value(f.horizon() * double(i) / 256.0)));
    }
    return worst;
}

// Solve with the planned step, halving it on a stability rejection when the
// step was not pinned by the plan.
SineState terminal_of(const std::function<Trajectory(const SolveConfig&)>& run, SolveConfig c,
                      bool pinned, double& used_dt) {
    c.record_every = std::numeric_limits<std::size_t>::max();
    for (int attempt = 0;; ++attempt) {
        try {
            SineState out = run(c).terminal();
            used_dt = c.dt;
            return out;
        } catch (const SolverError&) {
            if (pinned || attempt >= 8) throw;
            c.dt *= 0.5;
        }
    }
}

// Solver settings for a run whose shifts reach `shift` in coefficient sum;
// stretches between breakpoints get `min_steps` steps at least.
SolveConfig planned(const SynthesisPlan& plan, const SolveConfig& cfg, std::size_t min_steps,
                    double shift, double state_scale) {
    SolveConfig c = cfg;
    c.min_steps_per_piece = std::max(cfg.min_steps_per_piece, min_steps);
    if (plan.dt > 0.0) {
        c.dt = plan.dt;
    } else {
        c.dt = std::min(cfg.dt, 1.0 / (double(cfg.modes) * (shift + state_scale + 1.0)));
    }
    return c;
}

// f(t + offset) on [0, horizon].
ControlSignal shifted(const ControlSignal& f, double offset, double horizon) {
    if (offset == 0.0 && f.horizon() == horizon) return f;
    std::vector<double> bps;
    for (double b : f.breakpoints()) {
        if (b > offset && b - offset < horizon) bps.push_back(b - offset);
    }
    return ControlSignal::analytic_sided(
        "shifted", horizon, [f, offset](double t, Side s) { return f.value(t + offset, s); },
        [f, offset](double t) { return f.primitive(t + offset) - f.primitive(offset); },
        std::move(bps));
}

// Zero on [0, start), g(t - start) on [start, start + g.horizon()].
ControlSignal delayed(const ControlSignal& g, double start) {
    if (start == 0.0) return g;
    std::vector<double> bps{start};
    for (double b : g.breakpoints()) bps.push_back(b + start);
    const std::size_t order = g.max_order();
    return ControlSignal::analytic_sided(
        "delayed", start + g.horizon(),
        [g, start, order](double t, Side s) {
            if (t < start || (t == start && s == Side::left)) return SineState(order);
            return g.value(t - start, s);
        },
        [g, start, order](double t) {
            return t <= start ? SineState(order) : g.primitive(t - start);
        },
        std::move(bps));
}

// Only mode `top` of f, and f without it.
ControlSignal top_mode(const ControlSignal& f, std::size_t top) {
    return map_values(
        f, [top](const SineState& v) { return SineState::mode(top, v.coeff(top)); },
        "mode_" + std::to_string(top));
}

// Piecewise-constant approximation of mode `top` of f plus the exact lower modes.
struct SplitControl {
    ControlSignal top;    // piecewise constant, values c sin(top x)
    ControlSignal lower;  // projection of f onto E_{top-1}
    ControlSignal whole() const { return lower + top; }
};

SplitControl split_snap(const ControlSignal& f, std::size_t top, double max_piece) {
    return {snap_to_piecewise(top_mode(f, top), max_piece), truncate_control(f, top - 1)};
}

std::string knob_for(const std::string& stage) {
    if (stage == "large_space") return "mu";
    if (stage == "truncation") return "N";
    if (stage == "snap") return "pieces";
    if (stage == "resnap") return "ramp_pieces";
    if (stage == "rung") return "m";
    return "ramp";
}

}  // namespace

void SynthesisPlan::validate() const {
    if (!(mu > 0.0)) throw InvalidArgument("plan: mu must be positive");
    if (N < 3) throw InvalidArgument("plan: N must be >= 3");
    if (m_schedule.size() != N - 2) {
        throw InvalidArgument("plan: m_schedule needs N-2 = " + std::to_string(N - 2) + " entries");
    }
    for (std::size_t m : m_schedule) {
        if (m == 0) throw InvalidArgument("plan: m_schedule entries must be >= 1");
    }
    if (!(ramp > 0.0) || ramp > 1.0) throw InvalidArgument("plan: ramp must lie in (0, 1]");
    if (!(delta > 0.0)) throw InvalidArgument("plan: delta must be positive");
    if (!delta_schedule.empty() && delta_schedule.size() != N - 2) {
        throw InvalidArgument("plan: delta_schedule needs N-2 entries when given");
    }
    for (double d : delta_schedule) {
        if (!(d > 0.0)) throw InvalidArgument("plan: delta_schedule entries must be positive");
    }
    if (!(epsilon > 0.0)) throw InvalidArgument("plan: epsilon must be positive");
    if (!(window > 0.0) || window > 1.0) throw InvalidArgument("plan: window must lie in (0, 1]");
    if (pieces == 0 || ramp_pieces == 0 || steps_per_ramp == 0 || steps_per_piece == 0) {
        throw InvalidArgument("plan: pieces, ramp_pieces, steps_per_ramp and steps_per_piece must be >= 1");
    }
    if (dt < 0.0) throw InvalidArgument("plan: dt must be >= 0");
}

nlohmann::json to_json(const SynthesisPlan& p) {
    return {{"mu", p.mu},
            {"N", p.N},
            {"m_schedule", p.m_schedule},
            {"ramp", p.ramp},
            {"delta", p.delta},
            {"delta_schedule", p.delta_schedule},
            {"epsilon", p.epsilon},
            {"window", p.window},
            {"pieces", p.pieces},
            {"ramp_pieces", p.ramp_pieces},
            {"steps_per_ramp", p.steps_per_ramp},
            {"steps_per_piece", p.steps_per_piece},
            {"shape", to_string(p.shape)},
            {"dt", p.dt}};
}

SynthesisPlan plan_from_json(const nlohmann::json& j) {
    SynthesisPlan p;
    try {
        p.mu = j.value("mu", p.mu);
        p.N = j.value("N", p.N);
        p.m_schedule = j.value("m_schedule", p.m_schedule);
        p.ramp = j.value("ramp", p.ramp);
        p.delta = j.value("delta", p.delta);
        p.delta_schedule = j.value("delta_schedule", p.delta_schedule);
        p.epsilon = j.value("epsilon", p.epsilon);
        p.window = j.value("window", p.window);
        p.pieces = j.value("pieces", p.pieces);
        p.ramp_pieces = j.value("ramp_pieces", p.ramp_pieces);
        p.steps_per_ramp = j.value("steps_per_ramp", p.steps_per_ramp);
        p.steps_per_piece = j.value("steps_per_piece", p.steps_per_piece);
        p.dt = j.value("dt", p.dt);
        const std::string shape = j.value("shape", std::string(to_string(p.shape)));
        if (shape == "cosine") {
            p.shape = RampShape::cosine;
        } else if (shape == "moment_preserving") {
            p.shape = RampShape::moment_preserving;
        } else {
            throw InvalidArgument("plan: unknown ramp shape '" + shape + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("plan: malformed JSON: ") + e.what());
    }
    return p;
}

double smoothing_deficit(const SineState& u_hat, double mu) {
    return l2_norm(heat_propagate(u_hat, mu, 1.0) - u_hat);
}

LargeSpaceControl large_space_control(const SineState& u0, const SineState& u_hat,
                                      const ControlSignal& h, double mu, double T, double nu) {
    if (!(mu > 0.0)) throw InvalidArgument("large_space_control: mu must be positive");
    if (!(T > 0.0)) throw InvalidArgument("large_space_control: T must be positive");
    if (h.horizon() + 1e-9 * T < T) throw InvalidArgument("large_space_control: h shorter than T");
    const std::size_t order = std::max(u0.order(), u_hat.order());
    const SineState a = heat_propagate(u_hat, mu, 1.0).resized(order);
    const SineState b = u0.resized(order);

    LargeSpaceControl out;
    out.predicted_terminal = a;
    out.deficit = l2_norm(a - u_hat);
    // u_mu(t) = (t a + (T - t) e^{t d_xx} b) / T
    auto eval = [a, b, h, T, nu, order](double t, Side side) {
        const SineState free = heat_propagate(b, t, 1.0);
        const SineState u = (t / T) * a + ((T - t) / T) * free;
        const SineState du = (1.0 / T) * (a - free) + ((T - t) / T) * laplacian(free);
        SineState eta = du - nu * laplacian(u) + burgers_B(u);
        eta -= h.value(t, side);
        return eta.resized(std::max(eta.order(), 2 * order));
    };
    auto primitive = [a, b, h, T, nu, order](double t) -> SineState {
        // int_0^t (d_t u - nu d_xx u) = u(t) - u(0) - nu d_xx int_0^t u; B(u) by quadrature.
        SineState acc(2 * order);
        auto integrand = [&](double s) {
            const SineState u = (s / T) * a + ((T - s) / T) * heat_propagate(b, s, 1.0);
            return burgers_B(u) - nu * laplacian(u);
        };
        const std::size_t panels = 16;
        for (std::size_t p = 0; p < panels; ++p) {
            detail::gauss_panel(integrand, t * double(p) / double(panels),
                                t * double(p + 1) / double(panels), acc);
        }
        const SineState ut = (t / T) * a + ((T - t) / T) * heat_propagate(b, t, 1.0);
        return acc + (ut - b) - h.primitive(t);
    };
    out.eta = ControlSignal::analytic_sided("large_space", T, eval, primitive, h.breakpoints());
    return out;
}

ControlSignal truncate_control(const ControlSignal& eta, std::size_t N) {
    if (N == 0) throw InvalidArgument("truncate_control: N must be >= 1");
    return map_values(eta, [N](const SineState& v) { return project(v, N); },
                      "truncated_" + std::to_string(N));
}

double verify(const SineState& u0, const ControlSignal& eta, const SineState& u_hat,
              const ControlSignal& h, const SolveConfig& cfg) {
    SolveConfig c = cfg;
    c.record_every = std::numeric_limits<std::size_t>::max();
    return l2_norm(solve(u0, h + eta, c).terminal() - u_hat);
}

nlohmann::json to_json(const StageReport& s) {
    nlohmann::json j = {{"stage", s.stage},
                        {"k", s.k},
                        {"endpoint_error", s.endpoint_error},
                        {"max_outside", s.max_outside},
                        {"in_space", s.in_space},
                        {"pieces", s.pieces},
                        {"solve_dt", s.solve_dt}};
    if (s.reduction) j["reduction"] = to_json(*s.reduction);
    return j;
}

nlohmann::json to_json(const SynthesisReport& r) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : r.stages) stages.push_back(to_json(s));
    return {{"plan", to_json(r.plan)},
            {"stages", std::move(stages)},
            {"large_space_deficit", r.large_space_deficit},
            {"final_error", r.final_error},
            {"final_dt", r.final_dt},
            {"final_state", r.final_state.vec()},
            {"success", r.success},
            {"dominant_stage", r.dominant_stage},
            {"suggested_knob", r.suggested_knob}};
}

SynthesisResult synthesize(const SineState& u0, const SineState& u_hat, const ControlSignal& h,
                           const SynthesisPlan& plan, const SolveConfig& cfg) {
    plan.validate();
    cfg.validate();
    if (h.horizon() + 1e-9 * cfg.T < cfg.T) throw InvalidArgument("synthesize: h shorter than T");
    const double T = cfg.T;
    const double nu = cfg.nu;
    const bool pinned = plan.dt > 0.0;
    const double state_scale = coeff_sum(u0) + coeff_sum(u_hat);

    SynthesisReport rep;
    rep.plan = plan;
    auto record = [&](StageReport s) { rep.stages.push_back(std::move(s)); };
    SineState last_end;
    auto error_of = [&](const ControlSignal& eta, const SolveConfig& c, double& used) {
        last_end =
            terminal_of([&](const SolveConfig& cc) { return solve(u0, h + eta, cc); }, c, pinned, used);
        return l2_norm(last_end - u_hat);
    };

    // Large-space control on the approach window [T - tau, T].
    const double tau = plan.window * T;
    const double start = T - tau;
    SineState u1 = u0;
    if (start > 0.0) {
        SolveConfig c = cfg;
        c.T = start;
        c.dt = std::min(cfg.dt, start);
        double used = 0.0;
        u1 = terminal_of([&](const SolveConfig& cc) { return solve(u0, h, cc); }, c, false, used);
    }
    const LargeSpaceControl ls =
        large_space_control(u1, u_hat, shifted(h, start, tau), plan.mu, tau, nu);
    rep.large_space_deficit = ls.deficit;
    const ControlSignal eta_ls = delayed(ls.eta, start);
    {
        StageReport s;
        s.stage = "large_space";
        s.k = eta_ls.max_order();
        s.endpoint_error = error_of(eta_ls, planned(plan, cfg, 1, 0.0, state_scale), s.solve_dt);
        record(s);
    }

    const ControlSignal eta_n = truncate_control(eta_ls, plan.N);
    {
        StageReport s;
        s.stage = "truncation";
        s.k = plan.N;
        s.max_outside = outside_space(eta_n, plan.N);
        s.in_space = s.max_outside <= kMembershipTol;
        s.endpoint_error = error_of(eta_n, planned(plan, cfg, 1, 0.0, state_scale), s.solve_dt);
        record(s);
    }

    SplitControl current = split_snap(eta_n, plan.N, tau / double(plan.pieces));
    {
        StageReport s;
        s.stage = "snap";
        s.k = plan.N;
        s.pieces = current.top.piece_durations().size();
        const ControlSignal whole = current.whole();
        s.max_outside = outside_space(whole, plan.N);
        s.in_space = s.max_outside <= kMembershipTol;
        s.endpoint_error = error_of(whole, planned(plan, cfg, 1, 0.0, state_scale), s.solve_dt);
        record(s);
    }

    ControlSignal single = current.whole();
    for (std::size_t idx = 0; idx + 2 < plan.N; ++idx) {
        const std::size_t k = plan.N - 1 - idx;
        Reduction red = reduce_control(current.top, k, plan.m_schedule[idx], plan.rung_delta(idx), nu);
        red.pair.eta = current.lower + red.pair.eta;
        const bool trivial = red.combos.empty();
        const double shift = trivial ? 0.0 : max_shift(red.pair.zeta);
        const double ramp = trivial ? 0.0 : plan.ramp * shortest_piece(red.pair.zeta) / 1.5;
        {
            StageReport s;
            s.stage = "rung";
            s.k = k;
            s.pieces = red.pair.zeta.piece_durations().size();
            s.max_outside = std::max(outside_space(red.pair.eta, k), outside_space(red.pair.zeta, k));
            s.in_space = s.max_outside <= kMembershipTol;
            const SolveConfig c = planned(plan, cfg, plan.steps_per_piece, shift, state_scale);
            last_end = terminal_of(
                [&](const SolveConfig& cc) {
                    return solve_extended(u0, red.pair.zeta, h + red.pair.eta, cc);
                },
                c, pinned, s.solve_dt);
            s.endpoint_error = l2_norm(last_end - u_hat);
            s.reduction = red.report;
            record(s);
        }
        single = trivial ? red.pair.eta : extend_to_single(red.pair, ramp, plan.shape);
        {
            StageReport s;
            s.stage = "extension";
            s.k = k;
            s.max_outside = outside_space(single, k);
            s.in_space = s.max_outside <= kMembershipTol;
            s.endpoint_error =
                error_of(single, planned(plan, cfg, plan.steps_per_ramp, shift, state_scale), s.solve_dt);
            record(s);
        }
        if (k > 2) {
            current = trivial ? split_snap(single, k, cfg.T)
                              : split_snap(single, k, ramp / double(plan.ramp_pieces));
            StageReport s;
            s.stage = "resnap";
            s.k = k;
            s.pieces = current.top.piece_durations().size();
            const ControlSignal whole = current.whole();
            s.max_outside = outside_space(whole, k);
            s.in_space = s.max_outside <= kMembershipTol;
            s.endpoint_error =
                error_of(whole, planned(plan, cfg, plan.steps_per_piece, shift, state_scale), s.solve_dt);
            record(s);
        }
    }

    rep.final_error = rep.stages.back().endpoint_error;
    rep.final_dt = rep.stages.back().solve_dt;
    rep.final_state = last_end;
    rep.success = rep.final_error < plan.epsilon;
    double prev = 0.0, worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : rep.stages) {
        const double inc = s.endpoint_error - prev;
        if (inc > worst) {
            worst = inc;
            rep.dominant_stage = s.stage;
        }
        prev = s.endpoint_error;
    }
    rep.suggested_knob = knob_for(rep.dominant_stage);
    return {single, rep};
}

SynthesisPlan default_plan(const SineState& u_hat, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("default_plan: epsilon must be positive");
    SynthesisPlan p;
    p.epsilon = epsilon;
    const double budget = 0.25 * epsilon;
    if (smoothing_deficit(u_hat, 1.0) <= budget) {
        p.mu = 1.0;
    } else {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
            const double mid = 0.5 * (lo + hi);
            (smoothing_deficit(u_hat, mid) <= budget ? lo : hi) = mid;
        }
        p.mu = lo > 0.0 ? lo : hi * 1e-3;
    }
    const double total = l2_norm(u_hat);
    std::size_t n = 0;
    if (total > 0.0) {
        while (n < u_hat.order()) {
            const double kept = l2_norm(project(u_hat, n));
            if (kept * kept >= 0.999 * total * total) break;
            ++n;
        }
    }
    p.N = std::max<std::size_t>(3, n);
    p.m_schedule.assign(p.N - 2, 16);
    p.m_schedule.front() = 1;
    p.delta_schedule.assign(p.N - 2, 0.3);
    p.delta_schedule.front() = 0.1;
    return p;
}

}  // namespace bctl
