#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bctl/control_calculus.hpp"
#include "bctl/error.hpp"
#include "bctl/functional_control.hpp"
#include "bctl/io.hpp"
#include "bctl/saturation.hpp"
#include "bctl/solver.hpp"
#include "bctl/synthesis.hpp"

using nlohmann::json;
using namespace bctl;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;
constexpr int kTargetNotReached = 4;

constexpr const char* kVersion = "0.1.0";

// Options whose values may also come from the config file. A flag given on
// the command line wins over the file.
class Options {
public:
    explicit Options(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_path_, "JSON config file (keys are flag names)");
        app_->add_flag("--no-timestamp", no_timestamp_, "omit generated_at from JSON output");
        add("--out", out_, "output prefix: writes <out>.json and <out>.csv");
    }

    template <class T>
    CLI::Option* add(const std::string& flag, T& var, const std::string& help) {
        CLI::Option* opt = app_->add_option(flag, var, help)->capture_default_str();
        const std::string key = flag.substr(2);
        fills_.push_back([opt, key, &var](const json& cfg) {
            if (opt->count() == 0 && cfg.contains(key)) var = cfg.at(key).get<T>();
        });
        return opt;
    }

    // Reads the config file (if any) and fills every option not given as a flag.
    void resolve() {
        if (config_path_.empty()) return;
        try {
            config_ = json::parse(read_text_file(config_path_));
        } catch (const json::exception& e) {
            throw InvalidArgument("config '" + config_path_ + "': " + e.what());
        }
        if (!config_.is_object()) throw InvalidArgument("config '" + config_path_ + "' must hold an object");
        try {
            for (auto& f : fills_) f(config_);
        } catch (const json::exception& e) {
            throw InvalidArgument("config '" + config_path_ + "': " + e.what());
        }
    }

    const json& config() const { return config_; }
    const std::string& out() const { return out_; }

    json envelope(const std::string& command) const {
        json j = {{"command", command}, {"version", kVersion}};
        if (!no_timestamp_) {
            const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            j["generated_at"] = buf;
        }
        return j;
    }

    // Writes <out>.json and <out>.csv, or prints the JSON when no prefix is set.
    void emit(const json& j, const std::string& csv) const {
        const std::string text = j.dump(2) + "\n";
        if (out_.empty()) {
            std::cout << text;
            return;
        }
        write_text_file(out_ + ".json", text);
        if (!csv.empty()) write_text_file(out_ + ".csv", csv);
    }

private:
    CLI::App* app_;
    std::string config_path_;
    bool no_timestamp_ = false;
    std::string out_;
    json config_ = json::object();
    std::vector<std::function<void(const json&)>> fills_;
};

struct Physics {
    double nu = 0.1;
    double T = 1.0;
    double dt = 1e-3;
    std::size_t modes = 32;
    std::string u0 = "zero";
    std::string force = "zero";

    void add_to(Options& o) {
        o.add("--nu", nu, "viscosity");
        o.add("--T", T, "horizon");
        o.add("--dt", dt, "largest time step");
        o.add("--modes", modes, "Galerkin modes");
        o.add("--u0", u0, "initial state spec, e.g. sin:1:1+sin:2:0.5");
        o.add("--force", force, "force spec: zero | const:<spec> | alt:<m>:<spec> | manufactured[:<spec>] | file:<path>");
    }

    SolveConfig config() const {
        SolveConfig c;
        c.nu = nu;
        c.T = T;
        c.dt = dt;
        c.modes = modes;
        c.validate();
        return c;
    }
};

struct PlanFlags {
    std::size_t N = 0;
    std::vector<std::size_t> m_schedule;
    std::vector<double> delta_schedule;
    double mu = 0.0;
    double window = 0.0;
    std::size_t pieces = 0;
    std::size_t ramp_pieces = 0;
    std::size_t steps_per_ramp = 0;
    std::size_t steps_per_piece = 0;

    void add_to(Options& o) {
        o.add("--order", N, "truncation order N of the large-space control (0: automatic)");
        o.add("--m-schedule", m_schedule, "fast periods per piece, one per rung")->delimiter(',');
        o.add("--delta-schedule", delta_schedule, "convexification tolerance, one per rung")->delimiter(',');
        o.add("--mu", mu, "target smoothing time (0: automatic)");
        o.add("--window", window, "fraction of [0, T] driven by the large-space control (0: default)");
        o.add("--pieces", pieces, "pieces of the first snap (0: default)");
        o.add("--ramp-pieces", ramp_pieces, "pieces per ramp when resnapping (0: default)");
        o.add("--steps-per-ramp", steps_per_ramp, "solver steps per ramp (0: default)");
        o.add("--steps-per-piece", steps_per_piece, "solver steps per piece of extended solves (0: default)");
    }

    // default_plan, then the config file's "plan" object, then these flags.
    SynthesisPlan build(const SineState& target, double eps, const json& cfg) const {
        json pj = to_json(default_plan(target, eps));
        if (cfg.contains("plan")) pj.update(cfg.at("plan"));
        SynthesisPlan p;
        try {
            p = plan_from_json(pj);
        } catch (const json::exception& e) {
            throw InvalidArgument(std::string("config plan: ") + e.what());
        }
        p.epsilon = eps;
        if (N > 0) p.N = N;
        if (!m_schedule.empty()) p.m_schedule = m_schedule;
        if (!delta_schedule.empty()) p.delta_schedule = delta_schedule;
        if (mu > 0.0) p.mu = mu;
        if (window > 0.0) p.window = window;
        if (pieces > 0) p.pieces = pieces;
        if (ramp_pieces > 0) p.ramp_pieces = ramp_pieces;
        if (steps_per_ramp > 0) p.steps_per_ramp = steps_per_ramp;
        if (steps_per_piece > 0) p.steps_per_piece = steps_per_piece;
        if (p.N >= 3 && p.m_schedule.size() != p.N - 2 && m_schedule.empty()) {
            p.m_schedule.assign(p.N - 2, 16);
            p.m_schedule.front() = 1;
        }
        if (p.N >= 3 && p.delta_schedule.size() != p.N - 2 && delta_schedule.empty()) {
            p.delta_schedule.assign(p.N - 2, 0.3);
            p.delta_schedule.front() = 0.1;
        }
        p.validate();
        return p;
    }
};

std::vector<double> to_doubles(const std::vector<std::size_t>& v) {
    return {v.begin(), v.end()};
}

int run_solve(Options& o, const Physics& ph, std::size_t record_every) {
    SolveConfig cfg = ph.config();
    cfg.record_every = record_every;
    cfg.validate();
    const SineState u0 = parse_state_spec(ph.u0);
    const ControlSignal f = parse_force_spec(ph.force, cfg.T, cfg.nu);
    const Trajectory traj = solve(u0, f, cfg);
    json j = o.envelope("solve");
    j["u0"] = ph.u0;
    j["force"] = ph.force;
    j["terminal"] = traj.terminal().vec();
    j["terminal_norm"] = l2_norm(traj.terminal());
    j["energy_final"] = energy_profile(traj, cfg.nu).back().second;
    j["xt_norm"] = xt_norm(traj);
    j["trajectory"] = trajectory_json(traj, cfg);
    if (o.out().empty()) j.erase("trajectory");
    o.emit(j, trajectory_csv(traj));
    return kOk;
}

int run_synthesize(Options& o, const Physics& ph, const PlanFlags& pf, const std::string& target,
                   double eps, std::size_t samples) {
    const SolveConfig cfg = ph.config();
    const SineState u0 = parse_state_spec(ph.u0);
    const SineState u_hat = parse_state_spec(target);
    const ControlSignal h = parse_force_spec(ph.force, cfg.T, cfg.nu);
    const SynthesisPlan plan = pf.build(u_hat, eps, o.config());
    const SynthesisResult res = synthesize(u0, u_hat, h, plan, cfg);
    json j = o.envelope("synthesize");
    j["u0"] = ph.u0;
    j["target"] = target;
    j["report"] = to_json(res.report);
    j["control"] = control_json(res.eta, samples);
    o.emit(j, control_csv(res.eta, samples));
    if (!res.report.success) {
        std::cerr << "target not reached: final error " << format_double(res.report.final_error)
                  << " >= eps; largest increase at stage '" << res.report.dominant_stage
                  << "', try adjusting " << res.report.suggested_knob << "\n";
        return kTargetNotReached;
    }
    return kOk;
}

int run_steer(Options& o, const Physics& ph, const PlanFlags& pf, const std::string& target,
              std::size_t N, double eps, double radius, const BrouwerOptions& bo, std::size_t samples) {
    const SolveConfig cfg = ph.config();
    const SineState u0 = parse_state_spec(ph.u0);
    const SineState u_hat = parse_state_spec(target);
    const ControlSignal h = parse_force_spec(ph.force, cfg.T, cfg.nu);
    if (radius <= 0.0) radius = default_functional_radius(eps);
    const FunctionalTarget ft = projection_functional(u_hat, N, radius);
    const SynthesisPlan plan = pf.build(u_hat, eps, o.config());
    const FunctionalResult res = steer_functional(u0, u_hat, ft, eps, h, plan, cfg, bo);
    json j = o.envelope("steer-functional");
    j["u0"] = ph.u0;
    j["target"] = target;
    j["N"] = N;
    j["radius"] = radius;
    j["report"] = to_json(res.report);
    j["control"] = control_json(res.eta, samples);
    o.emit(j, control_csv(res.eta, samples));
    if (!res.report.success) {
        std::cerr << "functional target not reached: residual "
                  << format_double(res.report.functional_residual) << ", distance "
                  << format_double(res.report.final_distance) << "\n";
        return kTargetNotReached;
    }
    return kOk;
}

int run_bench(Options& o, const Physics& ph, const std::vector<std::size_t>& ms, const std::string& amp) {
    SolveConfig cfg = ph.config();
    const SineState v = parse_state_spec(amp);
    const auto rows = hoelder_sweep(v, ms, cfg);
    std::vector<double> relax, ratio;
    for (const auto& r : rows) {
        relax.push_back(r.sample.relax_norm);
        ratio.push_back(r.sample.ratio);
    }
    json j = o.envelope("bench-hoelder");
    j["amplitude"] = amp;
    json jr = json::array();
    for (const auto& r : rows) {
        jr.push_back({{"m", r.m},
                      {"relax_norm", r.sample.relax_norm},
                      {"kf_norm", r.sample.kf_norm},
                      {"ratio", r.sample.ratio}});
    }
    j["rows"] = std::move(jr);
    if (rows.size() >= 2) {
        j["relax_slope"] = loglog_slope(to_doubles(ms), relax);
        j["ratio_max_over_min"] =
            *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
    }
    const std::string csv = hoelder_csv(rows);
    if (o.out().empty()) {
        std::cout << csv;
    } else {
        o.emit(j, csv);
    }
    return kOk;
}

int run_identities(Options& o, std::size_t max_k, double tol) {
    if (max_k < 1) throw InvalidArgument("--max-k must be >= 1");
    json j = o.envelope("verify-identities");
    json prod = json::array(), ladder = json::array();
    double worst = 0.0;
    for (std::size_t k = 1; k <= max_k; ++k) {
        const double e = product_identity_error(k);
        worst = std::max(worst, e);
        prod.push_back({{"j", k}, {"error", e}});
        FSpaceCertificate cert;
        double reassembly = 0.0, leakage = 0.0;
        try {
            f_space(k, &cert);
            reassembly = cert.max_reassembly_error;
            leakage = cert.max_leakage;
        } catch (const ConvergenceError&) {
            reassembly = leakage = std::numeric_limits<double>::infinity();
        }
        worst = std::max({worst, reassembly, leakage});
        ladder.push_back({{"k", k}, {"space", k + 1}, {"reassembly_error", reassembly}, {"leakage", leakage}});
    }
    j["product_identity"] = std::move(prod);
    j["ladder"] = std::move(ladder);
    j["max_error"] = worst;
    j["tolerance"] = tol;
    j["passed"] = worst <= tol;
    o.emit(j, "");
    return worst <= tol ? kOk : kNumericalFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral Burgers solver and low-mode control synthesis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // solve
    CLI::App* solve_cmd = app.add_subcommand("solve", "integrate the forced Burgers equation");
    Options solve_opts(solve_cmd);
    Physics solve_ph;
    solve_ph.nu = 1.0;
    solve_ph.add_to(solve_opts);
    std::size_t record_every = 1;
    solve_opts.add("--record-every", record_every, "record every n-th step");

    // synthesize
    CLI::App* syn_cmd = app.add_subcommand("synthesize", "build an E_2-valued control towards a target");
    Options syn_opts(syn_cmd);
    Physics syn_ph;
    syn_ph.add_to(syn_opts);
    PlanFlags syn_plan;
    syn_plan.add_to(syn_opts);
    std::string syn_target;
    double syn_eps = 0.2;
    std::size_t syn_samples = 2048;
    syn_opts.add("--target", syn_target, "target state spec");
    syn_opts.add("--eps", syn_eps, "target accuracy");
    syn_opts.add("--samples", syn_samples, "samples of the exported control");

    // steer-functional
    CLI::App* fc_cmd = app.add_subcommand("steer-functional", "match the first N coefficients exactly");
    Options fc_opts(fc_cmd);
    Physics fc_ph;
    fc_ph.add_to(fc_opts);
    PlanFlags fc_plan;
    fc_plan.add_to(fc_opts);
    std::string fc_target = "sin:3:1+sin:4:0.5";
    std::size_t fc_N = 2;
    double fc_eps = 0.3, fc_radius = 0.0;
    std::size_t fc_samples = 2048;
    BrouwerOptions bo;
    fc_opts.add("--target", fc_target, "target state spec");
    fc_opts.add("--N", fc_N, "number of matched coefficients");
    fc_opts.add("--eps", fc_eps, "L2 accuracy");
    fc_opts.add("--radius", fc_radius, "ball radius around F(target) (0: automatic)");
    fc_opts.add("--tol", bo.tol, "functional residual tolerance");
    fc_opts.add("--max-evals", bo.max_evals, "budget of synthesis runs");
    fc_opts.add("--samples", fc_samples, "samples of the exported control");

    // bench-hoelder
    CLI::App* bench_cmd = app.add_subcommand("bench-hoelder", "relaxation norm and Kf over alternating forcing");
    Options bench_opts(bench_cmd);
    Physics bench_ph;
    bench_ph.add_to(bench_opts);
    std::vector<std::size_t> bench_m{4, 16, 64, 256};
    std::string bench_amp = "sin:1:1";
    bench_opts.add("--m", bench_m, "half-period counts")->delimiter(',');
    bench_opts.add("--amp", bench_amp, "alternating value v (state spec)");

    // verify-identities
    CLI::App* id_cmd = app.add_subcommand("verify-identities", "check the product identity and the saturation ladder");
    Options id_opts(id_cmd);
    std::size_t max_k = 20;
    double id_tol = 1e-12;
    id_opts.add("--max-k", max_k, "largest mode index");
    id_opts.add("--tol", id_tol, "coefficient tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (solve_cmd->parsed()) {
            solve_opts.resolve();
            return run_solve(solve_opts, solve_ph, record_every);
        }
        if (syn_cmd->parsed()) {
            syn_opts.resolve();
            if (syn_target.empty()) throw InvalidArgument("--target is required");
            return run_synthesize(syn_opts, syn_ph, syn_plan, syn_target, syn_eps, syn_samples);
        }
        if (fc_cmd->parsed()) {
            fc_opts.resolve();
            return run_steer(fc_opts, fc_ph, fc_plan, fc_target, fc_N, fc_eps, fc_radius, bo, fc_samples);
        }
        if (bench_cmd->parsed()) {
            bench_opts.resolve();
            return run_bench(bench_opts, bench_ph, bench_m, bench_amp);
        }
        if (id_cmd->parsed()) {
            id_opts.resolve();
            return run_identities(id_opts, max_k, id_tol);
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const SolverError& e) {
        std::cerr << "numerical failure at t = " << format_double(e.time()) << ": " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kConfigError;
}
