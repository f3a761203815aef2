#include "bctl/control_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bctl/error.hpp"
#include "bctl/io.hpp"
#include "quadrature.hpp"

namespace bctl {

namespace {

std::vector<double> cut_grid(const ControlSignal& f, double T) {
    std::vector<double> g{0.0};
    for (double b : f.breakpoints()) {
        if (b > g.back() && b < T) g.push_back(b);
    }
    g.push_back(T);
    return g;
}

}  // namespace

double relaxation_norm(const ControlSignal& f, int s, double T) {
    if (!(T > 0.0)) throw InvalidArgument("relaxation_norm: T must be positive");
    T = std::min(T, f.horizon());
    const auto grid = cut_grid(f, T);
    const bool linear_primitive = f.is_piecewise_constant();
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const std::size_t sub = linear_primitive ? 1 : 64;
        for (std::size_t j = 1; j <= sub; ++j) {
            const double t = grid[i] + (grid[i + 1] - grid[i]) * double(j) / double(sub);
            best = std::max(best, sobolev_norm(f.primitive(t), s));
        }
    }
    return best;
}

Trajectory heat_source_solve(const ControlSignal& f, const SolveConfig& cfg) {
    cfg.validate();
    if (f.horizon() + 1e-9 * cfg.T < cfg.T) {
        throw InvalidArgument("heat_source_solve: control horizon shorter than T");
    }
    const std::size_t M = cfg.modes;
    std::vector<double> lam(M);
    for (std::size_t k = 1; k <= M; ++k) lam[k - 1] = cfg.nu * double(k * k);

    const auto grid = cut_grid(f, cfg.T);
    const bool exact = f.is_piecewise_constant();
    std::vector<double> u(M, 0.0);
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.emplace_back(u);
    std::size_t step_index = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid[i];
        const double len = grid[i + 1] - a;
        const auto n = std::max<std::size_t>(1, std::size_t(std::ceil(len / cfg.dt - 1e-9)));
        const double h = len / double(n);
        const SineState held = exact ? f.value(a + 0.5 * len) : SineState();
        for (std::size_t j = 0; j < n; ++j) {
            const double t0 = a + double(j) * h;
            if (exact) {
                for (std::size_t k = 0; k < M; ++k) {
                    const double e = std::exp(-lam[k] * h);
                    u[k] = e * u[k] + held.coeff(k + 1) * (-std::expm1(-lam[k] * h)) / lam[k];
                }
            } else {
                std::vector<double> acc(M, 0.0);
                const double t1 = t0 + h;
                const double half = 0.5 * h;
                const double mid = t0 + half;
                for (std::size_t q = 0; q < detail::kGaussNodes.size(); ++q) {
                    const double r = mid + half * detail::kGaussNodes[q];
                    const SineState v = f.value(r);
                    for (std::size_t k = 0; k < M; ++k) {
                        acc[k] += half * detail::kGaussWeights[q] * std::exp(-lam[k] * (t1 - r)) *
                                  v.coeff(k + 1);
                    }
                }
                for (std::size_t k = 0; k < M; ++k) u[k] = std::exp(-lam[k] * h) * u[k] + acc[k];
            }
            ++step_index;
            const bool last = (i + 2 == grid.size()) && (j + 1 == n);
            if (last || step_index % cfg.record_every == 0) {
                traj.times.push_back(last ? cfg.T : (j + 1 == n ? grid[i + 1] : t0 + h));
                traj.states.emplace_back(u);
            }
        }
    }
    return traj;
}

HoelderSample hoelder_ratio(const ControlSignal& f, const SolveConfig& cfg) {
    HoelderSample out;
    out.relax_norm = relaxation_norm(f, 0, cfg.T);
    out.kf_norm = xt_norm(heat_source_solve(f, cfg));
    out.ratio = out.relax_norm > 0.0 ? out.kf_norm / std::cbrt(out.relax_norm) : 0.0;
    return out;
}

ControlSignal alternating_control(const SineState& v, std::size_t m, double T) {
    if (m == 0) throw InvalidArgument("alternating_control: m must be >= 1");
    if (!(T > 0.0)) throw InvalidArgument("alternating_control: T must be positive");
    std::vector<double> d(2 * m, T / double(2 * m));
    std::vector<SineState> vals;
    vals.reserve(2 * m);
    for (std::size_t i = 0; i < 2 * m; ++i) vals.push_back(i % 2 == 0 ? v : -v);
    return ControlSignal::piecewise(std::move(d), std::move(vals));
}

std::vector<HoelderSweepRow> hoelder_sweep(const SineState& v, const std::vector<std::size_t>& ms,
                                           const SolveConfig& cfg) {
    std::vector<HoelderSweepRow> rows;
    for (std::size_t m : ms) rows.push_back({m, hoelder_ratio(alternating_control(v, m, cfg.T), cfg)});
    return rows;
}

std::string hoelder_csv(const std::vector<HoelderSweepRow>& rows) {
    std::ostringstream os;
    os << "m,relax_norm,kf_norm,ratio\n";
    for (const auto& r : rows) {
        os << r.m << ',' << format_double(r.sample.relax_norm) << ','
           << format_double(r.sample.kf_norm) << ',' << format_double(r.sample.ratio) << '\n';
    }
    return os.str();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("loglog_slope: need at least two paired points");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bctl
