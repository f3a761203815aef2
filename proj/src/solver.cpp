#include "bctl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bctl/error.hpp"
#include "bctl/io.hpp"

namespace bctl {

namespace {

constexpr double kBlowUp = 1e12;
constexpr double kStability = 2.8;  // RK4 reach along the imaginary axis

std::string at_time(double t) {
    std::ostringstream os;
    os.precision(17);
    os << t;
    return os.str();
}

// Interior break times of all controls, merged and sorted.
std::vector<double> step_cuts(const std::vector<const ControlSignal*>& controls, double T) {
    std::vector<double> cuts;
    for (const auto* c : controls) {
        auto b = c->breakpoints();
        cuts.insert(cuts.end(), b.begin(), b.end());
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> out{0.0};
    const double tol = 1e-13 * T;
    for (double t : cuts) {
        if (t > out.back() + tol && t < T - tol) out.push_back(t);
    }
    out.push_back(T);
    return out;
}

class Integrator {
public:
    Integrator(const ControlSignal& v, const ControlSignal& w, const ControlSignal& f,
               const SolveConfig& cfg, bool has_vw)
        : v_(v), w_(w), f_(f), has_vw_(has_vw), m_(cfg.modes),
          lam_(m_), ehalf_(m_), efull_(m_), k1_(m_), k2_(m_), k3_(m_), k4_(m_), tmp_(m_),
          vbuf_(m_), wbuf_(m_), fbuf_(m_), bbuf_(m_), shift_(m_) {
        for (std::size_t k = 1; k <= m_; ++k) lam_[k - 1] = -cfg.nu * double(k * k);
    }

    // One Lawson RK4 step of size h from time t; u is updated in place.
    void step(std::vector<double>& u, double t, double h, Side end_side) {
        if (h != last_h_) {
            for (std::size_t k = 0; k < m_; ++k) {
                ehalf_[k] = std::exp(lam_[k] * 0.5 * h);
                efull_[k] = std::exp(lam_[k] * h);
            }
            last_h_ = h;
        }
        rhs(t, Side::right, u, k1_);
        check_cfl(t, h);
        for (std::size_t k = 0; k < m_; ++k) tmp_[k] = ehalf_[k] * (u[k] + 0.5 * h * k1_[k]);
        rhs(t + 0.5 * h, Side::right, tmp_, k2_);
        for (std::size_t k = 0; k < m_; ++k) tmp_[k] = ehalf_[k] * u[k] + 0.5 * h * k2_[k];
        rhs(t + 0.5 * h, Side::right, tmp_, k3_);
        for (std::size_t k = 0; k < m_; ++k) tmp_[k] = efull_[k] * u[k] + h * ehalf_[k] * k3_[k];
        rhs(t + h, end_side, tmp_, k4_);
        for (std::size_t k = 0; k < m_; ++k) {
            u[k] = efull_[k] * u[k] +
                   h / 6.0 * (efull_[k] * k1_[k] + 2.0 * ehalf_[k] * (k2_[k] + k3_[k]) + k4_[k]);
        }
        for (std::size_t k = 0; k < m_; ++k) {
            if (!std::isfinite(u[k]) || std::abs(u[k]) > kBlowUp) {
                throw SolverError("solution blow-up at t=" + at_time(t + h) + ": coefficient a_" +
                                      std::to_string(k + 1) + " left the admissible range",
                                  t + h);
            }
        }
    }

private:
    // N(t, u) = f + nu d_xx w - B(u + v), truncated to M modes.
    void rhs(double t, Side side, const std::vector<double>& u, std::vector<double>& out) {
        f_.value_into(t, fbuf_, side);
        if (has_vw_) {
            v_.value_into(t, vbuf_, side);
            w_.value_into(t, wbuf_, side);
            for (std::size_t k = 0; k < m_; ++k) shift_[k] = u[k] + vbuf_[k];
            burgers_B_into(shift_, bbuf_);
            for (std::size_t k = 0; k < m_; ++k) {
                out[k] = fbuf_[k] + lam_[k] * wbuf_[k] - bbuf_[k];
            }
        } else {
            burgers_B_into(u, bbuf_);
            for (std::size_t k = 0; k < m_; ++k) out[k] = fbuf_[k] - bbuf_[k];
        }
        last_sup_ = 0.0;
        for (std::size_t k = 0; k < m_; ++k) {
            last_sup_ += std::abs(has_vw_ ? shift_[k] : u[k]);
        }
    }

    void check_cfl(double t, double h) const {
        const double courant = h * double(m_) * last_sup_;
        if (courant > kStability) {
            throw SolverError("stability bound violated at t=" + at_time(t) +
                                  ": dt*M*sup|u| = " + at_time(courant) + " > 2.8; use dt <= " +
                                  at_time(kStability / (double(m_) * last_sup_)),
                              t);
        }
    }

    const ControlSignal& v_;
    const ControlSignal& w_;
    const ControlSignal& f_;
    bool has_vw_;
    std::size_t m_;
    std::vector<double> lam_, ehalf_, efull_, k1_, k2_, k3_, k4_, tmp_;
    std::vector<double> vbuf_, wbuf_, fbuf_, bbuf_, shift_;
    double last_h_ = -1.0;
    double last_sup_ = 0.0;
};

Trajectory integrate(const SineState& u0, const ControlSignal& v, const ControlSignal& w,
                     const ControlSignal& f, const SolveConfig& cfg, bool has_vw) {
    cfg.validate();
    if (!u0.is_finite()) throw InvalidArgument("initial state has non-finite coefficients");
    std::vector<const ControlSignal*> controls{&f};
    if (has_vw) {
        controls.push_back(&v);
        controls.push_back(&w);
    }
    for (const auto* c : controls) {
        if (c->horizon() + 1e-9 * cfg.T < cfg.T) {
            throw InvalidArgument("control horizon " + at_time(c->horizon()) +
                                  " shorter than solve horizon " + at_time(cfg.T));
        }
    }
    const auto cuts = step_cuts(controls, cfg.T);

    Integrator rk(v, w, f, cfg, has_vw);
    std::vector<double> u(cfg.modes, 0.0);
    for (std::size_t k = 1; k <= std::min(cfg.modes, u0.order()); ++k) u[k - 1] = u0.coeff(k);

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.emplace_back(u);
    std::size_t step_index = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double len = cuts[i + 1] - a;
        const auto n = std::max<std::size_t>(cfg.min_steps_per_piece,
                                             std::size_t(std::ceil(len / cfg.dt - 1e-9)));
        const double h = len / double(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double t = a + double(j) * h;
            rk.step(u, t, h, j + 1 == n ? Side::left : Side::right);
            ++step_index;
            const bool last = (i + 2 == cuts.size()) && (j + 1 == n);
            if (last) {
                traj.times.push_back(cfg.T);
                traj.states.emplace_back(u);
            } else if (step_index % cfg.record_every == 0) {
                traj.times.push_back(j + 1 == n ? cuts[i + 1] : t + h);
                traj.states.emplace_back(u);
            }
        }
    }
    return traj;
}

}  // namespace

void SolveConfig::validate() const {
    if (!(nu > 0.0)) throw InvalidArgument("SolveConfig: nu must be positive");
    if (!(T > 0.0)) throw InvalidArgument("SolveConfig: T must be positive");
    if (!(dt > 0.0) || dt > T) throw InvalidArgument("SolveConfig: need 0 < dt <= T");
    if (modes == 0) throw InvalidArgument("SolveConfig: modes must be >= 1");
    if (record_every == 0) throw InvalidArgument("SolveConfig: record_every must be >= 1");
    if (min_steps_per_piece == 0) {
        throw InvalidArgument("SolveConfig: min_steps_per_piece must be >= 1");
    }
}

Trajectory solve(const SineState& u0, const ControlSignal& f, const SolveConfig& cfg) {
    static const ControlSignal kZero = ControlSignal::zero(1.0);
    return integrate(u0, kZero, kZero, f, cfg, false);
}

Trajectory solve_general(const SineState& u0, const ControlSignal& v, const ControlSignal& w,
                         const ControlSignal& f, const SolveConfig& cfg) {
    return integrate(u0, v, w, f, cfg, true);
}

std::vector<std::pair<double, double>> energy_profile(const Trajectory& traj, double nu) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.size());
    double integral = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double g = sobolev_norm(traj.states[i], 1);
        const double g2 = g * g;
        if (i > 0) integral += 0.5 * (traj.times[i] - traj.times[i - 1]) * (g2 + prev);
        prev = g2;
        const double l2 = l2_norm(traj.states[i]);
        out.emplace_back(traj.times[i], l2 * l2 + 2.0 * nu * integral);
    }
    return out;
}

double xt_norm(const Trajectory& traj) {
    double sup = 0.0;
    double integral = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        sup = std::max(sup, l2_norm(traj.states[i]));
        const double g = sobolev_norm(traj.states[i], 1);
        if (i > 0) integral += 0.5 * (traj.times[i] - traj.times[i - 1]) * (g * g + prev);
        prev = g * g;
    }
    return sup + std::sqrt(integral);
}

std::string trajectory_csv(const Trajectory& traj) {
    std::size_t m = 0;
    for (const auto& s : traj.states) m = std::max(m, s.order());
    std::ostringstream os;
    os << "t";
    for (std::size_t k = 1; k <= m; ++k) os << ",a" << k;
    os << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << format_double(traj.times[i]);
        for (std::size_t k = 1; k <= m; ++k) os << ',' << format_double(traj.states[i].coeff(k));
        os << '\n';
    }
    return os.str();
}

nlohmann::json trajectory_json(const Trajectory& traj, const SolveConfig& cfg) {
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        frames.push_back({{"t", traj.times[i]}, {"coeffs", traj.states[i].vec()}});
    }
    return {{"format", "bctl.trajectory.v1"},
            {"config",
             {{"nu", cfg.nu},
              {"T", cfg.T},
              {"dt", cfg.dt},
              {"modes", cfg.modes},
              {"record_every", cfg.record_every},
              {"min_steps_per_piece", cfg.min_steps_per_piece}}},
            {"frames", std::move(frames)}};
}

ControlSignal manufactured_forcing(const SineState& w, double nu, double T) {
    const SineState lin = -(w + nu * laplacian(w));
    const SineState quad = burgers_B(w);
    const std::size_t order = std::max(lin.order(), quad.order());
    return ControlSignal::analytic(
        "manufactured", {{"w", w.vec()}, {"nu", nu}}, T,
        [lin, quad, order](double t) {
            return (std::exp(-t) * lin + std::exp(-2.0 * t) * quad).resized(order);
        },
        {},
        [lin, quad, order](double t) {
            return (-std::expm1(-t) * lin - 0.5 * std::expm1(-2.0 * t) * quad).resized(order);
        });
}

}  // namespace bctl
