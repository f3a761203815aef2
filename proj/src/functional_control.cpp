#include "bctl/functional_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "bctl/error.hpp"

namespace bctl {

FunctionalTarget projection_functional(const SineState& u_hat, std::size_t N, double r) {
    if (N == 0) throw InvalidArgument("projection_functional: N must be >= 1");
    if (!(r > 0.0)) throw InvalidArgument("projection_functional: radius must be positive");
    FunctionalTarget t;
    t.N = N;
    t.radius = r;
    t.F = [N](const SineState& u) {
        Vec y(N);
        for (std::size_t k = 1; k <= N; ++k) y[k - 1] = u.coeff(k);
        return y;
    };
    t.y_hat = t.F(u_hat);
    t.F_inv = [u_hat, N, y_hat = t.y_hat](const Vec& y) {
        if (y.size() != N) throw InvalidArgument("projection_functional: point has wrong dimension");
        SineState v = u_hat;
        for (std::size_t k = 1; k <= N; ++k) v.at(k) += y[k - 1] - y_hat[k - 1];
        return v;
    };
    return t;
}

double default_functional_radius(double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("default_functional_radius: eps must be positive");
    return 0.45 * eps / std::sqrt(0.5 * std::numbers::pi);
}

std::vector<Vec> sample_ball(const Vec& c, double r, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    std::vector<Vec> out;
    if (count == 0) return out;
    out.push_back(c);
    const double n = double(c.size());
    while (out.size() < count) {
        Vec d(c.size());
        double len = 0.0;
        for (double& x : d) {
            x = normal(rng);
            len += x * x;
        }
        len = std::sqrt(len);
        if (len == 0.0) continue;
        const double rad = r * std::pow(unif(rng), 1.0 / n);
        Vec y = c;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += rad * d[i] / len;
        out.push_back(std::move(y));
    }
    return out;
}

Vec clamp_to_ball(const Vec& y, const Vec& c, double r) {
    double len = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) len += (y[i] - c[i]) * (y[i] - c[i]);
    len = std::sqrt(len);
    if (len <= r) return y;
    Vec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = c[i] + (y[i] - c[i]) * (r / len);
    return out;
}

double sup_distance(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

namespace {

using Mat = std::vector<Vec>;

Mat identity(std::size_t n) {
    Mat m(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

// Solves J x = b by Gaussian elimination with partial pivoting; empty on a
// (numerically) singular matrix.
std::optional<Vec> linear_solve(Mat J, Vec b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(J[r][col]) > std::abs(J[piv][col])) piv = r;
        }
        if (std::abs(J[piv][col]) < 1e-12) return std::nullopt;
        std::swap(J[piv], J[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = J[r][col] / J[col][col];
            for (std::size_t c = col; c < n; ++c) J[r][c] -= f * J[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= J[i][c] * x[c];
        x[i] = s / J[i][i];
    }
    return x;
}

double sup_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

class Solver {
public:
    Solver(const std::function<Vec(const Vec&)>& phi, const Vec& y_hat, double r,
           const BrouwerOptions& opt)
        : phi_(phi), y_hat_(y_hat), r_(r), opt_(opt) {
        res_.residual = std::numeric_limits<double>::infinity();
    }

    BrouwerResult run() {
        const std::size_t n = y_hat_.size();
        const bool secant = opt_.secant && n <= 4;
        const bool grid = opt_.grid_fallback && n <= 2;
        double half = r_;
        Vec start = y_hat_;
        while (!done()) {
            local(start, secant);
            if (done() || !grid) break;
            grid_level(res_.y, half);
            half *= 2.0 / double(std::max<std::size_t>(opt_.grid_points, 3) - 1);
            start = res_.y;
        }
        res_.converged = res_.residual <= opt_.tol;
        return res_;
    }

private:
    bool done() const { return res_.residual <= opt_.tol || res_.evaluations >= opt_.max_evals; }

    // g(y) = Phi(y) - y_hat; tracks the best point.
    Vec residual_of(const Vec& y, const char* method) {
        const Vec p = phi_(y);
        ++res_.evaluations;
        Vec g(p.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = p[i] - y_hat_[i];
        const double r = sup_norm(g);
        if (r < res_.residual) {
            res_.residual = r;
            res_.y = y;
            res_.phi = p;
            res_.method = method;
        }
        return g;
    }

    void accept(const Vec& y, const Vec& g) {
        res_.iterates.push_back(y);
        res_.residuals.push_back(sup_norm(g));
    }

    void local(Vec y, bool secant) {
        const char* method = secant ? "secant" : "krasnoselskii";
        const std::size_t n = y.size();
        Vec g = residual_of(y, method);
        accept(y, g);
        Mat J = identity(n);
        double lambda = 1.0;
        while (!done()) {
            Vec neg(n);
            for (std::size_t i = 0; i < n; ++i) neg[i] = -g[i];
            Vec d = neg;
            if (secant) {
                if (auto x = linear_solve(J, neg)) {
                    d = *x;
                } else {
                    J = identity(n);
                }
            }
            Vec trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = y[i] + lambda * d[i];
            trial = clamp_to_ball(trial, y_hat_, r_);
            Vec s(n);
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = trial[i] - y[i];
                ss += s[i] * s[i];
            }
            if (ss == 0.0) return;
            const Vec gt = residual_of(trial, method);
            if (secant) {
                Vec js(n, 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) js[i] += J[i][j] * s[j];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = (gt[i] - g[i] - js[i]) / ss;
                    for (std::size_t j = 0; j < n; ++j) J[i][j] += w * s[j];
                }
            }
            if (sup_norm(gt) < sup_norm(g)) {
                y = trial;
                g = gt;
                accept(y, g);
                lambda = std::min(1.0, 2.0 * lambda);
            } else {
                lambda *= 0.5;
                if (lambda < 1.0 / 64.0) return;
            }
        }
    }

    void grid_level(const Vec& centre, double half) {
        const std::size_t n = centre.size();
        const std::size_t g = std::max<std::size_t>(opt_.grid_points, 3);
        std::vector<std::size_t> idx(n, 0);
        for (;;) {
            Vec y(n);
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = centre[i] + half * (2.0 * double(idx[i]) / double(g - 1) - 1.0);
            }
            if (clamp_to_ball(y, y_hat_, r_) == y && y != centre) {
                if (done()) return;
                residual_of(y, "grid");
            }
            std::size_t i = 0;
            while (i < n && ++idx[i] == g) idx[i++] = 0;
            if (i == n) break;
        }
        if (res_.method == "grid") {
            res_.iterates.push_back(res_.y);
            res_.residuals.push_back(res_.residual);
        }
    }

    const std::function<Vec(const Vec&)>& phi_;
    Vec y_hat_;
    double r_;
    BrouwerOptions opt_;
    BrouwerResult res_;
};

}  // namespace

nlohmann::json to_json(const BrouwerResult& r) {
    return {{"y", r.y},
            {"phi", r.phi},
            {"residual", r.residual},
            {"converged", r.converged},
            {"evaluations", r.evaluations},
            {"iterates", r.iterates},
            {"residual_history", r.residuals},
            {"method", r.method}};
}

BrouwerResult brouwer_solve(const std::function<Vec(const Vec&)>& phi, const Vec& y_hat, double r,
                            const BrouwerOptions& opt) {
    if (y_hat.empty()) throw InvalidArgument("brouwer_solve: empty target");
    if (!(r > 0.0)) throw InvalidArgument("brouwer_solve: radius must be positive");
    if (!(opt.tol > 0.0) || opt.max_evals == 0) {
        throw InvalidArgument("brouwer_solve: tol must be positive and max_evals >= 1");
    }
    return Solver(phi, y_hat, r, opt).run();
}

double bisect_scalar(const std::function<double(double)>& phi, double y_hat, double r, double tol,
                     std::size_t* evaluations) {
    if (!(r > 0.0) || !(tol > 0.0)) throw InvalidArgument("bisect_scalar: r and tol must be positive");
    std::size_t count = 0;
    auto g = [&](double y) {
        ++count;
        return phi(y) - y_hat;
    };
    double a = y_hat - r, b = y_hat + r;
    double ga = g(a), gb = g(b);
    if (ga == 0.0 || gb == 0.0 || (ga < 0.0) != (gb < 0.0)) {
        if (ga == 0.0) b = a;
        if (gb == 0.0) a = b;
    } else {
        throw ConvergenceError("bisect_scalar: no sign change on the interval");
    }
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if (gm == 0.0) {
            a = b = mid;
        } else if ((gm < 0.0) == (ga < 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    if (evaluations) *evaluations = count;
    return 0.5 * (a + b);
}

FunctionalCheck check_target(const FunctionalTarget& target, const SineState& u_hat,
                             std::size_t samples, std::uint64_t seed) {
    if (!target.F || !target.F_inv) throw InvalidArgument("functional target: F and F_inv are required");
    if (target.y_hat.size() != target.N) throw InvalidArgument("functional target: y_hat must have N entries");
    FunctionalCheck c;
    c.centre_defect = l2_norm(target.F_inv(target.y_hat) - u_hat);
    for (const Vec& y : sample_ball(target.y_hat, target.radius, samples, seed)) {
        const SineState v = target.F_inv(y);
        const Vec back = target.F(v);
        if (back.size() != target.N) throw InvalidArgument("functional target: F must return N values");
        c.right_inverse_defect = std::max(c.right_inverse_defect, sup_distance(back, y));
        c.lift_radius = std::max(c.lift_radius, l2_norm(v - u_hat));
    }
    return c;
}

nlohmann::json to_json(const FunctionalReport& r) {
    nlohmann::json j = {{"check",
                         {{"right_inverse_defect", r.check.right_inverse_defect},
                          {"centre_defect", r.check.centre_defect},
                          {"lift_radius", r.check.lift_radius}}},
                        {"epsilon", r.epsilon},
                        {"pinned_dt", r.pinned_dt},
                        {"brouwer", to_json(r.brouwer)},
                        {"max_displacement", r.max_displacement},
                        {"final_values", r.final_values},
                        {"functional_residual", r.functional_residual},
                        {"final_distance", r.final_distance},
                        {"success", r.success}};
    if (r.final_synthesis) j["final_synthesis"] = to_json(*r.final_synthesis);
    return j;
}

FunctionalMap::FunctionalMap(SineState u0, FunctionalTarget target, ControlSignal h,
                             SynthesisPlan plan, SolveConfig cfg)
    : u0_(std::move(u0)),
      target_(std::move(target)),
      h_(std::move(h)),
      plan_(std::move(plan)),
      cfg_(std::move(cfg)) {
    plan_.validate();
}

std::vector<long long> FunctionalMap::key(const Vec& y) {
    std::vector<long long> k(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) k[i] = std::llround(y[i] / 1e-9);
    return k;
}

Vec FunctionalMap::operator()(const Vec& y) {
    const auto k = key(y);
    if (auto it = cache_.find(k); it != cache_.end()) return it->second.phi;
    SynthesisResult res = synthesize(u0_, target_.F_inv(y), h_, plan_, cfg_);
    if (plan_.dt <= 0.0) plan_.dt = res.report.final_dt;
    Vec p = target_.F(res.report.final_state);
    cache_.emplace(k, Entry{y, p, std::move(res)});
    return p;
}

const SynthesisResult& FunctionalMap::result(const Vec& y) const {
    auto it = cache_.find(key(y));
    if (it == cache_.end()) throw InvalidArgument("FunctionalMap: point was never evaluated");
    return it->second.result;
}

double FunctionalMap::max_displacement() const {
    double m = 0.0;
    for (const auto& [k, e] : cache_) m = std::max(m, sup_distance(e.phi, e.y));
    return m;
}

FunctionalResult steer_functional(const SineState& u0, const SineState& u_hat,
                                  const FunctionalTarget& target, double eps,
                                  const ControlSignal& h, SynthesisPlan plan,
                                  const SolveConfig& cfg, const BrouwerOptions& opt) {
    if (!(eps > 0.0)) throw InvalidArgument("steer_functional: eps must be positive");
    plan.validate();
    FunctionalReport rep;
    rep.epsilon = eps;
    rep.check = check_target(target, u_hat);
    if (rep.check.right_inverse_defect > 1e-10 || rep.check.centre_defect > 1e-10) {
        throw InvalidArgument("steer_functional: F_inv is not a right inverse of F on the ball");
    }
    if (!(rep.check.lift_radius < 0.5 * eps)) {
        throw InvalidArgument("steer_functional: F_inv moves the target by " +
                              std::to_string(rep.check.lift_radius) +
                              " on the ball, more than eps/2; shrink the radius");
    }
    FunctionalMap phi(u0, target, h, std::move(plan), cfg);
    rep.brouwer = brouwer_solve(std::ref(phi), target.y_hat, target.radius, opt);
    rep.pinned_dt = phi.pinned_dt();
    rep.max_displacement = phi.max_displacement();
    const SynthesisResult& best = phi.result(rep.brouwer.y);
    const SineState& end = best.report.final_state;
    rep.final_values = target.F(end);
    rep.functional_residual = sup_distance(rep.final_values, target.y_hat);
    rep.final_distance = l2_norm(end - u_hat);
    rep.success = rep.brouwer.converged && rep.final_distance < eps;
    rep.final_synthesis = best.report;
    return {best.eta, std::move(rep)};
}

}  // namespace bctl
