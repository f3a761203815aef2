"""Independent reference values for the unit tests.

Products are computed by adaptive quadrature of u u_x against sin(kx);
the Galerkin run uses a dealiased discrete sine transform for the quadratic
term and scipy's DOP853 at tight tolerances. Run with python3 and paste the
output into tests/oracle_values.hpp.
"""
import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.fft import dst, idst


def state(coeffs):
    return lambda x: sum(a * np.sin((k + 1) * x) for k, a in enumerate(coeffs))


def dstate(coeffs):
    return lambda x: sum(a * (k + 1) * np.cos((k + 1) * x) for k, a in enumerate(coeffs))


def project(fun, order):
    return [2 / np.pi * quad(lambda x: fun(x) * np.sin(k * x), 0, np.pi, limit=200, epsabs=1e-14)[0]
            for k in range(1, order + 1)]


def fmt(name, vals):
    body = ", ".join(f"{v:.17g}" for v in vals)
    return f"inline const std::vector<double> {name}{{{body}}};"


u = [1.0, 0.5, -0.3]
B = project(lambda x: state(u)(x) * dstate(u)(x), 6)
print(fmt("kBurgersB", B))

xi, xp = [0.0, 0.7, 0.0, -0.2], [0.4, 1.1]
S = project(lambda x: state(xi)(x) * dstate(xp)(x) + state(xp)(x) * dstate(xi)(x), 6)
print(fmt("kSymProduct", S))

# Galerkin reference: M modes, nu, forcing f = const.
M, nu, T = 32, 0.1, 1.0
n = 4 * M
x = np.pi * np.arange(1, n) / n
k = np.arange(1, M + 1)
S_ = np.sin(np.outer(x, k))
C_ = np.cos(np.outer(x, k))
proj = 2.0 / n * np.sin(np.outer(k, x))  # exact for degree < 2n trig polynomials


def rhs(t, a, f):
    uu = S_ @ a
    ux = C_ @ (k * a)
    return -nu * k**2 * a - proj @ (uu * ux) + f


a0 = np.zeros(M); a0[0] = 1.0; a0[1] = 0.5
f = np.zeros(M); f[0] = 0.2; f[2] = -0.1
sol = solve_ivp(rhs, (0, T), a0, args=(f,), method="DOP853", rtol=1e-13, atol=1e-15)
print(fmt("kGalerkinTerminal", sol.y[:8, -1]))
