"""Independent reference values for the numerical tests.

Nothing here imports thermoweyl.  Test functions are written out as plain
callables, integrals go through mpmath or scipy.integrate.quad, and the
Fock-space reference is built from Kronecker products instead of bit
strings.  Running this file regenerates ``data/oracle_values.json``; the
tests compare the library against that frozen file.
"""

from __future__ import annotations

import json
import math
from functools import reduce
from pathlib import Path

import mpmath as mp
import numpy as np
from scipy import integrate

DATA = Path(__file__).with_name("data") / "oracle_values.json"
mp.mp.dps = 30


# ---------------------------------------------------------------------------
# symplectic form


def gauss(x, c=0.0, w=1.0):
    return math.exp(-(((x - c) / w) ** 2))


def dgauss(x, c=0.0, w=1.0):
    return -2.0 * (x - c) / w**2 * gauss(x, c, w)


def sigma_quad(f, df, g, dg, lo=-12.0, hi=12.0, points=None):
    """(1/4pi) int (f' g - f g') with adaptive quadrature."""
    val, _ = integrate.quad(lambda x: df(x) * g(x) - f(x) * dg(x), lo, hi,
                            points=points, limit=400, epsabs=1e-14, epsrel=1e-13)
    return val / (4.0 * math.pi)


def ramp_pair_sigma(eps, t):
    """sigma(Ramp(eps), x -> Ramp(eps)(x + t)) derived by hand.

    Both functions have derivative -1/eps on a window of width eps, the
    second shifted left by t; the overlap integral gives
    (1/4pi) sgn(t) (2r - r^2) for r = |t|/eps < 1 and (1/4pi) sgn(t) beyond.
    """
    r = abs(t) / eps
    core = 1.0 if r >= 1.0 else 2.0 * r - r * r
    return math.copysign(core, t) / (4.0 * math.pi)


def two_window_average(f, delta, eps):
    """-(1/(2 pi eps)) (int_{-eps}^0 f - int_{-eps-delta}^{-delta} f)."""
    a, _ = integrate.quad(f, -eps, 0.0, epsabs=1e-14)
    b, _ = integrate.quad(f, -eps - delta, -delta, epsabs=1e-14)
    return -(a - b) / (2.0 * math.pi * eps)


# ---------------------------------------------------------------------------
# thermal quadratic form and covariance


def gauss_ft(p, w=1.0):
    return w * math.sqrt(math.pi) * math.exp(-0.25 * (p * w) ** 2)


def quadratic_gauss(beta, w=1.0):
    """int dp/(2pi)^2 p/(1 - e^{-beta p}) |g~(p)|^2 with mpmath."""
    def integrand(p):
        if p == 0:
            weight = 1 / mp.mpf(beta)
        else:
            weight = p / -mp.expm1(-beta * p)
        return weight * (w * mp.sqrt(mp.pi) * mp.exp(-(p * w) ** 2 / 4)) ** 2
    val = mp.quad(integrand, [-mp.inf, -1, 0, 1, mp.inf])
    return float(val / (2 * mp.pi) ** 2)


def covariance_gauss_position(beta, eps, w=1.0):
    """omega(j_g j_g) from the sinh^-2 kernel against the autocorrelation.

    The autocorrelation of exp(-(x/w)^2) is w sqrt(pi/2) exp(-u^2/(2 w^2)).
    """
    def corr(u):
        return w * mp.sqrt(mp.pi / 2) * mp.exp(-u * u / (2 * w * w))

    def integrand(u):
        z = u + 1j * eps
        return -corr(u) / (4 * beta**2 * mp.sinh(mp.pi * z / beta) ** 2)

    pts = [-30 * w, -1, -0.1, -eps * 10, 0, eps * 10, 0.1, 1, 30 * w]
    val = mp.quad(integrand, pts, maxdegree=10)
    return complex(val)


# ---------------------------------------------------------------------------
# correlators


def bare_series_mp(u, beta, eps):
    """-(1/2pi) sum_{n in Z} (-1)^n / (i z - n beta) summed by mpmath."""
    z = mp.mpc(u, eps)
    iz = 1j * z
    s = mp.nsum(lambda n: (-1) ** int(n) * 2 * iz / (iz * iz - (n * beta) ** 2), [1, mp.inf])
    return complex(-(1 / iz + s) / (2 * mp.pi))


def bare_closed_mp(u, beta, eps):
    z = mp.mpc(u, eps)
    return complex(1j / (2 * beta * mp.sinh(mp.pi * z / beta)))


def smeared_commutator_6pi_mp(g, beta, eps):
    """int g(u) (-i(-1/s(u+i eps))^3 + i(-1/s(u-i eps))^3) du by mpmath."""
    def s(z):
        return 2 * beta * mp.sinh(mp.pi * z / beta)

    def integrand(u):
        up = (-1 / s(mp.mpc(u, eps))) ** 3
        dn = (-1 / s(mp.mpc(u, -eps))) ** 3
        return g(u) * (-1j * up + 1j * dn)

    pts = [-15, -3, -1, -0.3, -30 * eps, -5 * eps, -eps, 0, eps, 5 * eps, 30 * eps,
           0.3, 1, 3, 15]
    return complex(mp.quad(integrand, pts, maxdegree=12))


def anticommutator_6pi_target(g0, g2, beta):
    return -(g2 - (math.pi / beta) ** 2 * g0) / (8 * math.pi**2)


# ---------------------------------------------------------------------------
# Fock space by Kronecker products


def jordan_wigner(n_modes):
    """Dense annihilators c_a; mode a is bit a of the basis index."""
    sz = np.diag([1.0, -1.0])
    low = np.array([[0.0, 1.0], [0.0, 0.0]])
    eye = np.eye(2)
    ops = []
    for a in range(n_modes):
        # bit a is the a-th least significant; kron puts the last factor lowest
        factors = [eye] * (n_modes - a - 1) + [low] + [sz] * a
        ops.append(reduce(np.kron, factors))
    return ops


def fock_commutator(kf, kg, momenta, beta):
    """<[J_f, J_g]> with dense matrices and the Gibbs state exp(-beta H)."""
    n = len(momenta)
    c = jordan_wigner(n)
    cd = [m.conj().T for m in c]
    jf = sum(kf[a, b] * cd[a] @ c[b] for a in range(n) for b in range(n))
    jg = sum(kg[a, b] * cd[a] @ c[b] for a in range(n) for b in range(n))
    h = sum(momenta[a] * cd[a] @ c[a] for a in range(n))
    w = np.exp(-beta * np.real(np.diag(h)))
    w /= w.sum()
    comm = jf @ jg - jg @ jf
    return complex(np.dot(w, np.diag(comm)))


def lattice_kernel(ft, momenta, box):
    diff = momenta[None, :] - momenta[:, None]
    return np.vectorize(ft)(diff) / box


# ---------------------------------------------------------------------------
# regeneration


def _pair(z):
    return [z.real, z.imag]


def build():
    out = {}
    g, dg = gauss, dgauss

    def xg(x):
        return x * gauss(x)

    def dxg(x):
        return gauss(x) + x * dgauss(x)

    out["sigma_gauss_xgauss"] = sigma_quad(g, dg, xg, dxg)
    out["sigma_gauss_pair"] = sigma_quad(lambda x: gauss(x, 0.3, 0.8), lambda x: dgauss(x, 0.3, 0.8),
                                         lambda x: gauss(x, -0.4, 1.3), lambda x: dgauss(x, -0.4, 1.3))
    out["sigma_gauss_xgauss_w2"] = sigma_quad(lambda x: gauss(x, 0, 2), lambda x: dgauss(x, 0, 2),
                                              lambda x: x * gauss(x, 0, 2),
                                              lambda x: gauss(x, 0, 2) + x * dgauss(x, 0, 2),
                                              lo=-25, hi=25)
    out["two_window_gauss_5_0.5"] = two_window_average(g, 5.0, 0.5)
    out["two_window_gauss_50_1e-3"] = two_window_average(g, 50.0, 1e-3)
    out["quadratic_gauss_beta1"] = quadratic_gauss(1.0)
    out["quadratic_gauss_beta_pi"] = quadratic_gauss(math.pi)
    cov = covariance_gauss_position(math.pi, 1e-4)
    out["covariance_gauss_beta_pi_eps1e-4"] = _pair(cov)
    out["bare_series"] = [
        {"u": u, "beta": beta, "eps": 1e-3,
         "series": _pair(bare_series_mp(u, beta, 1e-3)),
         "closed": _pair(bare_closed_mp(u, beta, 1e-3))}
        for beta in (math.pi, 1.0) for u in (0.3, 1.0, 2.5)]
    g6 = lambda u: mp.exp(-u * u)  # noqa: E731
    fixed = smeared_commutator_6pi_mp(g6, math.pi, 1e-2)
    out["smeared_6pi_gauss_beta_pi_eps1e-2"] = _pair(fixed)
    out["anticommutator_6pi_gauss_beta_pi"] = anticommutator_6pi_target(1.0, -2.0, math.pi)
    box, m, beta = 10.0, 2, 2.0
    k = 2 * math.pi * np.arange(-m, m + 1) / box
    kf = lattice_kernel(lambda p: gauss_ft(p, 1.0), k, box)
    kg = lattice_kernel(lambda p: 1j * p * 0.5 * gauss_ft(p, 1.0), k, box)
    val = fock_commutator(kf, kg, k, beta)
    out["fock_commutator_L10_M2_beta2"] = _pair(val)
    return out


if __name__ == "__main__":
    DATA.parent.mkdir(exist_ok=True)
    DATA.write_text(json.dumps(build(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {DATA}")
