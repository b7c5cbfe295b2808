"""Thermal two-point functions of the bare fermion and of the anyon fields.

With s(z) = 2 beta sinh(pi z / beta):

* <psi*(x) psi(x')>  = i / s(u + i eps),   u = x - x'
* <psi(x') psi*(x)>  = -i / s(u - i eps)
* S_alpha(u)         = (i / s(u + i eps)) ** (alpha / 2 pi)   (principal branch)

For 0 < Im z < beta the function i / s(z) stays in the right half plane and
-1 / s(z) in the upper half plane, so principal powers are analytic there and
boundary values, strip continuations and contour shifts are all consistent.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import (BranchAmbiguity, ExtrapolationFailure, InsideCutoff,
                     InvalidKleinVector)
from .quadrature import integrate, richardson
from .symplectic import ThermalParams, thermal_quadratic
from .testfn import TestFn, reversed_ramp
from .weyl import unit_phase

TWO_PI = 2.0 * math.pi
BRANCH_TOL = 1e-12
MULTIPLE_TOL = 1e-12
# local series used for the smeared commutator near the coincident point
TAYLOR_ORDER = 12
TAYLOR_RADIUS = 1e-2


def _inv_s(z, beta):
    """1 / s(z), evaluated without overflow for large |Re z|."""
    w = math.pi * np.asarray(z, dtype=complex) / beta
    flip = np.where(w.real < 0, -1.0, 1.0)
    w = w * flip
    e = np.exp(-w)
    return flip * e / (beta * (1.0 - e * e))


def _power(base, a):
    """Principal power; integer exponents use exact repeated products."""
    base = np.asarray(base, dtype=complex)
    if float(a).is_integer():
        return base ** int(a)
    nonzero = base != 0
    if np.any(np.abs(np.angle(base[nonzero])) > math.pi - BRANCH_TOL):
        raise BranchAmbiguity("base of fractional power is on the negative real axis")
    with np.errstate(divide="ignore"):
        return np.where(nonzero, np.exp(a * np.log(np.where(nonzero, base, 1.0))), 0.0)


def _out(val, u):
    return complex(val) if np.ndim(u) == 0 else val


def _require_regulator(tp: ThermalParams, what: str):
    if not tp.epsilon_reg > 0:
        raise ValueError(f"{what} needs epsilon_reg > 0")


# ---------------------------------------------------------------------------
# bare fermion


def bare_two_point(u, tp: ThermalParams, reverse: bool = False):
    """<psi*(x) psi(x')> at u = x - x'; ``reverse=True`` gives <psi(x') psi*(x)>."""
    eps = tp.epsilon_reg
    if reverse:
        val = -1j * _inv_s(np.asarray(u) - 1j * eps, tp.beta)
    else:
        val = 1j * _inv_s(np.asarray(u) + 1j * eps, tp.beta)
    return _out(val, u)


def bare_two_point_series(u, tp: ThermalParams, n_max: int = 200,
                          accelerate: bool = True) -> complex:
    """Matsubara-type sum  -(1/2pi) sum_n (-1)^n / (i z - n beta), z = u + i eps.

    Terms n and -n are paired.  The resulting alternating series converges
    like 1/N^2; with ``accelerate`` the partial sums are repeatedly averaged
    (Euler's transformation), which makes |n| <= 200 accurate to ~1e-13.
    """
    z = complex(u) + 1j * tp.epsilon_reg
    iz = 1j * z
    n = np.arange(1, n_max + 1)
    terms = (-1.0) ** n * (2.0 * iz) / (iz * iz - (n * tp.beta) ** 2)
    partial = 1.0 / iz + np.cumsum(terms)
    if accelerate:
        sums = partial[-24:]
        while sums.size > 1:
            sums = 0.5 * (sums[1:] + sums[:-1])
        total = sums[0]
    else:
        total = partial[-1]
    return complex(-total / TWO_PI)


def bare_kms_check(u, tp: ThermalParams) -> float:
    """|<psi psi*>(u) - <psi* psi>(u + i beta)| with the analytic continuation.

    The continuation of i/s(z) from the lower boundary (Im z = eps) is taken
    to the upper boundary Im z = beta - eps.
    """
    lhs = bare_two_point(u, tp, reverse=True)
    z = np.asarray(u) + 1j * (tp.beta - tp.epsilon_reg)
    rhs = 1j * _inv_s(z, tp.beta)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# anyon fields


@dataclass(frozen=True)
class AnyonField:
    alpha: float
    eps: float
    x: float = 0.0
    chirality: str = "right"

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.chirality not in ("left", "right"):
            raise ValueError("chirality is 'left' or 'right'")

    @property
    def coupling(self) -> float:
        """sqrt(2 pi alpha), the prefactor of the current in the exponent."""
        return math.sqrt(TWO_PI * self.alpha)

    @property
    def renorm(self) -> float:
        return renorm_constant(self.alpha, self.eps)

    @property
    def smearing(self) -> TestFn:
        """y -> phi_eps(x - y), the function smeared against the current."""
        return reversed_ramp(self.eps, self.x)

    @property
    def is_fermionic(self) -> bool:
        return coupling_statistics_map(self.alpha).is_fermionic

    @property
    def is_bosonic(self) -> bool:
        return coupling_statistics_map(self.alpha).is_bosonic


def anyon_two_point_analytic(alpha: float, z, beta: float):
    """(i / s(z)) ** (alpha/2pi) for z in the strip 0 <= Im z <= beta, z != 0, i beta."""
    return _out(_power(1j * _inv_s(z, beta), alpha / TWO_PI), z)


def anyon_two_point(alpha: float, u, tp: ThermalParams):
    """S_alpha(u) with the +i eps prescription (eps = 0 gives the boundary value)."""
    if tp.epsilon_reg == 0 and np.any(np.asarray(u) == 0):
        raise ValueError("S_alpha is singular at u = 0 without a regulator")
    return anyon_two_point_analytic(alpha, np.asarray(u) + 1j * tp.epsilon_reg, tp.beta)


def renorm_constant(alpha: float, eps: float) -> float:
    """n_alpha(eps) = (2 pi eps) ** (-alpha / 4 pi)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return (TWO_PI * eps) ** (-alpha / (4.0 * math.pi))


# ---------------------------------------------------------------------------
# exchange phases


def exchange_phase(alpha: float, t: float, eps: float) -> complex:
    """e^{i alpha sgn(t) / 2}, valid for |t| > eps; exact on quarter turns."""
    if abs(t) <= eps:
        raise InsideCutoff(f"|t| = {abs(t)} is inside the cutoff eps = {eps}; see d_epsilon")
    return unit_phase(0.5 * alpha * math.copysign(1.0, t))


def d_epsilon(u, eps: float):
    """1 for |u| >= eps, u^2/eps^2 inside."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    u = np.asarray(u, dtype=float)
    val = np.where(np.abs(u) >= eps, 1.0, (u / eps) ** 2)
    return float(val) if val.ndim == 0 else val


def _odd_multiple_of_pi(x: float):
    """Return k with x = (2k+1) pi, or None."""
    q = x / math.pi
    m = round(q)
    if abs(q - m) > MULTIPLE_TOL or m % 2 == 0:
        return None
    return (m - 1) // 2


@dataclass(frozen=True)
class KleinSetup:
    """Klein constants of the two chiralities; c_l - c_r must be (2k+1) pi."""

    c_r: float = math.pi / 2
    c_l: float = -math.pi / 2

    def __post_init__(self):
        if _odd_multiple_of_pi(self.c_l - self.c_r) is None:
            raise InvalidKleinVector(
                f"c_l - c_r = {self.c_l - self.c_r} is not an odd multiple of pi")

    @property
    def constraint_k(self) -> int:
        return _odd_multiple_of_pi(self.c_l - self.c_r)

    @classmethod
    def from_pi_multiples(cls, r: Fraction, l: Fraction):
        return cls(float(r) * math.pi, float(l) * math.pi)


def nonchiral_exchange(i: str, j: str, klein: KleinSetup, t: float,
                       eps: float = 0.0, sign: int = 1) -> complex:
    """Exchange phase of U^i_pi and U^j_pi (chiralities 'r' / 'l').

    Opposite chiralities pick up e^{+-i(c_l - c_r)} = -1 (``sign`` selects the
    upper or lower choice); equal chiralities anticommute as fermions.
    """
    for c in (i, j):
        if c not in ("r", "l"):
            raise ValueError("chirality labels are 'r' and 'l'")
    if i != j:
        return unit_phase(sign * (klein.c_l - klein.c_r))
    return exchange_phase(TWO_PI, t, eps)


def validate_klein_vector(cvec) -> None:
    for a in range(len(cvec)):
        for b in range(a + 1, len(cvec)):
            if _odd_multiple_of_pi(cvec[a] - cvec[b]) is None:
                raise InvalidKleinVector(
                    f"c_{a} - c_{b} = {cvec[a] - cvec[b]} is not an odd multiple of pi")


def multiplet_exchange(k: int, l: int, cvec, u: float) -> complex:
    """Phase in psi*_k(x) psi_l(y) = psi_l(y) psi*_k(x) * phase, u = y - x."""
    validate_klein_vector(cvec)
    if k == l:
        if u == 0:
            raise InsideCutoff("coincident points have no exchange phase")
        return unit_phase(-math.pi * math.copysign(1.0, u))
    return unit_phase(-(cvec[k] - cvec[l]))


@dataclass(frozen=True)
class CouplingRecord:
    alpha: float
    coupling: float
    is_fermionic: bool
    is_bosonic: bool
    n: int | None

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def coupling_statistics_map(alpha: float) -> CouplingRecord:
    """Coupling of the field equation for statistics alpha.

    Normalised so that alpha = 2(2n+1) pi gives lambda = sqrt(2(2n+1) pi),
    i.e. lambda = sqrt(alpha).  ``n`` is reported for fermionic alpha.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    q = alpha / TWO_PI
    m = round(q)
    on_grid = abs(q - m) <= MULTIPLE_TOL
    fermionic = on_grid and m % 2 == 1
    bosonic = on_grid and m % 2 == 0
    return CouplingRecord(alpha, math.sqrt(alpha), fermionic, bosonic,
                          (m - 1) // 2 if fermionic else None)


# ---------------------------------------------------------------------------
# alpha-commutator


def alpha_commutator_expectation(alpha: float, u, tp: ThermalParams):
    """omega([Psi*(x), Psi(x')]_alpha) at u = x - x' (eps > 0 required)."""
    _require_regulator(tp, "alpha_commutator_expectation")
    return _out(_commutator_kernel(alpha, np.asarray(u, dtype=float), tp), u)


def _commutator_kernel(alpha, u, tp):
    a = alpha / TWO_PI
    eps = tp.epsilon_reg
    up = _power(-_inv_s(u + 1j * eps, tp.beta), a)
    dn = _power(-_inv_s(u - 1j * eps, tp.beta), a)
    return -1j * up + 1j * dn


def _line_moments(alpha, tp, kmax=2):
    """int_R u^k K_eps(u) du for k <= kmax via contours at Im z = +-beta/2."""
    a = alpha / TWO_PI
    beta, eps = tp.beta, tp.epsilon_reg
    c = 0.5 * beta
    out = []
    for k in range(kmax + 1):
        def upper(x, k=k):
            z = x + 1j * c
            return (z - 1j * eps) ** k * complex(_power(-_inv_s(z, beta), a))

        def lower(x, k=k):
            z = x - 1j * c
            return (z + 1j * eps) ** k * complex(_power(-_inv_s(z, beta), a))

        up, _ = integrate(upper, -np.inf, np.inf, points=[0.0], epsabs=1e-14,
                          complex_func=True)
        dn, _ = integrate(lower, -np.inf, np.inf, points=[0.0], epsabs=1e-14,
                          complex_func=True)
        out.append(-1j * up + 1j * dn)
    return out


def smeared_alpha_commutator(alpha: float, g: TestFn, tp: ThermalParams) -> complex:
    """int g(u) omega([Psi*(x), Psi(x - u)]_alpha) du at fixed eps > 0.

    The second-order Taylor polynomial of g at 0 is subtracted; its integral
    against the kernel is evaluated on shifted contours where the integrand
    is smooth, so no cancellation between 1/eps^k pieces occurs.
    """
    _require_regulator(tp, "smeared_alpha_commutator")
    eps, beta = tp.epsilon_reg, tp.beta
    derivs = [g]
    for _ in range(TAYLOR_ORDER):
        derivs.append(derivs[-1].derivative())
    coeffs = [float(d(0.0)) / math.factorial(k) for k, d in enumerate(derivs)]
    c0, c1, c2 = coeffs[:3]

    def taylor(u):
        return c0 + u * (c1 + u * c2)

    def remainder(u):
        # near 0 the difference g - taylor is summed from its series, which
        # avoids the cancellation that the 1/eps^k kernel would amplify
        if abs(u) < TAYLOR_RADIUS:
            return sum(c * u**k for k, c in enumerate(coeffs) if k >= 3)
        return g(u) - taylor(u)

    decay = max(alpha / TWO_PI, 1e-3) * math.pi / beta
    v = g.variation()
    reach = max(abs(v[0]), abs(v[1])) if v is not None else 0.0
    big = max(reach, 40.0 / decay)

    pts = [0.0, *g.breakpoints()]
    s = eps
    while s < big:
        pts += [-s, s]
        s *= 4.0

    def inner(u):
        return complex(_commutator_kernel(alpha, np.asarray(u), tp)) * remainder(u)

    val, _ = integrate(inner, -big, big, points=pts, epsabs=1e-12, complex_func=True,
                       limit=500)

    def outer(u):
        return complex(_commutator_kernel(alpha, np.asarray(u), tp)) * taylor(u)

    tail_r, _ = integrate(outer, big, 3 * big, epsabs=1e-14, complex_func=True)
    tail_l, _ = integrate(outer, -3 * big, -big, epsabs=1e-14, complex_func=True)
    moments = _line_moments(alpha, tp)
    return val - tail_r - tail_l + c0 * moments[0] + c1 * moments[1] + c2 * moments[2]


def smeared_commutator_limit(alpha: float, g: TestFn, beta: float,
                             eps_values=(1e-3, 1e-4), order: float = 1.0,
                             rtol: float = 1e-2):
    """Richardson extrapolation eps -> 0 of :func:`smeared_alpha_commutator`.

    Returns ``(limit, residual, values)``; raises ExtrapolationFailure when
    the last two raw values differ by more than ``rtol`` relative to the limit
    (the sequence is then not in its asymptotic regime).
    """
    values = [smeared_alpha_commutator(alpha, g, ThermalParams(beta, e)) for e in eps_values]
    limit, resid = richardson(values, list(eps_values), order=order)
    if abs(values[-1] - limit) > rtol * max(abs(limit), 1e-300):
        raise ExtrapolationFailure(
            f"eps sequence {eps_values} not asymptotic: values {values}")
    return limit, resid, values


def anticommutator_6pi_limit(g: TestFn, beta: float) -> float:
    """-(1/8pi^2) (g''(0) - (pi/beta)^2 g(0)), the smeared anticommutator at alpha = 6 pi."""
    g2 = float(g.derivative().derivative()(0.0))
    return -(g2 - (math.pi / beta) ** 2 * float(g(0.0))) / (8.0 * math.pi**2)


# ---------------------------------------------------------------------------
# normalisation diagnostic


def normalization_diagnostic(alpha: float, eps: float, beta: float, x: float = 0.0,
                             nodes: int = 24) -> dict:
    """Solve the integral normalisation condition for n_alpha(eps).

    The condition  2 n^2 eps int_{-1}^{1} dd sin(alpha (1 - d^2)/4)
    omega(W(sqrt(2 pi alpha) (phi_{eps, x - eps d} - phi_{eps, x}))) = 1
    is solved for n and compared with (2 pi eps)^{-alpha/4pi}.
    """
    tp = ThermalParams(beta, eps)
    nodes_x, weights = np.polynomial.legendre.leggauss(nodes)
    amp = math.sqrt(TWO_PI * alpha)
    base = reversed_ramp(eps, x)
    total = 0.0
    for d, w in zip(nodes_x, weights):
        diff = (reversed_ramp(eps, x - eps * d) - base) * amp
        q = thermal_quadratic(diff, tp)
        total += w * math.sin(alpha * (1.0 - d * d) / 4.0) * math.exp(-0.5 * q)
    n_condition = 1.0 / math.sqrt(2.0 * eps * total)
    n_closed = renorm_constant(alpha, eps)
    return {"alpha": alpha, "eps": eps, "beta": beta, "n_condition": n_condition,
            "n_closed_form": n_closed, "ratio": n_condition / n_closed}
