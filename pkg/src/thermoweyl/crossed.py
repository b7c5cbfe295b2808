"""Crossed product of the Weyl algebra by Z: elements F = sum_n A_n U^n.

U is bookkept by its power only; the structural automorphism alpha is the
only link between U and the Weyl coefficients:

    (F . G)_m = sum_n F_n alpha^n(G_{m-n}),      (F*)_{-n} = alpha^{-n}(F_n*).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ExtrapolationFailure, IncompatibleStatistics
from .quadrature import richardson
from .symplectic import ThermalParams, sigma, weyl_expectation
from .testfn import TestFn, Zero, reversed_ramp
from .weyl import (IDENTITY, AutomorphismSpec, WeylElement, adjoint,
                   apply_automorphism, multiply, unit_phase)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CrossedElement:
    """Finitely supported map n -> A_n, stored sorted by n.

    Each A_n is a formal sum of Weyl elements (a tuple of WeylElement); a
    single Weyl element may be passed directly.  ``statistics`` tags the
    adjoined unitary (None for the plain Z extension); elements with
    different tags never multiply.
    """

    coeffs: tuple = ((0, (IDENTITY,)),)
    statistics: float | None = None

    def __post_init__(self):
        merged: dict = {}
        for n, terms in self.coeffs:
            if int(n) != n:
                raise ValueError("charges must be integers")
            if isinstance(terms, WeylElement):
                terms = (terms,)
            merged.setdefault(int(n), []).extend(terms)
        object.__setattr__(self, "coeffs",
                           tuple((n, tuple(ts)) for n, ts in sorted(merged.items()) if ts))

    @property
    def support(self) -> tuple:
        return tuple(n for n, _ in self.coeffs)

    def __getitem__(self, n) -> tuple:
        return dict(self.coeffs)[n]

    def term(self, n) -> WeylElement:
        """The coefficient at charge n when it is a single Weyl element."""
        terms = self[n]
        if len(terms) != 1:
            raise ValueError(f"charge {n} carries {len(terms)} Weyl terms")
        return terms[0]

    def amplitudes(self) -> dict:
        """{(n, exponent descriptor): summed phase}, the canonical content."""
        out: dict = {}
        for n, terms in self.coeffs:
            for w in terms:
                key = (n, w.chirality, json.dumps(w.f.descriptor(), sort_keys=True))
                out[key] = out.get(key, 0j) + w.phase
        return out

    def close_to(self, other: "CrossedElement", tol: float = 1e-10) -> bool:
        a, b = self.amplitudes(), other.amplitudes()
        keys = set(a) | set(b)
        return all(abs(a.get(k, 0j) - b.get(k, 0j)) <= tol for k in keys)

    def max_difference(self, other: "CrossedElement") -> float:
        a, b = self.amplitudes(), other.amplitudes()
        return max((abs(a.get(k, 0j) - b.get(k, 0j)) for k in set(a) | set(b)), default=0.0)

    def to_list(self):
        return [{"n": n, "weyl": w.to_dict()} for n, terms in self.coeffs for w in terms]

    def to_json(self):
        return json.dumps({"statistics": self.statistics, "coeffs": self.to_list()},
                          sort_keys=True)

    @classmethod
    def from_json(cls, s):
        d = json.loads(s)
        return cls(tuple((item["n"], WeylElement.from_dict(item["weyl"]))
                         for item in d["coeffs"]), d.get("statistics"))


def crossed(*terms, statistics=None) -> CrossedElement:
    """crossed((n, weyl), ...) convenience constructor."""
    return CrossedElement(tuple(terms), statistics)


CROSSED_IDENTITY = CrossedElement()


def automorphism_power(spec: AutomorphismSpec, n: int, w: WeylElement) -> WeylElement:
    """alpha^n(w) for any integer n."""
    if n == 0:
        return w
    if spec.kind == "structural":
        if spec.point is not None:
            theta = w.chirality * float(w.f(spec.point))
        else:
            theta = 0.0 if isinstance(w.f, Zero) else w.chirality * sigma(spec.g, w.f)
        return WeylElement(w.f, w.phase * unit_phase(n * theta), w.chirality)
    step = spec if n > 0 else _inverse(spec)
    for _ in range(abs(n)):
        w = apply_automorphism(step, w)
    return w


def _inverse(spec: AutomorphismSpec) -> AutomorphismSpec:
    if spec.kind == "shift":
        return AutomorphismSpec.shift(-spec.t)
    if spec.kind == "gauge":
        return AutomorphismSpec.gauge(spec.g, -spec.strength)
    return spec  # parity is an involution


def _check_statistics(F: CrossedElement, G: CrossedElement):
    if F.statistics != G.statistics:
        raise IncompatibleStatistics(
            f"elements with statistics {F.statistics} and {G.statistics} live in orthogonal sectors")


def multiply_crossed(F: CrossedElement, G: CrossedElement,
                     alpha_spec: AutomorphismSpec) -> CrossedElement:
    """(F . G)_m = sum_n F_n alpha^n(G_{m-n})."""
    _check_statistics(F, G)
    out = []
    for n, fterms in F.coeffs:
        for k, gterms in G.coeffs:
            twisted = [automorphism_power(alpha_spec, n, g) for g in gterms]
            out.append((n + k, tuple(multiply(f, g) for f in fterms for g in twisted)))
    return CrossedElement(tuple(out), F.statistics)


def adjoint_crossed(F: CrossedElement, alpha_spec: AutomorphismSpec) -> CrossedElement:
    """(F*)_{-n} = alpha^{-n}(F_n*)."""
    return CrossedElement(tuple((-n, tuple(automorphism_power(alpha_spec, -n, adjoint(w))
                                           for w in terms))
                                for n, terms in F.coeffs), F.statistics)


def gauge_automorphism(F: CrossedElement, nu) -> CrossedElement:
    """Multiply the charge-n coefficient by e^{2 pi i nu n}.

    ``nu`` may be a Fraction; nu*n is then reduced modulo 1 exactly before
    the exponential is taken.
    """
    out = []
    for n, terms in F.coeffs:
        turn = (Fraction(nu) * n) % 1 if isinstance(nu, (int, Fraction)) else (nu * n) % 1.0
        phase = unit_phase(TWO_PI * float(turn))
        out.append((n, tuple(WeylElement(w.f, w.phase * phase, w.chirality) for w in terms)))
    return CrossedElement(tuple(out), F.statistics)


def extendibility_check(rho_gbar: TestFn, gbar: TestFn, tp: ThermalParams) -> bool:
    """Whether rho alpha rho^-1 alpha^-1 is inner, i.e. rho_gbar - gbar lies in V_0.

    The test is on the zero Fourier component: the difference must vanish at
    both ends of the line, otherwise its transform has a 1/p pole and the
    thermal norm diverges in the infrared.  Sharp jumps are allowed; their
    ultraviolet growth is the same for every step function and is not part of
    the criterion.
    """
    diff = rho_gbar - gbar
    if isinstance(diff, Zero):
        return True
    lo, hi = diff.limits()
    return abs(lo) < 1e-12 and abs(hi) < 1e-12


def sector_inner(k: int, n: int, f: TestFn, h: TestFn, gbar: TestFn,
                 tp: ThermalParams) -> complex:
    """<Omega_k| W*(f) W(h) W(f) |Omega_n> = delta_kn e^{-i sigma(f + n gbar, h)} omega(W(h))."""
    if k != n:
        return 0j
    expectation = weyl_expectation(h, tp)
    if expectation == 0.0:
        return 0j
    exponent = f + gbar * n if n else f
    theta = 0.0 if isinstance(exponent, Zero) or isinstance(h, Zero) else sigma(exponent, h)
    return unit_phase(-theta) * expectation


@dataclass(frozen=True)
class ZoneSpec:
    n: int = 0
    nbar: int = 1

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.nbar < 1:
            raise ValueError("nbar must be at least 1")


@dataclass(frozen=True)
class ZoneRecord:
    n: int
    nbar: int
    m: int
    r: float
    r_squared: Fraction
    cls: str

    def to_dict(self):
        return {"n": self.n, "nbar": self.nbar, "m": self.m, "r": self.r,
                "r_squared": str(self.r_squared), "class": self.cls}


def zone_statistics(zs: ZoneSpec, m: int) -> ZoneRecord:
    """r = sqrt(2n+1) m / nbar; class from the exchange phase e^{i pi r^2}."""
    r = math.sqrt(2 * zs.n + 1) * m / zs.nbar
    r2 = Fraction((2 * zs.n + 1) * m * m, zs.nbar * zs.nbar)
    if r2.denominator != 1:
        cls = "anyonic"
    elif r2.numerator % 2 == 0:
        cls = "bosonic"
    else:
        cls = "fermionic"
    return ZoneRecord(zs.n, zs.nbar, m, r, r2, cls)


def step_function(x: float, eps: float) -> TestFn:
    """2 pi phi_eps(x - y): the ramp regularisation of 2 pi Theta(x - y)."""
    return reversed_ramp(eps, x) * TWO_PI


def step_exchange_prelimit(x: float, delta: float, eps: float) -> float:
    """sigma of two regularised 2 pi-steps at x and x + delta."""
    return sigma(step_function(x, eps), step_function(x + delta, eps))


def step_exchange_sigma(x: float, delta: float, eps_values=None, tol: float = 1e-6) -> float:
    """eps -> 0 limit of :func:`step_exchange_prelimit` by Richardson extrapolation."""
    if delta == 0:
        raise ValueError("delta must be non-zero")
    if eps_values is None:
        eps_values = [abs(delta) * 2.0**-k for k in (1, 2, 3)]
    values = [step_exchange_prelimit(x, delta, e) for e in eps_values]
    limit, resid = richardson(values, eps_values, order=1.0)
    if resid > tol:
        raise ExtrapolationFailure(f"Richardson residual {resid:.3g} exceeds {tol:g}")
    return limit


def derivative_identity(f: TestFn, x: float, delta: float) -> complex:
    """(phase - 1)/delta for the twist by 2 pi (Theta(x + delta - .) - Theta(x - .)).

    The phase is e^{i(f(x + delta) - f(x))}, so the quotient tends to i f'(x)
    with an O(delta) error.
    """
    w = WeylElement(f)
    ahead = apply_automorphism(AutomorphismSpec.structural_point(x + delta), w)
    back = apply_automorphism(AutomorphismSpec.structural_point(x), WeylElement(f))
    phase = ahead.phase / back.phase
    return (phase - 1.0) / delta
