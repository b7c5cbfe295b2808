"""Invariant suites run by ``thermoweyl verify``.

Every suite returns a :class:`SuiteResult`; residuals are the largest
deviation observed, compared against the suite's tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import correlators as cor
from . import crossed as cx
from . import lattice as lat
from .symplectic import ThermalParams, sigma, sigma_momentum
from .testfn import Gaussian, PolyGaussian, Ramp, reflect, shift
from .weyl import (AutomorphismSpec, adjoint, apply_automorphism, multiply,
                   multiply_all, weyl)

ALPHAS = (math.pi, 2 * math.pi, 4 * math.pi, 6 * math.pi, 7.3)


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    max_residual: float
    tolerance: float
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"suite": self.suite, "passed": self.passed,
                "max_residual": self.max_residual, "tolerance": self.tolerance,
                "details": self.details}


def _result(name, residuals, tol, **details):
    worst = float(max(residuals)) if len(residuals) else 0.0
    return SuiteResult(name, bool(worst <= tol), worst, tol, details)


def _grid(n=64, lo=0.05, hi=3.0):
    u = np.linspace(lo, hi, n)
    return u * np.where(np.arange(n) % 2, 1.0, -1.0)


def _smooth_pairs():
    return [(Gaussian(0.0, 1.0), PolyGaussian((0.0, 1.0), 0.0, 1.0)),
            (Gaussian(0.3, 0.8), Gaussian(-0.4, 1.3)),
            (PolyGaussian((1.0, 0.5, -0.2), 0.1, 0.9), Gaussian(0.7, 0.6))]


def suite_sigma() -> SuiteResult:
    res = []
    for f, g in _smooth_pairs():
        s = sigma(f, g)
        res.append(abs(s + sigma(g, f)))
        res.append(abs(sigma(reflect(f), reflect(g)) + s))
        res.append(abs(sigma_momentum(f, g) - s))
    return _result("sigma", res, 1e-7)


def suite_weyl() -> SuiteResult:
    f, g = _smooth_pairs()[0]
    h = Gaussian(1.1, 0.5)
    w1, w2, w3 = weyl(f), weyl(g), weyl(h)
    assoc = multiply(multiply(w1, w2), w3)
    res = [abs(assoc.phase - multiply(w1, multiply(w2, w3)).phase)]
    a = AutomorphismSpec.shift(0.37)
    lhs = apply_automorphism(a, multiply(w1, w2))
    rhs = multiply(apply_automorphism(a, w1), apply_automorphism(a, w2))
    res.append(abs(lhs.phase - rhs.phase))
    inverse = multiply_all(w1, adjoint(w1))
    res.append(abs(inverse.phase - 1.0) if inverse.is_identity else math.inf)
    return _result("weyl", res, 1e-10)


def suite_parity() -> SuiteResult:
    """Parity reverses the cocycle: the witness phases are complex conjugates."""
    f, g = _smooth_pairs()[0]
    p = AutomorphismSpec.parity()
    direct = multiply(apply_automorphism(p, weyl(f)), apply_automorphism(p, weyl(g))).phase
    mapped = apply_automorphism(p, multiply(weyl(f), weyl(g))).phase
    res = [abs(direct - mapped.conjugate())]
    differs = abs(direct - mapped) > 1e-6
    return _result("parity", res if differs else [math.inf], 1e-10,
                   product_of_images=[direct.real, direct.imag],
                   image_of_product=[mapped.real, mapped.imag])


def suite_kms() -> SuiteResult:
    res = []
    for beta in (1.0, math.pi, 2.0):
        tp = ThermalParams(beta, 1e-6)
        res.append(cor.bare_kms_check(np.linspace(-3, 3, 32), tp))
        u = _grid()
        z = u + 1j * tp.epsilon_reg
        for a in ALPHAS:
            s = cor.anyon_two_point(a, u, tp)
            cont = cor.anyon_two_point_analytic(a, 1j * beta - z, beta)
            res.append(float(np.max(np.abs(s - cont) / np.abs(s))))
    return _result("kms", res, 1e-10)


def suite_hermiticity() -> SuiteResult:
    tp = ThermalParams(math.pi, 1e-6)
    u = _grid()
    res = [float(np.max(np.abs(np.conj(cor.anyon_two_point(a, u, tp))
                               - cor.anyon_two_point(a, -u, tp))))
           for a in ALPHAS]
    return _result("hermiticity", res, 1e-10)


def suite_alpha_commutativity() -> SuiteResult:
    tp = ThermalParams(math.pi, 0.0)
    u = _grid()
    res = []
    for a in ALPHAS:
        s, sm = cor.anyon_two_point(a, u, tp), cor.anyon_two_point(a, -u, tp)
        phase = np.exp(-0.5j * a * np.sign(u))
        res.append(float(np.max(np.abs(sm - phase * s) / np.abs(s))))
    return _result("alpha_commutativity", res, 1e-10)


def suite_series() -> SuiteResult:
    res = []
    for beta in (1.0, math.pi, 10.0):
        tp = ThermalParams(beta, 1e-3)
        for u in np.linspace(-3.0, 3.0, 50):
            res.append(abs(cor.bare_two_point_series(u, tp) - cor.bare_two_point(u, tp)))
    return _result("series", res, 1e-8)


def suite_statistics() -> SuiteResult:
    res = []
    for a in (2 * math.pi, 6 * math.pi, 10 * math.pi):
        res.append(abs(cor.exchange_phase(a, 1.0, 0.1) - (-1)))
    for a in (4 * math.pi, 8 * math.pi):
        res.append(abs(cor.exchange_phase(a, 1.0, 0.1) - 1))
    tp = ThermalParams(math.pi, 1e-6)
    u = _grid()
    res.append(float(np.max(np.abs(cor.anyon_two_point(2 * math.pi, u, tp)
                                   - cor.bare_two_point(u, tp)))))
    return _result("statistics", res, 1e-12)


def suite_schwinger() -> SuiteResult:
    f, g = Gaussian(0.0, 2.0), PolyGaussian((0.0, 1.0), 0.0, 2.0)
    reports = [lat.schwinger_check(f, g, lat.LatticeConfig(20.0, m, 5.0)) for m in (4, 5)]
    zero = abs(lat.commutator_expectation(f, g, lat.LatticeConfig(20.0, 4, 0.0)))
    plus = lat.commutator_expectation(f, g, lat.LatticeConfig(20.0, 4, 5.0))
    minus = lat.commutator_expectation(f, g, lat.LatticeConfig(20.0, 4, -5.0))
    decreasing = reports[1].rel_error < reports[0].rel_error
    res = [zero, abs(plus + minus), 0.0 if decreasing else math.inf]
    return _result("schwinger", res, 1e-10,
                   rel_errors={r.mode_cutoff: r.rel_error for r in reports})


def suite_crossed() -> SuiteResult:
    spec = AutomorphismSpec.structural_point(0.0)
    f, g = _smooth_pairs()[1]
    F = cx.crossed((1, weyl(f)), (-1, weyl(g)))
    G = cx.crossed((0, weyl(g)), (2, weyl(f)))
    H = cx.crossed((1, weyl(Gaussian(0.5, 0.4))))
    lhs = cx.multiply_crossed(cx.multiply_crossed(F, G, spec), H, spec)
    rhs = cx.multiply_crossed(F, cx.multiply_crossed(G, H, spec), spec)
    res = [lhs.max_difference(rhs)]
    res.append(abs(cx.step_exchange_sigma(0.0, 0.5) + math.pi))
    res.append(abs(cx.sector_inner(0, 1, f, g, shift(Ramp(0.1), 0.0), ThermalParams(1.0))))
    return _result("crossed", res, 1e-6)


SUITES = {
    "sigma": suite_sigma,
    "weyl": suite_weyl,
    "parity": suite_parity,
    "kms": suite_kms,
    "hermiticity": suite_hermiticity,
    "alpha_commutativity": suite_alpha_commutativity,
    "series": suite_series,
    "statistics": suite_statistics,
    "schwinger": suite_schwinger,
    "crossed": suite_crossed,
}


def run_suites(names=None) -> list[SuiteResult]:
    names = list(SUITES) if not names else names
    return [SUITES[n]() for n in names]
