"""Symplectic form, thermal quadratic form and the quasi-free KMS functional.

Conventions
-----------
* sigma(f, g) = (1/4pi) int (f' g - f g') dx, so that [j_f, j_g] = i sigma(f, g).
  The momentum form is  i sigma(f, g) = int dp/(2pi)^2 p f~(p) g~(-p).
* omega(j_f j_g) = int dp/(2pi)^2 p/(1 - exp(-beta p)) f~(p) g~(-p)
                 = int int f(y) g(y') K(y - y') dy dy',
  K(u) = -1 / ((2 beta)^2 sinh^2(pi (u + i eps)/beta)).
* Q_beta(f) = omega(j_f^2) and omega(W(f)) = exp(-Q_beta(f)/2).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DivergentNorm, NotIntegrable
from .quadrature import (gauss_legendre, integrate, oscillation_edges,
                         panel_integrate)
from .testfn import RampDiff, TestFn, Zero, fourier

FOUR_PI = 4.0 * math.pi
TWO_PI_SQ = (2.0 * math.pi) ** 2

# divergence test: tail integrals over [L, 2L] for these L (times 1/beta)
TAIL_LAMBDAS = (1e3, 1e4)
TAIL_TOL = 1e-6


@dataclass(frozen=True)
class ThermalParams:
    """Inverse temperature and the i*eps regulator of the KMS kernels.

    ``epsilon_reg = 0`` selects boundary values (allowed wherever the
    evaluation point keeps away from the coincident-point singularity).
    """

    beta: float
    epsilon_reg: float = 1e-6
    uv_cutoff: float | None = None
    ir_cutoff: float | None = None

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive (beta <= 0 only on the lattice)")
        if self.epsilon_reg < 0:
            raise ValueError("epsilon_reg must be non-negative")

    @property
    def uv(self) -> float:
        return self.uv_cutoff if self.uv_cutoff is not None else 1e4 / self.beta

    @property
    def ir(self) -> float:
        return self.ir_cutoff if self.ir_cutoff is not None else 1e-6 / self.beta


@dataclass(frozen=True)
class CovarianceReport:
    value: complex
    method: str
    est_error: float

    def to_dict(self):
        d = asdict(self)
        d["value"] = [self.value.real, self.value.imag]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# symplectic form


def _merge(intervals):
    ivs = sorted(iv for iv in intervals if iv is not None)
    out = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _smooth_part(f: TestFn, g: TestFn) -> float:
    """int (f'_ac g - f g'_ac) over the region where either derivative lives."""
    regions = _merge([f.variation(), g.variation()])
    pts = sorted(set(f.breakpoints()) | set(g.breakpoints()))

    def integrand(x):
        return f._dsmooth(x) * g._eval(x) - f._eval(x) * g._dsmooth(x)

    total = 0.0
    exact = f.degree is not None and g.degree is not None
    for lo, hi in regions:
        if hi <= lo:
            continue
        edges = np.array(sorted({lo, hi, *[p for p in pts if lo < p < hi]}))
        if exact:
            n = (f.degree + g.degree) // 2 + 2
            x, w = gauss_legendre(n)
            a, b = edges[:-1], edges[1:]
            half, mid = 0.5 * (b - a), 0.5 * (b + a)
            vals = integrand(mid[:, None] + half[:, None] * x[None, :])
            total += float(np.sum(half * (vals @ w)))
        else:
            edges = np.unique(np.concatenate([edges, np.linspace(lo, hi, 65)]))
            val, _ = panel_integrate(integrand, edges, tol=1e-13)
            total += float(val)
    return total


def sigma(f: TestFn, g: TestFn) -> float:
    """(1/4pi) int (f' g - f g') dx computed in position space.

    Jumps of either argument contribute point terms (the partner is evaluated
    at the jump, mid-value if it jumps there too).  Piecewise polynomial pairs
    are integrated exactly with Gauss-Legendre on every smooth piece.
    """
    if isinstance(f, Zero) or isinstance(g, Zero):
        return 0.0
    total = _smooth_part(f, g)
    for x, jump in f.jumps():
        total += jump * float(g(x))
    for x, jump in g.jumps():
        total -= jump * float(f(x))
    return total / FOUR_PI


def sigma_momentum(f: TestFn, g: TestFn, tol: float = 1e-13) -> float:
    """Independent route: sigma = (2/(2pi)^2) int_0^inf p Im(f~(p) conj g~(p)) dp."""
    if not (f.decays and g.decays):
        raise NotIntegrable("momentum-space sigma needs decaying arguments")
    lam = min(f.bandwidth(), g.bandwidth())
    if not math.isfinite(lam):
        raise NotIntegrable("momentum-space sigma needs a transform that decays")
    ext = _extent(f, g)
    edges = oscillation_edges(0.0, lam, ext)
    edges = np.unique(np.concatenate([edges, np.linspace(0.0, lam, 33)]))

    def integrand(p):
        return p * np.imag(fourier(f, p) * np.conj(fourier(g, p)))

    val, _ = panel_integrate(integrand, edges, tol=tol)
    return 2.0 * float(val) / TWO_PI_SQ


def _extent(*fs) -> float:
    vs = [f.variation() for f in fs]
    vs = [v for v in vs if v is not None]
    if not vs:
        return 0.0
    return max(v[1] for v in vs) - min(v[0] for v in vs)


def sigma_step_limit(f: TestFn, delta: float, eps: float) -> float:
    """Phase exponent of the automorphism W(f) -> W(-Phi) W(f) W(Phi).

    With Phi = RampDiff(delta, eps) this is sigma(Phi, f); for smooth f it
    tends to -f(0)/(2 pi) as delta -> inf and then eps -> 0.
    """
    return sigma(RampDiff(delta, eps), f)


# ---------------------------------------------------------------------------
# thermal quadratic form


def thermal_weight(p, beta):
    """p / (1 - exp(-beta p)), equal to 1/beta at p = 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        w = p / -np.expm1(-beta * p)
    return np.where(p == 0.0, 1.0 / beta, w)


def _tail(f: TestFn, beta: float, lam: float) -> float:
    edges = oscillation_edges(lam, 2 * lam, _extent(f))
    edges = np.unique(np.concatenate([edges, np.linspace(lam, 2 * lam, 17)]))

    def integrand(p):
        return thermal_weight(p, beta) * np.abs(fourier(f, p)) ** 2

    val, _ = panel_integrate(integrand, edges, tol=1e-9, max_rounds=12)
    return float(val) / TWO_PI_SQ


def check_norm(f: TestFn, tp: ThermalParams) -> None:
    """Raise DivergentNorm when Q_beta(f) is infinite.

    Infrared: a non-vanishing limit at +-inf gives f~ ~ 1/p at the origin and
    a non-integrable 1/(beta p^2).  Ultraviolet: when f jumps, the tail
    integrals over [L, 2L] are tested against Cauchy's criterion.
    """
    if not f.decays:
        raise DivergentNorm(f"{f.kind}: infrared divergence (f does not vanish at infinity)")
    if math.isfinite(f.bandwidth()):
        return
    tails = [_tail(f, tp.beta, lam / tp.beta) for lam in TAIL_LAMBDAS]
    if abs(tails[-1]) > TAIL_TOL:
        raise DivergentNorm(
            f"{f.kind}: ultraviolet tail {tails[-1]:.3g} over [{TAIL_LAMBDAS[-1]:g}, "
            f"{2 * TAIL_LAMBDAS[-1]:g}]/beta does not vanish")


def _momentum_pair(f, g, beta, cutoff, regulator=0.0, tol=1e-11, ir=None):
    """int dp/(2pi)^2 w(p) exp(-reg p) f~(p) g~(-p) over [-60/beta, cutoff]."""
    lo = -min(cutoff, 60.0 / beta)
    hi = cutoff
    ext = _extent(f, g)
    edges = oscillation_edges(lo, hi, ext, breakpoints=(0.0,))
    scale = min(hi, 1.0 / beta)
    dense = np.concatenate([np.linspace(lo, hi, 65), [-scale, scale]])
    edges = np.unique(np.concatenate([edges, dense]))
    same = f == g

    def integrand(p):
        fp = fourier(f, p)
        gm = np.conj(fp) if same else np.conj(fourier(g, p))
        val = thermal_weight(p, beta) * fp * gm
        if regulator:
            val = val * np.exp(-regulator * p)
        if ir is not None:
            val = np.where(np.abs(p) < ir, 0.0, val)
        return val

    if ir is not None:
        edges = np.unique(np.concatenate([edges, [-ir, ir]]))
    val, err = panel_integrate(integrand, edges, tol=tol)
    return complex(val) / TWO_PI_SQ, err / TWO_PI_SQ


def thermal_quadratic_report(f: TestFn, tp: ThermalParams) -> CovarianceReport:
    if isinstance(f, Zero):
        return CovarianceReport(0j, "closed_form", 0.0)
    check_norm(f, tp)
    cutoff = min(tp.uv, f.bandwidth())
    val, err = _momentum_pair(f, f, tp.beta, cutoff)
    return CovarianceReport(complex(val.real, 0.0), "momentum_quadrature", err)


def thermal_quadratic(f: TestFn, tp: ThermalParams) -> float:
    """Q_beta(f) = int dp/(2pi)^2 p/(1 - exp(-beta p)) |f~(p)|^2 >= 0."""
    return thermal_quadratic_report(f, tp).value.real


def thermal_quadratic_cutoff(f: TestFn, tp: ThermalParams, uv: float,
                             ir: float | None = None) -> float:
    """Q_beta restricted to ir <= |p| <= uv; finite even when Q_beta is not."""
    val, _ = _momentum_pair(f, f, tp.beta, uv, ir=ir, tol=1e-9)
    return val.real


def weyl_expectation(f: TestFn, tp: ThermalParams) -> float:
    """omega(e^{i j_f}) = exp(-Q_beta(f)/2); exactly 0 when Q_beta diverges."""
    try:
        q = thermal_quadratic(f, tp)
    except DivergentNorm:
        return 0.0
    return math.exp(-0.5 * q)


def pair_exponent(a: TestFn, b: TestFn, tp: ThermalParams) -> complex:
    """omega(j_a j_b) from the momentum representation.

    The exp(-eps p) damping of the +i eps prescription is applied, so this is
    the exponent :func:`current_covariance` reports; ``epsilon_reg = 0`` gives
    the unregulated value.
    """
    if isinstance(a, Zero) or isinstance(b, Zero):
        return 0j
    check_norm(a, tp)
    check_norm(b, tp)
    cutoff = min(tp.uv, max(a.bandwidth(), b.bandwidth()))
    val, _ = _momentum_pair(a, b, tp.beta, cutoff, regulator=tp.epsilon_reg)
    return val


def pair_cross_factor(a: TestFn, b: TestFn, tp: ThermalParams) -> complex:
    """Cross factor in <e^{-i j_a} e^{i j_b}> = <e^{-i j_a}><e^{i j_b}> * factor.

    factor = exp(omega(j_a j_b)); for a = b and ``epsilon_reg = 0`` it is
    exp(Q_beta(a)), which makes <e^{-i j_a} e^{i j_a}> = 1.
    """
    if isinstance(a, Zero) or isinstance(b, Zero):
        return 1.0 + 0j
    return complex(np.exp(pair_exponent(a, b, tp)))


# ---------------------------------------------------------------------------
# position-space covariance


def kms_kernel(u, tp: ThermalParams):
    """K(u) = -1/((2 beta)^2 sinh^2(pi (u + i eps)/beta))."""
    z = np.asarray(u, dtype=float) + 1j * tp.epsilon_reg
    s = np.sinh(math.pi * z / tp.beta)
    return -1.0 / (4.0 * tp.beta**2 * s * s)


def _cross_correlation(f: TestFn, g: TestFn):
    """Return C(u) = int f(y + u) g(y) dy as a vectorised callable.

    A fixed (non-adaptive) composite Gauss-Legendre rule is used so that C is
    a smooth function of u; small-u differences then stay accurate.
    """
    vf, vg = f.variation(), g.variation()
    x, w = gauss_legendre(24)

    def corr(u):
        lo = max(vf[0] - u, vg[0])
        hi = min(vf[1] - u, vg[1])
        if hi <= lo:
            return 0.0
        pts = [p - u for p in f.breakpoints()] + list(g.breakpoints())
        edges = np.unique(np.concatenate(
            [[lo, hi], [p for p in pts if lo < p < hi], np.linspace(lo, hi, 49)]))
        a, b = edges[:-1], edges[1:]
        half, mid = 0.5 * (b - a), 0.5 * (b + a)
        y = mid[:, None] + half[:, None] * x[None, :]
        vals = f._eval(y + u) * g._eval(y)
        return float(np.sum(half * (vals @ w)))

    return corr, (vf[0] - vg[1], vf[1] - vg[0])


def _covariance_position(f: TestFn, g: TestFn, tp: ThermalParams):
    if f.variation() is None or g.variation() is None:
        return 0j, 0.0
    corr, (umin, umax) = _cross_correlation(f, g)
    beta, eps = tp.beta, tp.epsilon_reg
    a = math.pi / beta
    c0 = corr(0.0)
    # C'(0) = int f' g, including jumps of f
    c1 = float(_smooth_part_product(f, g)) + sum(j * float(g(x)) for x, j in f.jumps())
    h = min(0.25 * beta, 0.5 * max(abs(umin), abs(umax)))

    def z(u):
        return complex(u, eps if eps > 0 else 0.0)

    def coth(v):
        return 1.0 / np.tanh(v)

    pref = 1.0 / (4.0 * math.pi * beta)
    k0 = pref * (coth(a * z(h)) - coth(a * z(-h)))
    k1 = pref * (h * coth(a * z(h)) + h * coth(a * z(-h))
                 - (np.log(np.sinh(a * z(h))) - np.log(np.sinh(a * z(-h)))) / a)
    inner_pts = [0.0]
    for k in range(0, 12):
        s = max(eps, 1e-9) * 10.0**k
        if s < h:
            inner_pts += [-s, s]

    def inner(u):
        return kms_kernel(u, tp) * (corr(u) - c0 - u * c1)

    val_in, err_in = integrate(inner, -h, h, points=inner_pts, epsabs=1e-13,
                               complex_func=True, limit=200)

    def outer(u):
        return kms_kernel(u, tp) * corr(u)

    val_out = 0j
    err_out = 0.0
    pts = sorted({*(p - q for p in f.breakpoints() for q in g.breakpoints())})
    for lo, hi in ((umin, -h), (h, umax)):
        if hi > lo:
            v, e = integrate(outer, lo, hi, points=pts, epsabs=1e-13,
                             complex_func=True, limit=200)
            val_out += v
            err_out += e
    return c0 * k0 + c1 * k1 + val_in + val_out, err_in + err_out


def _smooth_part_product(f: TestFn, g: TestFn) -> float:
    """int f'_ac g dx."""
    v = f.variation()
    if v is None or v[1] <= v[0]:
        return 0.0
    lo, hi = v
    pts = sorted(set(f.breakpoints()) | set(g.breakpoints()))
    edges = np.unique(np.concatenate(
        [[lo, hi], [p for p in pts if lo < p < hi], np.linspace(lo, hi, 65)]))
    val, _ = panel_integrate(lambda x: f._dsmooth(x) * g._eval(x), edges, tol=1e-13)
    return float(val)


def current_covariance(f: TestFn, g: TestFn, tp: ThermalParams,
                       method: str = "position_kernel") -> CovarianceReport:
    """omega(j_f j_g) with the +i eps prescription.

    ``method="position_kernel"`` integrates the sinh^-2 kernel against the
    cross-correlation of f and g (the singular part near coincident points is
    subtracted and integrated analytically); ``method="momentum_quadrature"``
    uses the momentum representation with the matching exp(-eps p) damping.
    """
    if isinstance(f, Zero) or isinstance(g, Zero):
        return CovarianceReport(0j, "closed_form", 0.0)
    if method == "position_kernel":
        if not (f.decays and g.decays):
            raise NotIntegrable("position-space covariance needs integrable f, g")
        val, err = _covariance_position(f, g, tp)
        return CovarianceReport(complex(val), method, float(err))
    if method == "momentum_quadrature":
        check_norm(f, tp)
        check_norm(g, tp)
        cutoff = min(tp.uv, max(f.bandwidth(), g.bandwidth()))
        val, err = _momentum_pair(f, g, tp.beta, cutoff, regulator=tp.epsilon_reg)
        return CovarianceReport(complex(val), method, float(err))
    raise ValueError(f"unknown method {method!r}")
