"""Symbolic test functions on the real line.

Every function is an immutable dataclass with pointwise evaluation, a weak
derivative, shift / reflection, and a Fourier transform under the convention

    f~(p) = integral dx exp(i p x) f(x).

Closed forms are used where they exist; :func:`fourier_quadrature` provides an
independent adaptive route used to cross-check them.

Kinds that do not decay at infinity (``Ramp``, ``Step``, ``Constant``) have
no ordinary transform at ``p = 0``; away from zero their distributional value
(the Abel-regularised integral) is returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import NotDifferentiable, NotIntegrable
from .quadrature import oscillation_edges, panel_integrate

# Gaussians are treated as zero beyond this many widths from their centre.
GAUSS_REACH = 9.0


def _sinc(x):
    """sin(x)/x, stable at 0."""
    return np.sinc(np.asarray(x) / np.pi)


def _as_array(x):
    return np.asarray(x, dtype=float)


def _out(val, x):
    return float(val) if np.ndim(x) == 0 else val


class TestFn:
    """Base class; concrete kinds are frozen dataclasses below."""

    __test__ = False  # keep pytest from collecting the class
    kind: ClassVar[str] = "abstract"

    # ---- evaluation -------------------------------------------------
    def __call__(self, x):
        return _out(self._eval(_as_array(x)), x)

    def _eval(self, x):
        raise NotImplementedError

    def _dsmooth(self, x):
        """Derivative away from jumps (the absolutely continuous part)."""
        raise NotImplementedError

    def jumps(self) -> tuple:
        """Tuple of ``(location, jump)``; jump = f(x+) - f(x-)."""
        return ()

    def breakpoints(self) -> tuple:
        return ()

    def limits(self) -> tuple:
        """Values at -infinity and +infinity."""
        return (0.0, 0.0)

    def variation(self):
        """Closed interval outside which f is constant, or None if f is constant."""
        return None

    @property
    def degree(self):
        """Piecewise polynomial degree, or None for smooth non-polynomial kinds."""
        return None

    def bandwidth(self) -> float:
        """Momentum beyond which the transform is negligible (inf when f jumps)."""
        return 0.0

    # ---- transforms -------------------------------------------------
    def fourier_closed(self, p):
        raise NotImplementedError

    def derivative(self) -> "TestFn":
        raise NotImplementedError

    def shifted(self, t: float) -> "TestFn":
        return Shifted(self, float(t)) if t != 0 else self

    def reflected(self) -> "TestFn":
        return Reflected(self)

    # ---- algebra ----------------------------------------------------
    def __add__(self, other):
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return combine([(1.0, self), (-1.0, other)])

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, c):
        return scale(self, c)

    __rmul__ = __mul__

    @property
    def decays(self) -> bool:
        lo, hi = self.limits()
        return lo == 0.0 and hi == 0.0

    def descriptor(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Zero(TestFn):
    kind: ClassVar[str] = "zero"

    def _eval(self, x):
        return np.zeros_like(x)

    _dsmooth = _eval

    @property
    def degree(self):
        return 0

    def fourier_closed(self, p):
        return np.zeros_like(np.asarray(p, dtype=float)) + 0j

    def derivative(self):
        return self

    def shifted(self, t):
        return self

    def reflected(self):
        return self

    def descriptor(self):
        return {"kind": self.kind, "params": {}}


@dataclass(frozen=True)
class Constant(TestFn):
    value: float
    kind: ClassVar[str] = "constant"

    def _eval(self, x):
        return np.full_like(x, self.value)

    def _dsmooth(self, x):
        return np.zeros_like(x)

    def limits(self):
        return (self.value, self.value)

    @property
    def degree(self):
        return 0

    def fourier_closed(self, p):
        raise NotIntegrable("transform of a constant is a delta distribution")

    def derivative(self):
        return ZERO

    def shifted(self, t):
        return self

    def reflected(self):
        return self

    def descriptor(self):
        return {"kind": self.kind, "params": {"value": self.value}}


@dataclass(frozen=True)
class Ramp(TestFn):
    """1 for x <= -eps, -x/eps on [-eps, 0], 0 for x >= 0."""

    eps: float
    kind: ClassVar[str] = "ramp"

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("Ramp width must be positive")

    def _eval(self, x):
        return np.clip(-x / self.eps, 0.0, 1.0)

    def _dsmooth(self, x):
        return np.where((x > -self.eps) & (x < 0.0), -1.0 / self.eps, 0.0)

    def breakpoints(self):
        return (-self.eps, 0.0)

    def limits(self):
        return (1.0, 0.0)

    def variation(self):
        return (-self.eps, 0.0)

    @property
    def degree(self):
        return 1

    def bandwidth(self):
        return 1e3 / self.eps

    def fourier_closed(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(p == 0):
            raise NotIntegrable("Ramp has no ordinary transform at p = 0")
        h = 0.5 * p * self.eps
        return -1j / p * np.exp(-1j * h) * _sinc(h)

    def derivative(self):
        return Box(-self.eps, 0.0, -1.0 / self.eps)

    def descriptor(self):
        return {"kind": self.kind, "params": {"eps": self.eps}}


@dataclass(frozen=True)
class Step(TestFn):
    """Heaviside step at x0.

    ``orientation="down"`` is Theta(x0 - x) (one to the left),
    ``orientation="up"`` is Theta(x - x0).
    """

    x0: float = 0.0
    orientation: str = "down"
    kind: ClassVar[str] = "step"

    def __post_init__(self):
        if self.orientation not in ("down", "up"):
            raise ValueError("orientation must be 'down' or 'up'")

    @property
    def _down(self):
        return self.orientation == "down"

    def _eval(self, x):
        # value at the jump itself is 1/2
        s = np.sign(self.x0 - x) if self._down else np.sign(x - self.x0)
        return 0.5 * (1.0 + s)

    def _dsmooth(self, x):
        return np.zeros_like(x)

    def jumps(self):
        return ((self.x0, -1.0 if self._down else 1.0),)

    def breakpoints(self):
        return (self.x0,)

    def limits(self):
        return (1.0, 0.0) if self._down else (0.0, 1.0)

    def variation(self):
        return (self.x0, self.x0)

    @property
    def degree(self):
        return 0

    def bandwidth(self):
        return math.inf

    def fourier_closed(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(p == 0):
            raise NotIntegrable("Step has no ordinary transform at p = 0")
        val = np.exp(1j * p * self.x0) / (1j * p)
        return val if self._down else -val

    def derivative(self):
        raise NotDifferentiable("derivative of a step is a delta distribution")

    def shifted(self, t):
        return Step(self.x0 + t, self.orientation) if t != 0 else self

    def reflected(self):
        return Step(-self.x0, "up" if self._down else "down")

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"x0": self.x0, "orientation": self.orientation}}


@dataclass(frozen=True)
class RampDiff(TestFn):
    """Ramp(eps)(x) - Ramp(eps)(x + delta): a trapezoid approximating a step."""

    delta: float
    eps: float
    kind: ClassVar[str] = "rampdiff"

    def __post_init__(self):
        if not (self.delta > 0 and self.eps > 0):
            raise ValueError("RampDiff needs delta > 0 and eps > 0")

    def _eval(self, x):
        r = Ramp(self.eps)
        return r._eval(x) - r._eval(x + self.delta)

    def _dsmooth(self, x):
        r = Ramp(self.eps)
        return r._dsmooth(x) - r._dsmooth(x + self.delta)

    def breakpoints(self):
        return tuple(sorted({-self.eps - self.delta, -self.delta, -self.eps, 0.0}))

    def variation(self):
        return (-self.eps - self.delta, 0.0)

    @property
    def degree(self):
        return 1

    def bandwidth(self):
        return 1e3 / self.eps

    def fourier_closed(self, p):
        p = np.asarray(p, dtype=float)
        return (self.delta * np.exp(-0.5j * p * (self.eps + self.delta))
                * _sinc(0.5 * p * self.eps) * _sinc(0.5 * p * self.delta))

    def derivative(self):
        h = -1.0 / self.eps
        return combine([(1.0, Box(-self.eps, 0.0, h)),
                        (-1.0, Box(-self.eps - self.delta, -self.delta, h))])

    def descriptor(self):
        return {"kind": self.kind, "params": {"delta": self.delta, "eps": self.eps}}


@dataclass(frozen=True)
class Box(TestFn):
    """height on [a, b], zero elsewhere."""

    a: float
    b: float
    height: float = 1.0
    kind: ClassVar[str] = "box"

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("Box needs b > a")

    def _eval(self, x):
        inside = (x > self.a) & (x < self.b)
        edge = (x == self.a) | (x == self.b)
        return np.where(inside, self.height, np.where(edge, 0.5 * self.height, 0.0))

    def _dsmooth(self, x):
        return np.zeros_like(x)

    def jumps(self):
        return ((self.a, self.height), (self.b, -self.height))

    def breakpoints(self):
        return (self.a, self.b)

    def variation(self):
        return (self.a, self.b)

    @property
    def degree(self):
        return 0

    def bandwidth(self):
        return math.inf

    def fourier_closed(self, p):
        p = np.asarray(p, dtype=float)
        w = self.b - self.a
        return (self.height * w * np.exp(0.5j * p * (self.a + self.b))
                * _sinc(0.5 * p * w))

    def derivative(self):
        raise NotDifferentiable("derivative of a box is a pair of deltas")

    def shifted(self, t):
        return Box(self.a + t, self.b + t, self.height) if t != 0 else self

    def reflected(self):
        return Box(-self.b, -self.a, self.height)

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"a": self.a, "b": self.b, "height": self.height}}


@dataclass(frozen=True)
class Gaussian(TestFn):
    """exp(-((x - center)/width)**2)."""

    center: float = 0.0
    width: float = 1.0
    kind: ClassVar[str] = "gaussian"

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("Gaussian width must be positive")

    def _eval(self, x):
        return np.exp(-(((x - self.center) / self.width) ** 2))

    def _dsmooth(self, x):
        y = x - self.center
        return -2.0 * y / self.width**2 * self._eval(x)

    def breakpoints(self):
        return (self.center,)

    def variation(self):
        r = GAUSS_REACH * self.width
        return (self.center - r, self.center + r)

    def bandwidth(self):
        return 20.0 / self.width

    def fourier_closed(self, p):
        p = np.asarray(p, dtype=float)
        w = self.width
        return w * math.sqrt(math.pi) * np.exp(1j * p * self.center - 0.25 * (p * w) ** 2)

    def derivative(self):
        return PolyGaussian((0.0, -2.0 / self.width**2), self.center, self.width)

    def shifted(self, t):
        return Gaussian(self.center + t, self.width) if t != 0 else self

    def reflected(self):
        return Gaussian(-self.center, self.width)

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"center": self.center, "width": self.width}}


@dataclass(frozen=True)
class PolyGaussian(TestFn):
    """sum_k coeffs[k] * (x - center)**k * exp(-((x - center)/width)**2)."""

    coeffs: tuple
    center: float = 0.0
    width: float = 1.0
    kind: ClassVar[str] = "polygaussian"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.width > 0:
            raise ValueError("PolyGaussian width must be positive")

    def _poly(self, y):
        return np.polynomial.polynomial.polyval(y, self.coeffs)

    def _eval(self, x):
        y = x - self.center
        return self._poly(y) * np.exp(-((y / self.width) ** 2))

    def _dsmooth(self, x):
        return self.derivative()._eval(x)

    def breakpoints(self):
        return (self.center,)

    def variation(self):
        r = (GAUSS_REACH + len(self.coeffs)) * self.width
        return (self.center - r, self.center + r)

    def bandwidth(self):
        return (20.0 + 2 * len(self.coeffs)) / self.width

    def fourier_closed(self, p):
        p = np.asarray(p, dtype=float)
        w2 = self.width**2
        m_prev = np.zeros_like(p) + 0j
        m_cur = self.width * math.sqrt(math.pi) * np.exp(-0.25 * p * p * w2) + 0j
        total = self.coeffs[0] * m_cur if self.coeffs else np.zeros_like(p) + 0j
        # M_{k+1} = (w^2/2) (k M_{k-1} + i p M_k)
        for k in range(1, len(self.coeffs)):
            m_next = 0.5 * w2 * ((k - 1) * m_prev + 1j * p * m_cur)
            m_prev, m_cur = m_cur, m_next
            total = total + self.coeffs[k] * m_cur
        return np.exp(1j * p * self.center) * total

    def derivative(self):
        a = list(self.coeffs)
        out = [0.0] * (len(a) + 1)
        for k, c in enumerate(a):
            if k > 0:
                out[k - 1] += k * c
            out[k + 1] += -2.0 * c / self.width**2
        return PolyGaussian(tuple(out), self.center, self.width)

    def shifted(self, t):
        return PolyGaussian(self.coeffs, self.center + t, self.width) if t != 0 else self

    def reflected(self):
        flipped = tuple(c * (-1) ** k for k, c in enumerate(self.coeffs))
        return PolyGaussian(flipped, -self.center, self.width)

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"coeffs": list(self.coeffs), "center": self.center,
                           "width": self.width}}


# ---------------------------------------------------------------------------
# composites


@dataclass(frozen=True)
class Shifted(TestFn):
    """x -> base(x - t)."""

    base: TestFn
    t: float
    kind: ClassVar[str] = "shifted"

    def _eval(self, x):
        return self.base._eval(x - self.t)

    def _dsmooth(self, x):
        return self.base._dsmooth(x - self.t)

    def jumps(self):
        return tuple((x + self.t, j) for x, j in self.base.jumps())

    def breakpoints(self):
        return tuple(b + self.t for b in self.base.breakpoints())

    def limits(self):
        return self.base.limits()

    def variation(self):
        v = self.base.variation()
        return None if v is None else (v[0] + self.t, v[1] + self.t)

    @property
    def degree(self):
        return self.base.degree

    def bandwidth(self):
        return self.base.bandwidth()

    def fourier_closed(self, p):
        p = np.asarray(p, dtype=float)
        return np.exp(1j * p * self.t) * self.base.fourier_closed(p)

    def derivative(self):
        return shift(self.base.derivative(), self.t)

    def shifted(self, t):
        return shift(self.base, self.t + t)

    def reflected(self):
        return shift(reflect(self.base), -self.t)

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"base": self.base.descriptor(), "t": self.t}}


@dataclass(frozen=True)
class Reflected(TestFn):
    """x -> base(-x)."""

    base: TestFn
    kind: ClassVar[str] = "reflected"

    def _eval(self, x):
        return self.base._eval(-x)

    def _dsmooth(self, x):
        return -self.base._dsmooth(-x)

    def jumps(self):
        return tuple((-x, -j) for x, j in self.base.jumps())

    def breakpoints(self):
        return tuple(-b for b in self.base.breakpoints())

    def limits(self):
        lo, hi = self.base.limits()
        return (hi, lo)

    def variation(self):
        v = self.base.variation()
        return None if v is None else (-v[1], -v[0])

    @property
    def degree(self):
        return self.base.degree

    def bandwidth(self):
        return self.base.bandwidth()

    def fourier_closed(self, p):
        return self.base.fourier_closed(-np.asarray(p, dtype=float))

    def derivative(self):
        return scale(reflect(self.base.derivative()), -1.0)

    def shifted(self, t):
        return Shifted(self, float(t)) if t != 0 else self

    def reflected(self):
        return self.base

    def descriptor(self):
        return {"kind": self.kind, "params": {"base": self.base.descriptor()}}


@dataclass(frozen=True)
class Scaled(TestFn):
    """c * base."""

    base: TestFn
    c: float
    kind: ClassVar[str] = "scaled"

    def _eval(self, x):
        return self.c * self.base._eval(x)

    def _dsmooth(self, x):
        return self.c * self.base._dsmooth(x)

    def jumps(self):
        return tuple((x, self.c * j) for x, j in self.base.jumps())

    def breakpoints(self):
        return self.base.breakpoints()

    def limits(self):
        lo, hi = self.base.limits()
        return (self.c * lo, self.c * hi)

    def variation(self):
        return self.base.variation()

    @property
    def degree(self):
        return self.base.degree

    def bandwidth(self):
        return self.base.bandwidth()

    def fourier_closed(self, p):
        return self.c * self.base.fourier_closed(p)

    def derivative(self):
        return scale(self.base.derivative(), self.c)

    def shifted(self, t):
        return scale(shift(self.base, t), self.c)

    def reflected(self):
        return scale(reflect(self.base), self.c)

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"base": self.base.descriptor(), "c": self.c}}


@dataclass(frozen=True)
class Sum(TestFn):
    """Linear combination; ``terms`` is a tuple of ``(coefficient, atom)``."""

    terms: tuple
    kind: ClassVar[str] = "sum"

    def _eval(self, x):
        return sum(c * f._eval(x) for c, f in self.terms)

    def _dsmooth(self, x):
        return sum(c * f._dsmooth(x) for c, f in self.terms)

    def jumps(self):
        return tuple((x, c * j) for c, f in self.terms for x, j in f.jumps())

    def breakpoints(self):
        return tuple(sorted({b for _, f in self.terms for b in f.breakpoints()}))

    def limits(self):
        lo = sum(c * f.limits()[0] for c, f in self.terms)
        hi = sum(c * f.limits()[1] for c, f in self.terms)
        return (lo, hi)

    def variation(self):
        vs = [f.variation() for _, f in self.terms]
        vs = [v for v in vs if v is not None]
        if not vs:
            return None
        return (min(v[0] for v in vs), max(v[1] for v in vs))

    @property
    def degree(self):
        degs = [f.degree for _, f in self.terms]
        return None if any(d is None for d in degs) else max(degs)

    def bandwidth(self):
        return max(f.bandwidth() for _, f in self.terms)

    def fourier_closed(self, p):
        return sum(c * f.fourier_closed(p) for c, f in self.terms)

    def derivative(self):
        return combine([(c, f.derivative()) for c, f in self.terms])

    def shifted(self, t):
        return combine([(c, shift(f, t)) for c, f in self.terms]) if t != 0 else self

    def reflected(self):
        return combine([(c, reflect(f)) for c, f in self.terms])

    def descriptor(self):
        return {"kind": self.kind,
                "params": {"terms": [{"c": c, "f": f.descriptor()}
                                     for c, f in self.terms]}}


ZERO = Zero()


# ---------------------------------------------------------------------------
# constructors with light normalisation


def scale(f: TestFn, c: float) -> TestFn:
    c = float(c)
    if c == 0.0 or isinstance(f, Zero):
        return ZERO
    if c == 1.0:
        return f
    if isinstance(f, Scaled):
        return scale(f.base, f.c * c)
    if isinstance(f, Constant):
        return Constant(f.value * c)
    if isinstance(f, Sum):
        return combine([(c * k, g) for k, g in f.terms])
    return Scaled(f, c)


def combine(items) -> TestFn:
    """Build a normalised linear combination from ``(coeff, fn)`` pairs.

    Nested sums and scalings are flattened and equal atoms merged, so that
    ``f - f`` collapses to :data:`ZERO`.
    """
    acc: dict = {}
    const = 0.0

    def visit(c, f):
        nonlocal const
        if isinstance(f, Zero):
            return
        if isinstance(f, Scaled):
            visit(c * f.c, f.base)
        elif isinstance(f, Sum):
            for k, g in f.terms:
                visit(c * k, g)
        elif isinstance(f, Constant):
            const += c * f.value
        else:
            acc.setdefault(f, []).append(c)

    for c, f in items:
        visit(float(c), f)
    # fsum and a canonical order make the result independent of how the
    # combination was built (f + g == g + f)
    terms = [(math.fsum(cs), f) for f, cs in acc.items()]
    terms = sorted(((c, f) for c, f in terms if c != 0.0),
                   key=lambda cf: json.dumps(cf[1].descriptor(), sort_keys=True))
    if const != 0.0:
        terms.append((1.0, Constant(const)))
    if not terms:
        return ZERO
    if len(terms) == 1:
        c, f = terms[0]
        return f if c == 1.0 else Scaled(f, c)
    return Sum(tuple(terms))


def shift(f: TestFn, t: float) -> TestFn:
    """g(x) = f(x - t)."""
    return f.shifted(float(t))


def reflect(f: TestFn) -> TestFn:
    """(P f)(x) = f(-x)."""
    return f.reflected()


def weak_derivative(f: TestFn) -> TestFn:
    return f.derivative()


def evaluate(f: TestFn, x):
    return f(x)


def reversed_ramp(eps: float, x: float = 0.0) -> TestFn:
    """y -> Ramp(eps)(x - y): zero left of x, one right of x + eps."""
    return shift(reflect(Ramp(eps)), x)


# ---------------------------------------------------------------------------
# Fourier transform


def fourier(f: TestFn, p, method: str = "auto", tol: float = 1e-12):
    """f~(p) = int exp(i p x) f(x) dx.

    ``method`` is ``"closed"``, ``"quadrature"`` or ``"auto"`` (closed form
    when available, else quadrature).
    """
    if method in ("auto", "closed"):
        try:
            val = f.fourier_closed(p)
        except NotImplementedError:
            if method == "closed":
                raise
        else:
            return complex(val) if np.ndim(p) == 0 else val
    if np.ndim(p) == 0:
        return fourier_quadrature(f, float(p), tol=tol)
    return np.array([fourier_quadrature(f, float(q), tol=tol) for q in np.ravel(p)]
                    ).reshape(np.shape(p))


def fourier_quadrature(f: TestFn, p: float, tol: float = 1e-12) -> complex:
    """Transform by direct integration over the support of f.

    Panels are cut at the breakpoints of f and, when the integrand oscillates
    more than a few times across the support, at every half period of
    exp(i p x).
    """
    if not f.decays:
        raise NotIntegrable(f"{f.kind} does not decay; no ordinary transform")
    v = f.variation()
    if v is None:
        return 0j
    a, b = v
    if a == b:
        return 0j
    # at least ~8 panels so smooth bumps are resolved by the first pass
    edges = oscillation_edges(a, b, p, f.breakpoints())
    if len(edges) < 9:
        edges = np.unique(np.concatenate([edges, np.linspace(a, b, 9)]))

    def integrand(x):
        return np.exp(1j * p * x) * f._eval(x)

    val, _ = panel_integrate(integrand, edges, tol=tol)
    return complex(val)


def integral(f: TestFn) -> float:
    """int f dx (the transform at p = 0)."""
    if not f.decays:
        raise NotIntegrable(f"{f.kind} is not integrable")
    return float(np.real(fourier(f, 0.0)))


# ---------------------------------------------------------------------------
# JSON descriptors

_ATOMS = {cls.kind: cls for cls in
          (Zero, Constant, Ramp, Step, RampDiff, Box, Gaussian, PolyGaussian)}


def from_descriptor(d: dict) -> TestFn:
    """Inverse of ``TestFn.descriptor()``."""
    kind = d["kind"]
    params = dict(d.get("params", {}))
    if kind in _ATOMS:
        if kind == "polygaussian":
            params["coeffs"] = tuple(params["coeffs"])
        return _ATOMS[kind](**params)
    if kind == "shifted":
        return Shifted(from_descriptor(params["base"]), float(params["t"]))
    if kind == "reflected":
        return Reflected(from_descriptor(params["base"]))
    if kind == "scaled":
        return Scaled(from_descriptor(params["base"]), float(params["c"]))
    if kind == "sum":
        return Sum(tuple((float(t["c"]), from_descriptor(t["f"]))
                         for t in params["terms"]))
    raise ValueError(f"unknown test-function kind {kind!r}")
