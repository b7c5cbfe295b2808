"""Weyl operators W(f) = e^{i j_f} in normal form (one exponent, one phase).

Product rule:  W(f) W(g) = e^{(i/2) sigma(g, f)} W(f + g).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

from .symplectic import sigma
from .testfn import ZERO, TestFn, Zero, from_descriptor, reflect, shift

PHASE_TOL = 1e-12


def unit_phase(theta: float) -> complex:
    """e^{i theta}, returning exact +-1, +-i on quarter turns."""
    q = theta / (math.pi / 2)
    k = round(q)
    if abs(q - k) < 1e-12:
        return (1 + 0j, 1j, -1 + 0j, -1j)[k % 4]
    return cmath.exp(1j * theta)


@dataclass(frozen=True)
class WeylElement:
    """phase * W(f).  ``chirality=-1`` flips the sign of sigma (left movers)."""

    f: TestFn = ZERO
    phase: complex = 1 + 0j
    chirality: int = 1

    def __post_init__(self):
        if abs(abs(self.phase) - 1.0) > PHASE_TOL:
            raise ValueError(f"phase {self.phase} is not unimodular")
        if self.chirality not in (1, -1):
            raise ValueError("chirality must be +1 or -1")

    @property
    def is_identity(self) -> bool:
        return isinstance(self.f, Zero) and abs(self.phase - 1) < 1e-10

    def close_to(self, other: "WeylElement", tol: float = 1e-10) -> bool:
        return self.f == other.f and abs(self.phase - other.phase) <= tol

    def to_dict(self):
        return {"f": self.f.descriptor(),
                "phase": [self.phase.real, self.phase.imag],
                "chirality": self.chirality}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        re, im = d["phase"]
        return cls(from_descriptor(d["f"]), complex(re, im), d.get("chirality", 1))

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


IDENTITY = WeylElement()


def weyl(f: TestFn, chirality: int = 1) -> WeylElement:
    return WeylElement(f, 1 + 0j, chirality)


def _sigma(f, g, chirality):
    if isinstance(f, Zero) or isinstance(g, Zero):
        return 0.0
    return chirality * sigma(f, g)


def _check_same(w1: WeylElement, w2: WeylElement):
    if w1.chirality != w2.chirality:
        raise ValueError("cannot multiply Weyl elements of different chirality")


def multiply(w1: WeylElement, w2: WeylElement) -> WeylElement:
    """Normal form of w1 * w2."""
    _check_same(w1, w2)
    cocycle = unit_phase(0.5 * _sigma(w2.f, w1.f, w1.chirality))
    return WeylElement(w1.f + w2.f, w1.phase * w2.phase * cocycle, w1.chirality)


def multiply_all(*ws: WeylElement) -> WeylElement:
    out = ws[0]
    for w in ws[1:]:
        out = multiply(out, w)
    return out


def adjoint(w: WeylElement) -> WeylElement:
    """(phase W(f))* = conj(phase) W(-f)."""
    return WeylElement(-w.f, w.phase.conjugate(), w.chirality)


def exchange_phase_weyl(f: TestFn, g: TestFn, chirality: int = 1) -> complex:
    """e^{i sigma(g, f)}: W(f) W(g) = e^{i sigma(g, f)} W(g) W(f)."""
    return unit_phase(_sigma(g, f, chirality))


# ---------------------------------------------------------------------------
# automorphisms


@dataclass(frozen=True)
class AutomorphismSpec:
    """One of ``shift``, ``gauge``, ``parity``, ``structural``.

    Use the constructors :meth:`shift`, :meth:`gauge`, :meth:`parity`,
    :meth:`structural` and :meth:`structural_point`.
    """

    kind: str
    t: float = 0.0
    g: TestFn = field(default=ZERO)
    strength: float = 1.0
    point: float | None = None

    def __post_init__(self):
        if self.kind not in ("shift", "gauge", "parity", "structural"):
            raise ValueError(f"unknown automorphism kind {self.kind!r}")
        if not math.isfinite(self.strength):
            raise ValueError("gauge strength must be finite")

    @classmethod
    def shift(cls, t: float):
        return cls("shift", t=float(t))

    @classmethod
    def gauge(cls, g: TestFn, strength: float = 1.0):
        """Inner action of W(strength * g): phase e^{i strength sigma(f, g)}."""
        return cls("gauge", g=g, strength=float(strength))

    @classmethod
    def parity(cls):
        return cls("parity")

    @classmethod
    def structural(cls, gbar: TestFn):
        """W(f) -> e^{i sigma(gbar, f)} W(f)."""
        return cls("structural", g=gbar)

    @classmethod
    def structural_point(cls, x: float):
        """Sharp limit W(f) -> e^{i f(x)} W(f), i.e. gbar = 2 pi Theta(. - x)."""
        return cls("structural", point=float(x))


def apply_automorphism(a: AutomorphismSpec, w: WeylElement) -> WeylElement:
    if a.kind == "shift":
        return WeylElement(shift(w.f, a.t), w.phase, w.chirality)
    if a.kind == "parity":
        return WeylElement(reflect(w.f), w.phase, w.chirality)
    if a.kind == "gauge":
        theta = a.strength * _sigma(w.f, a.g, w.chirality)
    elif a.point is not None:
        theta = w.chirality * float(w.f(a.point))
    else:
        theta = _sigma(a.g, w.f, w.chirality)
    return WeylElement(w.f, w.phase * unit_phase(theta), w.chirality)
