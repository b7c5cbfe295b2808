"""Finite-mode fermion oracle in momentum space.

Modes k_j = 2 pi j / L for j = -M..M are stored at index a = j + M.  With
psi(x) = L^{-1/2} sum_k e^{ikx} c_k the smeared current is

    J_f = sum_{a,b} f~(k_b - k_a) / L  c_a^dag c_b  -  <same>_beta,

and the Gibbs state is rho ~ exp(-beta sum_a k_a n_a), so that
<c_a^dag c_a> = 1 / (1 + exp(beta k_a)).  beta = 0 is the tracial state and
negative beta is allowed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import ConfigTooLarge, DimensionMismatch
from .symplectic import sigma
from .testfn import TestFn, fourier

MAX_MODES = 16


@dataclass(frozen=True)
class LatticeConfig:
    box_length: float
    mode_cutoff: int
    beta: float

    def __post_init__(self):
        if not self.box_length > 0:
            raise ValueError("box_length must be positive")
        if self.mode_cutoff < 0 or int(self.mode_cutoff) != self.mode_cutoff:
            raise ValueError("mode_cutoff must be a non-negative integer")
        if self.n_modes > MAX_MODES:
            raise ConfigTooLarge(
                f"{self.n_modes} modes exceed the limit of {MAX_MODES} (Fock dimension 2^{MAX_MODES})")

    @property
    def n_modes(self) -> int:
        return 2 * self.mode_cutoff + 1

    @property
    def dim(self) -> int:
        return 1 << self.n_modes

    @property
    def momenta(self) -> np.ndarray:
        j = np.arange(-self.mode_cutoff, self.mode_cutoff + 1)
        return 2.0 * math.pi * j / self.box_length

    def with_beta(self, beta: float) -> "LatticeConfig":
        return LatticeConfig(self.box_length, self.mode_cutoff, beta)


def fermi(k, beta):
    """1 / (1 + exp(beta k)), overflow-safe for either sign of beta."""
    return 0.5 * (1.0 - np.tanh(0.5 * beta * np.asarray(k, dtype=float)))


@dataclass(frozen=True, eq=False)
class FockOperator:
    matrix: sp.csr_matrix
    n_modes: int
    number_conserving: bool = False

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other):
        _match(self, other)
        return FockOperator((self.matrix + other.matrix).tocsr(), self.n_modes,
                            self.number_conserving and other.number_conserving)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def __matmul__(self, other):
        _match(self, other)
        return FockOperator((self.matrix @ other.matrix).tocsr(), self.n_modes,
                            self.number_conserving and other.number_conserving)

    def scaled(self, c) -> "FockOperator":
        return FockOperator((c * self.matrix).tocsr(), self.n_modes, self.number_conserving)

    def dagger(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T.tocsr(), self.n_modes, self.number_conserving)

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def commutator(self, other) -> "FockOperator":
        return self @ other - other @ self

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


def _match(a: FockOperator, b: FockOperator):
    if a.matrix.shape != b.matrix.shape:
        raise DimensionMismatch(f"{a.matrix.shape} vs {b.matrix.shape}")


def _from_coo(rows, cols, vals, cfg_modes, number_conserving):
    dim = 1 << cfg_modes
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    return FockOperator(mat, cfg_modes, number_conserving)


def bilinear(kernel, cfg: LatticeConfig) -> FockOperator:
    """sum_{a,b} kernel[a, b] c_a^dag c_b."""
    kernel = np.asarray(kernel, dtype=complex)
    if kernel.shape != (cfg.n_modes, cfg.n_modes):
        raise DimensionMismatch(f"kernel shape {kernel.shape} for {cfg.n_modes} modes")
    rows, cols, vals = _kernels.bilinear_coo(kernel, cfg.n_modes)
    return _from_coo(rows, cols, vals, cfg.n_modes, True)


def identity(cfg: LatticeConfig) -> FockOperator:
    return FockOperator(sp.identity(cfg.dim, dtype=complex, format="csr"), cfg.n_modes, True)


def annihilator(a: int, cfg: LatticeConfig) -> FockOperator:
    rows, cols, vals = _kernels.mode_coo(a, cfg.n_modes, False)
    return _from_coo(rows, cols, vals, cfg.n_modes, False)


def creator(a: int, cfg: LatticeConfig) -> FockOperator:
    rows, cols, vals = _kernels.mode_coo(a, cfg.n_modes, True)
    return _from_coo(rows, cols, vals, cfg.n_modes, False)


def number_operator(cfg: LatticeConfig) -> FockOperator:
    return bilinear(np.eye(cfg.n_modes), cfg)


def current_kernel(f: TestFn, cfg: LatticeConfig) -> np.ndarray:
    """kernel[a, b] = f~(k_b - k_a) / L."""
    k = cfg.momenta
    diff = k[None, :] - k[:, None]
    return np.asarray(fourier(f, diff), dtype=complex) / cfg.box_length


# ---------------------------------------------------------------------------
# Gibbs state


@dataclass(frozen=True, eq=False)
class GibbsState:
    """Diagonal density matrix rho ~ exp(-beta sum_a k_a n_a)."""

    weights: np.ndarray
    cfg: LatticeConfig

    @classmethod
    def build(cls, cfg: LatticeConfig) -> "GibbsState":
        occ = _kernels.occupations(cfg.n_modes)
        log_w = -cfg.beta * (occ @ cfg.momenta)
        log_w -= log_w.max()
        w = np.exp(log_w)
        return cls(w / w.sum(), cfg)

    @property
    def energies(self) -> np.ndarray:
        occ = _kernels.occupations(self.cfg.n_modes)
        return occ @ self.cfg.momenta

    def expect(self, op: FockOperator) -> complex:
        if op.dim != self.weights.size:
            raise DimensionMismatch(f"operator dim {op.dim} vs state dim {self.weights.size}")
        return complex(np.dot(self.weights, op.matrix.diagonal()))

    def expect_product(self, a: FockOperator, b: FockOperator) -> complex:
        """trace(rho a b) without forming the product."""
        _match(a, b)
        prod = a.matrix.multiply(b.matrix.T)
        return complex(np.dot(self.weights, np.asarray(prod.sum(axis=1)).ravel()))

    def commutator_expectation(self, a: FockOperator, b: FockOperator) -> complex:
        return self.expect_product(a, b) - self.expect_product(b, a)


def gibbs_state(cfg: LatticeConfig) -> GibbsState:
    return GibbsState.build(cfg)


def gibbs_expectation(op: FockOperator, cfg: LatticeConfig) -> complex:
    return gibbs_state(cfg).expect(op)


def modular_evolve(op: FockOperator, cfg: LatticeConfig) -> FockOperator:
    """A_{i beta} = exp(-beta H) A exp(beta H) with H = sum_a k_a n_a."""
    energies = GibbsState.build(cfg).energies
    coo = op.matrix.tocoo()
    factor = np.exp(-cfg.beta * (energies[coo.row] - energies[coo.col]))
    mat = sp.coo_matrix((coo.data * factor, (coo.row, coo.col)), shape=coo.shape).tocsr()
    return FockOperator(mat, op.n_modes, op.number_conserving)


def build_current(f: TestFn, cfg: LatticeConfig, state: GibbsState | None = None) -> FockOperator:
    """Normal-ordered current J_f (Gibbs expectation subtracted)."""
    raw = bilinear(current_kernel(f, cfg), cfg)
    state = state or gibbs_state(cfg)
    shift = state.expect(raw)
    return raw - identity(cfg).scaled(shift)


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class SchwingerReport:
    lattice_value: complex
    continuum_sigma: float
    rel_error: float
    mode_cutoff: int
    box_length: float
    beta: float

    def to_dict(self):
        d = asdict(self)
        d["lattice_value"] = [self.lattice_value.real, self.lattice_value.imag]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def commutator_expectation(f: TestFn, g: TestFn, cfg: LatticeConfig) -> complex:
    """<[J_f, J_g]>_beta computed in the full Fock space."""
    state = gibbs_state(cfg)
    jf = build_current(f, cfg, state)
    jg = jf if f == g else build_current(g, cfg, state)
    return state.commutator_expectation(jf, jg)


def commutator_expectation_modes(f: TestFn, g: TestFn, cfg: LatticeConfig) -> complex:
    """Same quantity from the one-body formula sum K_f[a,b] K_g[b,a] (n_a - n_b)."""
    kf, kg = current_kernel(f, cfg), current_kernel(g, cfg)
    n = fermi(cfg.momenta, cfg.beta)
    return complex(np.sum(kf * kg.T * (n[:, None] - n[None, :])))


def schwinger_check(f: TestFn, g: TestFn, cfg: LatticeConfig) -> SchwingerReport:
    value = commutator_expectation(f, g, cfg)
    s = sigma(f, g)
    target = 1j * s
    rel = abs(value - target) / abs(target) if s != 0 else abs(value)
    return SchwingerReport(value, s, float(rel), cfg.mode_cutoff, cfg.box_length, cfg.beta)


def shift_limit_check(kernel, shift_j: int, cfg: LatticeConfig) -> complex:
    """Gibbs expectation of sum K[i,i'] c^dag c with the labels moved by shift_j.

    ``kernel`` is a square matrix on the centred labels q_i = 2 pi i / L,
    |i| <= (size-1)/2.  Label q is placed on the lattice mode of momentum
    -(q + 2 pi shift_j / L), so that large positive shifts fill the modes
    (the expectation tends to sum_i K[i,i] / L) and large negative shifts
    empty them (the expectation tends to 0).
    """
    kernel = np.asarray(kernel, dtype=complex)
    size = kernel.shape[0]
    if kernel.shape != (size, size) or size % 2 == 0:
        raise DimensionMismatch("kernel must be square with an odd number of labels")
    half = size // 2
    if half + abs(shift_j) > cfg.mode_cutoff:
        raise ConfigTooLarge(
            f"labels up to {half} shifted by {shift_j} leave the window |j| <= {cfg.mode_cutoff}")
    labels = np.arange(-half, half + 1)
    index = -(labels + shift_j) + cfg.mode_cutoff
    full = np.zeros((cfg.n_modes, cfg.n_modes), dtype=complex)
    full[np.ix_(index, index)] = kernel / cfg.box_length
    return gibbs_expectation(bilinear(full, cfg), cfg)


def lattice_bare_correlator(x: float, xp: float, cfg: LatticeConfig) -> complex:
    """(1/L) sum_j exp(-i k_j (x - x')) <c_j^dag c_j>, occupations from the Fock state."""
    state = gibbs_state(cfg)
    occ = _kernels.occupations(cfg.n_modes)
    n = state.weights @ occ
    return complex(np.sum(np.exp(-1j * cfg.momenta * (x - xp)) * n) / cfg.box_length)
