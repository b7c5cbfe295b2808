import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fock_commutator, gauss_ft, jordan_wigner, lattice_kernel
from thermoweyl import _kernels
from thermoweyl import lattice as lat
from thermoweyl.errors import ConfigTooLarge, DimensionMismatch
from thermoweyl.testfn import ZERO, Constant, Gaussian, PolyGaussian

SMALL = lat.LatticeConfig(10.0, 2, 2.0)


def test_config_limits():
    assert SMALL.n_modes == 5 and SMALL.dim == 32
    assert np.allclose(SMALL.momenta, 2 * np.pi * np.arange(-2, 3) / 10.0)
    with pytest.raises(ConfigTooLarge):
        lat.LatticeConfig(10.0, 8, 1.0)
    with pytest.raises(ValueError):
        lat.LatticeConfig(-1.0, 2, 1.0)


def test_annihilators_match_kronecker_construction():
    ref = jordan_wigner(SMALL.n_modes)
    for a in range(SMALL.n_modes):
        assert np.array_equal(lat.annihilator(a, SMALL).to_dense(), ref[a])
        assert np.array_equal(lat.creator(a, SMALL).to_dense(), ref[a].T)


def test_canonical_anticommutation():
    c = [lat.annihilator(a, SMALL) for a in range(SMALL.n_modes)]
    eye = np.eye(SMALL.dim)
    for a in range(SMALL.n_modes):
        for b in range(SMALL.n_modes):
            anti = (c[a] @ c[b].dagger() + c[b].dagger() @ c[a]).to_dense()
            assert np.allclose(anti, eye if a == b else 0.0)
            assert np.allclose((c[a] @ c[b] + c[b] @ c[a]).to_dense(), 0.0)


def test_bilinear_equals_operator_products():
    rng = np.random.default_rng(3)
    kernel = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    op = lat.bilinear(kernel, SMALL).to_dense()
    ref = sum(kernel[a, b] * (lat.creator(a, SMALL) @ lat.annihilator(b, SMALL)).to_dense()
              for a in range(5) for b in range(5))
    assert np.allclose(op, ref)
    with pytest.raises(DimensionMismatch):
        lat.bilinear(np.eye(3), SMALL)


@pytest.mark.parametrize("m", [1, 3, 5])
def test_numba_and_numpy_kernels_agree(m):
    rng = np.random.default_rng(m)
    n = 2 * m + 1
    kernel = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    kernel[0, 1] = 0.0

    def dense(rows, cols, vals):
        out = np.zeros((1 << n, 1 << n), dtype=complex)
        np.add.at(out, (rows, cols), vals)
        return out

    fast = dense(*_kernels.bilinear_coo(kernel, n, use_numba=True))
    slow = dense(*_kernels.bilinear_coo(kernel, n, use_numba=False))
    assert np.array_equal(fast, slow)
    for a in (0, n - 1):
        for create in (False, True):
            assert np.array_equal(dense(*_kernels.mode_coo(a, n, create, use_numba=True)),
                                  dense(*_kernels.mode_coo(a, n, create, use_numba=False)))
    assert np.array_equal(_kernels.occupations(n, use_numba=True),
                          _kernels.occupations(n, use_numba=False))


def test_current_kernel_entries():
    f = Gaussian(0.3, 1.0)
    k = lat.current_kernel(f, SMALL)
    for a in range(5):
        for b in range(5):
            p = SMALL.momenta[b] - SMALL.momenta[a]
            ref = np.exp(1j * p * 0.3) * math.sqrt(math.pi) * math.exp(-p * p / 4) / 10.0
            assert k[a, b] == pytest.approx(ref, abs=1e-15)


def test_zero_current_and_constant_current():
    state = lat.gibbs_state(SMALL)
    assert lat.build_current(ZERO, SMALL, state).matrix.nnz == 0
    # a constant has only zero-momentum transfer: J is proportional to N - <N>
    kernel = np.eye(5) * 0.7
    j = lat.bilinear(kernel, SMALL) - lat.identity(SMALL).scaled(state.expect(lat.bilinear(kernel, SMALL)))
    n = lat.number_operator(SMALL)
    centred = n - lat.identity(SMALL).scaled(state.expect(n))
    assert np.allclose(j.to_dense(), 0.7 * centred.to_dense())
    assert Constant(1.0).limits() == (1.0, 1.0)


def test_gibbs_occupations():
    cfg = lat.LatticeConfig(10.0, 3, 1.7)
    state = lat.gibbs_state(cfg)
    for a, k in enumerate(cfg.momenta):
        occ = state.expect(lat.creator(a, cfg) @ lat.annihilator(a, cfg))
        assert occ.real == pytest.approx(1 / (1 + math.exp(1.7 * k)), abs=1e-14)
    assert state.expect(lat.identity(cfg)) == pytest.approx(1.0)
    mid = cfg.mode_cutoff
    assert state.expect(lat.creator(mid, cfg) @ lat.annihilator(mid, cfg)).real == pytest.approx(0.5)


def test_fermi_handles_negative_and_large_beta():
    assert lat.fermi(1.0, 1e4) == 0.0
    assert lat.fermi(1.0, -1e4) == 1.0
    assert lat.fermi(0.0, 3.0) == 0.5


def test_lattice_kms():
    cfg = lat.LatticeConfig(10.0, 2, 1.3)
    state = lat.gibbs_state(cfg)
    a = lat.build_current(Gaussian(0.0, 1.0), cfg, state)
    b = lat.build_current(PolyGaussian((0.0, 1.0), 0.2, 1.0), cfg, state)
    # <A B> = <B A_{i beta}>
    lhs = state.expect_product(a, b)
    rhs = state.expect_product(b, lat.modular_evolve(a, cfg))
    assert abs(lhs - rhs) < 1e-13


def test_fock_commutator_matches_dense_oracle(oracle):
    f, g = Gaussian(0.0, 1.0), PolyGaussian((0.0, 1.0), 0.0, 1.0)
    val = lat.commutator_expectation(f, g, SMALL)
    assert abs(val - complex(*oracle["fock_commutator_L10_M2_beta2"])) < 1e-14


def test_dense_oracle_recomputes():
    k = SMALL.momenta
    kf = lattice_kernel(lambda p: gauss_ft(p), k, 10.0)
    kg = lattice_kernel(lambda p: 0.5j * p * gauss_ft(p), k, 10.0)
    direct = fock_commutator(kf, kg, k, SMALL.beta)
    val = lat.commutator_expectation(Gaussian(0.0, 1.0), PolyGaussian((0.0, 1.0), 0.0, 1.0), SMALL)
    assert abs(val - direct) < 1e-14


@given(beta=st.floats(-4, 4), c=st.floats(-1, 1))
def test_one_body_formula_equals_fock(beta, c):
    cfg = lat.LatticeConfig(8.0, 2, beta)
    f, g = Gaussian(c, 1.0), PolyGaussian((0.2, 1.0), -c, 0.9)
    assert abs(lat.commutator_expectation(f, g, cfg)
               - lat.commutator_expectation_modes(f, g, cfg)) < 1e-13


def test_self_commutator_is_zero():
    f = Gaussian(0.0, 1.0)
    assert lat.commutator_expectation(f, f, SMALL) == 0


def test_tracial_and_sign_flip():
    f, g = Gaussian(0.0, 2.0), PolyGaussian((0.0, 1.0), 0.0, 2.0)
    cfg = lat.LatticeConfig(20.0, 4, 5.0)
    assert abs(lat.commutator_expectation(f, g, cfg.with_beta(0.0))) < 1e-12
    plus = lat.commutator_expectation(f, g, cfg)
    minus = lat.commutator_expectation(f, g, cfg.with_beta(-5.0))
    assert abs(plus + minus) < 1e-10


def test_schwinger_errors_decrease():
    f, g = Gaussian(0.0, 2.0), PolyGaussian((0.0, 1.0), 0.0, 2.0)
    errs = [lat.schwinger_check(f, g, lat.LatticeConfig(20.0, m, 5.0)).rel_error for m in (3, 4, 5)]
    assert errs[0] > errs[1] > errs[2]
    rep = lat.schwinger_check(f, g, lat.LatticeConfig(20.0, 5, 5.0))
    assert '"mode_cutoff": 5' in rep.to_json()


def test_shift_limits():
    cfg = lat.LatticeConfig(20.0, 7, 5.0)
    kernel = np.zeros((1, 1)) + 1.0
    assert abs(lat.shift_limit_check(kernel, 7, cfg) - 1 / 20.0) < 0.02 / 20.0
    assert abs(lat.shift_limit_check(kernel, -7, cfg)) < 0.02 / 20.0


def test_shift_zero_thermal_sum():
    cfg = lat.LatticeConfig(10.0, 3, 1.5)
    diag = np.array([0.3, 1.0, 0.3])
    val = lat.shift_limit_check(np.diag(diag), 0, cfg)
    q = 2 * np.pi * np.arange(-1, 2) / 10.0
    assert abs(val - np.sum(diag / (10.0 * (1 + np.exp(1.5 * q))))) < 1e-14
    with pytest.raises(ConfigTooLarge):
        lat.shift_limit_check(np.diag(diag), 3, cfg)


def test_bare_correlator():
    cfg = lat.LatticeConfig(10.0, 3, 2.0)
    val = lat.lattice_bare_correlator(0.4, 0.4, cfg)
    assert val.imag == pytest.approx(0.0, abs=1e-15)
    assert val.real == pytest.approx(np.sum(lat.fermi(cfg.momenta, 2.0)) / 10.0)
    tracial = lat.lattice_bare_correlator(1.0, 0.0, cfg.with_beta(0.0))
    dirichlet = np.sum(np.exp(-1j * cfg.momenta)) / 20.0
    assert abs(tracial - dirichlet) < 1e-14


def test_bare_correlator_matches_periodised_continuum():
    """Thermal part of the box correlator against the line correlator.

    Subtracting the zero-temperature sea removes the sharp-cutoff
    oscillations; by Poisson summation the box mode sum equals the sum of
    the line correlator over images u + mL.
    """
    from thermoweyl.correlators import bare_two_point
    from thermoweyl.symplectic import ThermalParams

    box, beta = 10.0, 2.0
    cfg = lat.LatticeConfig(box, 7, beta)
    cold = cfg.with_beta(1e6)
    images = np.arange(-2000, 2001) * box

    def thermal_part(u):
        return bare_two_point(u, ThermalParams(beta, 0.0)) - 1j / (2 * np.pi * u)

    for u in (0.5, 1.0, 2.5, 4.5):
        lattice = (lat.lattice_bare_correlator(u, 0.0, cfg)
                   - lat.lattice_bare_correlator(u, 0.0, cold))
        line = np.sum(thermal_part(u + images))
        assert abs(lattice - line) < 1e-2 * abs(line)


@pytest.mark.parametrize("flag,expected", [("0", "False"), ("1", "True")])
def test_environment_flag_selects_backend(flag, expected):
    import os
    import subprocess
    import sys

    code = ("from thermoweyl import _kernels, lattice as lat; from thermoweyl.testfn import Gaussian, PolyGaussian;"
            "cfg = lat.LatticeConfig(10.0, 2, 2.0);"
            "print(_kernels.USE_NUMBA, repr(lat.commutator_expectation(Gaussian(0.0, 1.0), "
            "PolyGaussian((0.0, 1.0), 0.0, 1.0), cfg)))")
    env = dict(os.environ, THERMOWEYL_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split(maxsplit=1)
    assert out[0] == expected
    ref = lat.commutator_expectation(Gaussian(0.0, 1.0), PolyGaussian((0.0, 1.0), 0.0, 1.0), SMALL)
    assert complex(out[1]) == ref
