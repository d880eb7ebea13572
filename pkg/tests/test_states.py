import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinpair.constants import BOLTZMANN_K, PLANCK_H
from spinpair.states import (
    BELL_BASIS,
    BellPopulations,
    DensityMatrix,
    NAMED_STATES,
    SpinSystemParams,
    StateValidationError,
    bell_diagonal,
    fidelity,
    from_product_operators,
    make_named_state,
    make_pseudo_pure,
    make_singlet,
    make_thermal,
    purity,
    to_bell_populations,
    to_product_operators,
)

from conftest import random_density

# Pauli matrices written out independently of the package definitions.
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)
PAULI = {"e": ID2, "x": SX, "y": SY, "z": SZ}


def test_bell_basis_is_orthonormal():
    assert np.allclose(BELL_BASIS.conj().T @ BELL_BASIS, np.eye(4))


def test_bell_basis_column_order():
    # columns: singlet, T0, T+1=|11>, T-1=|00>
    s = (np.array([0, 1, 0, 0]) - np.array([0, 0, 1, 0])) / np.sqrt(2)
    t0 = (np.array([0, 1, 0, 0]) + np.array([0, 0, 1, 0])) / np.sqrt(2)
    assert np.allclose(BELL_BASIS[:, 0], s)
    assert np.allclose(BELL_BASIS[:, 1], t0)
    assert np.allclose(BELL_BASIS[:, 2], [0, 0, 0, 1])
    assert np.allclose(BELL_BASIS[:, 3], [1, 0, 0, 0])


def test_density_matrix_validation():
    with pytest.raises(StateValidationError):
        DensityMatrix(np.eye(3))
    with pytest.raises(StateValidationError):
        DensityMatrix(np.eye(4) / 2)  # trace 2
    nonherm = np.eye(4) / 4 + 0j
    nonherm[0, 1] = 0.2
    with pytest.raises(StateValidationError):
        DensityMatrix(nonherm)
    negative = np.diag([0.6, 0.5, -0.05, -0.05]).astype(complex)
    with pytest.raises(StateValidationError):
        DensityMatrix(negative)


def test_density_matrix_is_frozen():
    rho = make_singlet()
    with pytest.raises((ValueError, AttributeError)):
        rho.matrix[0, 0] = 1.0


def test_singlet_matrix():
    psi = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    assert np.allclose(make_singlet().matrix, np.outer(psi, psi.conj()))


def test_singlet_product_operators():
    c = to_product_operators(make_singlet())
    assert c[("e", "e")] == pytest.approx(0.25)
    for ax in "xyz":
        assert c[(ax, ax)] == pytest.approx(-0.5)
        assert c[(ax, "e")] == pytest.approx(0.0, abs=1e-15)
        assert c[("e", ax)] == pytest.approx(0.0, abs=1e-15)


def test_product_operator_round_trip(random_states):
    for rho in random_states[:50]:
        back = from_product_operators(to_product_operators(rho))
        assert np.allclose(back.matrix, rho.matrix, atol=1e-12)


def test_product_operator_extraction_matches_trace_formula(rng):
    # c_ab = tr(rho (sa x sb)) / 2 for every non-identity pair
    rho = random_density(rng)
    c = to_product_operators(rho)
    for a in "exyz":
        for b in "exyz":
            op = np.kron(PAULI[a], PAULI[b])
            expect = np.trace(rho.matrix @ op).real
            expect *= 0.25 if (a, b) == ("e", "e") else 0.5
            assert c[(a, b)] == pytest.approx(expect, abs=1e-12)


def test_thermal_linearized():
    p = SpinSystemParams()
    b = PLANCK_H * p.nu_hz / (BOLTZMANN_K * p.temp_k)
    rho = make_thermal(p)
    c = to_product_operators(rho)
    assert c[("z", "e")] == pytest.approx(b / 4)
    assert c[("e", "z")] == pytest.approx(b / 4)
    assert c[("z", "z")] == pytest.approx(0.0, abs=1e-15)
    assert b == pytest.approx(6.507448235072842e-05)


def test_thermal_exact_boltzmann():
    p = SpinSystemParams()
    b = p.b_factor
    m = np.array([1.0, 0.0, 0.0, -1.0])
    w = np.exp(b * m)
    expect = np.diag(w / w.sum()).astype(complex)
    rho = make_thermal(p, mode="exact")
    assert np.allclose(rho.matrix, expect, atol=1e-15)


def test_thermal_exact_deep_cryo_ground_population():
    # B = 3.127 puts nearly all weight on |00>
    h_over_k = PLANCK_H / BOLTZMANN_K
    temp = h_over_k * 400e6 / 3.127
    p = SpinSystemParams(temp_k=temp)
    rho = make_thermal(p, mode="exact")
    g = rho.matrix[0, 0].real
    w = np.exp(3.127 * np.array([1.0, 0.0, 0.0, -1.0]))
    assert g == pytest.approx(w[0] / w.sum(), rel=1e-9)
    assert g == pytest.approx(0.9177502642126417, abs=1e-12)


def test_thermal_linearized_rejects_large_b():
    h_over_k = PLANCK_H / BOLTZMANN_K
    p = SpinSystemParams(temp_k=h_over_k * 400e6 / 0.2)  # B = 0.2
    with pytest.raises(ValueError):
        make_thermal(p, mode="linearized")
    make_thermal(p, mode="exact")  # exact mode has no such limit


def test_thermal_unknown_mode():
    with pytest.raises(ValueError):
        make_thermal(SpinSystemParams(), mode="quadratic")


def test_pseudo_pure_bell_fractions():
    rho = make_pseudo_pure(0.916, make_singlet())
    pops = to_bell_populations(rho)
    assert pops.pS == pytest.approx(0.916 + 0.084 / 4)
    assert pops.pT0 == pytest.approx(0.084 / 4)
    assert pops.offBell == pytest.approx(0.0, abs=1e-12)


def test_pseudo_pure_limits():
    mixed = make_pseudo_pure(0.0, make_singlet())
    assert np.allclose(mixed.matrix, np.eye(4) / 4)
    pure = make_pseudo_pure(1.0, make_singlet())
    assert np.allclose(pure.matrix, make_singlet().matrix)
    with pytest.raises(ValueError):
        make_pseudo_pure(1.2, make_singlet())
    with pytest.raises(ValueError):
        make_pseudo_pure(-0.1, make_singlet())


def test_named_states():
    for name in NAMED_STATES:
        rho = make_named_state(name)
        assert purity(rho) == pytest.approx(1.0 if name != "MaximallyMixed" else 0.25)
    t0 = make_named_state("T0")
    assert to_bell_populations(t0).pT0 == pytest.approx(1.0)
    assert np.allclose(make_named_state("ZeemanGround").matrix,
                       np.diag([1, 0, 0, 0]).astype(complex))
    phip = make_named_state("PhiPlus")
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    assert np.allclose(phip.matrix, np.outer(psi, psi.conj()))
    with pytest.raises(ValueError, match="T0"):
        make_named_state("bogus")


def test_bell_diagonal_and_populations_round_trip():
    rho = bell_diagonal(0.937, 0.045, 0.009, 0.009)
    pops = to_bell_populations(rho)
    assert pops.as_tuple() == pytest.approx((0.937, 0.045, 0.009, 0.009))
    assert pops.offBell == pytest.approx(0.0, abs=1e-14)


def test_bell_populations_validation():
    with pytest.raises(ValueError):
        BellPopulations(pS=0.9, pT0=0.3, pTplus=0.0, pTminus=0.0, offBell=0.0)
    with pytest.raises(ValueError):
        BellPopulations(pS=1.1, pT0=-0.1, pTplus=0.0, pTminus=0.0, offBell=0.0)


def test_off_bell_measures_coherence(rng):
    rho = random_density(rng)
    pops = to_bell_populations(rho)
    # frobenius norm of the off-diagonal Bell-frame block, computed directly
    tilde = BELL_BASIS.conj().T @ rho.matrix @ BELL_BASIS
    off = tilde - np.diag(np.diag(tilde))
    assert pops.offBell == pytest.approx(np.linalg.norm(off), abs=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        SpinSystemParams(j_hz=0.0)
    with pytest.raises(ValueError):
        SpinSystemParams(f_active=0.0)
    with pytest.raises(ValueError):
        SpinSystemParams(f_active=1.2)
    with pytest.raises(ValueError):
        SpinSystemParams(t2_s=-1.0)
    SpinSystemParams(f_active=1.0)


def test_fidelity_pure_target(rng):
    rho = random_density(rng)
    s = make_singlet()
    expect = np.real(np.trace(rho.matrix @ s.matrix))
    assert fidelity(rho, s) == pytest.approx(expect, abs=1e-10)
    assert fidelity(s, s) == pytest.approx(1.0)


def test_fidelity_symmetric_and_bounded(rng):
    a, b = random_density(rng), random_density(rng)
    f = fidelity(a, b)
    assert fidelity(b, a) == pytest.approx(f, abs=1e-10)
    assert -1e-10 <= f <= 1 + 1e-10


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_bell_diagonal_any_simplex_point_is_valid(a, b, c):
    total = a + b + c
    if total > 1.0:
        a, b, c = a / total, b / total, c / total
        total = 1.0
    rho = bell_diagonal(a, b, c, 1.0 - total)
    assert np.trace(rho.matrix).real == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0))
def test_pseudo_pure_purity_monotone(eps):
    rho = make_pseudo_pure(eps, make_singlet())
    assert purity(rho) == pytest.approx(0.25 + 0.75 * eps * eps, abs=1e-12)
