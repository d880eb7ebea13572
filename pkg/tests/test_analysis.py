import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from spinpair.analysis import (
    TEMP_CEILING_K,
    analyze,
    concurrence,
    effective_conditions,
    eof,
    max_enhancement,
    min_pt_eigenvalue,
    para_fraction,
    partial_transpose,
    singlet_mixture_entangled,
)
from spinpair.constants import BOLTZMANN_K, GAMMA_1H_HZ_PER_T, PLANCK_H
from spinpair.states import (
    DensityMatrix,
    SpinSystemParams,
    bell_diagonal,
    make_pseudo_pure,
    make_singlet,
)

from conftest import random_density

SY2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
YY = np.kron(SY2, SY2)


def wootters_concurrence(rho):
    # independent route via the principal square roots
    rt = scipy.linalg.sqrtm(rho)
    tilde = YY @ rho.conj() @ YY
    r = scipy.linalg.sqrtm(rt @ tilde @ rt)
    lam = np.sort(np.linalg.eigvalsh(np.real_if_close(r)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def binary_entropy(x):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def eof_from_concurrence(c):
    return binary_entropy((1 + math.sqrt(1 - min(1.0, c) ** 2)) / 2)


def werner(w):
    return make_pseudo_pure(w, make_singlet())


def test_partial_transpose_involution(rng):
    rho = random_density(rng).matrix
    assert np.allclose(partial_transpose(partial_transpose(rho)), rho)
    # transposes the second factor of a product operator
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.allclose(partial_transpose(np.kron(a, b)), np.kron(a, b.T))


def test_partial_transpose_preserves_trace_and_hermiticity(rng):
    rho = random_density(rng).matrix
    pt = partial_transpose(rho)
    assert np.trace(pt) == pytest.approx(1.0)
    assert np.allclose(pt, pt.conj().T)


def test_singlet_extremes():
    s = make_singlet()
    assert min_pt_eigenvalue(s.matrix) == pytest.approx(-0.5, abs=1e-12)
    assert concurrence(s.matrix) == pytest.approx(1.0, abs=1e-12)
    assert eof(s.matrix) == pytest.approx(1.0, abs=1e-12)


def test_maximally_mixed_is_separable():
    m = np.eye(4, dtype=complex) / 4
    assert min_pt_eigenvalue(m) == pytest.approx(0.25, abs=1e-14)
    assert concurrence(m) == pytest.approx(0.0, abs=1e-12)
    assert eof(m) == 0.0


def test_werner_closed_forms():
    # w singlet + (1-w)/4 identity: min PT eigenvalue (1-3w)/4,
    # concurrence max(0, (3w-1)/2)
    for w in np.linspace(0.0, 1.0, 101):
        rho = werner(float(w)).matrix
        assert min_pt_eigenvalue(rho) == pytest.approx((1 - 3 * w) / 4, abs=1e-10)
        assert concurrence(rho) == pytest.approx(
            max(0.0, (3 * w - 1) / 2), abs=1e-10)


def test_werner_threshold():
    third = 1.0 / 3.0
    assert abs(min_pt_eigenvalue(werner(third).matrix)) < 1e-10
    assert min_pt_eigenvalue(werner(third - 0.01).matrix) > 1e-10
    assert min_pt_eigenvalue(werner(third + 0.01).matrix) < -1e-10
    assert not analyze(werner(third - 0.01)).entangled
    assert analyze(werner(third + 0.01)).entangled


def test_concurrence_against_sqrtm_route(random_states):
    for rho in random_states[:50]:
        got = concurrence(rho.matrix)
        want = wootters_concurrence(rho.matrix)
        assert got == pytest.approx(want, abs=1e-8)


def test_ppt_and_concurrence_agree(random_states):
    # for two qubits both criteria are exact: entangled iff C > 0 iff PT < 0
    for rho in random_states:
        mpt = min_pt_eigenvalue(rho.matrix)
        c = concurrence(rho.matrix)
        if c > 1e-8:
            assert mpt < 0
        if mpt < -1e-8:
            assert c > 0


def test_product_states_stay_ppt(rng):
    for _ in range(200):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        ra = a @ a.conj().T
        rb = b @ b.conj().T
        rho = np.kron(ra / np.trace(ra).real, rb / np.trace(rb).real)
        assert min_pt_eigenvalue(rho) >= -1e-12
        assert concurrence(rho) <= 1e-8


def test_eof_matches_binary_entropy_formula():
    for c in np.linspace(0.0, 1.0, 1001):
        rho = bell_diagonal((1 + c) / 2, (1 - c) / 2, 0.0, 0.0)
        assert concurrence(rho.matrix) == pytest.approx(c, abs=1e-10)
        assert eof(rho.matrix) == pytest.approx(eof_from_concurrence(c), abs=1e-9)


def test_eof_monotone_in_concurrence():
    cs = np.linspace(0.0, 1.0, 1001)
    vals = [eof_from_concurrence(c) for c in cs]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_reported_mixture_numbers():
    rho = bell_diagonal(0.937, 0.045, 0.009, 0.009)
    rep = analyze(rho)
    assert rep.entangled
    assert rep.concurrence == pytest.approx(0.874, abs=1e-3)
    assert rep.eof == pytest.approx(0.8222422287582869, abs=1e-9)
    assert rep.bell.pS == pytest.approx(0.937)
    d = rep.as_dict()
    assert d["bell"]["pS"] == pytest.approx(0.937)
    assert set(d) == {"min_pt_eigenvalue", "entangled", "concurrence",
                      "eof", "bell"}


def test_analyze_flags_threshold_consistently(random_states):
    for rho in random_states[:100]:
        rep = analyze(rho)
        assert rep.entangled == (rep.min_pt_eigenvalue < -1e-10)


def test_singlet_mixture_verdict_closed_form():
    # family: pS=a, pT0=(1-a)x, pT+-=(1-a)(1-x)/2 each. Bell-diagonal states
    # are entangled iff their largest population exceeds 1/2.
    for a in np.linspace(0.0, 1.0, 51):
        for x in np.linspace(0.0, 1.0, 51):
            want = max(a, (1 - a) * x) > 0.5 + 1e-12
            got = singlet_mixture_entangled(float(a), float(x))
            assert got == want, (a, x)


def test_singlet_mixture_threshold_in_singlet_fraction():
    # on the triplet-balanced slice x <= 1/2 the verdict reduces to a > 1/2
    for x in np.linspace(0.0, 0.5, 26):
        assert not singlet_mixture_entangled(0.5, float(x))
        assert not singlet_mixture_entangled(0.49, float(x))
        assert singlet_mixture_entangled(0.51, float(x))


def test_singlet_mixture_input_validation():
    for a, x in ((-0.1, 0.5), (1.1, 0.5), (0.5, -0.1), (0.5, 1.1)):
        with pytest.raises(ValueError):
            singlet_mixture_entangled(a, x)


def test_effective_conditions_match_atanh_closed_form(params):
    eps = 0.916
    cond = effective_conditions(eps, params)
    t_closed = PLANCK_H * params.nu_hz / (2 * BOLTZMANN_K * math.atanh(eps))
    nu_closed = 2 * BOLTZMANN_K * params.temp_k * math.atanh(eps) / PLANCK_H
    assert cond.temp_k_at_field == pytest.approx(t_closed, rel=1e-9)
    assert cond.field_t_at_temp == pytest.approx(
        nu_closed / GAMMA_1H_HZ_PER_T, rel=1e-9)
    assert cond.gamma_hz_per_t == GAMMA_1H_HZ_PER_T


def test_effective_conditions_reference_values(params):
    cond = effective_conditions(0.916, params)
    assert cond.temp_k_at_field == pytest.approx(0.006138752355376928, rel=1e-9)
    assert cond.field_t_at_temp == pytest.approx(451462.55585786, rel=1e-6)
    # reported rounded values
    assert cond.temp_k_at_field == pytest.approx(6.4e-3, rel=0.10)
    assert cond.field_t_at_temp == pytest.approx(0.45e6, rel=0.03)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 1.0 - 1e-9))
def test_effective_conditions_round_trip(eps):
    params = SpinSystemParams()
    cond = effective_conditions(eps, params)
    if cond.temp_k_at_field < TEMP_CEILING_K:
        back = math.tanh(PLANCK_H * params.nu_hz
                         / (2 * BOLTZMANN_K * cond.temp_k_at_field))
        assert back == pytest.approx(eps, rel=1e-9)
    back_f = math.tanh(PLANCK_H * cond.field_t_at_temp * GAMMA_1H_HZ_PER_T
                       / (2 * BOLTZMANN_K * params.temp_k))
    assert back_f == pytest.approx(eps, rel=1e-9)


def test_effective_conditions_ceiling_sentinel(params):
    cond = effective_conditions(1e-15, params)
    assert cond.temp_k_at_field == TEMP_CEILING_K


def test_effective_conditions_input_validation(params):
    for eps in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            effective_conditions(eps, params)


def test_max_enhancement(params):
    assert max_enhancement(params) == pytest.approx(2 / params.b_factor)
    assert max_enhancement(params) == pytest.approx(30734.013206908174, abs=1e-6)


def test_para_fraction_reference_values():
    assert para_fraction(20.0) == pytest.approx(0.9985900293469946, rel=1e-12)
    assert para_fraction(1000.0) == pytest.approx(0.25, abs=3e-3)


def test_para_fraction_brute_force_partition_sum():
    # direct rotational partition function with theta = 87.6 K
    theta = 87.6
    for temp in (15.0, 25.0, 77.0, 295.0):
        para = sum((2 * j + 1) * math.exp(-j * (j + 1) * theta / temp)
                   for j in range(0, 80, 2))
        ortho = 3 * sum((2 * j + 1) * math.exp(-j * (j + 1) * theta / temp)
                        for j in range(1, 81, 2))
        assert para_fraction(temp) == pytest.approx(
            para / (para + ortho), rel=1e-10)


def test_para_fraction_limits_and_monotonicity():
    assert para_fraction(1e-3) == pytest.approx(1.0, abs=1e-12)
    temps = np.linspace(5.0, 500.0, 60)
    vals = [para_fraction(float(t)) for t in temps]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0.25  # approaches 1/4 from above
    with pytest.raises(ValueError):
        para_fraction(0.0)
