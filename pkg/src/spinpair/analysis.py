"""Entanglement certification, equivalent-condition solvers, and ortho/para
statistics.

Entanglement of formation is reported in bits (base-2 entropy). The
polarization-to-temperature/field mapping uses single-spin polarization
tanh(h*nu/2kT); a two-spin ground-population mapping gives a noticeably
different field figure and is not what the quoted equivalent conditions
mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN_K, GAMMA_1H_HZ_PER_T, H2_ROT_THETA_K, PLANCK_H
from .states import (
    BellPopulations,
    DensityMatrix,
    SpinSystemParams,
    bell_diagonal,
    to_bell_populations,
)

ENTANGLE_TOL = 1e-10

# temperatures above this are reported as the sentinel itself: the solver
# bracket top, meaning "effectively infinite" (reached only as epsilon -> 0)
TEMP_CEILING_K = 1e9


@dataclass(frozen=True)
class EntanglementReport:
    min_pt_eigenvalue: float
    entangled: bool
    concurrence: float
    eof: float
    bell: BellPopulations

    def as_dict(self) -> dict:
        return {
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "entangled": self.entangled,
            "concurrence": self.concurrence,
            "eof": self.eof,
            "bell": self.bell.as_dict(),
        }


@dataclass(frozen=True)
class EquivalentConditions:
    temp_k_at_field: float
    field_t_at_temp: float
    gamma_hz_per_t: float

    def __post_init__(self):
        if not (self.temp_k_at_field > 0 and self.field_t_at_temp > 0):
            raise ValueError("equivalent conditions must be positive")

    def as_dict(self) -> dict:
        return {
            "temp_k_at_field": self.temp_k_at_field,
            "field_t_at_temp": self.field_t_at_temp,
            "gamma_hz_per_t": self.gamma_hz_per_t,
        }


def _as_matrix(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    return m


def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second spin's indices. Accepts a DensityMatrix or a
    plain 4x4 matrix; the output of a state is Hermitian but not necessarily
    positive, so it comes back as a plain matrix."""
    return (_as_matrix(rho).reshape(2, 2, 2, 2)
            .transpose(0, 3, 2, 1)
            .reshape(4, 4))


def min_pt_eigenvalue(rho) -> float:
    return float(np.linalg.eigvalsh(partial_transpose(rho)).min())


_SY_SY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho) -> float:
    """Wootters concurrence from the spin-flipped product
    rho (sy x sy) rho* (sy x sy)."""
    m = _as_matrix(rho)
    r = m @ _SY_SY @ m.conj() @ _SY_SY
    # r is similar to a positive matrix; eigenvalues are real >= 0 up to noise
    lams = np.sqrt(np.clip(np.linalg.eigvals(r).real, 0.0, None))
    lams.sort()
    return float(max(0.0, lams[3] - lams[2] - lams[1] - lams[0]))


def _h2(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def eof(rho) -> float:
    """Entanglement of formation in bits."""
    c = concurrence(rho)
    if c >= 1.0:
        return 1.0
    return _h2((1 + math.sqrt(1 - c * c)) / 2)


def analyze(rho: DensityMatrix) -> EntanglementReport:
    mpt = min_pt_eigenvalue(rho)
    return EntanglementReport(
        min_pt_eigenvalue=mpt,
        entangled=mpt < -ENTANGLE_TOL,
        concurrence=concurrence(rho),
        eof=eof(rho),
        bell=to_bell_populations(rho),
    )


def singlet_mixture_entangled(a: float, x: float) -> bool:
    """Entanglement verdict (by partial transpose) for the mixture
    a*S0 + (1-a)*[x*T0 + (1-x)*(T+1 + T-1)/2]."""
    if not (0 <= a <= 1 and 0 <= x <= 1):
        raise ValueError("a and x must lie in [0, 1]")
    rest = 1 - a
    rho = bell_diagonal(a, rest * x, rest * (1 - x) / 2, rest * (1 - x) / 2)
    return min_pt_eigenvalue(rho) < -ENTANGLE_TOL


def _bisect_log(f, lo: float, hi: float, rel_tol: float = 1e-12,
                max_iter: int = 400) -> float:
    """Root of monotone f on [lo, hi] by bisection in log space."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ArithmeticError("root not bracketed")
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(max_iter):
        lmid = (llo + lhi) / 2
        mid = math.exp(lmid)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            llo = lmid
        else:
            lhi = lmid
        if (lhi - llo) <= rel_tol:
            return math.exp((llo + lhi) / 2)
    raise ArithmeticError("bisection failed to converge")


def effective_conditions(epsilon: float, params: SpinSystemParams,
                         gamma_hz_per_t: float = GAMMA_1H_HZ_PER_T) -> EquivalentConditions:
    """Temperature (at params.nu_hz) and magnetic field (at params.temp_k)
    at which thermal single-spin polarization tanh(h*nu/2kT) equals epsilon.

    Temperatures are capped at TEMP_CEILING_K; anything at the cap means
    "no finite answer at this precision" (epsilon ~ 0).
    """
    if not (0 < epsilon < 1):
        raise ValueError("epsilon must be strictly inside (0, 1)")

    def pol_at_temp(t):
        return math.tanh(PLANCK_H * params.nu_hz / (2 * BOLTZMANN_K * t)) - epsilon

    floor = 1e-9
    if pol_at_temp(TEMP_CEILING_K) >= 0:
        temp = TEMP_CEILING_K
    else:
        temp = _bisect_log(pol_at_temp, floor, TEMP_CEILING_K)

    def pol_at_nu(nu):
        return math.tanh(PLANCK_H * nu / (2 * BOLTZMANN_K * params.temp_k)) - epsilon

    nu = _bisect_log(pol_at_nu, 1e-3, 1e30)
    return EquivalentConditions(
        temp_k_at_field=temp,
        field_t_at_temp=nu / gamma_hz_per_t,
        gamma_hz_per_t=gamma_hz_per_t,
    )


def max_enhancement(params: SpinSystemParams) -> float:
    """Largest signal gain over thermal: 2/B with B = h*nu/kT."""
    return 2.0 / params.b_factor


def para_fraction(temp_k: float) -> float:
    """Equilibrium para fraction of H2 from nuclear-spin statistics:
    even rotational levels pair with the singlet (weight 1), odd with the
    triplet (weight 3). Series truncated once terms drop below 1e-15."""
    if not temp_k > 0:
        raise ValueError("temperature must be positive")
    even = odd = 0.0
    j = 0
    while True:
        term = (2 * j + 1) * math.exp(-H2_ROT_THETA_K * j * (j + 1) / temp_k)
        if j > 0 and term < 1e-15:
            break
        if j % 2 == 0:
            even += term
        else:
            odd += term
        j += 1
    return even / (even + 3 * odd)
