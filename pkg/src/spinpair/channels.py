"""Completely positive trace-preserving maps on two-spin states.

Pulses and free evolution are exact 4x4 unitaries built by eigendecomposition
of their generators. Gradients are modeled as ideal instantaneous dephasing
of every coherence connecting different total-m subspaces; spatial averaging
over the sample is not simulated. Relaxation is a product of independent
T1/T2 exponentials relaxing toward the exact thermal diagonal.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .states import (
    DensityMatrix,
    SpinSystemParams,
    StateValidationError,
    IX, IY, IZ, SX, SY, SZ,
    make_thermal,
)


class ChannelError(ValueError):
    """A channel produced (or was built from) an invalid state or input."""


# total m = mI + mS per Zeeman basis index; +1/2 for |0>
_M_TOTAL = np.array([1.0, 0.0, 0.0, -1.0])
# keep only elements within one total-m subspace (diagonal + the 01/10 block)
_ZEEMAN_MASK = (_M_TOTAL[:, None] == _M_TOTAL[None, :]).astype(float)
_DIAG_MASK = np.eye(4)
_OFFDIAG_MASK = 1.0 - np.eye(4)


def _unitary_from_generator(gen: np.ndarray) -> np.ndarray:
    """exp(-i * gen) for Hermitian gen, via eigendecomposition."""
    w, v = np.linalg.eigh(gen)
    return v @ np.diag(np.exp(-1j * w)) @ v.conj().T


@dataclass(frozen=True)
class Channel:
    """One CPTP map. kind is one of unitary, delay, zeeman_dephase,
    zq_dephase, relax. delay is free evolution carrying its duration;
    relax carries precomputed decay factors and the equilibrium diagonal."""

    kind: str
    label: str
    u: np.ndarray | None = None
    t_s: float | None = None
    j_active: bool | None = None
    f1: float | None = None
    f2: float | None = None
    eq_diag: np.ndarray | None = None

    def __post_init__(self):
        if self.kind in ("unitary", "delay"):
            if self.u is None:
                raise ChannelError(f"{self.kind} channel needs a matrix")
            dev = np.abs(self.u.conj().T @ self.u - np.eye(4)).max()
            if dev > 1e-12:
                raise ChannelError(f"matrix not unitary, deviation {dev:.3e}")
        if self.t_s is not None and self.t_s < 0:
            raise ChannelError("negative duration")

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        if self.kind in ("unitary", "delay"):
            return self.u @ m @ self.u.conj().T
        if self.kind == "zeeman_dephase":
            return m * _ZEEMAN_MASK
        if self.kind == "zq_dephase":
            return m * _DIAG_MASK
        if self.kind == "relax":
            diag = m.diagonal().real
            relaxed = self.eq_diag + (diag - self.eq_diag) * self.f1
            return np.diag(relaxed.astype(complex)) + (m * _OFFDIAG_MASK) * self.f2
        raise ChannelError(f"unknown channel kind {self.kind!r}")

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        def arr_eq(a, b):
            if a is None or b is None:
                return a is b
            return np.array_equal(a, b)
        return (self.kind == other.kind and self.label == other.label
                and self.t_s == other.t_s and self.j_active == other.j_active
                and self.f1 == other.f1 and self.f2 == other.f2
                and arr_eq(self.u, other.u) and arr_eq(self.eq_diag, other.eq_diag))

    __hash__ = None


@dataclass(frozen=True)
class ChannelProgram:
    """Ordered channel list with the params snapshot it was built against.

    statements, when present, holds the source-statement tuples that let the
    program serialize back to sequence text (see seqdsl.program_to_text).
    """

    channels: tuple
    params: SpinSystemParams
    statements: tuple | None = None

    @property
    def total_duration_s(self) -> float:
        return sum(c.t_s for c in self.channels if c.t_s is not None)


def hard_pulse(angle_deg: float, phase_deg: float) -> Channel:
    """Non-selective rotation of both spins: exp(-i*theta*(cos(phi)Fx + sin(phi)Fy))."""
    theta = np.deg2rad(angle_deg)
    phi = np.deg2rad(phase_deg)
    gen = theta * (np.cos(phi) * (IX + SX) + np.sin(phi) * (IY + SY))
    return Channel(kind="unitary", label=f"pulse({angle_deg:g},{phase_deg:g})",
                   u=_unitary_from_generator(gen))


def free_evolution(t_s: float, params: SpinSystemParams,
                   coupling_mode: str = "weak", include_j: bool = True) -> Channel:
    """Rotating-frame evolution at the doublet midpoint carrier.

    Spin I sits at offset -delta_nu/2, spin S at +delta_nu/2. weak keeps
    only the secular 2*pi*J*IzSz coupling; strong uses the full 2*pi*J*I.S.
    include_j=False drops the coupling entirely (selective-pulse delays and
    gradient periods assume this separation by default).
    """
    if t_s < 0:
        raise ChannelError("negative evolution time")
    if coupling_mode not in ("weak", "strong"):
        raise ChannelError(f"unknown coupling mode {coupling_mode!r}")
    dnu, j = params.delta_nu_hz, params.j_hz
    if include_j and coupling_mode == "weak":
        if dnu <= j:
            raise ChannelError(
                f"weak coupling needs delta_nu > J, got {dnu} <= {j}")
        if dnu <= 5 * j:
            warnings.warn(
                f"weak-coupling evolution with delta_nu = {dnu} <= 5*J = {5*j}; "
                "secular approximation is marginal", stacklevel=2)
    h = 2 * np.pi * (-dnu / 2) * IZ + 2 * np.pi * (dnu / 2) * SZ
    if include_j:
        if coupling_mode == "weak":
            h = h + 2 * np.pi * j * (IZ @ SZ)
        else:
            h = h + 2 * np.pi * j * (IX @ SX + IY @ SY + IZ @ SZ)
    tag = coupling_mode if include_j else "nocoupling"
    return Channel(kind="delay", label=f"evolve({t_s:g},{tag})",
                   u=_unitary_from_generator(h * t_s), t_s=t_s, j_active=include_j)


def zeeman_dephase() -> Channel:
    """Ideal gradient crush: zero every element connecting different total m."""
    return Channel(kind="zeeman_dephase", label="zeeman_dephase")


def zq_dephase() -> Channel:
    """Slow-addition model: additionally dephases the zero-quantum 01/10
    block, leaving only the Zeeman diagonal."""
    return Channel(kind="zq_dephase", label="zq_dephase")


def relax(t_s: float, params: SpinSystemParams) -> Channel:
    """Off-diagonals decay with T2; populations relax to the exact thermal
    diagonal with T1. relax(t1) then relax(t2) equals relax(t1+t2)."""
    if t_s < 0:
        raise ChannelError("negative relaxation time")
    eq = make_thermal(params, mode="exact").matrix.diagonal().real
    return Channel(kind="relax", label=f"relax({t_s:g})", t_s=t_s,
                   f1=float(np.exp(-t_s / params.t1_s)),
                   f2=float(np.exp(-t_s / params.t2_s)),
                   eq_diag=eq)


# Phase pairs (first, second) of the two hard 90s, per target spin. Pinned
# by the readout-sign test: on the singlet the target-I pair must produce
# coefficients -1/2 on 2IxSz and +1/2 on 2IzSx while a thermal spectator
# keeps its z term. The relative phase is 135 degrees in magnitude; its
# sign flips with the target.
_SELECTIVE_PHASES = {"I": (135.0, 0.0), "S": (45.0, 180.0)}


def selective_pulse(target_spin: str, params: SpinSystemParams,
                    j_during_delay: bool = False) -> ChannelProgram:
    """90-degree rotation of one spin about its +y axis, built from two hard
    90s separated by 1/(4*delta_nu) of chemical-shift evolution. The other
    spin returns to its initial z alignment up to a z phase."""
    if target_spin not in _SELECTIVE_PHASES:
        raise ChannelError(f"target must be 'I' or 'S', got {target_spin!r}")
    p1, p2 = _SELECTIVE_PHASES[target_spin]
    tau = 1.0 / (4.0 * params.delta_nu_hz)
    chans = (
        hard_pulse(90.0, p1),
        free_evolution(tau, params, include_j=j_during_delay),
        hard_pulse(90.0, p2),
    )
    return ChannelProgram(channels=chans, params=params,
                          statements=(("selective", target_spin),))


def gradient_period(params: SpinSystemParams,
                    j_during_gradient: bool = False) -> tuple:
    """One filtration half: 1/delta_nu of shift evolution under a crush
    gradient, modeled as evolution followed by ideal m-subspace dephasing."""
    tau = 1.0 / params.delta_nu_hz
    return (free_evolution(tau, params, include_j=j_during_gradient),
            zeeman_dephase())


def filtration_sequence(params: SpinSystemParams,
                        j_during_gradients: bool = False) -> ChannelProgram:
    """Two gradient periods of length 1/delta_nu around a hard 90.

    Projects any input toward singlet-triplet diagonal form with equal
    T+1/T-1 weights while leaving the singlet itself untouched.
    """
    g1 = gradient_period(params, j_during_gradients)
    g2 = gradient_period(params, j_during_gradients)
    chans = g1 + (hard_pulse(90.0, 0.0),) + g2
    return ChannelProgram(
        channels=chans, params=params,
        statements=(("gradient_period",), ("pulse", 90.0, 0.0), ("gradient_period",)),
    )


def apply(program: ChannelProgram, rho: DensityMatrix) -> DensityMatrix:
    """Left-to-right composition; every intermediate state is revalidated,
    so a defective channel raises instead of propagating garbage."""
    m = rho.matrix
    state = rho
    for ch in program.channels:
        m = ch.apply_matrix(m)
        try:
            state = DensityMatrix(m)
        except StateValidationError as exc:
            raise ChannelError(f"channel {ch.label} broke state invariants: {exc}") from exc
        m = state.matrix
    return state


def apply_channel(channel: Channel, rho: DensityMatrix) -> DensityMatrix:
    try:
        return DensityMatrix(channel.apply_matrix(rho.matrix))
    except StateValidationError as exc:
        raise ChannelError(f"channel {channel.label} broke state invariants: {exc}") from exc
