"""FID synthesis, spectra, J-doubling, integration, and calibration.

Signal convention: s(t) = tr(rho(t) (I+ + S+)), evolved under weak-coupling
free evolution with T2 decay on off-diagonal elements per dwell step. The
transform halves the first point, zero-fills once, and scales by 2*dwell,
which makes the integral of an isolated absorptive line equal the envelope
amplitude of its time-domain component: a unit-area Lorentzian integrates
to 1 over the full axis. Line full-width at half maximum is 1/(pi*T2) plus
any apodization broadening.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .channels import apply, free_evolution, hard_pulse, selective_pulse
from .states import (
    BELL_BASIS,
    BellPopulations,
    DensityMatrix,
    IX, IY, SX, SY,
    SpinSystemParams,
    StateValidationError,
    make_pseudo_pure,
    make_singlet,
    make_thermal,
)

F_PLUS = (IX + 1j * IY) + (SX + 1j * SY)

_OFFDIAG = 1.0 - np.eye(4)


class SpectroError(ValueError):
    pass


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Fid:
    """Complex time-domain signal sampled every dwell_s seconds."""

    samples: np.ndarray
    dwell_s: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 1 or len(s) < 2:
            raise SpectroError("FID needs at least 2 samples in a 1-d array")
        if not self.dwell_s > 0:
            raise SpectroError("dwell must be positive")
        if not np.isfinite(s).all():
            raise SpectroError("FID contains non-finite samples")
        s = np.array(s)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def times_s(self) -> np.ndarray:
        return np.arange(self.n) * self.dwell_s


@dataclass(frozen=True)
class Spectrum:
    """Frequency axis (rotating-frame offsets, Hz) and complex values;
    the real part is absorptive for data synthesized here."""

    freqs_hz: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freqs_hz, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if f.shape != v.shape or f.ndim != 1:
            raise SpectroError("axis and values must be 1-d and the same length")
        if not (np.diff(f) > 0).all():
            raise SpectroError("frequency axis must be strictly increasing")
        f = np.array(f); f.setflags(write=False)
        v = np.array(v); v.setflags(write=False)
        object.__setattr__(self, "freqs_hz", f)
        object.__setattr__(self, "values", v)


def synthesize_fid(rho0: DensityMatrix, params: SpinSystemParams,
                   n: int, dwell_s: float) -> Fid:
    """Weak-coupling FID of rho0: record tr(rho F+), evolve one dwell,
    decay off-diagonals by exp(-dwell/T2), repeat."""
    if not _is_pow2(n):
        raise SpectroError(f"n must be a power of two >= 2, got {n}")
    step = free_evolution(dwell_s, params, coupling_mode="weak").u
    step_h = step.conj().T
    decay = float(np.exp(-dwell_s / params.t2_s))
    m = rho0.matrix.copy()
    out = np.empty(n, dtype=complex)
    for k in range(n):
        out[k] = np.trace(m @ F_PLUS)
        m = step @ m @ step_h
        m = m * np.eye(4) + (m * _OFFDIAG) * decay
    return Fid(samples=out, dwell_s=dwell_s)


def add_noise(fid: Fid, sigma: float, seed: int) -> Fid:
    """Additive complex Gaussian noise, explicitly seeded."""
    if sigma < 0:
        raise SpectroError("noise sigma must be non-negative")
    rng = np.random.default_rng(seed)
    noise = rng.normal(0, sigma, fid.n) + 1j * rng.normal(0, sigma, fid.n)
    return Fid(samples=fid.samples + noise, dwell_s=fid.dwell_s)


def j_double(fid: Fid, j_apparent_hz: float, rounds: int) -> Fid:
    """Each round multiplies by 2cos(pi*J_app*t) and doubles J_app, turning
    an antiphase doublet of splitting J into one of splitting 2J. In-phase
    doublets come out as 1:2:1 triplets instead, so apply this to antiphase
    data only."""
    if rounds < 0:
        raise SpectroError("rounds must be >= 0")
    if not j_apparent_hz > 0:
        raise SpectroError("apparent J must be positive")
    t = fid.times_s
    out = np.array(fid.samples)
    ja = j_apparent_hz
    for _ in range(rounds):
        out = out * (2 * np.cos(np.pi * ja * t))
        ja *= 2
    return Fid(samples=out, dwell_s=fid.dwell_s)


def fourier(fid: Fid, apodize_hz: float = 0.0) -> Spectrum:
    """Discrete transform with first-point halving, x2 zero-fill, and
    2*dwell scaling (line integral == time-domain envelope amplitude).
    apodize_hz adds Lorentzian broadening to every line's FWHM."""
    if not _is_pow2(fid.n):
        raise SpectroError(f"transform needs a power-of-two length, got {fid.n}")
    if apodize_hz < 0:
        raise SpectroError("apodization must be non-negative")
    x = np.array(fid.samples)
    if apodize_hz > 0:
        x = x * np.exp(-np.pi * apodize_hz * fid.times_s)
    x[0] *= 0.5
    x = np.concatenate([x, np.zeros(fid.n, dtype=complex)])
    values = 2 * fid.dwell_s * np.fft.fft(x)
    freqs = np.fft.fftfreq(2 * fid.n, fid.dwell_s)
    order = np.argsort(freqs)
    return Spectrum(freqs_hz=freqs[order], values=values[order])


def integrate(spectrum: Spectrum, lo_hz: float, hi_hz: float) -> float:
    """Trapezoidal integral of the real part over [lo, hi]."""
    f = spectrum.freqs_hz
    if not lo_hz < hi_hz:
        raise SpectroError(f"need lo < hi, got [{lo_hz}, {hi_hz}]")
    if lo_hz < f[0] or hi_hz > f[-1]:
        raise SpectroError(
            f"region [{lo_hz}, {hi_hz}] outside axis [{f[0]}, {f[-1]}]")
    mask = (f >= lo_hz) & (f <= hi_hz)
    if mask.sum() < 2:
        return 0.0
    return float(np.trapezoid(spectrum.values[mask].real, f[mask]))


def component_regions(params: SpinSystemParams) -> tuple:
    """Four wide integration windows, one per multiplet component: each
    doublet at -+delta_nu/2 is split at its center, windows a quarter of
    delta_nu wide. Wide windows keep Lorentzian tail truncation negligible
    for both original and J-doubled splittings."""
    span = params.delta_nu_hz / 4
    out = []
    for center in (-params.delta_nu_hz / 2, +params.delta_nu_hz / 2):
        out.append((center - span, center))
        out.append((center, center + span))
    return tuple(out)


def line_regions(params: SpinSystemParams, j_apparent_hz: float | None = None,
                 widths: float = 3.0, apodize_hz: float = 0.0) -> tuple:
    """Narrow auto-placed windows: each doublet line +- widths linewidths
    (FWHM). Useful for crowded spectra; quantitative area ratios prefer
    component_regions, which keeps tail truncation negligible."""
    ja = params.j_hz if j_apparent_hz is None else j_apparent_hz
    fwhm = 1 / (np.pi * params.t2_s) + apodize_hz
    out = []
    for center in (-params.delta_nu_hz / 2, +params.delta_nu_hz / 2):
        for line in (center - ja / 2, center + ja / 2):
            out.append((line - widths * fwhm, line + widths * fwhm))
    return tuple(out)


@dataclass(frozen=True)
class CalibrationResult:
    """Polarization estimate and its inputs. corrected_ratio is exactly
    raw_ratio * f_active; epsilon = corrected_ratio / max_enhancement."""

    epsilon: float
    epsilon_err: float
    raw_ratio: float
    corrected_ratio: float
    max_enhancement: float

    def __post_init__(self):
        if not (-1e-9 <= self.epsilon <= 1.05):
            raise SpectroError(
                f"epsilon {self.epsilon:.4f} outside [0, 1] beyond tolerance")

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "epsilon_err": self.epsilon_err,
            "raw_ratio": self.raw_ratio,
            "corrected_ratio": self.corrected_ratio,
            "max_enhancement": self.max_enhancement,
        }


def calibrate(ph2_integrals, thermal_integrals, scan_norm: float,
              params: SpinSystemParams,
              max_enhancement: float | None = None,
              epsilon_err: float = 0.0) -> CalibrationResult:
    """Polarization from hyperpolarized vs thermal multiplet integrals.

    Signals are summed absolute component integrals. scan_norm rescales for
    unequal averaging between the two acquisitions (1 when both are single
    simulated shots). max_enhancement defaults to 2/B from params; passing
    an externally quoted value reproduces someone else's arithmetic.
    """
    sig_ph2 = float(np.abs(np.asarray(ph2_integrals, dtype=float)).sum())
    sig_th = float(np.abs(np.asarray(thermal_integrals, dtype=float)).sum())
    if sig_th <= 0:
        raise SpectroError("thermal integrals must not be all zero")
    if not scan_norm > 0:
        raise SpectroError("scan_norm must be positive")
    raw = sig_ph2 * scan_norm / sig_th
    corrected = raw * params.f_active
    max_enh = 2.0 / params.b_factor if max_enhancement is None else max_enhancement
    if not max_enh > 0:
        raise SpectroError("max_enhancement must be positive")
    return CalibrationResult(
        epsilon=corrected / max_enh,
        epsilon_err=epsilon_err,
        raw_ratio=raw,
        corrected_ratio=corrected,
        max_enhancement=max_enh,
    )


@dataclass(frozen=True)
class ReadoutConfig:
    """Acquisition and processing settings for the population readout."""

    n_points: int = 16384
    dwell_s: float = 1.0 / 4096.0
    j_double_rounds: int = 4
    target_spin: str = "I"


def readout_integrals(rho: DensityMatrix, params: SpinSystemParams,
                      readout: ReadoutConfig = ReadoutConfig()) -> np.ndarray:
    """Push a state through the selective readout: selective 90, FID,
    J-doubling, and the four component_regions integrals."""
    prepared = apply(selective_pulse(readout.target_spin, params), rho)
    fid = synthesize_fid(prepared, params, readout.n_points, readout.dwell_s)
    fid = j_double(fid, params.j_hz, readout.j_double_rounds)
    spec = fourier(fid)
    return np.array([integrate(spec, lo, hi) for lo, hi in component_regions(params)])


@functools.lru_cache(maxsize=8)
def _readout_matrix(params: SpinSystemParams, readout: ReadoutConfig) -> np.ndarray:
    """Columns are the component integrals of each singlet-triplet basis
    state pushed through the readout. Built numerically, never hand-derived."""
    cols = []
    for k in range(4):
        ket = BELL_BASIS[:, k]
        basis_state = DensityMatrix(np.outer(ket, ket.conj()))
        cols.append(readout_integrals(basis_state, params, readout))
    return np.column_stack(cols)


# orthonormal basis of the sum-zero subspace of R^4; any population vector
# is p = (1/4,1/4,1/4,1/4) + N q, which bakes the unit-trace constraint
# into the inversion below
_SUM_ZERO_BASIS = np.linalg.qr(
    np.array([[1.0, 0, 0], [-1, 1, 0], [0, -1, 1], [0, 0, -1]]))[0]


def imbalance_to_populations(component_integrals, params: SpinSystemParams,
                             readout: ReadoutConfig = ReadoutConfig()) -> BellPopulations:
    """Invert the linear map from singlet-triplet populations to the four
    component integrals of the selective readout.

    Any trace-preserving readout is blind to the maximally mixed state, so
    the bare 4x4 map is rank 3; the inversion solves on the physical slice
    of unit-trace population vectors, where the map is well conditioned.
    A readout whose antiphase terms never develop (J effectively zero)
    leaves the slice map rank deficient and raises.
    """
    y = np.asarray(component_integrals, dtype=float)
    if y.shape != (4,):
        raise SpectroError("expected exactly four component integrals")
    m = _readout_matrix(params, readout)
    reduced = m @ _SUM_ZERO_BASIS
    svals = np.linalg.svd(reduced, compute_uv=False)
    if svals[0] == 0 or svals[-1] < 1e-8 * svals[0]:
        raise SpectroError(
            "degenerate readout: population differences do not reach the "
            "component integrals (is J resolvable?)")
    p0 = np.full(4, 0.25)
    q, *_ = np.linalg.lstsq(reduced, y - m @ p0, rcond=None)
    p = p0 + _SUM_ZERO_BASIS @ q
    try:
        return BellPopulations(pS=float(p[0]), pT0=float(p[1]),
                               pTplus=float(p[2]), pTminus=float(p[3]),
                               offBell=0.0)
    except StateValidationError as exc:
        raise SpectroError(
            f"component integrals are inconsistent with any Bell-diagonal "
            f"state: {exc}") from exc
