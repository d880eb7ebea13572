"""End-to-end simulated pipeline and the headline-number reproduction table.

run_pipeline drives the whole chain: pseudo-pure singlet -> selective
readout -> FID -> J-doubling -> integration, thermal reference -> hard 90 ->
FID -> integration, then calibration of the polarization from the ratio.
Simulated acquisitions see the entire sample, so calibration inside the
pipeline always runs with f_active = 1 regardless of the experiment value
carried in params.

paper_repro builds the full table of reproduced quantities with their
reference values and tolerances; every row must pass for the package to
call itself a faithful reproduction.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import analysis, spectro
from .channels import apply, filtration_sequence, hard_pulse, selective_pulse, zq_dephase, ChannelProgram
from .spectro import CalibrationResult, Fid, ReadoutConfig
from .states import (
    DensityMatrix,
    SpinSystemParams,
    bell_diagonal,
    fidelity,
    make_pseudo_pure,
    make_singlet,
    make_thermal,
    to_bell_populations,
    to_product_operators,
)

PAPER_BELL_FRACTIONS = (0.937, 0.045, 0.009, 0.009)


def polarized_fid(params: SpinSystemParams, epsilon: float,
                  readout: ReadoutConfig = ReadoutConfig()) -> Fid:
    """FID of the pseudo-pure singlet after the selective readout pulse."""
    rho = make_pseudo_pure(epsilon, make_singlet())
    prepared = apply(selective_pulse(readout.target_spin, params), rho)
    return spectro.synthesize_fid(prepared, params, readout.n_points, readout.dwell_s)


def thermal_fid(params: SpinSystemParams,
                readout: ReadoutConfig = ReadoutConfig()) -> Fid:
    """FID of the exact thermal state after a hard 90 about +y."""
    rho = apply(
        ChannelProgram(channels=(hard_pulse(90.0, 90.0),), params=params),
        make_thermal(params, mode="exact"))
    return spectro.synthesize_fid(rho, params, readout.n_points, readout.dwell_s)


def _polarized_integrals(fid: Fid, params: SpinSystemParams,
                         readout: ReadoutConfig) -> np.ndarray:
    doubled = spectro.j_double(fid, params.j_hz, readout.j_double_rounds)
    spec = spectro.fourier(doubled)
    return np.array([spectro.integrate(spec, lo, hi)
                     for lo, hi in spectro.component_regions(params)])


def _thermal_integrals(fid: Fid, params: SpinSystemParams) -> np.ndarray:
    spec = spectro.fourier(fid)
    return np.array([spectro.integrate(spec, lo, hi)
                     for lo, hi in spectro.component_regions(params)])


def run_pipeline(params: SpinSystemParams | None = None, epsilon: float = 0.916,
                 noise_sigma: float = 0.0, seed: int = 0, n_boot: int = 100,
                 readout: ReadoutConfig = ReadoutConfig()) -> CalibrationResult:
    """Recover the polarization of a simulated pseudo-singlet against a
    simulated thermal reference. With noise_sigma > 0, epsilon_err is the
    standard deviation over n_boot noisy replicates (seeded)."""
    params = params or SpinSystemParams()
    cal_params = dataclasses.replace(params, f_active=1.0)
    fid_p = polarized_fid(params, epsilon, readout)
    fid_t = thermal_fid(params, readout)

    def recover(fp: Fid, ft: Fid) -> float:
        return spectro.calibrate(
            _polarized_integrals(fp, params, readout),
            _thermal_integrals(ft, params),
            scan_norm=1.0, params=cal_params).epsilon

    result = spectro.calibrate(
        _polarized_integrals(fid_p, params, readout),
        _thermal_integrals(fid_t, params),
        scan_norm=1.0, params=cal_params)
    if noise_sigma > 0 and n_boot > 0:
        reps = []
        for i in range(n_boot):
            fp = spectro.add_noise(fid_p, noise_sigma, seed + 2 * i)
            ft = spectro.add_noise(fid_t, noise_sigma, seed + 2 * i + 1)
            reps.append(recover(fp, ft))
        err = float(np.std(reps, ddof=1)) if len(reps) > 1 else 0.0
        result = dataclasses.replace(result, epsilon_err=err)
    return result


def antiphase_recovery_fraction(splitting_hz: float, fwhm_hz: float) -> float:
    """Closed-form fraction of an antiphase Lorentzian component's area
    captured by integrating one half of the multiplet: the two tails cancel
    to (2/pi) arctan(splitting / fwhm)."""
    return (2 / math.pi) * math.atan(splitting_hz / fwhm_hz)


def antiphase_test_fid(j_hz: float, fwhm_hz: float, center_hz: float,
                       n: int = 65536, dwell_s: float = 1.0 / 1024.0) -> Fid:
    """Synthetic single-spin antiphase doublet: i sin(pi J t) modulation on
    a Lorentzian envelope of the given FWHM, line areas +-1/2."""
    t = np.arange(n) * dwell_s
    s = (1j * np.sin(np.pi * j_hz * t)
         * np.exp(2j * np.pi * center_hz * t)
         * np.exp(-np.pi * fwhm_hz * t))
    return Fid(samples=s, dwell_s=dwell_s)


def measured_recovery(j_hz: float, fwhm_hz: float, rounds: int) -> float:
    """Integrate one component of a synthetic antiphase doublet, after the
    given number of doubling rounds, relative to its true area of 1/2."""
    center = 100.0
    fid = antiphase_test_fid(j_hz, fwhm_hz, center)
    if rounds:
        fid = spectro.j_double(fid, j_hz, rounds)
    spec = spectro.fourier(fid)
    return spectro.integrate(spec, center, center + 400.0) / 0.5


def _row(name, value, reference, tol, kind, passed=None, note=""):
    if passed is None:
        if kind == "abs":
            passed = abs(value - reference) <= tol
        elif kind == "rel":
            passed = abs(value - reference) <= tol * abs(reference)
        else:
            raise ValueError(kind)
    return {
        "name": name,
        "value": value,
        "reference": reference,
        "tolerance": f"{kind} {tol:g}" if kind in ("abs", "rel") else str(tol),
        "pass": bool(passed),
        "note": note,
    }


def _bound_row(name, value, bound, op, note=""):
    passed = value >= bound if op == ">=" else value <= bound
    return {"name": name, "value": value, "reference": bound,
            "tolerance": op, "pass": bool(passed), "note": note}


def paper_repro(params: SpinSystemParams | None = None,
                readout: ReadoutConfig = ReadoutConfig(),
                n_random_states: int = 1000, rng_seed: int = 20260819):
    """All headline quantities with reference values and pass/fail.

    Returns (rows, all_pass). The f_active and other fields of params feed
    the quoted-arithmetic rows, so perturbing them shows up as failures.
    """
    params = params or SpinSystemParams()
    rows = []
    b = params.b_factor

    # selective readout on the singlet: antiphase coefficient pair
    rho = apply(selective_pulse("I", params), make_singlet())
    c = to_product_operators(rho)
    rows.append(_row("selective readout: coefficient of 2IxSz",
                     c["x", "z"], -0.5, 1e-9, "abs"))
    rows.append(_row("selective readout: coefficient of 2IzSx",
                     c["z", "x"], +0.5, 1e-9, "abs"))

    # hard 90 about y on the linearized thermal state: B/4 on Ix and Sx
    rho = apply(ChannelProgram(channels=(hard_pulse(90.0, 90.0),), params=params),
                make_thermal(params, mode="linearized"))
    ct = to_product_operators(rho)
    rows.append(_row("thermal readout: coefficient of Ix",
                     ct["x", "e"], b / 4, 1e-12, "abs"))
    rows.append(_row("thermal readout: coefficient of Sx",
                     ct["e", "x"], b / 4, 1e-12, "abs"))

    # enhancement ceiling and quoted-arithmetic polarization
    max_enh = analysis.max_enhancement(params)
    rows.append(_row("maximum enhancement 2/B", max_enh, 30736.0, 2e-4, "rel",
                     note="reference rounded from slightly different constants"))
    rows.append(_row("maximum enhancement vs quoted 31028", max_enh, 31028.0,
                     0.02, "rel"))
    try:
        quoted_eps = spectro.calibrate([77000.0], [1.0], 1.0, params,
                                       max_enhancement=31028.0).epsilon
        quoted_note = ""
    except spectro.SpectroError as exc:
        # an out-of-range calibration is itself a failed reproduction
        quoted_eps = math.inf
        quoted_note = str(exc)
    rows.append(_row("polarization from quoted ratio 77000",
                     quoted_eps, 0.913, 5e-4, "abs", note=quoted_note))
    rows.append(_row("quoted-ratio polarization vs 0.916 +- 0.019",
                     quoted_eps, 0.916, 0.019, "abs", note=quoted_note))

    # entanglement chain on the reported fractions
    mix = bell_diagonal(*PAPER_BELL_FRACTIONS)
    rows.append(_row("concurrence of reported mixture",
                     analysis.concurrence(mix), 0.874, 1e-3, "abs"))
    rows.append(_row("entanglement of formation of reported mixture",
                     analysis.eof(mix), 0.822, 1e-3, "abs"))

    # Werner threshold at 1/3
    def werner(eps):
        return make_pseudo_pure(eps, make_singlet())
    rows.append(_row("Werner state min PT eigenvalue at 1/3",
                     analysis.min_pt_eigenvalue(werner(1 / 3)), 0.0, 1e-10, "abs"))
    below = analysis.min_pt_eigenvalue(werner(1 / 3 - 0.01))
    above = analysis.min_pt_eigenvalue(werner(1 / 3 + 0.01))
    rows.append(_bound_row("Werner min PT eigenvalue at 1/3 - 0.01",
                           below, 1e-10, ">="))
    rows.append(_bound_row("Werner min PT eigenvalue at 1/3 + 0.01",
                           above, -1e-10, "<="))

    # singlet-fraction threshold on the grid
    grid_ok = True
    for a in np.linspace(0.0, 1.0, 51):
        for x in np.linspace(0.0, 0.5, 51):
            if analysis.singlet_mixture_entangled(a, x) != (a > 0.5):
                grid_ok = False
    rows.append({"name": "entangled iff singlet fraction > 1/2 (51x51 grid)",
                 "value": "no exceptions" if grid_ok else "exceptions found",
                 "reference": "no exceptions", "tolerance": "exact",
                 "pass": grid_ok, "note": "x grid spans [0, 0.5]"})

    # equivalent conditions
    eq = analysis.effective_conditions(0.916, params)
    rows.append(_row("equivalent field at 295 K (T)",
                     eq.field_t_at_temp, 0.45e6, 0.03, "rel"))
    rows.append(_row("equivalent temperature at 400 MHz (K)",
                     eq.temp_k_at_field, 6.4e-3, 0.10, "rel",
                     note="constant-derived value is ~6.1 mK"))

    # filtration
    filt = filtration_sequence(params)
    singlet = make_singlet()
    fid_fidelity = fidelity(apply(filt, singlet), singlet)
    rows.append(_bound_row("filtration: singlet fidelity", fid_fidelity,
                           1 - 1e-9, ">="))
    rng = np.random.default_rng(rng_seed)
    max_off = 0.0
    max_imb = 0.0
    for _ in range(n_random_states):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = a @ a.conj().T
        state = DensityMatrix(m / m.trace())
        pops = to_bell_populations(apply(filt, state))
        max_off = max(max_off, pops.offBell)
        max_imb = max(max_imb, abs(pops.pTplus - pops.pTminus))
    rows.append(_bound_row(
        f"filtration: max off-diagonal residue over {n_random_states} states",
        max_off, 1e-9, "<="))
    rows.append(_bound_row(
        f"filtration: max |pT+1 - pT-1| over {n_random_states} states",
        max_imb, 1e-9, "<="))

    # slow-addition dephasing of the singlet
    dephased = apply(ChannelProgram(channels=(zq_dephase(),), params=params), singlet)
    target = bell_diagonal(0.5, 0.5, 0.0, 0.0)
    rows.append(_row("zq dephasing: max deviation from equal S0/T0 mixture",
                     float(np.abs(dephased.matrix - target.matrix).max()),
                     0.0, 1e-12, "abs"))
    rows.append(_bound_row("zq dephasing: min PT eigenvalue (separable)",
                           analysis.min_pt_eigenvalue(dephased), -1e-10, ">="))

    # J-doubling recovery across linewidths up to J
    j0 = 5.0
    worst_before = max(measured_recovery(j0, w * j0, 0) for w in (0.6, 0.8, 1.0))
    worst_after = min(measured_recovery(j0, w * j0, 4) for w in (0.6, 0.8, 1.0))
    rows.append(_bound_row("J-doubling: worst component recovery before",
                           worst_before, 0.70, "<=",
                           note="linewidths 0.6J..J, FWHM convention"))
    rows.append(_bound_row("J-doubling: worst component recovery after 4 rounds",
                           worst_after, 0.95, ">="))

    # end-to-end polarization recovery
    e2e = run_pipeline(params, epsilon=0.916, readout=readout)
    rows.append(_row("end-to-end recovered polarization",
                     e2e.epsilon, 0.916, 0.01, "abs"))

    # population imbalance inversion on the reported fractions
    mix_int = spectro.readout_integrals(mix, params, readout)
    rec = spectro.imbalance_to_populations(mix_int, params, readout)
    dev = max(abs(r - p) for r, p in zip(rec.as_tuple(), PAPER_BELL_FRACTIONS))
    rows.append(_row("population inversion: max deviation from reported fractions",
                     dev, 0.0, 1e-6, "abs"))

    # ortho/para statistics
    rows.append(_bound_row("para fraction at 20 K",
                           analysis.para_fraction(20.0), 0.998, ">="))
    rows.append(_row("para fraction at 1000 K",
                     analysis.para_fraction(1000.0), 0.25, 3e-3, "abs"))

    return rows, all(r["pass"] for r in rows)


def format_repro_table(rows) -> str:
    """Fixed-width text table with a delta column for failed rows."""
    out = []
    name_w = max(len(r["name"]) for r in rows)
    for r in rows:
        val = r["value"]
        ref = r["reference"]
        val_s = f"{val:.6g}" if isinstance(val, float) else str(val)
        ref_s = f"{ref:.6g}" if isinstance(ref, float) else str(ref)
        status = "PASS" if r["pass"] else "FAIL"
        line = f"{status}  {r['name']:<{name_w}}  value={val_s}  ref={ref_s}  tol={r['tolerance']}"
        if not r["pass"] and isinstance(val, float) and isinstance(ref, float):
            line += f"  delta={val - ref:+.6g}"
        if r.get("note"):
            line += f"  ({r['note']})"
        out.append(line)
    n_pass = sum(r["pass"] for r in rows)
    out.append(f"{n_pass}/{len(rows)} rows pass")
    return "\n".join(out) + "\n"
