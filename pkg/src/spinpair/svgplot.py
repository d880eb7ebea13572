"""Minimal static SVG rendering for spectra. No plotting dependency; the
output is deterministic text so repeated runs diff clean.

Axes are labeled in Hz (rotating-frame offset) and ppm. The ppm scale is
offset/nu * 1e6 shifted by the configured carrier position, so at 400 MHz
with the default hydride carrier of -6.935 ppm the two multiplets sit at
-7.55 and -6.32 ppm.
"""

from __future__ import annotations

import numpy as np

from .spectro import Spectrum
from .states import SpinSystemParams

DEFAULT_CARRIER_PPM = -6.935

_PANEL_W = 360
_PANEL_H = 220
_MARGIN = 46


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def _ppm(offset_hz: float, nu_hz: float, carrier_ppm: float) -> float:
    return offset_hz / nu_hz * 1e6 + carrier_ppm


def spectrum_svg(spectrum: Spectrum, regions, params: SpinSystemParams,
                 carrier_ppm: float = DEFAULT_CARRIER_PPM,
                 title: str = "") -> str:
    """One panel per (lo_hz, hi_hz) region, real part only."""
    regions = list(regions)
    if not regions:
        raise ValueError("need at least one region to plot")
    width = _MARGIN + len(regions) * (_PANEL_W + _MARGIN)
    height = _PANEL_H + 2 * _MARGIN + 28
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_MARGIN}" y="24" font-family="monospace" '
            f'font-size="14">{title}</text>')

    # shared vertical scale so panel heights are comparable
    peak = 0.0
    panels = []
    for lo, hi in regions:
        mask = (spectrum.freqs_hz >= lo) & (spectrum.freqs_hz <= hi)
        f = spectrum.freqs_hz[mask]
        v = spectrum.values[mask].real
        if len(f) < 2:
            raise ValueError(f"region [{lo}, {hi}] holds fewer than 2 bins")
        peak = max(peak, float(np.abs(v).max()))
        panels.append((lo, hi, f, v))
    if peak == 0.0:
        peak = 1.0

    for i, (lo, hi, f, v) in enumerate(panels):
        x0 = _MARGIN + i * (_PANEL_W + _MARGIN)
        y0 = _MARGIN
        xs = x0 + (f - lo) / (hi - lo) * _PANEL_W
        ys = y0 + _PANEL_H / 2 - (v / peak) * (_PANEL_H / 2 - 8)
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
        # label each panel by the multiplet it covers, not its own midpoint:
        # the doublets live at -dnu/2 and +dnu/2
        mid_hz = (lo + hi) / 2
        line_hz = min((-params.delta_nu_hz / 2, params.delta_nu_hz / 2),
                      key=lambda c: abs(c - mid_hz))
        line_ppm = _ppm(line_hz, params.nu_hz, carrier_ppm)
        zero_y = y0 + _PANEL_H / 2
        parts += [
            f'<rect x="{x0}" y="{y0}" width="{_PANEL_W}" height="{_PANEL_H}" '
            'fill="none" stroke="#888" stroke-width="1"/>',
            f'<line x1="{x0}" y1="{_fmt(zero_y)}" x2="{x0 + _PANEL_W}" '
            f'y2="{_fmt(zero_y)}" stroke="#ccc" stroke-width="1"/>',
            f'<polyline points="{pts}" fill="none" stroke="#004488" '
            'stroke-width="1.2"/>',
            f'<text x="{x0}" y="{y0 + _PANEL_H + 18}" font-family="monospace" '
            f'font-size="12">{_fmt(lo)} Hz</text>',
            f'<text x="{x0 + _PANEL_W}" y="{y0 + _PANEL_H + 18}" '
            'font-family="monospace" font-size="12" text-anchor="end">'
            f'{_fmt(hi)} Hz</text>',
            f'<text x="{_fmt(x0 + _PANEL_W / 2)}" y="{y0 + _PANEL_H + 18}" '
            'font-family="monospace" font-size="12" text-anchor="middle">'
            f'{_fmt(line_ppm)} ppm</text>',
        ]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_spectrum_svg(path, spectrum: Spectrum, regions,
                       params: SpinSystemParams,
                       carrier_ppm: float = DEFAULT_CARRIER_PPM,
                       title: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(spectrum_svg(spectrum, regions, params, carrier_ppm, title))
