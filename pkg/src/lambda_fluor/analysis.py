"""Closed-form predictions and measurements on computed spectra.

The closed forms hold for gamma1 == gamma2 == gamma and omega1 == omega2 == Omega.
Widths follow the convention of the published numbers: ``gamma_width`` is
the half width at half height of the narrow central Lorentzian (equal to
the decay rate of the slowest mode of B); the full crossing distance is
reported separately as ``fwhm_measured``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import find_peaks

from .errors import NoPeakError, RegimeError
from .model import SystemParams
from .spectrum import SpectrumResult

# the baseline is read this many full widths away from the center
BASELINE_DISTANCE = 20.0


def _require_symmetric(params: SystemParams) -> None:
    if not params.is_symmetric():
        raise RegimeError(
            "closed forms need gamma1 == gamma2 and omega1 == omega2, got "
            f"gamma=({params.gamma1}, {params.gamma2}), omega=({params.omega1}, {params.omega2})"
        )


def closed_form_population(params: SystemParams, interference) -> float:
    """Steady excited population for full (``"p1"``) or no (``"p0"``) interference."""
    _require_symmetric(params)
    g, om = params.gamma1, params.omega1
    det, dl = params.detuning, params.splitting
    if interference in ("p1", 1):
        return om**2 / (det**2 + dl**2 + g**2 + 2 * om**2)
    if interference in ("p0", 0):
        denom = dl**2 * det**2 + dl**4 + om**4 + dl**2 * (g**2 + om**2)
        return dl**2 * om**2 / denom if denom else 0.0
    raise ValueError(f"interference must be 'p0' or 'p1', got {interference!r}")


def optimal_detuning(params: SystemParams) -> float:
    """Detuning maximizing the coherent intensity (positive root)."""
    _require_symmetric(params)
    radicand = 2 * params.omega1**2 + params.splitting**2 - params.gamma1**2
    # a radicand within round-off of zero is an optimum at zero detuning
    if abs(radicand) <= 1e-12 * params.gamma1**2:
        radicand = 0.0
    if radicand < 0:
        raise RegimeError(f"no real optimum: 2*Omega^2 + delta^2 - gamma^2 = {radicand:.6g} < 0")
    return math.sqrt(radicand)


class NarrowPeak(NamedTuple):
    gamma_width: float
    height: float
    product: float


def relative_intensity(params: SystemParams) -> float:
    """Width times height of the narrow peak; independent of the splitting."""
    _require_symmetric(params)
    g, om, det = params.gamma1, params.omega1, params.detuning
    s = det**2 + g**2
    return s**2 / (2 * math.pi * (s + 2 * om**2) * (s + 4 * om**2))


def narrow_peak_prediction(params: SystemParams) -> NarrowPeak:
    _require_symmetric(params)
    if params.p != 1.0:
        raise RegimeError(f"narrow-peak formulas assume p = 1, got {params.p}")
    if params.omega1 <= 0 or params.splitting == 0:
        raise RegimeError("narrow-peak formulas need Omega > 0 and delta != 0")
    g, om, det, dl = params.gamma1, params.omega1, params.detuning, params.splitting
    s = det**2 + g**2
    width = 2 * g * (dl**2 / om**2) * (s + 2 * om**2) / (s + 4 * om**2)
    height = (om**2 / dl**2) * s**2 / (4 * g * (s + 2 * om**2) ** 2) / math.pi
    return NarrowPeak(width, height, relative_intensity(params))


@dataclass(frozen=True)
class PeakReport:
    amplitude_measured: float  # spectrum value at the laser frequency
    height_measured: float  # amplitude above the local baseline
    width_measured: float  # half width at half height above the baseline
    fwhm_measured: float
    baseline: float
    amplitude_predicted: float = math.nan
    width_predicted: float = math.nan
    rel_intensity_predicted: float = math.nan

    @property
    def rel_intensity_measured(self) -> float:
        return self.height_measured * self.width_measured


def _crossing(w: np.ndarray, s: np.ndarray, start: int, level: float, direction: int) -> float:
    i = start
    while 0 <= i + direction < len(s):
        j = i + direction
        if s[j] <= level:
            # linear interpolation between the bracketing grid points
            return w[i] + (level - s[i]) * (w[j] - w[i]) / (s[j] - s[i])
        i = j
    raise NoPeakError("half-height crossing not found inside the grid")


def _half_width(w, s, i0, baseline):
    level = baseline + 0.5 * (s[i0] - baseline)
    left = _crossing(w, s, i0, level, -1)
    right = _crossing(w, s, i0, level, +1)
    return left, right


def _bracketing_minima(s: np.ndarray, i0: int):
    left = next((i for i in range(i0 - 1, 0, -1) if s[i] <= s[i - 1] and s[i] <= s[i + 1]), None)
    right = next((i for i in range(i0 + 1, len(s) - 1) if s[i] <= s[i - 1] and s[i] <= s[i + 1]), None)
    return left, right


def measure_peak(spectrum: SpectrumResult, max_iter: int = 20) -> PeakReport:
    """Amplitude and width of the narrow feature at the laser frequency.

    The baseline is the mean of the spectrum at +-``BASELINE_DISTANCE``
    full widths from the center, iterated with the width until both settle.
    If local minima bracket the center closer than that, their mean is
    used instead.  A peak whose baseline distance would exceed gamma1 is
    not narrow and is rejected.
    """
    w, s = spectrum.offsets, spectrum.s_inc
    i0 = int(np.argmin(np.abs(w)))
    if i0 == 0 or i0 == len(w) - 1 or s[i0] < s[i0 - 1] or s[i0] < s[i0 + 1]:
        raise NoPeakError("no isolated narrow peak: the laser frequency is not a local maximum")
    limit = spectrum.params.gamma1
    lmin, rmin = _bracketing_minima(s, i0)

    baseline = 0.5 * (np.interp(-limit, w, s) + np.interp(limit, w, s))
    left, right = _half_width(w, s, i0, baseline)
    for _ in range(max_iter):
        reach = BASELINE_DISTANCE * (right - left)
        if reach > limit:
            raise NoPeakError(
                f"no isolated narrow peak: feature width {right - left:.3g} is not small against gamma1"
            )
        if lmin is not None and rmin is not None and -w[lmin] < reach and w[rmin] < reach:
            new_baseline = 0.5 * (s[lmin] + s[rmin])
        else:
            new_baseline = 0.5 * (np.interp(-reach, w, s) + np.interp(reach, w, s))
        settled = abs(new_baseline - baseline) <= 1e-9 * max(abs(s[i0]), 1e-300)
        baseline = new_baseline
        left, right = _half_width(w, s, i0, baseline)
        if settled:
            break

    fwhm = right - left
    report = dict(
        amplitude_measured=float(s[i0]),
        height_measured=float(s[i0] - baseline),
        width_measured=float(fwhm / 2),
        fwhm_measured=float(fwhm),
        baseline=float(baseline),
    )
    try:
        pred = narrow_peak_prediction(spectrum.params)
        report.update(
            amplitude_predicted=pred.height,
            width_predicted=pred.gamma_width,
            rel_intensity_predicted=pred.product,
        )
    except RegimeError:
        pass
    return PeakReport(**report)


def count_sidebands(spectrum: SpectrumResult, prominence: float = 0.01, exclude: float = 0.05) -> int:
    """Number of sideband pairs: prominent maxima with |offset| > ``exclude``, halved."""
    s = spectrum.s_inc
    peaks, _ = find_peaks(s, prominence=prominence * np.max(s))
    offsets = spectrum.offsets[peaks]
    return int(np.count_nonzero(np.abs(offsets) > exclude) // 2)
