"""Coherent and incoherent resonance-fluorescence spectra.

The incoherent part follows from the quantum regression theorem: the
steady-state fluctuation covariances evolve under the same matrix B as
the one-time averages, so the spectrum at offset w = omega - omega_L is
read off the resolvent (i*w - B)^-1 applied to two covariance vectors.

Spectra are kept on an absolute scale internally; ``SpectrumResult.s_inc``
is that absolute spectrum divided by ``scale``:

* ``"total"`` (default): divide by I_tot, so the integral of ``s_inc`` is
  the incoherent fraction of the emitted power.  This is the
  usual relative-intensity scale.
* ``"rho_aa"``: divide by pi * rho_aa.
* ``"absolute"``: no division.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Optional

import numpy as np
from scipy.integrate import trapezoid

from .errors import NoFluorescenceError, NumericalError, PreconditionError
from .model import AB, AC, BA, CA, SIGMA, Liouvillian, SystemParams, build_liouvillian, operator_product

if TYPE_CHECKING:
    from .dynamics import SteadyState

FLUORESCENCE_THRESHOLD = 1e-8
NORMALIZATIONS = ("total", "rho_aa", "absolute")
TAIL_ORDER = 10
DEFAULT_POINTS = 4001
REFINE_POINTS = 2001
REFINE_HALFWIDTH = 50.0  # in units of the narrow-feature width


@dataclass(frozen=True, eq=False)
class CovariancePair:
    r_ab: np.ndarray
    r_ac: np.ndarray

    def scaled(self, factor: complex) -> CovariancePair:
        return CovariancePair(self.r_ab * factor, self.r_ac * factor)


def covariance_init(steady: SteadyState) -> CovariancePair:
    """Steady-state covariances <d sigma_i d sigma_4> and <d sigma_i d sigma_6>."""
    sigma = steady.sigma_ss
    r_ab = np.empty(8, dtype=np.complex128)
    r_ac = np.empty(8, dtype=np.complex128)
    for i, op in enumerate(SIGMA):
        r_ab[i] = operator_product(op, SIGMA[BA]).expectation(sigma) - sigma[i] * sigma[BA]
        r_ac[i] = operator_product(op, SIGMA[CA]).expectation(sigma) - sigma[i] * sigma[CA]
    return CovariancePair(r_ab, r_ac)


def coherent_intensity(steady: SteadyState, params: SystemParams) -> float:
    """Absolute intensity of the elastic peak at the laser frequency."""
    ab, ba, ac, ca = steady.rho_ab, steady.rho_ba, steady.rho_ac, steady.rho_ca
    q = params.cross_damping
    value = math.pi * (params.gamma1 * ab * ba + params.gamma2 * ca * ac + q * ab * ca + q * ac * ba)
    return float(value.real)


def total_intensity(steady: SteadyState, params: SystemParams) -> float:
    # round-off can leave rho_aa a few ulp below zero at dark points
    return math.pi * (params.gamma1 + params.gamma2) * max(steady.rho_aa, 0.0)


def make_grid(
    span: float,
    points: int = DEFAULT_POINTS,
    refine_width: Optional[float] = None,
    refine_points: int = REFINE_POINTS,
) -> np.ndarray:
    """Uniform grid on [-span, span], optionally merged with a log-spaced
    insert reaching out to ``REFINE_HALFWIDTH * refine_width`` around zero."""
    if not span > 0:
        raise PreconditionError(f"span must be > 0, got {span}")
    if points < 3:
        raise PreconditionError(f"points must be >= 3, got {points}")
    grid = np.linspace(-span, span, points)
    if refine_width:
        outer = min(REFINE_HALFWIDTH * refine_width, span)
        half = np.geomspace(outer * 2e-4, outer, max((refine_points - 1) // 2, 1))
        grid = np.concatenate([grid, -half, [0.0], half])
    return np.unique(grid)


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    offsets: np.ndarray
    s_inc: np.ndarray
    i_coh_abs: float
    i_tot: float
    rho_aa_ss: float
    params: SystemParams
    normalization: str = "total"
    scale: float = 1.0
    # (B^k V1)[ab] + (B^k V2)[ac], for the large-|w| expansion of the spectrum
    tail_coefficients: Optional[np.ndarray] = None
    spectral_radius: float = math.nan

    @property
    def absolute(self) -> np.ndarray:
        return self.s_inc * self.scale


def _drive_vectors(cov: CovariancePair, params: SystemParams):
    q = params.cross_damping
    v1 = params.gamma1 * cov.r_ab + q * cov.r_ac
    v2 = params.gamma2 * cov.r_ac + q * cov.r_ab
    return v1, v2


def _resolvent_solve(B: np.ndarray, rhs: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Solve (i w - B) X = rhs at every grid point; returns shape (n, 8, k)."""
    eye = np.eye(8)
    mats = 1j * grid[:, None, None] * eye - B[None, :, :]
    rhs = np.broadcast_to(rhs, (len(grid),) + rhs.shape)
    try:
        out = np.linalg.solve(mats, rhs)
    except np.linalg.LinAlgError:
        out = None
    if out is None or not np.all(np.isfinite(out)):
        for w, m in zip(grid, mats):
            try:
                x = np.linalg.solve(m, rhs[0])
            except np.linalg.LinAlgError:
                x = None
            if x is None or not np.all(np.isfinite(x)):
                raise NumericalError(f"resolvent is singular at offset {w!r}", omega=float(w))
    return out


def incoherent_spectrum(
    liouvillian: Liouvillian,
    steady: SteadyState,
    cov: CovariancePair,
    params: SystemParams,
    grid,
    normalization: str = "total",
) -> SpectrumResult:
    """Incoherent spectrum on ``grid`` (offsets from the laser frequency)."""
    if normalization not in NORMALIZATIONS:
        raise PreconditionError(f"normalization must be one of {NORMALIZATIONS}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
        raise PreconditionError("grid must be a finite one-dimensional array")
    if np.any(np.diff(grid) <= 0):
        raise PreconditionError("grid must be strictly increasing")
    rho_aa = steady.rho_aa
    if rho_aa < FLUORESCENCE_THRESHOLD:
        raise NoFluorescenceError(
            f"no fluorescence: rho_aa = {rho_aa:.3g} below {FLUORESCENCE_THRESHOLD:g}", rho_aa=rho_aa
        )

    B = liouvillian.b_matrix
    eig = np.linalg.eigvals(B)
    for lam in eig[eig.real > -1e-13]:
        hit = np.abs(grid - lam.imag) < 1e-12
        if np.any(hit):
            raise NumericalError(
                f"resolvent is singular at offset {grid[hit][0]!r}", omega=float(grid[hit][0])
            )

    v1, v2 = _drive_vectors(cov, params)
    x = _resolvent_solve(B, np.stack([v1, v2], axis=1), grid)
    s_abs = (x[:, AB, 0] + x[:, AC, 1]).real

    i_tot = total_intensity(steady, params)
    scale = {"total": i_tot, "rho_aa": math.pi * rho_aa, "absolute": 1.0}[normalization]

    coeffs = np.empty(TAIL_ORDER + 1, dtype=np.complex128)
    u1, u2 = v1.copy(), v2.copy()
    for k in range(TAIL_ORDER + 1):
        coeffs[k] = u1[AB] + u2[AC]
        u1, u2 = B @ u1, B @ u2

    return SpectrumResult(
        offsets=grid,
        s_inc=s_abs / scale,
        i_coh_abs=coherent_intensity(steady, params),
        i_tot=i_tot,
        rho_aa_ss=rho_aa,
        params=params,
        normalization=normalization,
        scale=scale,
        tail_coefficients=coeffs,
        spectral_radius=float(np.max(np.abs(eig))),
    )


def narrow_width_estimate(liouvillian: Liouvillian) -> float:
    """Expected half-width of the slowest spectral feature.

    Uses the closed-form narrow-peak width where it applies, otherwise the
    decay rate of the slowest mode of B.
    """
    from .analysis import narrow_peak_prediction
    from .errors import RegimeError

    try:
        return narrow_peak_prediction(liouvillian.params).gamma_width
    except RegimeError:
        rate = -liouvillian.spectral_abscissa()
        return rate if rate > 0 else liouvillian.params.gamma1


def compute_spectrum(
    params: SystemParams,
    span: Optional[float] = None,
    points: int = DEFAULT_POINTS,
    refine_center: bool = False,
    normalization: str = "total",
    grid=None,
) -> SpectrumResult:
    """Steady state, covariances and incoherent spectrum in one call.

    Without an explicit ``span`` the grid reaches 10 times the largest
    rate of the problem on either side.
    """
    from .dynamics import steady_state

    liouvillian = build_liouvillian(params)
    steady = steady_state(liouvillian)
    if grid is None:
        if span is None:
            span = default_span(params)
        width = narrow_width_estimate(liouvillian) if refine_center else None
        grid = make_grid(span, points, refine_width=width)
    cov = covariance_init(steady)
    return incoherent_spectrum(liouvillian, steady, cov, params, grid, normalization)


def default_span(params: SystemParams) -> float:
    return 10.0 * coverage_scale(params)


def coverage_scale(params: SystemParams) -> float:
    return max(params.omega1, params.omega2, abs(params.detuning), params.gamma1, params.gamma2)


class SumRule(NamedTuple):
    c: float
    residual: float


def _tail_integral(coeffs: np.ndarray, edge: float) -> float:
    """Real part of the integral of sum_k coeffs[k] / (i w)^(k+1) from ``edge`` to +-infinity
    (toward the side of ``edge``).  The k = 0 term is purely imaginary and drops out."""
    total = 0j
    for k in range(1, len(coeffs)):
        term = coeffs[k] / (1j ** (k + 1) * k * edge**k)
        total += term if edge > 0 else -term
    return total.real


def _power_integral(spectrum: SpectrumResult, offsets: np.ndarray, values: np.ndarray) -> float:
    inner = trapezoid(values, offsets)
    coeffs = spectrum.tail_coefficients
    if coeffs is None:
        return inner
    return inner + _tail_integral(coeffs, offsets[-1]) + _tail_integral(coeffs, offsets[0])


def sum_rule_check(spectrum: SpectrumResult, coverage: float = 10.0) -> SumRule:
    """Ratio of incoherent power (I_tot - I_coh) to the integrated absolute spectrum.

    The integral is a trapezoid rule over the grid plus the analytic
    large-offset expansion of the resolvent beyond both grid edges.
    ``residual`` is the relative change in ``c`` when every second grid
    point is dropped.
    """
    w = spectrum.offsets
    need = coverage * coverage_scale(spectrum.params)
    if -w[0] < need * (1 - 1e-12) or w[-1] < need * (1 - 1e-12):
        raise PreconditionError(
            f"grid [{w[0]:g}, {w[-1]:g}] does not cover +-{need:g} required for the sum rule"
        )
    if min(-w[0], w[-1]) <= spectrum.spectral_radius:
        raise PreconditionError("grid edge lies inside the spectral radius of B")
    s_abs = spectrum.absolute
    incoherent = spectrum.i_tot - spectrum.i_coh_abs
    c = incoherent / _power_integral(spectrum, w, s_abs)
    idx = np.arange(0, len(w), 2)
    if idx[-1] != len(w) - 1:
        idx = np.append(idx, len(w) - 1)
    c_coarse = incoherent / _power_integral(spectrum, w[idx], s_abs[idx])
    return SumRule(float(c), float(abs(c_coarse - c) / abs(c)))
