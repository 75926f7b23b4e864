"""Steady states, time evolution and dark-state detection."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from .errors import LambdaFluorError, NumericalError, PreconditionError
from .model import AA, AB, AC, BA, BC, CA, CB, CC, CONJUGATE, Liouvillian, SystemParams, build_liouvillian

RCOND_THRESHOLD = 1e-12
DARK_THRESHOLD = 1e-8
DEFAULT_DT = 1e-3  # in units of 1/gamma1
THREADS_ENV = "LAMBDA_FLUOR_THREADS"


@dataclass(frozen=True, eq=False)
class SteadyState:
    sigma_ss: np.ndarray
    rho_bb: float
    dark: bool
    condition_estimate: float
    method: str = "linear-solve"

    @property
    def rho_aa(self) -> float:
        return float(self.sigma_ss[AA].real)

    @property
    def rho_cc(self) -> float:
        return float(self.sigma_ss[CC].real)

    @property
    def rho_ab(self) -> complex:
        return complex(self.sigma_ss[AB])

    @property
    def rho_ba(self) -> complex:
        return complex(self.sigma_ss[BA])

    @property
    def rho_ac(self) -> complex:
        return complex(self.sigma_ss[AC])

    @property
    def rho_ca(self) -> complex:
        return complex(self.sigma_ss[CA])

    @property
    def rho_bc(self) -> complex:
        return complex(self.sigma_ss[BC])

    @property
    def rho_cb(self) -> complex:
        return complex(self.sigma_ss[CB])


def reciprocal_condition(matrix: np.ndarray) -> float:
    """LAPACK 1-norm reciprocal condition estimate from an LU factorization."""
    anorm = np.linalg.norm(matrix, 1)
    lu, piv, info = lapack.zgetrf(np.asarray(matrix, dtype=np.complex128))
    if info > 0:
        return 0.0
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    return float(rcond)


def max_stable_dt(params: SystemParams) -> float:
    """Largest step accepted by :func:`time_evolve` for these parameters."""
    scale = max(
        params.gamma1 + params.gamma2,
        params.omega1,
        params.omega2,
        abs(params.detuning) + abs(params.splitting),
    )
    return 0.01 / scale


def default_dt(params: SystemParams) -> float:
    return min(DEFAULT_DT / params.gamma1, max_stable_dt(params))


def rk4_step(liouvillian: Liouvillian, x: np.ndarray, dt: float) -> np.ndarray:
    f = liouvillian.rhs
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_propagator(liouvillian: Liouvillian, dt: float) -> np.ndarray:
    """9x9 augmented matrix of one RK4 step.

    For the affine system x' = Bx + I one classical RK4 step is the affine map
    x -> Px + q; it is returned as [[P, q], [0, 1]] so that many steps compose
    by matrix products.
    """
    hB = dt * liouvillian.b_matrix
    eye = np.eye(8)
    P = eye + hB @ (eye + hB @ (eye / 2 + hB @ (eye / 6 + hB / 24)))
    q = dt * (eye + hB @ (eye / 2 + hB @ (eye / 6 + hB / 24))) @ liouvillian.i_vector
    A = np.zeros((9, 9), dtype=np.complex128)
    A[:8, :8] = P
    A[:8, 8] = q
    A[8, 8] = 1.0
    return A


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 8)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _check_initial(initial) -> np.ndarray:
    x = np.asarray(initial, dtype=np.complex128)
    if x.shape != (8,):
        raise PreconditionError(f"initial state must have 8 components, got shape {x.shape}")
    if np.max(np.abs(x[CONJUGATE] - x.conj())) > 1e-12:
        raise PreconditionError("initial state is not Hermitian-consistent")
    pops = (x[AA].real, x[CC].real, 1.0 - x[AA].real - x[CC].real)
    if min(pops) < -1e-12 or max(pops) > 1 + 1e-12:
        raise PreconditionError(f"initial populations {pops} outside [0, 1]")
    return x


def time_evolve(
    liouvillian: Liouvillian,
    initial,
    t_final: float,
    dt: Optional[float] = None,
    samples: Optional[int] = None,
) -> Trajectory:
    """Fixed-step RK4 integration of d(rho)/dt = B rho + I.

    The trajectory is reported at ``samples + 1`` evenly spaced step counts
    (default: every step, up to 1000 samples).  Between samples the RK4 map
    is applied as a matrix power, which is the same arithmetic as stepping.
    """
    params = liouvillian.params
    if dt is None:
        dt = default_dt(params)
    bound = max_stable_dt(params)
    if not dt > 0 or dt > bound * (1 + 1e-12):
        raise PreconditionError(f"dt={dt} violates the step bound {bound:.3g}")
    if t_final < 0:
        raise PreconditionError(f"t_final must be >= 0, got {t_final}")
    x = _check_initial(initial)

    n = max(int(math.ceil(t_final / dt - 1e-9)), 1) if t_final > 0 else 0
    h = t_final / n if n else dt
    if samples is None:
        samples = min(n, 1000)
    samples = max(min(samples, n), 1) if n else 0
    marks = np.unique(np.linspace(0, n, samples + 1).round().astype(int))

    step = rk4_propagator(liouvillian, h)
    powers: dict[int, np.ndarray] = {}
    state = np.append(x, 1.0)
    states = [x.copy()]
    for gap in np.diff(marks):
        if gap not in powers:
            powers[gap] = np.linalg.matrix_power(step, int(gap))
        state = powers[gap] @ state
        states.append(state[:8].copy())
    return Trajectory(marks * h, np.array(states))


def mixed_ground_state() -> np.ndarray:
    """rho_bb = rho_cc = 1/2, no coherences: canonical start for the fallback."""
    x = np.zeros(8, dtype=np.complex128)
    x[CC] = 0.5
    return x


def relax(
    liouvillian: Liouvillian,
    initial=None,
    dt: Optional[float] = None,
    t_start: float = 1e3,
    tol: float = 1e-11,
    max_doublings: int = 24,
) -> tuple[np.ndarray, float]:
    """Integrate until successive time-doublings agree to ``tol``.

    Returns the state and the time reached.
    """
    x = _check_initial(mixed_ground_state() if initial is None else initial)
    params = liouvillian.params
    if dt is None:
        dt = default_dt(params)
    n0 = max(int(math.ceil(t_start / dt)), 1)
    block = np.linalg.matrix_power(rk4_propagator(liouvillian, dt), n0)
    state = block @ np.append(x, 1.0)
    t = n0 * dt
    change = math.inf
    for _ in range(max_doublings):
        nxt = block @ state
        change = float(np.max(np.abs(nxt - state)))
        state, t = nxt, 2 * t
        if not np.all(np.isfinite(state)):
            break
        if change < tol:
            return state[:8], t
        block = block @ block
    raise NumericalError(
        "long-time integration did not converge",
        time_reached=t,
        last_change=change,
        tolerance=tol,
        params=params.as_dict(),
    )


def steady_state(
    liouvillian: Liouvillian,
    rcond_threshold: float = RCOND_THRESHOLD,
    dark_threshold: float = DARK_THRESHOLD,
) -> SteadyState:
    """Solve B rho + I = 0.

    When B is too ill-conditioned (reciprocal condition below
    ``rcond_threshold``) the steady state is not unique, e.g. at a
    coherent-population-trapping point; the state is then obtained by
    long-time integration from the mixed ground state.
    """
    B = liouvillian.b_matrix
    rcond = reciprocal_condition(B)
    sigma = None
    method = "linear-solve"
    if rcond >= rcond_threshold:
        sigma = lu_solve(lu_factor(B), -liouvillian.i_vector)
        if not np.all(np.isfinite(sigma)):
            sigma = None
    if sigma is None:
        sigma, _ = relax(liouvillian)
        method = "integration"
    sigma = np.array(sigma, dtype=np.complex128)
    sigma.setflags(write=False)
    rho_aa = sigma[AA].real
    return SteadyState(
        sigma_ss=sigma,
        rho_bb=float(1.0 - rho_aa - sigma[CC].real),
        dark=bool(rho_aa < dark_threshold),
        condition_estimate=rcond,
        method=method,
    )


@dataclass(frozen=True)
class ScanRow:
    value: float
    rho_aa: float
    i_tot: float
    dark: bool
    error: Optional[str] = None


def _scan_point(params: SystemParams, vary: str, value: float) -> ScanRow:
    from .spectrum import total_intensity

    try:
        point = params.replace(**{vary: value})
        steady = steady_state(build_liouvillian(point))
        return ScanRow(value, steady.rho_aa, total_intensity(steady, point), steady.dark)
    except LambdaFluorError as exc:
        return ScanRow(value, math.nan, math.nan, False, f"{type(exc).__name__}: {exc}")


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(int(raw), 1)
        except ValueError:
            pass
    return os.cpu_count() or 1


def dark_state_scan(
    params: SystemParams,
    vary: str,
    values: Sequence[float] | tuple[float, float],
    steps: Optional[int] = None,
) -> list[ScanRow]:
    """Steady-state population and total intensity along one parameter.

    ``values`` is either an explicit sequence or, with ``steps`` given, a
    ``(start, stop)`` pair sampled uniformly.  Failures are recorded per row.
    """
    if vary not in params.as_dict():
        raise PreconditionError(f"unknown parameter {vary!r}")
    if steps is not None:
        start, stop = values
        if not (math.isfinite(start) and math.isfinite(stop)):
            raise PreconditionError("scan range must be finite")
        values = np.linspace(start, stop, steps)
    values = [float(v) for v in values]
    with ThreadPoolExecutor(max_workers=min(thread_count(), max(len(values), 1))) as pool:
        return list(pool.map(lambda v: _scan_point(params, vary, v), values))
