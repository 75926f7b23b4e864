"""Three-level Lambda atom: parameters, operator algebra and the evolution matrix.

The density matrix is tracked through the eight expectation values

    sigma = (E_aa, E_cc, E_ab, E_ba, E_ac, E_ca, E_bc, E_cb)

where ``E_mn = |m><n|`` and the vector component for ``E_mn`` holds the
matrix element ``rho_mn``.  The ground population ``rho_bb`` is eliminated
through the trace condition, which turns the equations of motion into the
affine system ``d(rho)/dt = B rho + I``.  All rates are in units of gamma1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .errors import ParameterError

LEVELS = ("a", "b", "c")

# 0-based positions of the tracked operators
AA, CC, AB, BA, AC, CA, BC, CB = range(8)

# index of the Hermitian-conjugate partner of each component
CONJUGATE = np.array([AA, CC, BA, AB, CA, AC, CB, BC])


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs of the driven Lambda atom, rates in units of gamma1.

    ``splitting`` is half the lower-level separation (2*delta = w_b - w_c)
    and ``p`` the strength of the cross-damping between the two decay
    channels (1 for parallel dipoles, 0 for none).
    """

    gamma1: float = 1.0
    gamma2: float = 1.0
    omega1: float = 0.0
    omega2: float = 0.0
    detuning: float = 0.0
    splitting: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ParameterError(f.name, f"not a number: {value!r}") from None
            if not math.isfinite(value):
                raise ParameterError(f.name, f"must be finite, got {value}")
            object.__setattr__(self, f.name, value)
        if self.gamma1 <= 0:
            raise ParameterError("gamma1", f"must be > 0, got {self.gamma1}")
        if self.gamma2 <= 0:
            raise ParameterError("gamma2", f"must be > 0, got {self.gamma2}")
        if self.omega1 < 0:
            raise ParameterError("omega1", f"must be >= 0, got {self.omega1}")
        if self.omega2 < 0:
            raise ParameterError("omega2", f"must be >= 0, got {self.omega2}")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError("p", f"must lie in [0, 1], got {self.p}")

    @property
    def cross_damping(self) -> float:
        """Cross-damping rate p*sqrt(gamma1*gamma2)."""
        return self.p * math.sqrt(self.gamma1 * self.gamma2)

    def relabeled(self) -> SystemParams:
        """Parameters of the same atom with the lower levels b and c swapped."""
        return SystemParams(
            gamma1=self.gamma2,
            gamma2=self.gamma1,
            omega1=self.omega2,
            omega2=self.omega1,
            detuning=self.detuning,
            splitting=-self.splitting,
            p=self.p,
        )

    def replace(self, **changes) -> SystemParams:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        unknown = set(changes) - set(values)
        if unknown:
            raise ParameterError(sorted(unknown)[0], "unknown parameter name")
        values.update(changes)
        return SystemParams(**values)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def is_symmetric(self) -> bool:
        """True in the regime gamma1 == gamma2, omega1 == omega2."""
        return self.gamma1 == self.gamma2 and self.omega1 == self.omega2


PARAM_NAMES = tuple(f.name for f in fields(SystemParams))


@dataclass(frozen=True)
class BasisOperator:
    """Transition operator ``|ket><bra|``."""

    ket: str
    bra: str

    def __post_init__(self):
        if self.ket not in LEVELS or self.bra not in LEVELS:
            raise ValueError(f"unknown level in |{self.ket}><{self.bra}|")

    def __str__(self):
        return f"|{self.ket}><{self.bra}|"


SIGMA = (
    BasisOperator("a", "a"),
    BasisOperator("c", "c"),
    BasisOperator("a", "b"),
    BasisOperator("b", "a"),
    BasisOperator("a", "c"),
    BasisOperator("c", "a"),
    BasisOperator("b", "c"),
    BasisOperator("c", "b"),
)
_SIGMA_INDEX = {(s.ket, s.bra): i for i, s in enumerate(SIGMA)}


class LinearCombination(NamedTuple):
    """``identity * 1 + sum_i coefficients[i] * sigma_i``."""

    identity: float
    coefficients: np.ndarray

    def expectation(self, sigma_values) -> complex:
        return self.identity + complex(np.dot(self.coefficients, sigma_values))


def decompose(op: BasisOperator | None) -> LinearCombination:
    """Write a basis operator (or the zero operator) over {1, sigma_1..sigma_8}."""
    coeffs = np.zeros(8)
    if op is None:
        return LinearCombination(0.0, coeffs)
    if (op.ket, op.bra) == ("b", "b"):
        # completeness: E_bb = 1 - E_aa - E_cc
        coeffs[AA] = coeffs[CC] = -1.0
        return LinearCombination(1.0, coeffs)
    coeffs[_SIGMA_INDEX[op.ket, op.bra]] = 1.0
    return LinearCombination(0.0, coeffs)


def operator_product(x: BasisOperator, y: BasisOperator) -> LinearCombination:
    """Product ``E_mn E_kl = delta_nk E_ml`` expressed over the tracked basis."""
    if x.bra != y.ket:
        return decompose(None)
    return decompose(BasisOperator(x.ket, y.bra))


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Affine generator ``d(rho)/dt = b_matrix @ rho + i_vector``."""

    b_matrix: np.ndarray
    i_vector: np.ndarray
    params: SystemParams

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        return self.b_matrix @ rho + self.i_vector

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.b_matrix)

    def spectral_abscissa(self) -> float:
        """Largest real part among the eigenvalues of ``b_matrix``."""
        return float(np.max(self.eigenvalues().real))


def build_liouvillian(params: SystemParams) -> Liouvillian:
    """Assemble B and I from the equations of motion, with rho_bb = 1 - rho_aa - rho_cc."""
    if not isinstance(params, SystemParams):
        raise ParameterError("params", f"expected SystemParams, got {type(params).__name__}")
    g1, g2 = params.gamma1, params.gamma2
    o1, o2 = params.omega1, params.omega2
    det, dl = params.detuning, params.splitting
    q = params.cross_damping
    half = 0.5 * (g1 + g2)
    j = 1j

    B = np.zeros((8, 8), dtype=np.complex128)
    I = np.zeros(8, dtype=np.complex128)

    # rho_aa
    B[AA, AA] = -(g1 + g2)
    B[AA, AB], B[AA, BA] = -j * o1, j * o1
    B[AA, AC], B[AA, CA] = -j * o2, j * o2

    # rho_cc
    B[CC, AA] = g2
    B[CC, AC], B[CC, CA] = j * o2, -j * o2

    # rho_ab: -i o1 (rho_aa - rho_bb) = -i o1 (2 rho_aa + rho_cc - 1)
    B[AB, AB] = j * (dl + det) - half
    B[AB, AA], B[AB, CC] = -2j * o1, -j * o1
    I[AB] = j * o1
    B[AB, CB] = j * o2

    # rho_ba
    B[BA, BA] = -j * (dl + det) - half
    B[BA, AA], B[BA, CC] = 2j * o1, j * o1
    I[BA] = -j * o1
    B[BA, BC] = -j * o2

    # rho_ac
    B[AC, AC] = j * (det - dl) - half
    B[AC, AA], B[AC, CC] = -j * o2, j * o2
    B[AC, BC] = j * o1

    # rho_ca
    B[CA, CA] = -j * (det - dl) - half
    B[CA, AA], B[CA, CC] = j * o2, -j * o2
    B[CA, CB] = -j * o1

    # rho_bc, fed by the cross-damping term
    B[BC, AA] = q
    B[BC, BC] = -2j * dl
    B[BC, AC] = j * o1
    B[BC, BA] = -j * o2

    # rho_cb
    B[CB, AA] = q
    B[CB, CB] = 2j * dl
    B[CB, CA] = -j * o1
    B[CB, AB] = j * o2

    B.setflags(write=False)
    I.setflags(write=False)
    return Liouvillian(B, I, params)


def relabel_map() -> tuple[np.ndarray, np.ndarray]:
    """Affine map ``y = M x + c`` taking a state vector to the b<->c swapped labeling."""
    M = np.zeros((8, 8))
    c = np.zeros(8)
    M[AA, AA] = 1.0
    # new rho_cc is the old rho_bb
    M[CC, AA] = M[CC, CC] = -1.0
    c[CC] = 1.0
    for old, new in ((AB, AC), (BA, CA), (AC, AB), (CA, BA), (BC, CB), (CB, BC)):
        M[new, old] = 1.0
    return M, c
