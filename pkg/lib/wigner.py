"""Single-qutrit discrete Wigner function.

Phase-point operators follow the odd-prime construction: D_(x,z) = omega^(2xz) X^x Z^z,
A_0 = (1/3) sum_(x,z) D_(x,z), A_u = D_u A_0 D_u^dagger, W(u) = (1/3) Tr(A_u rho).
States with a nonnegative table lie in the Wigner polytope and cannot be distilled.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING
from typing_extensions import Self

import numpy as np
import numpy.typing as npt

from .constants import BISECTION_TOL, OPERATOR_TOL, POLYTOPE_TOL
from .errors import InvariantViolationError, TriorthoError

if TYPE_CHECKING:
    from .distill import NoisePoint

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]

ZETA = np.exp(2j * np.pi / 9)
OMEGA = ZETA**3

SHIFT = np.roll(np.eye(3, dtype=np.complex128), 1, axis=0)
CLOCK = np.diag([OMEGA**k for k in range(3)])
PHASE_POINTS = [(a, b) for a in range(3) for b in range(3)]


@dataclass(frozen=True, eq=False)
class QutritState:
    rho: ComplexMatrix

    def __post_init__(self) -> None:
        rho = self.rho
        if rho.shape != (3, 3):
            raise TriorthoError(f"A qutrit state is a 3x3 matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > OPERATOR_TOL:
            raise TriorthoError("Density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > OPERATOR_TOL:
            raise TriorthoError(f"Density matrix has trace {np.trace(rho).real:.12g}")
        if np.linalg.eigvalsh(rho).min() < -OPERATOR_TOL:
            raise TriorthoError("Density matrix has a negative eigenvalue")

    @classmethod
    def pure(cls, amplitudes: npt.ArrayLike) -> Self:
        psi = np.asarray(amplitudes, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls) -> Self:
        return cls(np.eye(3, dtype=np.complex128) / 3)

    def mix(self, other: "QutritState", weight: float) -> "QutritState":
        """weight * self + (1 - weight) * other."""
        return QutritState(weight * self.rho + (1 - weight) * other.rho)

    def fidelity_with_pure(self, psi: npt.ArrayLike) -> float:
        vec = np.asarray(psi, dtype=np.complex128)
        return float((vec.conj() @ self.rho @ vec).real)


def displacement(x: int, z: int) -> ComplexMatrix:
    """D_(x,z) = omega^(2xz) X^x Z^z, with 2 the inverse of 2 mod 3."""
    op = np.linalg.matrix_power(SHIFT, x % 3) @ np.linalg.matrix_power(CLOCK, z % 3)
    return OMEGA ** ((2 * x * z) % 3) * op


def _phase_point_operators() -> list[ComplexMatrix]:
    a0 = sum(displacement(x, z) for x, z in PHASE_POINTS) / 3
    ops = []
    for x, z in PHASE_POINTS:
        d = displacement(x, z)
        ops.append(d @ a0 @ d.conj().T)
    return ops


def check_phase_point_operators(ops: list[ComplexMatrix]) -> None:
    for u, a in enumerate(ops):
        if np.max(np.abs(a - a.conj().T)) > OPERATOR_TOL:
            raise InvariantViolationError(
                f"Phase-point operator {PHASE_POINTS[u]} is not Hermitian"
            )
        if abs(np.trace(a) - 1) > OPERATOR_TOL:
            raise InvariantViolationError(f"Phase-point operator {PHASE_POINTS[u]} has trace != 1")
    for u, a in enumerate(ops):
        for v, b in enumerate(ops):
            expected = 3.0 if u == v else 0.0
            if abs(np.trace(a @ b) - expected) > OPERATOR_TOL:
                raise InvariantViolationError(
                    f"Tr(A_u A_v) = {np.trace(a @ b):.6g} "
                    f"for u={PHASE_POINTS[u]}, v={PHASE_POINTS[v]}"
                )


PHASE_POINT_OPERATORS = _phase_point_operators()
check_phase_point_operators(PHASE_POINT_OPERATORS)
_STACKED = np.stack(PHASE_POINT_OPERATORS)


@dataclass(frozen=True)
class WignerTable:
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != 9:
            raise TriorthoError(f"A qutrit Wigner table has 9 entries, got {len(self.values)}")

    def __getitem__(self, point: tuple[int, int]) -> float:
        x, z = point
        return self.values[3 * (x % 3) + (z % 3)]

    @property
    def minimum(self) -> float:
        return min(self.values)

    @property
    def total(self) -> float:
        return float(sum(self.values))

    def as_grid(self) -> npt.NDArray[np.float64]:
        return np.array(self.values).reshape(3, 3)


def magic_state(j: int) -> QutritState:
    """|M_j> = Z^j |M_0> with |M_0> proportional to sum_k zeta^k |k>."""
    if j not in (0, 1, 2):
        raise TriorthoError(f"Magic state index must be 0, 1 or 2, got {j}")
    return QutritState.pure(magic_vector(j))


def magic_vector(j: int) -> npt.NDArray[np.complex128]:
    base = np.array([ZETA**k for k in range(3)]) / np.sqrt(3)
    return np.linalg.matrix_power(CLOCK, j) @ base


def twirled_state(point: NoisePoint) -> QutritState:
    eps1, eps2 = point.eps1, point.eps2
    if eps1 < 0 or eps2 < 0 or eps1 + eps2 > 1 + 1e-12:
        raise TriorthoError(f"({eps1}, {eps2}) is outside the twirled-state simplex")
    weights = (1 - eps1 - eps2, eps1, eps2)
    rho = sum(w * magic_state(j).rho for j, w in enumerate(weights))
    return QutritState(np.asarray(rho, dtype=np.complex128))


def wigner(state: QutritState) -> WignerTable:
    values = np.einsum("uab,ba->u", _STACKED, state.rho) / 3
    if np.max(np.abs(values.imag)) > OPERATOR_TOL:
        raise InvariantViolationError("Wigner function has an imaginary part")
    return WignerTable(tuple(float(v) for v in values.real))


def in_polytope(state: QutritState) -> bool:
    return wigner(state).minimum >= -POLYTOPE_TOL


_MAGIC_TABLES = np.array([wigner(magic_state(j)).values for j in range(3)])


def wigner_tables_for_simplex(
    eps1: npt.ArrayLike, eps2: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """Wigner tables of many twirled states at once, shape (points, 9)."""
    e1 = np.atleast_1d(np.asarray(eps1, dtype=np.float64))
    e2 = np.atleast_1d(np.asarray(eps2, dtype=np.float64))
    weights = np.stack([1 - e1 - e2, e1, e2], axis=-1)
    return weights @ _MAGIC_TABLES


def polytope_mask(eps1: npt.ArrayLike, eps2: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    return wigner_tables_for_simplex(eps1, eps2).min(axis=-1) >= -POLYTOPE_TOL


def min_wigner(point: NoisePoint) -> float:
    return float(wigner_tables_for_simplex(point.eps1, point.eps2).min())


def _depolarized_min(delta: float | npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    d = np.asarray(delta, dtype=np.float64)
    return wigner_tables_for_simplex(d / 3, d / 3).min(axis=-1)


def polytope_depolarizing_bound(samples: int = 1000, tol: float = BISECTION_TOL / 100) -> float:
    """Smallest delta at which rho(delta/3, delta/3) enters the polytope."""
    grid = np.linspace(0.0, 1.0, samples)
    mins = _depolarized_min(grid)
    if np.any(np.diff(mins) < -OPERATOR_TOL):
        raise InvariantViolationError(
            "Minimum Wigner value is not monotone along the depolarizing line"
        )
    lo, hi = 0.0, 1.0
    if mins[0] >= 0 or mins[-1] < 0:
        raise InvariantViolationError("No sign change of the Wigner minimum on [0, 1]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _depolarized_min(mid)[0] < 0:
            lo = mid
        else:
            hi = mid
    bound = (lo + hi) / 2
    logger.info("Wigner polytope meets the depolarizing line at delta=%.6f", bound)
    return bound
