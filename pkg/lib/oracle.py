"""Dense state-vector checks for small codes.

Basis states are indexed with the first qutrit most significant. Codewords are uniform
superpositions over cosets of the X-stabilizer span, so every amplitude vector here is real
up to the phases applied by T and by Z errors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing_extensions import Self

import numpy as np
import numpy.typing as npt

from .codes import TriorthogonalCode
from .constants import (
    SIMULATION_MAX_QUTRITS,
    STATE_VECTOR_MAX_QUTRITS,
    Orientation,
)
from .distill import ClassDistribution, DiagonalChannel, label_of
from .errors import CodespaceNotPreservedError, InvariantViolationError, TriorthoError
from .trits import TritVector, coefficient_grid, span_vectors

logger = logging.getLogger(__name__)

ZETA = np.exp(2j * np.pi / 9)
OMEGA = ZETA**3
RESIDUAL_TOL = 1e-10

_PATTERN_CHUNK = 243


def basis_index(strings: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    n = strings.shape[-1]
    place = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return strings @ place


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amplitudes: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        if self.n > STATE_VECTOR_MAX_QUTRITS:
            raise TriorthoError(
                f"State vectors are limited to {STATE_VECTOR_MAX_QUTRITS} qutrits, got {self.n}"
            )
        if self.amplitudes.shape != (3**self.n,):
            raise TriorthoError(f"Expected {3**self.n} amplitudes, got {self.amplitudes.shape}")

    @classmethod
    def uniform_over(cls, n: int, strings: npt.NDArray[np.int64]) -> Self:
        if n > STATE_VECTOR_MAX_QUTRITS:
            raise TriorthoError(
                f"State vectors are limited to {STATE_VECTOR_MAX_QUTRITS} qutrits, got {n}"
            )
        amps = np.zeros(3**n, dtype=np.complex128)
        amps[basis_index(strings)] = 1.0
        return cls(n, amps / np.linalg.norm(amps))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def with_phases(self, phases: npt.NDArray[np.complex128]) -> "StateVector":
        return StateVector(self.n, self.amplitudes * phases)

    def shifted(self, g: TritVector) -> "StateVector":
        """X^g: |c> -> |c + g>."""
        return StateVector(self.n, self.amplitudes[_shift_permutation(self.n, g)])


def _digits(n: int) -> npt.NDArray[np.int64]:
    return coefficient_grid(n)


def _shift_permutation(n: int, g: TritVector) -> npt.NDArray[np.int64]:
    """perm[i] is the source index landing on basis state i under X^g."""
    digits = _digits(n)
    return basis_index((digits - np.asarray(g, dtype=np.int64)) % 3)


@dataclass(frozen=True, eq=False)
class LogicalUnitary:
    matrix: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        m = self.matrix
        if np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) > RESIDUAL_TOL:
            raise InvariantViolationError("Induced logical operator is not unitary")

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def is_diagonal(self, tol: float = RESIDUAL_TOL) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.max(np.abs(off), initial=0.0) < tol)

    def phase_aligned(self) -> npt.NDArray[np.complex128]:
        """Matrix divided by the phase of its first nonzero entry."""
        flat = self.matrix.ravel()
        first = flat[np.flatnonzero(np.abs(flat) > RESIDUAL_TOL)[0]]
        return self.matrix / (first / abs(first))

    def ninth_root_exponents(self) -> tuple[int, ...]:
        """Exponents e of the aligned diagonal entries zeta^e; raises off the ninth roots."""
        diag = np.diag(self.phase_aligned())
        exps = np.angle(diag) / (2 * np.pi / 9)
        rounded = np.round(exps)
        if np.max(np.abs(exps - rounded)) > 1e-8:
            raise InvariantViolationError(f"Logical phases are not ninth roots of unity: {diag}")
        return tuple(int(e) % 9 for e in rounded)

    def power(self, p: int) -> "LogicalUnitary":
        return LogicalUnitary(np.linalg.matrix_power(self.matrix, p))


def _check_size(code: TriorthogonalCode, limit: int) -> None:
    if code.n > limit:
        raise TriorthoError(f"State-vector checks are limited to n <= {limit}, got n={code.n}")


def _coset(code: TriorthogonalCode, label: tuple[int, ...]) -> npt.NDArray[np.int64]:
    stab = span_vectors(code.Lx) if code.rank_Lx else np.zeros((1, code.n), dtype=np.int64)
    shift = (np.asarray(label, dtype=np.int64) @ code.logical_x.values) % 3 if code.k else 0
    return (stab + shift) % 3


def codeword(code: TriorthogonalCode, label: tuple[int, ...]) -> StateVector:
    _check_size(code, STATE_VECTOR_MAX_QUTRITS)
    if len(label) != code.k or any(j not in (0, 1, 2) for j in label):
        raise TriorthoError(f"Logical label {label} does not match k={code.k}")
    return StateVector.uniform_over(code.n, _coset(code, label))


def codewords(code: TriorthogonalCode) -> list[StateVector]:
    return [codeword(code, label_of(i, code.k)) for i in range(3**code.k)]


def check_stabilizers(code: TriorthogonalCode, state: StateVector) -> None:
    """Raise unless ``state`` is a +1 eigenstate of every X and Z stabilizer generator."""
    for g in code.Lx.values:
        if abs(state.inner(state.shifted(g)) - 1) > RESIDUAL_TOL:
            raise InvariantViolationError(f"State is not fixed by X stabilizer {g.tolist()}")
    digits = _digits(code.n)
    for z in code.Lz.values:
        phases = OMEGA ** ((digits @ z) % 3)
        if abs(state.inner(state.with_phases(phases)) - 1) > RESIDUAL_TOL:
            raise InvariantViolationError(f"State is not fixed by Z stabilizer {z.tolist()}")


def transversal_T_phases(n: int) -> npt.NDArray[np.complex128]:
    """T on every qutrit: |c> -> zeta^(c_1 + ... + c_n) |c>, with c_i read as integers."""
    return ZETA ** (_digits(n).sum(axis=1) % 9)


def transversal_T_logical(code: TriorthogonalCode) -> LogicalUnitary:
    _check_size(code, STATE_VECTOR_MAX_QUTRITS)
    if code.k > 2:
        raise TriorthoError(f"Logical T extraction is limited to k <= 2, got k={code.k}")
    words = codewords(code)
    basis = np.stack([w.amplitudes for w in words])
    phases = transversal_T_phases(code.n)
    images = basis * phases
    coeffs = images @ basis.conj().T
    projected = coeffs @ basis
    residual = float(np.max(np.linalg.norm(images - projected, axis=1)))
    if residual > RESIDUAL_TOL:
        raise CodespaceNotPreservedError(
            f"Transversal T leaves the codespace of {code.label} (residual {residual:.3g})"
        )
    logger.debug("Transversal T residual on %s: %.3g", code.label, residual)
    unitary = LogicalUnitary(coeffs.T)
    if not unitary.is_diagonal():
        raise InvariantViolationError(f"Transversal T is not diagonal on {code.label}")
    unitary.ninth_root_exponents()
    return unitary


def _logical_plus(code: TriorthogonalCode) -> tuple[StateVector, npt.NDArray[np.complex128]]:
    """|+_L> and the conjugate-basis states phi_j = sum_t omega^(j.t) |cw_t> as rows."""
    words = np.stack([w.amplitudes for w in codewords(code)])
    labels = coefficient_grid(code.k)
    phases = OMEGA ** ((labels @ labels.T) % 3)
    conj_basis = (phases @ words) / np.sqrt(3**code.k)
    return StateVector(code.n, conj_basis[0]), conj_basis


def _pattern_probabilities(
    patterns: npt.NDArray[np.int64], channel: DiagonalChannel
) -> npt.NDArray[np.float64]:
    probs = np.array(channel.probs)
    return np.prod(probs[patterns], axis=1)


def simulate_one_round(code: TriorthogonalCode, channel: DiagonalChannel) -> ClassDistribution:
    """Apply every Z error pattern to |+_L>, postselect on the X stabilizers, read the class."""
    _check_size(code, SIMULATION_MAX_QUTRITS)
    n = code.n
    plus, conj_basis = _logical_plus(code)
    digits = _digits(n)
    perms = [_shift_permutation(n, g) for g in code.Lx.values]
    table = np.zeros(3**code.k)
    patterns_all = coefficient_grid(n)
    for start in range(0, len(patterns_all), _PATTERN_CHUNK):
        patterns = patterns_all[start : start + _PATTERN_CHUNK]
        states = plus.amplitudes[None, :] * OMEGA ** ((patterns @ digits.T) % 3)
        accepted = np.ones(len(patterns), dtype=bool)
        for perm in perms:
            expectation = np.einsum("pi,pi->p", states.conj(), states[:, perm])
            accepted &= np.abs(expectation - 1) < 1e-6
        overlaps = np.abs(states[accepted] @ conj_basis.conj().T) ** 2
        if overlaps.size and np.any(np.abs(overlaps.max(axis=1) - 1) > 1e-6):
            raise InvariantViolationError("An accepted error left the logical conjugate basis")
        classes = overlaps.argmax(axis=1)
        weights = _pattern_probabilities(patterns[accepted], channel)
        table += np.bincount(classes, weights=weights, minlength=3**code.k)
    return ClassDistribution.from_table(table, code.k)


def pattern_class(code: TriorthogonalCode, pattern: TritVector) -> int | None:
    """Logical class index of a single Z error pattern, or None when it is rejected."""
    _check_size(code, STATE_VECTOR_MAX_QUTRITS)
    plus, conj_basis = _logical_plus(code)
    state = plus.with_phases(OMEGA ** ((_digits(code.n) @ np.asarray(pattern)) % 3))
    for g in code.Lx.values:
        if abs(state.inner(state.shifted(g)) - 1) > 1e-6:
            return None
    return int(np.argmax(np.abs(conj_basis.conj() @ state.amplitudes) ** 2))


@dataclass(frozen=True)
class Calibration:
    orientation: Orientation
    all_ones_class: int
    t_exponents: tuple[int, ...]

    def __str__(self) -> str:
        return (
            f"orientation={self.orientation}, all-Z^1 input -> class {self.all_ones_class}, "
            f"logical T exponents {self.t_exponents}"
        )


def calibrate_orientation(code: TriorthogonalCode) -> Calibration:
    """The class reached when every input is |M_1> is the class that feeds eps1'."""
    if code.k != 1:
        raise TriorthoError(f"Calibration needs a k=1 code, got k={code.k}")
    cls = pattern_class(code, np.ones(code.n, dtype=np.int64))
    if cls is None or cls == 0:
        raise InvariantViolationError(
            f"All-Z^1 input is not a nontrivial accepted pattern on {code.label}"
        )
    orientation = Orientation.DIRECT if cls == 1 else Orientation.CONJUGATE
    exponents = transversal_T_logical(code).ninth_root_exponents()
    logger.info(
        "Calibrated on %s: all-Z^1 -> class %d, orientation %s", code.label, cls, orientation
    )
    return Calibration(orientation, cls, exponents)
