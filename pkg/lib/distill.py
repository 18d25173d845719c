"""Distillation figures of merit for twirled magic-state noise.

Twirled noise is a product of independent Z^c errors, c drawn from (p0, p1, p2) on each input
qutrit. A pattern e is accepted when it commutes with every X stabilizer; its logical class is
j_a = dot(e, x_a) for the logical X representatives x_a. Two evaluators of the class
probabilities are kept side by side: an enumeration of every accepted pattern (the reference) and
a character sum over the X-stabilizer group and logical shifts (the production path).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Sequence
from typing_extensions import Self

import numpy as np
import numpy.typing as npt

from .codes import TriorthogonalCode, build_family_code
from .constants import (
    BISECTION_TOL,
    BRUTE_FORCE_BUDGET,
    CALIBRATED_ORIENTATION,
    CHARSUM_BUDGET,
    CLASSIFICATION_TOL,
    CONVERGENCE_TOL,
    EXACT_POLYNOMIAL_MAX_N,
    IMAGINARY_TOL,
    ITERATION_CAP,
    JOINT_CHARSUM_MAX_K,
    BasinLabel,
    Orientation,
)
from .errors import AboveThresholdError, BudgetExceededError, InvariantViolationError, TriorthoError
from .trits import coefficient_grid, kernel
from .wigner import polytope_mask

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
OMEGA = np.exp(2j * np.pi / 3)

FIXED_POINTS: dict[BasinLabel, tuple[float, float]] = {
    BasinLabel.M0: (0.0, 0.0),
    BasinLabel.M1: (1.0, 0.0),
    BasinLabel.M2: (0.0, 1.0),
    BasinLabel.MIXED: (1 / 3, 1 / 3),
}

_LOW_DIGITS = 10
_TERMS_PER_CHUNK = 1 << 22
_WORDS_PER_CHUNK = 1 << 16
_HISTOGRAM_LIMIT = 1 << 24


@dataclass(frozen=True)
class NoisePoint:
    eps1: float
    eps2: float

    def __post_init__(self) -> None:
        tol = 1e-12
        if self.eps1 < -tol or self.eps2 < -tol or self.eps1 + self.eps2 > 1 + tol:
            raise TriorthoError(f"Noise point ({self.eps1}, {self.eps2}) lies outside the simplex")

    @classmethod
    def depolarizing(cls, delta: float) -> Self:
        return cls(delta / 3, delta / 3)

    @property
    def infidelity(self) -> float:
        return self.eps1 + self.eps2

    def rotated(self) -> "NoisePoint":
        """Multiply every input by Z: (p0, p1, p2) -> (p2, p0, p1)."""
        return NoisePoint(1 - self.eps1 - self.eps2, self.eps1)

    def __str__(self) -> str:
        return f"({self.eps1:.6g}, {self.eps2:.6g})"


@dataclass(frozen=True)
class DiagonalChannel:
    p0: float
    p1: float
    p2: float

    def __post_init__(self) -> None:
        if min(self.p0, self.p1, self.p2) < -1e-12 or abs(self.p0 + self.p1 + self.p2 - 1) > 1e-9:
            raise TriorthoError(f"Channel ({self.p0}, {self.p1}, {self.p2}) is not a distribution")

    @classmethod
    def from_point(cls, point: NoisePoint) -> Self:
        return cls(1 - point.eps1 - point.eps2, point.eps1, point.eps2)

    @property
    def probs(self) -> tuple[float, float, float]:
        return self.p0, self.p1, self.p2

    def __str__(self) -> str:
        return f"({self.p0:.6g}, {self.p1:.6g}, {self.p2:.6g})"


Label = tuple[int, ...]


def label_of(index: int, k: int) -> Label:
    """Base-3 digits of ``index``, first logical most significant."""
    return tuple((index // 3 ** (k - 1 - a)) % 3 for a in range(k))


@dataclass(frozen=True)
class ClassDistribution:
    probs: dict[Label, float]
    k: int

    @classmethod
    def from_table(cls, table: Sequence[float] | FloatArray, k: int) -> Self:
        flat = np.asarray(table, dtype=np.float64).ravel()
        return cls({label_of(i, k): float(p) for i, p in enumerate(flat)}, k)

    @property
    def acceptance(self) -> float:
        return float(sum(self.probs.values()))

    @property
    def table(self) -> FloatArray:
        return np.array([self.probs[label_of(i, self.k)] for i in range(3**self.k)])

    def __getitem__(self, label: Label | int) -> float:
        if isinstance(label, int):
            label = (label,)
        return self.probs[label]

    def normalized(self) -> dict[Label, float]:
        acc = self.acceptance
        return {label: p / acc for label, p in self.probs.items()}

    def max_difference(self, other: "ClassDistribution") -> float:
        return float(np.max(np.abs(self.table - other.table)))

    def __str__(self) -> str:
        parts = ", ".join(f"{''.join(map(str, j))}: {p:.6g}" for j, p in self.probs.items())
        return f"acceptance {self.acceptance:.6g} | {parts}"


def _check_k1(code: TriorthogonalCode) -> None:
    if code.k != 1:
        raise TriorthoError(f"This operation needs a code with k=1, got k={code.k}")


def _span_chunks(basis: npt.NDArray[np.int64]) -> Iterator[npt.NDArray[np.int64]]:
    dim = basis.shape[0]
    low = min(dim, _LOW_DIGITS)
    low_words = (coefficient_grid(low) @ basis[dim - low :]) % 3
    high_basis = basis[: dim - low]
    for coeffs in coefficient_grid(dim - low):
        yield (low_words + coeffs @ high_basis) % 3


def _counts(vectors: npt.NDArray[np.int64]) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    return (vectors == 1).sum(axis=-1), (vectors == 2).sum(axis=-1)


def _power_table(base: npt.ArrayLike, n: int) -> npt.NDArray[Any]:
    """table[e] = base^e for e = 0..n by repeated multiplication, so 0^0 = 1."""
    arr = np.atleast_1d(np.asarray(base))
    reps = np.broadcast_to(arr, (n,) + arr.shape)
    return np.concatenate([np.ones((1,) + arr.shape, dtype=arr.dtype), np.cumprod(reps, axis=0)])


def _monomials(f0: npt.ArrayLike, f1: npt.ArrayLike, f2: npt.ArrayLike, n: int) -> npt.NDArray[Any]:
    """m[a, b, p] = f1^a f2^b f0^(n-a-b) for every channel p, zero where a + b > n."""
    t0, t1, t2 = (_power_table(f, n) for f in (f0, f1, f2))
    a = np.arange(n + 1)
    rest = n - a[:, None] - a[None, :]
    zeros = np.where((rest >= 0)[..., None], t0[np.clip(rest, 0, n)], 0)
    return t1[:, None, :] * t2[None, :, :] * zeros


# Reference evaluator


@dataclass(frozen=True, eq=False)
class ClassEnumerator:
    """Number of accepted error patterns per (logical class, #ones, #twos).

    ``counts[j, a, b]`` counts accepted patterns in class index j with a entries equal to 1 and
    b entries equal to 2, so that P_j = sum counts[j, a, b] p0^(n-a-b) p1^a p2^b."""

    counts: npt.NDArray[np.int64]
    n: int
    k: int

    def evaluate(self, channel: DiagonalChannel) -> ClassDistribution:
        p0, p1, p2 = (np.float64(p) for p in channel.probs)
        weights = _monomials(p0, p1, p2, self.n)[..., 0]
        table = np.einsum("jab,ab->j", self.counts.astype(np.float64), weights)
        return ClassDistribution.from_table(table, self.k)

    def evaluate_exact(self, p0: Fraction, p1: Fraction, p2: Fraction) -> dict[Label, Fraction]:
        if self.n > EXACT_POLYNOMIAL_MAX_N:
            raise BudgetExceededError(
                f"Exact evaluation is limited to n <= {EXACT_POLYNOMIAL_MAX_N}"
            )
        out: dict[Label, Fraction] = {}
        for j in range(self.counts.shape[0]):
            total = Fraction(0)
            for a, b in zip(*np.nonzero(self.counts[j])):
                ones, twos = int(a), int(b)
                coeff = int(self.counts[j, a, b])
                total += coeff * p0 ** (self.n - ones - twos) * p1**ones * p2**twos
            out[label_of(j, self.k)] = total
        return out

    def polynomial(self, label: Label) -> dict[tuple[int, int, int], int]:
        """Integer coefficients {(#zeros, #ones, #twos): count} of P_label."""
        index = sum(d * 3 ** (self.k - 1 - i) for i, d in enumerate(label))
        return {
            (self.n - int(a) - int(b), int(a), int(b)): int(self.counts[index, a, b])
            for a, b in zip(*np.nonzero(self.counts[index]))
        }


def class_enumerator(code: TriorthogonalCode, budget: int = BRUTE_FORCE_BUDGET) -> ClassEnumerator:
    n, k = code.n, code.k
    accepted = kernel(code.Lx).values
    dim = accepted.shape[0]
    if 3**dim > budget:
        raise BudgetExceededError(
            f"Brute force over 3^{dim} accepted patterns exceeds the budget of {budget}"
        )
    logicals = code.logical_x.values
    place = np.array([3 ** (k - 1 - a) for a in range(k)], dtype=np.int64)
    side = n + 1
    counts = np.zeros(3**k * side * side, dtype=np.int64)
    for words in _span_chunks(accepted):
        ones, twos = _counts(words)
        labels = ((words @ logicals.T) % 3) @ place
        idx = (labels * side + ones) * side + twos
        counts += np.bincount(idx, minlength=counts.size)
    return ClassEnumerator(counts.reshape(3**k, side, side), n, k)


def class_probs_bruteforce(
    code: TriorthogonalCode, channel: DiagonalChannel, budget: int = BRUTE_FORCE_BUDGET
) -> ClassDistribution:
    return class_enumerator(code, budget).evaluate(channel)


# Character-sum evaluator


def _fourier(p0: npt.ArrayLike, p1: npt.ArrayLike, p2: npt.ArrayLike) -> tuple[Any, Any, Any]:
    """f(c) = sum_x p_x omega^(c x) for c = 0, 1, 2."""
    q0, q1, q2 = (np.asarray(p, dtype=np.complex128) for p in (p0, p1, p2))
    return q0 + q1 + q2, q0 + q1 * OMEGA + q2 * OMEGA**2, q0 + q1 * OMEGA**2 + q2 * OMEGA


@dataclass(frozen=True, eq=False)
class CosetHistogram:
    """hist[t, a, b] counts the vectors g + t.x, g over the X-stabilizer group, with a ones and
    b twos; t runs over the logical shifts in lexicographic order."""

    hist: npt.NDArray[np.int64]
    n: int
    rank_lx: int

    @property
    def shifts(self) -> int:
        return int(self.hist.shape[0])

    @property
    def cells(self) -> int:
        return int(self.hist[0].size)

    def sums(
        self, p0: npt.ArrayLike, p1: npt.ArrayLike, p2: npt.ArrayLike
    ) -> npt.NDArray[np.complex128]:
        """A[t, p] = sum_g prod_i f(s_i) for shift t and channel p."""
        weights = _monomials(*_fourier(p0, p1, p2), self.n)
        return np.einsum("tab,abp->tp", self.hist.astype(np.float64), weights)


def _logical_shifts(
    code: TriorthogonalCode, logicals: npt.NDArray[np.int64] | None
) -> npt.NDArray[np.int64]:
    gens = code.logical_x.values if logicals is None else logicals
    shifts = (coefficient_grid(gens.shape[0]) @ gens) % 3
    total = len(shifts) * 3**code.rank_Lx
    if total > CHARSUM_BUDGET:
        raise BudgetExceededError(
            f"Character sum over {len(shifts)} shifts of 3^{code.rank_Lx} stabilizers "
            f"exceeds the budget of {CHARSUM_BUDGET}"
        )
    return shifts


def _coset_blocks(
    code: TriorthogonalCode, shifts: npt.NDArray[np.int64]
) -> Iterator[tuple[int, npt.NDArray[np.int64], npt.NDArray[np.int64]]]:
    for stab in _span_chunks(code.Lx.values):
        rows = max(1, _WORDS_PER_CHUNK // len(stab))
        for start in range(0, len(shifts), rows):
            block = shifts[start : start + rows]
            ones, twos = _counts((block[:, None, :] + stab[None, :, :]) % 3)
            yield start, ones, twos


def coset_histogram(
    code: TriorthogonalCode, logicals: npt.NDArray[np.int64] | None = None
) -> CosetHistogram:
    shifts = _logical_shifts(code, logicals)
    side = code.n + 1
    size = len(shifts) * side * side
    if size > _HISTOGRAM_LIMIT:
        raise BudgetExceededError(
            f"Histogram of {size} cells exceeds {_HISTOGRAM_LIMIT}; use coset_sums"
        )
    hist = np.zeros(size, dtype=np.int64)
    for start, ones, twos in _coset_blocks(code, shifts):
        t = np.arange(start, start + len(ones))[:, None]
        hist += np.bincount(((t * side + ones) * side + twos).ravel(), minlength=size)
    return CosetHistogram(hist.reshape(len(shifts), side, side), code.n, code.rank_Lx)


def coset_sums(
    code: TriorthogonalCode,
    channel: DiagonalChannel,
    logicals: npt.NDArray[np.int64] | None = None,
) -> npt.NDArray[np.complex128]:
    """A[t] = sum_g prod_i f(s_i) over the coset g + t.x, for a single channel."""
    shifts = _logical_shifts(code, logicals)
    side = code.n + 1
    if len(shifts) * side * side <= _HISTOGRAM_LIMIT:
        return coset_histogram(code, logicals).sums(*channel.probs)[:, 0]
    weights = _monomials(*_fourier(*channel.probs), code.n)[..., 0]
    sums = np.zeros(len(shifts), dtype=np.complex128)
    for start, ones, twos in _coset_blocks(code, shifts):
        sums[start : start + len(ones)] += weights[ones, twos].sum(axis=1)
    return sums


def class_probs_charsum(code: TriorthogonalCode, channel: DiagonalChannel) -> ClassDistribution:
    if code.k > JOINT_CHARSUM_MAX_K:
        raise BudgetExceededError(
            f"Joint class distribution for k={code.k} exceeds k <= {JOINT_CHARSUM_MAX_K}; "
            "use marginal_error_rates"
        )
    sums = coset_sums(code, channel)
    k = code.k
    spectrum = np.fft.fftn(sums.reshape((3,) * k)) if k else sums
    probs = np.asarray(spectrum).ravel() / 3 ** (code.rank_Lx + k)
    residue = float(np.max(np.abs(probs.imag), initial=0.0))
    if residue > IMAGINARY_TOL:
        raise InvariantViolationError(f"Character sum left an imaginary residue {residue:.3g}")
    return ClassDistribution.from_table(np.clip(probs.real, 0.0, None), k)


def acceptance_probability(code: TriorthogonalCode, channel: DiagonalChannel) -> float:
    no_shift = np.zeros((0, code.n), dtype=np.int64)
    value = coset_sums(code, channel, no_shift)[0] / 3**code.rank_Lx
    return float(max(value.real, 0.0))


def marginal_error_rates(
    code: TriorthogonalCode,
    channel: DiagonalChannel,
    orientation: Orientation = CALIBRATED_ORIENTATION,
) -> list[NoisePoint]:
    c1, c2 = orientation.classes
    out: list[NoisePoint] = []
    for a in range(code.k):
        sums = coset_sums(code, channel, code.logical_x.values[a : a + 1])
        probs = np.clip(np.fft.fft(sums).real / 3 ** (code.rank_Lx + 1), 0.0, None)
        total = probs.sum()
        out.append(NoisePoint(float(probs[c1] / total), float(probs[c2] / total)))
    return out


# The k = 1 map


@dataclass(frozen=True, eq=False)
class DistillationMap:
    counts: CosetHistogram
    n: int
    orientation: Orientation = CALIBRATED_ORIENTATION
    alternating: bool = False
    label: str = field(default="")

    @classmethod
    def for_code(
        cls,
        code: TriorthogonalCode,
        orientation: Orientation = CALIBRATED_ORIENTATION,
        alternating: bool = False,
    ) -> Self:
        _check_k1(code)
        return cls(coset_histogram(code), code.n, orientation, alternating, code.label)

    def class_probabilities(self, eps1: FloatArray | float, eps2: FloatArray | float) -> FloatArray:
        e1 = np.asarray(eps1, dtype=np.float64)
        e2 = np.asarray(eps2, dtype=np.float64)
        flat1, flat2 = e1.ravel(), e2.ravel()
        chunk = max(1, _TERMS_PER_CHUNK // self.counts.cells)
        parts = []
        for start in range(0, max(flat1.size, 1), chunk):
            a, b = flat1[start : start + chunk], flat2[start : start + chunk]
            parts.append(np.fft.fft(self.counts.sums(1 - a - b, a, b), axis=0))
        spectrum = np.concatenate(parts, axis=1)
        probs = spectrum.real / 3 ** (self.counts.rank_lx + 1)
        return np.clip(probs.reshape((3,) + e1.shape), 0.0, None)

    def step(
        self,
        eps1: FloatArray | float,
        eps2: FloatArray | float,
        orientation: Orientation | None = None,
    ) -> tuple[FloatArray, FloatArray, FloatArray]:
        """One round: returns (eps1', eps2', acceptance)."""
        orientation = orientation or self.orientation
        probs = self.class_probabilities(eps1, eps2)
        acceptance = probs.sum(axis=0)
        safe = np.where(acceptance > 0, acceptance, 1.0)
        c1, c2 = orientation.classes
        return probs[c1] / safe, probs[c2] / safe, acceptance

    def orientation_at(self, round_index: int) -> Orientation:
        if self.alternating and round_index % 2:
            return self.orientation.flipped
        return self.orientation

    def __call__(self, point: NoisePoint) -> NoisePoint:
        e1, e2, _ = self.step(point.eps1, point.eps2)
        return NoisePoint(float(e1), float(e2))


def output_error_map(
    code: TriorthogonalCode, point: NoisePoint, orientation: Orientation = CALIBRATED_ORIENTATION
) -> NoisePoint:
    return DistillationMap.for_code(code, orientation)(point)


def iterate_map(
    dmap: DistillationMap,
    eps1: FloatArray | float,
    eps2: FloatArray | float,
    cap: int = ITERATION_CAP,
    tol: float = CONVERGENCE_TOL,
) -> tuple[FloatArray, FloatArray, int]:
    e1 = np.array(eps1, dtype=np.float64, ndmin=1)
    e2 = np.array(eps2, dtype=np.float64, ndmin=1)
    rounds = 0
    for rounds in range(1, cap + 1):
        n1, n2, _ = dmap.step(e1, e2, dmap.orientation_at(rounds - 1))
        e1, e2 = n1, n2
        if np.all(_nearest_fixed_distance(e1, e2) < tol):
            break
    return e1, e2, rounds


def _nearest_fixed_distance(e1: FloatArray, e2: FloatArray) -> FloatArray:
    dists = [np.maximum(np.abs(e1 - a), np.abs(e2 - b)) for a, b in FIXED_POINTS.values()]
    return np.min(dists, axis=0)


def classify_points(dmap: DistillationMap, eps1: FloatArray, eps2: FloatArray) -> list[BasinLabel]:
    e1, e2, _ = iterate_map(dmap, eps1, eps2)
    labels = np.full(e1.shape, BasinLabel.UNRESOLVED, dtype=object)
    for label, (a, b) in FIXED_POINTS.items():
        close = np.maximum(np.abs(e1 - a), np.abs(e2 - b)) <= CLASSIFICATION_TOL
        labels[close] = label
    return list(labels)


def basin_classify(
    code: TriorthogonalCode, start: NoisePoint, orientation: Orientation = CALIBRATED_ORIENTATION
) -> BasinLabel:
    dmap = DistillationMap.for_code(code, orientation)
    return classify_points(dmap, np.array([start.eps1]), np.array([start.eps2]))[0]


def converges_to_magic(dmap: DistillationMap, delta: float) -> bool:
    e1, e2, _ = iterate_map(dmap, delta / 3, delta / 3)
    return bool(e1[0] < CONVERGENCE_TOL and e2[0] < CONVERGENCE_TOL)


@dataclass(frozen=True)
class ThresholdResult:
    code: str
    delta_star: float
    iterations: int
    tolerance: float
    orientation: Orientation
    alternating: bool = False

    def to_json(self) -> dict[str, object]:
        return {
            "code": self.code,
            "delta_star": round(self.delta_star, 6),
            "iterations": self.iterations,
            "tolerance": self.tolerance,
            "orientation": str(self.orientation),
            "alternating": self.alternating,
        }


def depolarizing_threshold(
    code: TriorthogonalCode,
    orientation: Orientation = CALIBRATED_ORIENTATION,
    tol: float = BISECTION_TOL,
    alternating: bool = False,
) -> ThresholdResult:
    dmap = DistillationMap.for_code(code, orientation, alternating)
    lo, hi = 0.0, 1.0
    steps = 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if converges_to_magic(dmap, mid):
            lo = mid
        else:
            hi = mid
        steps += 1
        logger.debug("Threshold bracket for %s: [%.6f, %.6f]", code.label, lo, hi)
    logger.info("Depolarizing threshold of %s: %.4f", code.label, lo)
    return ThresholdResult(code.label, lo, steps, tol, orientation, alternating)


# Basin grid


@dataclass(frozen=True)
class BasinPoint:
    i: int
    j: int
    eps1: float
    eps2: float
    label: BasinLabel
    in_polytope: bool


def simplex_lattice(resolution: int) -> list[tuple[int, int]]:
    """(i, j) with i + j <= r, row-major in i."""
    return [(i, j) for i in range(resolution + 1) for j in range(resolution + 1 - i)]


def _classify_chunk(args: tuple[DistillationMap, FloatArray, FloatArray]) -> list[BasinLabel]:
    dmap, e1, e2 = args
    return classify_points(dmap, e1, e2)


def basin_grid(
    code: TriorthogonalCode,
    resolution: int,
    orientation: Orientation = CALIBRATED_ORIENTATION,
    workers: int = 1,
) -> list[BasinPoint]:
    if resolution < 2:
        raise TriorthoError(f"Resolution must be at least 2, got {resolution}")
    dmap = DistillationMap.for_code(code, orientation)
    lattice = simplex_lattice(resolution)
    e1 = np.array([i / resolution for i, _ in lattice])
    e2 = np.array([j / resolution for _, j in lattice])
    if workers > 1:
        chunks = np.array_split(np.arange(len(lattice)), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_classify_chunk, [(dmap, e1[c], e2[c]) for c in chunks])
            labels = [label for part in parts for label in part]
    else:
        labels = classify_points(dmap, e1, e2)
    inside = polytope_mask(e1, e2)
    return [
        BasinPoint(i, j, float(a), float(b), label, bool(flag))
        for (i, j), a, b, label, flag in zip(lattice, e1, e2, labels, inside)
    ]


# Overhead


@dataclass(frozen=True)
class OverheadEstimate:
    cost: float
    rounds: int
    infidelities: tuple[float, ...]
    acceptances: tuple[float, ...]


def _round(
    code: TriorthogonalCode,
    point: NoisePoint,
    orientation: Orientation,
    dmap: DistillationMap | None,
) -> tuple[NoisePoint, float]:
    if dmap is not None:
        e1, e2, acceptance = dmap.step(point.eps1, point.eps2)
        return NoisePoint(float(e1), float(e2)), float(acceptance)
    channel = DiagonalChannel.from_point(point)
    acceptance = acceptance_probability(code, channel)
    marginals = marginal_error_rates(code, channel, orientation)
    # worst logical feeds the next round
    return max(marginals, key=lambda p: p.infidelity), acceptance


def overhead_estimate(
    code: TriorthogonalCode,
    target_eps: float,
    input_delta: float,
    orientation: Orientation = CALIBRATED_ORIENTATION,
    cap: int = ITERATION_CAP,
) -> OverheadEstimate:
    """Expected noisy inputs per output: product over rounds of (n/k)/acceptance."""
    if target_eps <= 0:
        raise TriorthoError(f"Target error must be positive, got {target_eps}")
    if code.k < 1:
        raise TriorthoError("Overhead needs at least one logical qutrit")
    point = NoisePoint.depolarizing(input_delta)
    dmap = DistillationMap.for_code(code, orientation) if code.k == 1 else None
    cost = 1.0
    infidelities = [point.infidelity]
    acceptances: list[float] = []
    for _ in range(cap):
        nxt, acceptance = _round(code, point, orientation, dmap)
        if acceptance <= 0:
            raise AboveThresholdError(f"Zero acceptance at {point}")
        cost *= (code.n / code.k) / acceptance
        acceptances.append(acceptance)
        if nxt.infidelity >= point.infidelity and nxt.infidelity > target_eps:
            raise AboveThresholdError(
                f"Input delta={input_delta} does not distill with {code.label}: "
                f"infidelity {point.infidelity:.4g} -> {nxt.infidelity:.4g}"
            )
        point = nxt
        infidelities.append(point.infidelity)
        if point.infidelity <= target_eps:
            return OverheadEstimate(cost, len(acceptances), tuple(infidelities), tuple(acceptances))
    raise AboveThresholdError(f"Target {target_eps} not reached within {cap} rounds")


def threshold_sweep(
    m_values: Sequence[int], orientation: Orientation = CALIBRATED_ORIENTATION
) -> list[tuple[int, int, float]]:
    rows: list[tuple[int, int, float]] = []
    for m in m_values:
        code = build_family_code(m, 1, with_distances=False)
        result = depolarizing_threshold(code, orientation)
        rows.append((m, code.n, result.delta_star))
    return rows


def fitted_exponent(code: TriorthogonalCode, deltas: tuple[float, float] = (1e-3, 1e-4)) -> float:
    dmap = DistillationMap.for_code(code)
    hi, lo = deltas
    out_hi = float(dmap.step(hi / 3, hi / 3)[0])
    out_lo = float(dmap.step(lo / 3, lo / 3)[0])
    return math.log(out_hi / out_lo) / math.log(hi / lo)
