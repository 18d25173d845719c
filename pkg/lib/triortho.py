"""Ternary triorthogonal spaces: construction, verification, maximality and puncturing.

Coordinates handed in or out of this module (puncture sets, block indices) are 1-indexed.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence
from typing_extensions import Self

import numpy as np
import numpy.typing as npt

from .constants import MAXIMALITY_BUDGET, MaximalityStatus
from .errors import InvariantViolationError, TriorthoError
from .trits import (
    TritMatrix,
    TritVector,
    dot,
    format_matrix,
    in_rowspace,
    kernel,
    parse_matrix,
    pivot_columns,
    row_basis,
    rref,
    triple_dot,
)

logger = logging.getLogger(__name__)

_CHUNK = 3**10


def is_triorthogonal(basis: TritMatrix) -> bool:
    """All pair dots and all triple products of the generators vanish mod 3."""
    v = basis.values
    if v.shape[0] == 0:
        return True
    if np.any((v @ v.T) % 3):
        return False
    pairs = v[:, None, :] * v[None, :, :]
    triples = np.einsum("abn,cn->abc", pairs, v) % 3
    return not bool(np.any(triples))


@dataclass(frozen=True)
class TriorthogonalSpace:
    basis: TritMatrix

    @classmethod
    def from_basis(cls, basis: TritMatrix | Sequence[Sequence[int]], check: bool = True) -> Self:
        if not isinstance(basis, TritMatrix):
            basis = TritMatrix.from_rows(basis)
        canonical = row_basis(basis)
        if check and not is_triorthogonal(canonical):
            raise TriorthoError("Basis does not span a triorthogonal space")
        return cls(canonical)

    @classmethod
    def empty(cls, n: int) -> Self:
        return cls(TritMatrix.zeros(0, n))

    @property
    def n(self) -> int:
        return self.basis.cols

    @property
    def kappa(self) -> int:
        return self.basis.rows

    def contains(self, v: TritVector) -> bool:
        if self.kappa == 0:
            return not bool(np.any(v))
        return in_rowspace(self.basis, v)

    def extended(self, v: TritVector) -> "TriorthogonalSpace":
        return TriorthogonalSpace.from_basis(self.basis.with_row(v))

    def permuted(self, permutation: Sequence[int]) -> "TriorthogonalSpace":
        return TriorthogonalSpace.from_basis(self.basis.take_columns(permutation), check=False)

    def __str__(self) -> str:
        return f"TriorthogonalSpace(n={self.n}, kappa={self.kappa})"


def family_generators(m: int) -> TritMatrix:
    """Generators w, v^(1) ... v^(3m-1) of T_m, in that order."""
    if m < 1:
        raise TriorthoError(f"m must be a positive integer, got {m}")
    n = 9 * m
    coords = np.arange(1, n + 1)
    rows = [(coords - 1) % 3]
    for a in range(1, 3 * m):
        v = np.zeros(n, dtype=np.int64)
        v[(coords > 3 * (a - 1)) & (coords <= 3 * a)] = 1
        v[coords > n - 3] = 2
        rows.append(v)
    return TritMatrix.from_array(np.array(rows))


def construct_T_m(m: int) -> TriorthogonalSpace:
    space = TriorthogonalSpace.from_basis(family_generators(m))
    if space.kappa != 3 * m:
        raise InvariantViolationError(f"T_{m} has rank {space.kappa}, expected {3 * m}")
    return space


def reed_muller_space(r: int) -> TriorthogonalSpace:
    """First-order ternary Reed-Muller code in r variables (evaluations of 1, x_1 .. x_r).

    Points of F_3^r are listed lexicographically, last variable fastest."""
    if r < 2:
        raise TriorthoError(
            f"The first-order Reed-Muller space is triorthogonal only for r >= 2, got {r}"
        )
    points = np.array(list(itertools.product(range(3), repeat=r)), dtype=np.int64)
    rows = [np.ones(len(points), dtype=np.int64)] + [points[:, i] for i in range(r)]
    return TriorthogonalSpace.from_basis(TritMatrix.from_array(np.array(rows)))


# Maximality


@dataclass(frozen=True)
class MaximalityVerdict:
    status: MaximalityStatus
    witness: TritVector | None
    enumerated_count: int
    kernel_dim: int

    def __str__(self) -> str:
        tested = f"kernel dim {self.kernel_dim}, {self.enumerated_count} candidates tested"
        return f"{self.status} ({tested})"


def extension_constraints(space: TriorthogonalSpace) -> TritMatrix:
    """Constraints on an extension vector that are linear in it.

    dot(v, h_a) = 0, triple_dot(v, h_a, h_b) = 0 for a <= b, and sum(v) = 0 (which is
    triple_dot(v, v, v) by Fermat)."""
    v = space.basis.values
    rows = [v[i] for i in range(space.kappa)]
    for a, b in itertools.combinations_with_replacement(range(space.kappa), 2):
        rows.append((v[a] * v[b]) % 3)
    rows.append(np.ones(space.n, dtype=np.int64))
    return TritMatrix.from_array(np.array(rows), cols=space.n)


def quadratic_mask(
    space: TriorthogonalSpace, candidates: npt.NDArray[np.int64]
) -> npt.NDArray[np.bool_]:
    squares = candidates * candidates
    ok = squares.sum(axis=1) % 3 == 0
    if space.kappa:
        ok &= ~np.any((squares @ space.basis.values.T) % 3, axis=1)
    return ok


def complement_basis(space: TriorthogonalSpace, outer: TritMatrix) -> npt.NDArray[np.int64]:
    """Rows extending the space's basis to a basis of ``outer`` (which must contain it)."""
    current = space.basis
    extra: list[TritVector] = []
    for row in outer.values:
        if current.rows == 0 and not row.any():
            continue
        if current.rows and in_rowspace(current, row):
            continue
        extra.append(row)
        current = current.with_row(row)
    return np.array(extra, dtype=np.int64).reshape(len(extra), space.n)


def _projective_coefficients(c: int, limit: int) -> Iterator[npt.NDArray[np.int64]]:
    total = 3**c
    place = np.array([3 ** (c - 1 - i) for i in range(c)], dtype=np.int64)
    produced = 0
    for start in range(1, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (idx[:, None] // place[None, :]) % 3
        first = digits[np.arange(len(digits)), np.argmax(digits != 0, axis=1)]
        digits = digits[first == 1]
        if produced + len(digits) > limit:
            digits = digits[: limit - produced]
        produced += len(digits)
        if len(digits):
            yield digits
        if produced >= limit:
            return


@dataclass(frozen=True)
class ExtensionScan:
    kernel: TritMatrix
    complement: npt.NDArray[np.int64]
    survivors: list[TritVector]
    enumerated_count: int
    complete: bool

    @property
    def kernel_dim(self) -> int:
        return self.kernel.rows


def extension_vectors(
    space: TriorthogonalSpace, budget: int = MAXIMALITY_BUDGET, first_only: bool = False
) -> ExtensionScan:
    """Every valid extension of the space, one representative per line through a coset.

    The linear constraints cut out a kernel N containing the space; coset representatives of the
    space in N are screened by the remaining quadratic conditions."""
    null = kernel(extension_constraints(space))
    comp = complement_basis(space, null)
    c = comp.shape[0]
    survivors: list[TritVector] = []
    if c == 0:
        return ExtensionScan(null, comp, survivors, 0, True)
    projective_total = (3**c - 1) // 2
    enumerated = 0
    for coeffs in _projective_coefficients(c, budget):
        candidates = (coeffs @ comp) % 3
        enumerated += len(candidates)
        hits = candidates[quadratic_mask(space, candidates)]
        survivors.extend(hits)
        if first_only and survivors:
            complete = enumerated >= projective_total
            return ExtensionScan(null, comp, survivors[:1], enumerated, complete)
    return ExtensionScan(null, comp, survivors, enumerated, enumerated >= projective_total)


def is_maximal(
    space: TriorthogonalSpace, enumeration_budget: int = MAXIMALITY_BUDGET
) -> MaximalityVerdict:
    scan = extension_vectors(space, enumeration_budget, first_only=True)
    if scan.survivors:
        return MaximalityVerdict(
            MaximalityStatus.NOT_MAXIMAL, scan.survivors[0], scan.enumerated_count, scan.kernel_dim
        )
    if scan.complete:
        status = MaximalityStatus.MAXIMAL
        return MaximalityVerdict(status, None, scan.enumerated_count, scan.kernel_dim)
    logger.info(
        "Maximality inconclusive: %d of %d candidates tested",
        scan.enumerated_count,
        (3 ** scan.complement.shape[0] - 1) // 2,
    )
    status = MaximalityStatus.INCONCLUSIVE
    return MaximalityVerdict(status, None, scan.enumerated_count, scan.kernel_dim)


def brute_force_extension(space: TriorthogonalSpace) -> TritVector | None:
    n = space.n
    if n > 12:
        raise TriorthoError(f"Brute-force extension search is limited to n <= 12, got {n}")
    basis = space.basis.values
    everything = np.array(list(itertools.product(range(3), repeat=n)), dtype=np.int64)
    for v in everything[1:]:
        if space.contains(v):
            continue
        if is_triorthogonal(TritMatrix.from_array(np.vstack([basis, v[None, :]]), cols=n)):
            return v
    return None


# Puncturing


@dataclass(frozen=True)
class PunctureSet:
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.coords, self.coords[1:])):
            raise TriorthoError(f"Puncture coordinates must be strictly increasing: {self.coords}")
        if self.coords and self.coords[0] < 1:
            raise TriorthoError(f"Puncture coordinates are 1-indexed, got {self.coords[0]}")

    @classmethod
    def of(cls, coords: Sequence[int], n: int | None = None) -> Self:
        seen: set[int] = set()
        for c in coords:
            if c in seen:
                raise TriorthoError(f"Duplicate puncture coordinate: {c}")
            seen.add(c)
        punctures = cls(tuple(sorted(int(c) for c in coords)))
        if n is not None:
            punctures.validate(n)
        return punctures

    @property
    def k(self) -> int:
        return len(self.coords)

    @property
    def zero_based(self) -> list[int]:
        return [c - 1 for c in self.coords]

    def validate(self, n: int) -> None:
        for c in self.coords:
            if not 1 <= c <= n:
                raise TriorthoError(f"Puncture coordinate {c} out of range 1..{n}")

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coords)


def default_punctures(m: int, k: int) -> PunctureSet:
    if m < 1:
        raise TriorthoError(f"m must be a positive integer, got {m}")
    if k < 0:
        raise TriorthoError(f"k must be nonnegative, got {k}")
    if k > 3 * m - 2:
        raise TriorthoError(f"k exceeds 3m-2 (k={k}, m={m})")
    return PunctureSet(tuple(3 * j + 1 for j in range(k)))


@dataclass(frozen=True)
class TriorthogonalMatrix:
    H: TritMatrix
    h1_rows: tuple[int, ...]
    h0_rows: tuple[int, ...]
    punctures: PunctureSet | None = None

    def __post_init__(self) -> None:
        if sorted(self.h1_rows + self.h0_rows) != list(range(self.H.rows)):
            raise TriorthoError("Every row of H must be in exactly one of H1 and H0")

    @property
    def H1(self) -> TritMatrix:
        return self.H.take_rows(self.h1_rows)

    @property
    def H0(self) -> TritMatrix:
        return self.H.take_rows(self.h0_rows)

    @property
    def kappa(self) -> int:
        return self.H.rows

    @property
    def length(self) -> int:
        return self.H.cols

    @classmethod
    def classify(cls, H: TritMatrix, punctures: PunctureSet | None = None) -> Self:
        """Partition rows by their self-dot: nonzero goes to H1, zero to H0."""
        h1 = tuple(i for i, row in enumerate(H.values) if dot(row, row) != 0)
        h0 = tuple(i for i in range(H.rows) if i not in h1)
        return cls(H, h1, h0, punctures)

    def __str__(self) -> str:
        return format_triorthogonal_matrix(self)


def _adapted_basis(space: TriorthogonalSpace, punctures: PunctureSet) -> TritMatrix:
    """Basis whose first k rows restrict to unit vectors on the punctures and whose other rows
    vanish there."""
    cols = punctures.zero_based
    rest = [c for c in range(space.n) if c not in set(cols)]
    order = cols + rest
    reduced = rref(space.basis.take_columns(order))
    pivots = pivot_columns(reduced)
    if pivots[: punctures.k] != list(range(punctures.k)):
        raise TriorthoError(
            f"Puncture columns {punctures} are linearly dependent on the space; "
            "each puncture must carry an independent logical"
        )
    inverse = np.argsort(order)
    return reduced.take_columns(list(inverse))


def puncture(space: TriorthogonalSpace, punctures: PunctureSet) -> TriorthogonalMatrix:
    punctures.validate(space.n)
    if punctures.k == 0:
        return TriorthogonalMatrix.classify(space.basis, punctures)
    adapted = _adapted_basis(space, punctures)
    H = adapted.delete_columns(punctures.zero_based)
    tm = TriorthogonalMatrix.classify(H, punctures)
    if len(tm.h1_rows) != punctures.k:
        raise InvariantViolationError(
            f"Puncturing at {punctures} left {len(tm.h1_rows)} non-self-orthogonal rows, "
            f"expected {punctures.k}"
        )
    return tm


def format_triorthogonal_matrix(tm: TriorthogonalMatrix) -> str:
    ordered = tm.H1.stack(tm.H0)
    return f"H1 {len(tm.h1_rows)} H0 {len(tm.h0_rows)}\n" + format_matrix(ordered)


def parse_triorthogonal_matrix(text: str) -> TriorthogonalMatrix:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise TriorthoError("Empty triorthogonal matrix text")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "H1" or header[2] != "H0":
        raise TriorthoError(f"Invalid partition header: {lines[0]!r}")
    c1, c0 = int(header[1]), int(header[3])
    H = parse_matrix(lines[1:])
    if c1 + c0 != H.rows:
        raise TriorthoError(f"Partition header counts {c1}+{c0} do not match {H.rows} rows")
    return TriorthogonalMatrix(H, tuple(range(c1)), tuple(range(c1, c1 + c0)))


def write_triorthogonal_matrix(tm: TriorthogonalMatrix, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(format_triorthogonal_matrix(tm))
    return path


def read_triorthogonal_matrix(path: str | Path) -> TriorthogonalMatrix:
    return parse_triorthogonal_matrix(Path(path).read_text())


def check_generators(basis: TritMatrix) -> list[tuple[int, ...]]:
    v = basis.values
    bad: list[tuple[int, ...]] = []
    for a, b in itertools.combinations_with_replacement(range(basis.rows), 2):
        if dot(v[a], v[b]):
            bad.append((a, b))
    for a, b, c in itertools.combinations_with_replacement(range(basis.rows), 3):
        if triple_dot(v[a], v[b], v[c]):
            bad.append((a, b, c))
    return bad
