"""Exact linear algebra over the three-element field.

Matrices wrap a read-only ``galois`` GF(3) array; vectors are plain integer numpy arrays with
entries in {0, 1, 2}. Row reduction is leftmost-pivot, scale-to-one, which makes the reduced
row echelon form (and therefore every basis this package stores) canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence
from typing_extensions import Self

import galois
import numpy as np
import numpy.typing as npt

from .errors import TriorthoError

GF3 = galois.GF(3)

TritVector = npt.NDArray[np.int64]


def trit_vector(values: Iterable[int] | npt.ArrayLike) -> TritVector:
    vec = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.int64)
    if vec.ndim != 1:
        raise TriorthoError(f"Expected a 1-dimensional trit vector, got shape {vec.shape}")
    if vec.size and (vec.min() < 0 or vec.max() > 2):
        raise TriorthoError(f"Trit entries must lie in {{0,1,2}}: {vec.tolist()}")
    return vec


def weight(v: TritVector) -> int:
    return int(np.count_nonzero(v))


@dataclass(frozen=True, eq=False)
class TritMatrix:
    entries: galois.FieldArray

    def __post_init__(self) -> None:
        if self.entries.ndim != 2:
            raise TriorthoError(f"TritMatrix needs a 2-dimensional array, got {self.entries.shape}")
        self.entries.flags.writeable = False

    @classmethod
    def from_array(cls, values: npt.ArrayLike, cols: int | None = None) -> Self:
        arr = np.asarray(values, dtype=np.int64)
        if arr.size == 0:
            if cols is None:
                cols = arr.shape[1] if arr.ndim == 2 else 0
            return cls(GF3(np.zeros((0, cols), dtype=np.int64)))
        if arr.ndim != 2:
            raise TriorthoError(f"Expected a 2-dimensional array, got shape {arr.shape}")
        if arr.min() < 0 or arr.max() > 2:
            raise TriorthoError("Trit entries must lie in {0,1,2}")
        return cls(GF3(arr))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int] | TritVector], cols: int | None = None) -> Self:
        row_list = [list(int(x) for x in row) for row in rows]
        if not row_list:
            return cls.zeros(0, cols or 0)
        lengths = {len(row) for row in row_list}
        if len(lengths) != 1:
            raise TriorthoError(f"Rows have different lengths: {sorted(lengths)}")
        return cls.from_array(row_list)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Self:
        return cls(GF3.Zeros((rows, cols)))

    @classmethod
    def identity(cls, n: int) -> Self:
        return cls(GF3.Identity(n))

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def values(self) -> npt.NDArray[np.int64]:
        return np.asarray(self.entries.view(np.ndarray), dtype=np.int64)

    def row(self, index: int) -> TritVector:
        return self.values[index]

    def row_list(self) -> list[TritVector]:
        return list(self.values)

    def take_rows(self, indices: Sequence[int]) -> "TritMatrix":
        return TritMatrix.from_array(self.values[list(indices)], cols=self.cols)

    def take_columns(self, indices: Sequence[int]) -> "TritMatrix":
        return TritMatrix.from_array(self.values[:, list(indices)], cols=len(indices))

    def delete_columns(self, indices: Iterable[int]) -> "TritMatrix":
        drop = set(indices)
        keep = [c for c in range(self.cols) if c not in drop]
        return self.take_columns(keep)

    def stack(self, other: "TritMatrix") -> "TritMatrix":
        if self.cols != other.cols:
            raise TriorthoError(f"Cannot stack {self.shape} on {other.shape}")
        return TritMatrix.from_array(np.vstack([self.values, other.values]), cols=self.cols)

    def with_row(self, row: TritVector) -> "TritMatrix":
        return self.stack(TritMatrix.from_rows([row]))

    def nonzero_rows(self) -> "TritMatrix":
        vals = self.values
        return TritMatrix.from_array(vals[vals.any(axis=1)], cols=self.cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TritMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.shape, self.values.astype(np.uint8).tobytes()))

    def __str__(self) -> str:
        return format_matrix(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.rows}x{self.cols})"


def _check_lengths(*vectors: TritVector) -> None:
    lengths = {len(v) for v in vectors}
    if len(lengths) != 1:
        raise TriorthoError(f"Vector length mismatch: {sorted(lengths)}")


def dot(u: TritVector, v: TritVector) -> int:
    _check_lengths(u, v)
    return int(np.dot(np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64)) % 3)


def triple_dot(u: TritVector, v: TritVector, w: TritVector) -> int:
    _check_lengths(u, v, w)
    prod = np.asarray(u, dtype=np.int64) * np.asarray(v, dtype=np.int64)
    return int(np.dot(prod, np.asarray(w, dtype=np.int64)) % 3)


def rref(m: TritMatrix) -> TritMatrix:
    if m.rows == 0 or m.cols == 0:
        return m
    return TritMatrix(m.entries.row_reduce())


def pivot_columns(reduced: TritMatrix) -> list[int]:
    pivots: list[int] = []
    for row in reduced.values:
        nz = np.flatnonzero(row)
        if nz.size == 0:
            break
        pivots.append(int(nz[0]))
    return pivots


def row_basis(m: TritMatrix) -> TritMatrix:
    """Canonical basis of the row space: the nonzero rows of the RREF."""
    return rref(m).nonzero_rows()


def rank(m: TritMatrix) -> int:
    return row_basis(m).rows


def kernel(m: TritMatrix) -> TritMatrix:
    """Basis of {v : M v = 0}, returned in canonical RREF."""
    n = m.cols
    reduced = row_basis(m)
    pivots = pivot_columns(reduced)
    free = [c for c in range(n) if c not in set(pivots)]
    if not free:
        return TritMatrix.zeros(0, n)
    red = reduced.values
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = (-red[r, f]) % 3
    return row_basis(TritMatrix.from_array(basis, cols=n))


def rowspace_equal(a: TritMatrix, b: TritMatrix) -> bool:
    if a.cols != b.cols:
        return False
    return row_basis(a) == row_basis(b)


def rowspace_contains(outer: TritMatrix, inner: TritMatrix) -> bool:
    if outer.cols != inner.cols:
        return False
    if inner.rows == 0:
        return True
    return rank(outer.stack(inner)) == rank(outer)


def in_rowspace(m: TritMatrix, v: TritVector) -> bool:
    return rowspace_contains(m, TritMatrix.from_rows([v]))


def span_vectors(m: TritMatrix) -> npt.NDArray[np.int64]:
    """Every vector of the row space of ``m`` (3^rank rows); only for small ranks."""
    basis = row_basis(m).values
    k = basis.shape[0]
    coeffs = coefficient_grid(k)
    return (coeffs @ basis) % 3


def coefficient_grid(k: int) -> npt.NDArray[np.int64]:
    """All 3^k coefficient vectors in lexicographic order, one per row."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((3,) * k).reshape(k, -1).T
    return np.asarray(grids, dtype=np.int64)


# Text format shared across the repository:
#   line 1: "<rows> <cols>"; then one line of <cols> space-separated digits per row.


def format_matrix(m: TritMatrix) -> str:
    lines = [f"{m.rows} {m.cols}"]
    lines.extend(" ".join(str(int(x)) for x in row) for row in m.values)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str | Iterable[str]) -> TritMatrix:
    lines = text.splitlines() if isinstance(text, str) else list(text)
    lines = [line.strip() for line in lines if line.strip()]
    if not lines:
        raise TriorthoError("Empty matrix text")
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise TriorthoError(f"Invalid matrix header: {lines[0]!r}")
    rows, cols = int(header[0]), int(header[1])
    body = lines[1:]
    if len(body) != rows:
        raise TriorthoError(f"Matrix header announces {rows} rows, found {len(body)}")
    values: list[list[int]] = []
    for lineno, line in enumerate(body, start=2):
        digits = line.split()
        if len(digits) != cols:
            raise TriorthoError(f"Line {lineno}: expected {cols} entries, found {len(digits)}")
        if any(d not in ("0", "1", "2") for d in digits):
            raise TriorthoError(f"Line {lineno}: entries must be digits 0, 1 or 2: {line!r}")
        values.append([int(d) for d in digits])
    if rows == 0:
        return TritMatrix.zeros(0, cols)
    return TritMatrix.from_array(values)


def write_matrix(m: TritMatrix, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(format_matrix(m))
    return path


def read_matrix(path: str | Path) -> TritMatrix:
    return parse_matrix(Path(path).read_text())
