from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np
import numpy.typing as npt

from .constants import DISTANCE_X_BUDGET
from .errors import TriorthoError
from .triortho import (
    PunctureSet,
    TriorthogonalMatrix,
    construct_T_m,
    default_punctures,
    puncture,
)
from .trits import TritMatrix, TritVector, coefficient_grid, kernel, rank, row_basis

logger = logging.getLogger(__name__)

_SUPPORT_CHUNK = 4096
_DISTANCE_X_FALLBACK_WEIGHT = 4


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    d: int

    def __post_init__(self) -> None:
        if self.d < 1 or self.k < 0 or self.n <= self.k:
            raise TriorthoError(f"Invalid code parameters [{self.n},{self.k},{self.d}]")

    @property
    def label(self) -> str:
        return f"[{self.n},{self.k},{self.d}]_3"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class YieldParameter:
    gamma: float

    def __float__(self) -> float:
        return self.gamma

    def __str__(self) -> str:
        return f"{self.gamma:.3f}"


@dataclass(frozen=True, eq=False)
class TriorthogonalCode:
    matrix: TriorthogonalMatrix
    Lx: TritMatrix
    Lz: TritMatrix
    logical_x: TritMatrix
    d_z: int | None = None
    d_x: int | None = None

    @property
    def n(self) -> int:
        return self.matrix.length

    @property
    def k(self) -> int:
        return self.logical_x.rows

    @property
    def rank_Lx(self) -> int:
        return self.Lx.rows

    @property
    def rank_Lz(self) -> int:
        return self.Lz.rows

    @property
    def d(self) -> int | None:
        known = [d for d in (self.d_x, self.d_z) if d is not None]
        return min(known) if known else None

    @property
    def params(self) -> CodeParams:
        if self.d is None:
            raise TriorthoError("Code distance is unknown")
        return CodeParams(self.n, self.k, self.d)

    @property
    def label(self) -> str:
        d = "?" if self.d is None else str(self.d)
        return f"[{self.n},{self.k},{d}]_3"

    def __str__(self) -> str:
        return f"TriorthogonalCode {self.label} (rank Lx={self.rank_Lx}, rank Lz={self.rank_Lz})"


def _assemble(tm: TriorthogonalMatrix) -> TriorthogonalCode:
    H = tm.H
    if rank(H) != H.rows:
        raise TriorthoError(f"H is rank deficient: rank {rank(H)} < {H.rows} rows")
    H0 = tm.H0.values
    if H0.size and np.any((H0 @ H.values.T) % 3):
        raise TriorthoError(
            "X stabilizers are not contained in the Z stabilizer span; the puncture is invalid"
        )
    Lx = row_basis(tm.H0) if tm.H0.rows else TritMatrix.zeros(0, H.cols)
    Lz = kernel(H)
    code = TriorthogonalCode(tm, Lx, Lz, tm.H1)
    check_dimensions(code)
    return code


def build_code(tm: TriorthogonalMatrix, with_distances: bool = True) -> TriorthogonalCode:
    code = _assemble(tm)
    if not with_distances or code.k == 0:
        return code
    d_z = distance_z(code)
    d_x = distance_x(code)
    if d_x is not None and d_x < 2 <= d_z:
        print(f"[WARNING] {code.label}: X distance {d_x} is below the Z distance {d_z}")
    return TriorthogonalCode(tm, code.Lx, code.Lz, code.logical_x, d_z=d_z, d_x=d_x)


def build_family_code(
    m: int, k: int, punctures: PunctureSet | None = None, with_distances: bool = True
) -> TriorthogonalCode:
    space = construct_T_m(m)
    if punctures is None:
        punctures = default_punctures(m, k)
    elif punctures.k != k:
        raise TriorthoError(f"{punctures.k} puncture coordinates given for k={k}")
    return build_code(puncture(space, punctures), with_distances=with_distances)


def check_dimensions(code: TriorthogonalCode) -> None:
    """rank(Lx) + k = rank(H) and dim ker(Lx) - rank(Lz) = k."""
    rank_H = rank(code.matrix.H)
    if code.rank_Lx + code.k != rank_H:
        raise TriorthoError(f"rank(Lx)={code.rank_Lx} + k={code.k} != rank(H)={rank_H}")
    if code.rank_Lz != code.n - rank_H:
        raise TriorthoError(f"rank(Lz)={code.rank_Lz} != n - rank(H)={code.n - rank_H}")
    ker_lx = code.n - code.rank_Lx
    if ker_lx - code.rank_Lz != code.k:
        raise TriorthoError(f"dim ker(Lx) - rank(Lz) = {ker_lx - code.rank_Lz} != k={code.k}")


def _supports(n: int, w: int) -> Iterator[npt.NDArray[np.int64]]:
    combos = itertools.combinations(range(n), w)
    while True:
        chunk = list(itertools.islice(combos, _SUPPORT_CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64)


def min_weight_vector(
    annihilate: npt.NDArray[np.int64],
    detect: npt.NDArray[np.int64],
    n: int,
    max_weight: int | None = None,
) -> TritVector | None:
    """Lowest-weight e with annihilate @ e = 0 and detect @ e != 0 (mod 3).

    Supports are scanned in increasing size, with every nonzero value pattern on each support."""
    max_weight = n if max_weight is None else min(max_weight, n)
    for w in range(1, max_weight + 1):
        patterns = np.array(list(itertools.product((1, 2), repeat=w)), dtype=np.int64)
        for supports in _supports(n, w):
            # (rows, supports, w) x (patterns, w) -> (supports, patterns, rows)
            syn_a = np.einsum("rsw,pw->spr", annihilate[:, supports], patterns) % 3
            syn_d = np.einsum("rsw,pw->spr", detect[:, supports], patterns) % 3
            hit = ~np.any(syn_a, axis=2) & np.any(syn_d, axis=2)
            if hit.any():
                s, p = np.argwhere(hit)[0]
                e = np.zeros(n, dtype=np.int64)
                e[supports[s]] = patterns[p]
                return e
    return None


def distance_z(code: TriorthogonalCode) -> int:
    if code.k == 0:
        raise TriorthoError("Distance is undefined for a code with no logical qutrits (k=0)")
    e = min_weight_vector(code.Lx.values.reshape(-1, code.n), code.logical_x.values, code.n)
    if e is None:
        raise TriorthoError("No undetected logical Z error found")
    return int(np.count_nonzero(e))


def distance_x(code: TriorthogonalCode) -> int | None:
    """Minimum weight over rowspace(H) minus rowspace(Lx); None when beyond the budget."""
    if code.k == 0:
        raise TriorthoError("Distance is undefined for a code with no logical qutrits (k=0)")
    kappa = code.rank_Lx + code.k
    if 3**kappa <= DISTANCE_X_BUDGET:
        gens = code.logical_x.values
        stab = _group(code.Lx)
        t = coefficient_grid(code.k)[1:]
        logicals = (t @ gens) % 3
        words = (logicals[:, None, :] + stab[None, :, :]) % 3
        return int(np.count_nonzero(words, axis=2).min())
    e = min_weight_vector(
        code.Lz.values.reshape(-1, code.n),
        kernel(code.Lx).values,
        code.n,
        max_weight=_DISTANCE_X_FALLBACK_WEIGHT,
    )
    if e is None:
        logger.info(
            "X distance of %s exceeds %d; left unknown", code.label, _DISTANCE_X_FALLBACK_WEIGHT
        )
        return None
    return int(np.count_nonzero(e))


def _group(m: TritMatrix) -> npt.NDArray[np.int64]:
    coeffs = coefficient_grid(m.rows)
    if m.rows == 0:
        return np.zeros((1, m.cols), dtype=np.int64)
    return (coeffs @ m.values) % 3


def detects_single_errors(code: TriorthogonalCode) -> bool:
    """Every weight-1 Z error has a nonzero syndrome against the X stabilizers."""
    if code.rank_Lx == 0:
        return False
    return bool(np.all(np.any(code.Lx.values != 0, axis=0)))


def yield_param(n: int, k: int, d: int) -> YieldParameter:
    if k < 1:
        raise TriorthoError(f"The yield parameter needs k >= 1, got k={k}")
    if n <= k:
        raise TriorthoError(f"The yield parameter needs n > k, got n={n}, k={k}")
    if d < 2:
        raise TriorthoError(f"The yield parameter needs d >= 2, got d={d}")
    return YieldParameter(math.log(n / k) / math.log(d))


def family_yield(m: int) -> YieldParameter:
    """Yield of the [6m+2, 3m-2, 2]_3 member: log2(2 + 6/(3m-2))."""
    if m < 1:
        raise TriorthoError(f"m must be a positive integer, got {m}")
    return YieldParameter(math.log2(2 + 6 / (3 * m - 2)))


def code_summary(code: TriorthogonalCode, m: int | None = None) -> dict[str, Any]:
    punctures = code.matrix.punctures
    gamma: float | None = None
    if code.k >= 1 and code.d is not None and code.d >= 2:
        gamma = round(yield_param(code.n, code.k, code.d).gamma, 12)
    return {
        "m": m,
        "punctures": list(punctures.coords) if punctures is not None else None,
        "n": code.n,
        "k": code.k,
        "d": code.d,
        "d_x": code.d_x,
        "d_z": code.d_z,
        "gamma": gamma,
        "rank_Lx": code.rank_Lx,
        "rank_Lz": code.rank_Lz,
    }
