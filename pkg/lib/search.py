from __future__ import annotations

import itertools
import json
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Sequence
from typing_extensions import Self

import galois
import numpy as np
import numpy.typing as npt

from .constants import MAX_LENGTH, MAXIMALITY_BUDGET, MaximalityStatus, SearchMode
from .data_structures import SearchCheckpoint
from .errors import InvariantViolationError, TriorthoError
from .triortho import (
    TriorthogonalSpace,
    complement_basis,
    extension_constraints,
    extension_vectors,
    is_maximal,
    is_triorthogonal,
    quadratic_mask,
)
from .trits import (
    GF3,
    TritMatrix,
    format_matrix,
    kernel,
    parse_matrix,
    pivot_columns,
    rowspace_equal,
    span_vectors,
)

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 100_000
DEFAULT_RESTARTS = 50
_RANDOM_BATCH = 4096
_RANDOM_TRIES = 16


@dataclass(frozen=True)
class SearchConfig:
    n: int
    kappa_min: int
    budget: int = DEFAULT_NODE_BUDGET
    mode: SearchMode = SearchMode.EXHAUSTIVE
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    maximality_budget: int = MAXIMALITY_BUDGET
    workers: int = 1

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_LENGTH:
            raise TriorthoError(f"Search length must lie in 1..{MAX_LENGTH}, got {self.n}")
        if self.kappa_min < 1:
            raise TriorthoError(f"kappa_min must be at least 1, got {self.kappa_min}")
        if self.budget < 0:
            raise TriorthoError(f"Node budget must be nonnegative, got {self.budget}")

    @classmethod
    def for_length(cls, n: int, **kwargs: Any) -> Self:
        """kappa_min = floor(n/3), the dimension floor of the uniqueness question."""
        return cls(n, max(1, n // 3), **kwargs)


@dataclass(frozen=True)
class Triviality:
    trivial: bool
    reason: str | None = None

    def __str__(self) -> str:
        return self.reason or "non-trivial"


def classify_triviality(space: TriorthogonalSpace) -> Triviality:
    """Trivial spaces have an all-zero coordinate or split as a direct sum on disjoint supports.

    The reduced row echelon basis of a direct sum is the union of the reduced bases of the
    summands, so it is enough to split the reduced rows into support-connected components."""
    basis = space.basis.values
    if space.kappa == 0:
        return Triviality(True, "zero space")
    zero = np.flatnonzero(~basis.any(axis=0))
    if zero.size:
        return Triviality(True, f"zero coordinate {int(zero[0]) + 1}")
    supports = basis != 0
    overlap = (supports.astype(np.int64) @ supports.T.astype(np.int64)) > 0
    seen = np.zeros(space.kappa, dtype=bool)
    components = 0
    for start in range(space.kappa):
        if seen[start]:
            continue
        components += 1
        stack = [start]
        seen[start] = True
        while stack:
            row = stack.pop()
            for nxt in np.flatnonzero(overlap[row] & ~seen):
                seen[nxt] = True
                stack.append(int(nxt))
    if components > 1:
        return Triviality(True, f"direct sum of {components} components")
    return Triviality(False)


# Equivalence


def weight_distribution(space: TriorthogonalSpace) -> tuple[tuple[int, int, int], ...]:
    """Sorted ((#ones, #twos), count) over every vector of the space."""
    vectors = span_vectors(space.basis)
    ones = (vectors == 1).sum(axis=1)
    twos = (vectors == 2).sum(axis=1)
    pairs, counts = np.unique(np.stack([ones, twos], axis=1), axis=0, return_counts=True)
    return tuple((int(a), int(b), int(c)) for (a, b), c in zip(pairs, counts))


def coordinate_profiles(space: TriorthogonalSpace) -> npt.NDArray[np.int64]:
    """Row i counts the vectors of the space by (#ones, #twos, value at coordinate i)."""
    vectors = span_vectors(space.basis)
    n = space.n
    side = n + 1
    ones = (vectors == 1).sum(axis=1)
    twos = (vectors == 2).sum(axis=1)
    base = (ones * side + twos) * 3
    profiles = np.zeros((n, side * side * 3), dtype=np.int64)
    for i in range(n):
        profiles[i] = np.bincount(base + vectors[:, i], minlength=profiles.shape[1])
    return profiles


def invariant_key(space: TriorthogonalSpace) -> tuple[Any, ...]:
    profiles = coordinate_profiles(space)
    rows = sorted(row.tobytes() for row in profiles)
    return (space.n, space.kappa, weight_distribution(space), tuple(rows))


def _column_codes(matrix: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    place = 3 ** np.arange(matrix.shape[0], dtype=np.int64)
    return place @ matrix


def _ordered_choices(
    candidates: list[list[int]], cols: galois.FieldArray
) -> Iterator[list[int]]:
    chosen: list[int] = []

    def walk(depth: int) -> Iterator[list[int]]:
        if depth == len(candidates):
            yield list(chosen)
            return
        for j in candidates[depth]:
            if j in chosen:
                continue
            sub = cols[:, chosen + [j]]
            if np.linalg.matrix_rank(sub) < depth + 1:
                continue
            chosen.append(j)
            yield from walk(depth + 1)
            chosen.pop()

    yield from walk(0)


def find_permutation(s1: TriorthogonalSpace, s2: TriorthogonalSpace) -> list[int] | None:
    """perm with s2 = s1.permuted(perm) (column c of s2 is column perm[c] of s1), or None.

    Fix the pivot columns I of s1's reduced basis. If s2 is a permuted copy, some ordered
    column tuple J of s2 is the image of I; bringing s2 to identity on J must then reproduce
    the column multiset of s1's reduced basis."""
    if s1.n != s2.n or s1.kappa != s2.kappa:
        return None
    n = s1.n
    if s1.kappa == 0:
        return list(range(n))
    if weight_distribution(s1) != weight_distribution(s2):
        return None
    prof1 = [row.tobytes() for row in coordinate_profiles(s1)]
    prof2 = [row.tobytes() for row in coordinate_profiles(s2)]
    if sorted(prof1) != sorted(prof2):
        return None
    r1 = s1.basis.values
    pivots = pivot_columns(s1.basis)
    target = np.sort(_column_codes(r1))
    g2 = GF3(s2.basis.values)
    candidates = [[j for j in range(n) if prof2[j] == prof1[i]] for i in pivots]
    for chosen in _ordered_choices(candidates, g2):
        reduced = (np.linalg.inv(g2[:, chosen]) @ g2).view(np.ndarray).astype(np.int64)
        codes2 = _column_codes(reduced)
        if not np.array_equal(np.sort(codes2), target):
            continue
        return _match_columns(_column_codes(r1), codes2, s1, s2)
    return None


def _match_columns(
    codes1: npt.NDArray[np.int64],
    codes2: npt.NDArray[np.int64],
    s1: TriorthogonalSpace,
    s2: TriorthogonalSpace,
) -> list[int]:
    pools: dict[int, list[int]] = defaultdict(list)
    for c, code in enumerate(codes1):
        pools[int(code)].append(c)
    perm = [pools[int(code)].pop(0) for code in codes2]
    if not rowspace_equal(s1.permuted(perm).basis, s2.basis):
        raise InvariantViolationError("Matched columns do not carry one space onto the other")
    return perm


def permutation_equivalent(s1: TriorthogonalSpace, s2: TriorthogonalSpace) -> bool:
    return find_permutation(s1, s2) is not None


def scale_coordinates(space: TriorthogonalSpace, coords: Sequence[int]) -> TriorthogonalSpace:
    """Multiply the given 1-indexed coordinates by 2; the result need not be triorthogonal."""
    values = space.basis.values.copy()
    for c in coords:
        values[:, c - 1] = (2 * values[:, c - 1]) % 3
    return TriorthogonalSpace.from_basis(TritMatrix.from_array(values, cols=space.n), check=False)


class ClassRegistry:
    def __init__(self) -> None:
        self.buckets: dict[tuple[Any, ...], list[TriorthogonalSpace]] = defaultdict(list)
        self.seen: set[TritMatrix] = set()
        self.representatives: list[TriorthogonalSpace] = []

    def add(self, space: TriorthogonalSpace) -> bool:
        """Register ``space``; False when an equivalent space is already known."""
        if space.basis in self.seen:
            return False
        self.seen.add(space.basis)
        bucket = self.buckets[invariant_key(space)]
        if any(permutation_equivalent(rep, space) for rep in bucket):
            return False
        bucket.append(space)
        self.representatives.append(space)
        return True

    def __len__(self) -> int:
        return len(self.representatives)


# Search


@dataclass(frozen=True)
class FoundSpace:
    space: TriorthogonalSpace
    maximality: MaximalityStatus
    triviality: Triviality

    @property
    def kappa(self) -> int:
        return self.space.kappa

    def to_json(self, filename: str | None = None) -> dict[str, Any]:
        return {
            "file": filename,
            "n": self.space.n,
            "kappa": self.kappa,
            "maximal": str(self.maximality),
            "trivial": self.triviality.trivial,
            "triviality": str(self.triviality),
        }


@dataclass
class SearchReport:
    config: SearchConfig
    spaces: list[FoundSpace] = field(default_factory=list)
    exhausted: bool = False
    nodes_expanded: int = 0

    def nontrivial(self) -> list[FoundSpace]:
        return [f for f in self.spaces if not f.triviality.trivial]

    def maximal(self) -> list[FoundSpace]:
        return [f for f in self.spaces if f.maximality is MaximalityStatus.MAXIMAL]

    def __str__(self) -> str:
        return (
            f"n={self.config.n}, kappa>={self.config.kappa_min}: {len(self.spaces)} classes "
            f"({len(self.nontrivial())} non-trivial, {len(self.maximal())} maximal), "
            f"nodes={self.nodes_expanded}, exhausted={self.exhausted}"
        )


def _children(args: tuple[npt.NDArray[np.int64], int, int]) -> list[npt.NDArray[np.int64]]:
    values, n, budget = args
    space = TriorthogonalSpace.from_basis(TritMatrix.from_array(values, cols=n), check=False)
    scan = extension_vectors(space, budget)
    if not scan.complete:
        logger.warning("Extension scan of a kappa=%d space stopped at the budget", space.kappa)
    return [space.extended(v).basis.values for v in scan.survivors]


def _finish(
    config: SearchConfig, found: list[TriorthogonalSpace], exhausted: bool, nodes: int
) -> SearchReport:
    spaces = []
    for space in found:
        if not is_triorthogonal(space.basis):
            raise InvariantViolationError("Search produced a space that is not triorthogonal")
        verdict = is_maximal(space, config.maximality_budget)
        spaces.append(FoundSpace(space, verdict.status, classify_triviality(space)))
    report = SearchReport(config, spaces, exhausted, nodes)
    logger.info("Search finished: %s", report)
    return report


def search(
    config: SearchConfig,
    checkpoint: str | Path | None = None,
    resume: bool = False,
) -> SearchReport:
    match config.mode:
        case SearchMode.EXHAUSTIVE:
            return _search_exhaustive(config, checkpoint, resume)
        case SearchMode.RANDOMIZED:
            return _search_randomized(config)


def _search_exhaustive(
    config: SearchConfig, checkpoint: str | Path | None, resume: bool
) -> SearchReport:
    level = 0
    nodes = 0
    found: list[TriorthogonalSpace] = []
    frontier = [TriorthogonalSpace.empty(config.n)]
    if resume and checkpoint is not None and Path(checkpoint).exists():
        state = SearchCheckpoint.load(checkpoint)
        if state.n != config.n or state.kappa_min != config.kappa_min:
            raise TriorthoError(f"Checkpoint is for n={state.n}, kappa_min={state.kappa_min}")
        level, nodes = state.level, state.nodes_expanded
        found = [TriorthogonalSpace.from_basis(m) for m in state.found_matrices]
        frontier = [TriorthogonalSpace.from_basis(m, check=False) for m in state.frontier_matrices]
        logger.info("Resumed search at level %d: %s", level, state)

    while frontier:
        if nodes + len(frontier) > config.budget:
            print(f"[WARNING] Node budget {config.budget} exhausted at level {level}")
            return _finish(config, found, False, nodes)
        jobs = [(space.basis.values, config.n, config.maximality_budget) for space in frontier]
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                children = list(pool.map(_children, jobs))
        else:
            children = [_children(job) for job in jobs]
        nodes += len(frontier)
        registry = ClassRegistry()
        for batch in children:
            for values in batch:
                child = TriorthogonalSpace.from_basis(TritMatrix.from_array(values), check=False)
                registry.add(child)
        level += 1
        frontier = registry.representatives
        if level >= config.kappa_min:
            found.extend(frontier)
        logger.info("Level %d: %d classes, %d nodes expanded", level, len(frontier), nodes)
        if checkpoint is not None:
            SearchCheckpoint.create(
                config.n,
                config.kappa_min,
                level,
                nodes,
                [s.basis for s in found],
                [s.basis for s in frontier],
            ).save(checkpoint)
    return _finish(config, found, True, nodes)


def random_extension(
    space: TriorthogonalSpace, rng: np.random.Generator
) -> npt.NDArray[np.int64] | None:
    null = kernel(extension_constraints(space))
    comp = complement_basis(space, null)
    c = comp.shape[0]
    if c == 0:
        return None
    for _ in range(_RANDOM_TRIES):
        coeffs = rng.integers(0, 3, size=(_RANDOM_BATCH, c))
        coeffs = coeffs[coeffs.any(axis=1)]
        candidates = (coeffs @ comp) % 3
        hits = candidates[quadratic_mask(space, candidates)]
        if len(hits):
            return hits[0]
    return None


def _search_randomized(config: SearchConfig) -> SearchReport:
    rng = np.random.default_rng(config.seed)
    registry = ClassRegistry()
    nodes = 0
    for restart in range(config.restarts):
        space = TriorthogonalSpace.empty(config.n)
        while nodes < config.budget:
            nodes += 1
            v = random_extension(space, rng)
            if v is None:
                break
            space = space.extended(v)
        if nodes >= config.budget:
            print(f"[WARNING] Node budget {config.budget} exhausted after {restart} restarts")
            break
        if space.kappa >= config.kappa_min and registry.add(space):
            logger.info("Restart %d: new class with kappa=%d", restart, space.kappa)
    return _finish(config, registry.representatives, False, nodes)


# Catalog


INDEX_FILE = "index.json"


def write_catalog(report: SearchReport, directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    entries = []
    for i, found in enumerate(report.spaces):
        name = f"space_{i:03d}.txt"
        path = directory / name
        path.write_text(format_matrix(found.space.basis))
        paths.append(path)
        entries.append(found.to_json(name))
    index = {
        "n": report.config.n,
        "kappa_min": report.config.kappa_min,
        "mode": str(report.config.mode),
        "nodes_expanded": report.nodes_expanded,
        "exhausted": report.exhausted,
        "spaces": entries,
    }
    index_path = directory / INDEX_FILE
    index_path.write_text(json.dumps(index, indent=2) + "\n")
    paths.append(index_path)
    return paths


def read_catalog(directory: str | Path) -> tuple[dict[str, Any], list[TriorthogonalSpace]]:
    directory = Path(directory)
    index = json.loads((directory / INDEX_FILE).read_text())
    spaces = [
        TriorthogonalSpace.from_basis(parse_matrix((directory / entry["file"]).read_text()))
        for entry in index["spaces"]
    ]
    return index, spaces


def all_triorthogonal_vectors(n: int) -> Iterator[npt.NDArray[np.int64]]:
    """Every nonzero v of length n with span{v} triorthogonal, by enumeration of all 3^n."""
    for values in itertools.product(range(3), repeat=n):
        v = np.array(values, dtype=np.int64)
        if v.any() and is_triorthogonal(TritMatrix.from_array(v[None, :])):
            yield v
