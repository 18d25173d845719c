from dataclasses import dataclass
from pathlib import Path
from typing import Iterable
from typing_extensions import Self

import numpy as np
import numpy.typing as npt
from datastruct import NETWORK, DataStruct, datastruct_config
from datastruct.fields import built, const, field, repeat, subfield

from .errors import TriorthoError
from .trits import TritMatrix

datastruct_config(endianness=NETWORK, padding_pattern=b"\0")

# 3^5 = 243 fits in one byte
TRITS_PER_BYTE = 5
_PLACE = np.array([3**i for i in range(TRITS_PER_BYTE)], dtype=np.int64)

CHECKPOINT_VERSION = 1


def pack_trits(values: Iterable[int] | npt.NDArray[np.int64]) -> bytes:
    flat = np.asarray(list(values) if not isinstance(values, np.ndarray) else values.ravel())
    flat = flat.astype(np.int64)
    pad = (-len(flat)) % TRITS_PER_BYTE
    groups = np.concatenate([flat, np.zeros(pad, dtype=np.int64)]).reshape(-1, TRITS_PER_BYTE)
    return bytes((groups @ _PLACE).astype(np.uint8).tolist())


def unpack_trits(data: bytes, count: int) -> npt.NDArray[np.int64]:
    raw = np.frombuffer(data, dtype=np.uint8).astype(np.int64)
    if raw.size and raw.max() >= 3**TRITS_PER_BYTE:
        raise TriorthoError(f"Packed trit byte out of range: {int(raw.max())}")
    digits = (raw[:, None] // _PLACE[None, :]) % 3
    flat = digits.ravel()
    if flat.size < count:
        raise TriorthoError(f"Packed data holds {flat.size} trits, {count} requested")
    return flat[:count]


@dataclass
class PackedTritMatrix(DataStruct):
    rows: int = field("H")
    cols: int = field("H")
    size: int = built("I", lambda ctx: len(ctx.data))
    data: bytes = field(lambda ctx: ctx.size)

    @classmethod
    def from_matrix(cls, matrix: TritMatrix) -> Self:
        data = pack_trits(matrix.values)
        return cls(rows=matrix.rows, cols=matrix.cols, size=len(data), data=data)

    def to_matrix(self) -> TritMatrix:
        flat = unpack_trits(self.data, self.rows * self.cols)
        if self.rows == 0:
            return TritMatrix.zeros(0, self.cols)
        return TritMatrix.from_array(flat.reshape(self.rows, self.cols))

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols} trits in {self.size} bytes"


@dataclass
class SearchCheckpoint(DataStruct):
    """Resumable state of a level-by-level triorthogonal space search."""

    magic: bytes = const(b"TRIS")(field("4s"))
    version: int = field("B")
    n: int = field("H")
    kappa_min: int = field("H")
    level: int = field("H")
    nodes_expanded: int = field("I")
    num_found: int = built("I", lambda ctx: len(ctx.found))
    found: list[PackedTritMatrix] = repeat(lambda ctx: ctx.num_found)(subfield())
    num_frontier: int = built("I", lambda ctx: len(ctx.frontier))
    frontier: list[PackedTritMatrix] = repeat(lambda ctx: ctx.num_frontier)(subfield())

    @classmethod
    def create(
        cls,
        n: int,
        kappa_min: int,
        level: int,
        nodes_expanded: int,
        found: Iterable[TritMatrix],
        frontier: Iterable[TritMatrix],
    ) -> Self:
        found_packed = [PackedTritMatrix.from_matrix(m) for m in found]
        frontier_packed = [PackedTritMatrix.from_matrix(m) for m in frontier]
        return cls(
            magic=b"TRIS",
            version=CHECKPOINT_VERSION,
            n=n,
            kappa_min=kappa_min,
            level=level,
            nodes_expanded=nodes_expanded,
            num_found=len(found_packed),
            found=found_packed,
            num_frontier=len(frontier_packed),
            frontier=frontier_packed,
        )

    @property
    def found_matrices(self) -> list[TritMatrix]:
        return [p.to_matrix() for p in self.found]

    @property
    def frontier_matrices(self) -> list[TritMatrix]:
        return [p.to_matrix() for p in self.frontier]

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_bytes(self.pack())
        return path

    @classmethod
    def load(cls, path: str | Path) -> Self:
        checkpoint = cls.unpack(Path(path).read_bytes())
        if checkpoint.version != CHECKPOINT_VERSION:
            raise TriorthoError(f"Unsupported checkpoint version: {checkpoint.version}")
        return checkpoint

    def __str__(self) -> str:
        return (
            f"n={self.n}, kappa_min={self.kappa_min}, level={self.level}, "
            f"nodes={self.nodes_expanded}, found={len(self.found)}, frontier={len(self.frontier)}"
        )
