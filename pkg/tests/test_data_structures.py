import pytest

from lib.data_structures import (
    PackedTritMatrix,
    SearchCheckpoint,
    pack_trits,
    unpack_trits,
)
from lib.errors import TriorthoError
from lib.trits import TritMatrix


def test_five_trits_per_byte():
    assert pack_trits([1, 2, 0, 0, 0]) == bytes([7])
    assert pack_trits([2, 2, 2, 2, 2, 1]) == bytes([242, 1])
    assert unpack_trits(bytes([7]), 3).tolist() == [1, 2, 0]


def test_unpack_rejects_short_or_corrupt_data():
    with pytest.raises(TriorthoError, match="requested"):
        unpack_trits(bytes([7]), 6)
    with pytest.raises(TriorthoError, match="out of range"):
        unpack_trits(bytes([243]), 5)


def test_packed_matrix_record(t1):
    packed = PackedTritMatrix.from_matrix(t1.basis)
    assert packed.size == 6
    assert PackedTritMatrix.unpack(packed.pack()).to_matrix() == t1.basis


def test_packed_empty_matrix_keeps_its_width():
    packed = PackedTritMatrix.from_matrix(TritMatrix.zeros(0, 11))
    assert PackedTritMatrix.unpack(packed.pack()).to_matrix().shape == (0, 11)


def test_checkpoint_save_and_load(tmp_path, t1, t2):
    checkpoint = SearchCheckpoint.create(9, 3, 2, 17, [t1.basis], [t1.basis, t2.basis])
    path = checkpoint.save(tmp_path / "search.ckpt")
    loaded = SearchCheckpoint.load(path)
    assert (loaded.n, loaded.kappa_min, loaded.level, loaded.nodes_expanded) == (9, 3, 2, 17)
    assert loaded.found_matrices == [t1.basis]
    assert loaded.frontier_matrices == [t1.basis, t2.basis]
    assert "frontier=2" in str(loaded)


def test_checkpoint_rejects_other_versions(tmp_path):
    checkpoint = SearchCheckpoint.create(4, 1, 0, 0, [], [])
    checkpoint.version = 9
    path = checkpoint.save(tmp_path / "old.ckpt")
    with pytest.raises(TriorthoError, match="version"):
        SearchCheckpoint.load(path)


def test_checkpoint_rejects_foreign_files(tmp_path):
    path = tmp_path / "junk.ckpt"
    path.write_bytes(b"JUNK" + bytes(20))
    with pytest.raises(Exception):
        SearchCheckpoint.load(path)
