import numpy as np
import pytest

from lib.constants import MaximalityStatus
from lib.errors import TriorthoError
from lib.search import all_triorthogonal_vectors
from lib.triortho import (
    PunctureSet,
    TriorthogonalMatrix,
    TriorthogonalSpace,
    brute_force_extension,
    check_generators,
    construct_T_m,
    default_punctures,
    extension_vectors,
    format_triorthogonal_matrix,
    is_maximal,
    is_triorthogonal,
    parse_triorthogonal_matrix,
    puncture,
    read_triorthogonal_matrix,
    reed_muller_space,
    write_triorthogonal_matrix,
)
from lib.trits import TritMatrix, in_rowspace, rank, rowspace_contains, rowspace_equal

W18 = [0, 1, 2] * 6


def _block_row(block: int) -> list[int]:
    row = [0] * 18
    row[3 * (block - 1) : 3 * block] = [1, 1, 1]
    row[15:18] = [2, 2, 2]
    return row


T2_PRINTED = [W18] + [_block_row(b) for b in range(1, 6)]

H1_PRINTED = [
    [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 2, 2],
    [0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 2, 2, 2],
    [0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 2, 2, 2],
    [0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 2, 2, 2],
]
H0_PRINTED = [
    [1, 2, 1, 2, 1, 2, 1, 2, 0, 1, 2, 0, 1, 2],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 2],
]


def test_t2_matches_the_printed_generator_matrix(t2):
    assert t2.n == 18 and t2.kappa == 6
    assert rowspace_equal(t2.basis, TritMatrix.from_rows(T2_PRINTED))


def test_puncturing_t2_matches_the_printed_H(t2):
    tm = puncture(t2, PunctureSet.of([1, 4, 7, 10]))
    assert tm.H.shape == (6, 14)
    assert len(tm.h1_rows) == 4 and len(tm.h0_rows) == 2
    H0 = TritMatrix.from_rows(H0_PRINTED)
    assert rowspace_equal(tm.H0, H0)
    for row, printed in zip(tm.H1.values, H1_PRINTED):
        assert in_rowspace(H0, (row - np.array(printed)) % 3)


@pytest.mark.parametrize("m", range(1, 9))
def test_family_is_triorthogonal(m):
    space = construct_T_m(m)
    assert space.n == 9 * m
    assert space.kappa == 3 * m
    assert is_triorthogonal(space.basis)


@pytest.mark.parametrize("m", range(1, 5))
def test_family_is_maximal(m):
    verdict = is_maximal(construct_T_m(m))
    assert verdict.status is MaximalityStatus.MAXIMAL
    assert verdict.witness is None


@pytest.mark.parametrize(
    "rows", [[[1, 1, 1, 2, 2, 2]], [[1, 1, 1, 0, 0, 0]], [[1, 1, 1, 2, 2, 2], [1, 1, 1, 1, 1, 1]]]
)
def test_maximality_agrees_with_brute_force(rows):
    space = TriorthogonalSpace.from_basis(rows)
    verdict = is_maximal(space)
    assert (verdict.status is MaximalityStatus.MAXIMAL) == (brute_force_extension(space) is None)


@pytest.mark.slow
@pytest.mark.parametrize("n", range(3, 8))
def test_maximality_agrees_with_brute_force_on_small_spaces(n, rng):
    vectors = list(all_triorthogonal_vectors(n))
    spaces = []
    for i in rng.choice(len(vectors), size=min(6, len(vectors)), replace=False):
        spaces.append(TriorthogonalSpace.from_basis([vectors[i]]))
    for _ in range(40):
        i, j = rng.choice(len(vectors), size=2, replace=False)
        pair = TritMatrix.from_rows([vectors[i], vectors[j]])
        if is_triorthogonal(pair) and rank(pair) == 2:
            spaces.append(TriorthogonalSpace.from_basis(pair))
        if len(spaces) >= 10:
            break
    for space in spaces:
        verdict = is_maximal(space)
        assert verdict.status is not MaximalityStatus.INCONCLUSIVE
        expected = brute_force_extension(space) is None
        assert (verdict.status is MaximalityStatus.MAXIMAL) == expected


def test_non_maximal_space_comes_with_a_witness():
    space = TriorthogonalSpace.from_basis([[0, 1, 2] * 3])
    verdict = is_maximal(space)
    assert verdict.status is MaximalityStatus.NOT_MAXIMAL
    assert verdict.witness is not None
    assert not space.contains(verdict.witness)
    assert is_triorthogonal(space.extended(verdict.witness).basis)


def test_tiny_budget_is_inconclusive():
    space = TriorthogonalSpace.empty(12)
    verdict = is_maximal(space, enumeration_budget=0)
    assert verdict.status is MaximalityStatus.INCONCLUSIVE


def test_extension_scan_agrees_with_brute_force():
    space = TriorthogonalSpace.from_basis([[1, 1, 1, 0, 0, 0]])
    scan = extension_vectors(space)
    assert scan.complete
    witness = brute_force_extension(space)
    assert witness is not None
    assert scan.survivors
    for v in scan.survivors:
        assert is_triorthogonal(space.extended(v).basis)


@pytest.mark.slow
def test_t1_has_no_brute_force_extension(t1):
    assert brute_force_extension(t1) is None


def test_reed_muller_coincides_with_t1(t1):
    assert rowspace_equal(reed_muller_space(2).basis, t1.basis)


def test_reed_muller_sits_inside_t3():
    assert rowspace_contains(construct_T_m(3).basis, reed_muller_space(3).basis)


def test_reed_muller_needs_two_variables():
    with pytest.raises(TriorthoError, match="r >= 2"):
        reed_muller_space(1)


def test_non_triorthogonal_basis_is_rejected():
    with pytest.raises(TriorthoError, match="triorthogonal"):
        TriorthogonalSpace.from_basis([[1, 1, 0]])
    assert check_generators(TritMatrix.from_rows([[1, 1, 0]])) == [(0, 0), (0, 0, 0)]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_default_punctures_give_a_partition(m):
    space = construct_T_m(m)
    for k in range(1, 3 * m - 1):
        tm = puncture(space, default_punctures(m, k))
        assert tm.length == 9 * m - k
        assert len(tm.h1_rows) == k
        assert not np.any((tm.H0.values @ tm.H.values.T) % 3)


def test_k_bound_message():
    with pytest.raises(TriorthoError, match=r"k exceeds 3m-2 \(k=5, m=2\)"):
        default_punctures(2, 5)


@pytest.mark.parametrize(
    "coords, message",
    [([1, 1], "Duplicate"), ([0, 3], "1-indexed"), ([10], "out of range")],
)
def test_invalid_puncture_sets(t1, coords, message):
    with pytest.raises(TriorthoError, match=message):
        puncture(t1, PunctureSet.of(coords))


def test_dependent_puncture_columns(t1):
    with pytest.raises(TriorthoError, match="linearly dependent"):
        puncture(t1, PunctureSet.of([1, 2, 3]))


def test_partition_text_format(tmp_path, t2):
    tm = puncture(t2, PunctureSet.of([1, 4, 7, 10]))
    text = format_triorthogonal_matrix(tm)
    assert text.startswith("H1 4 H0 2\n6 14\n")
    parsed = parse_triorthogonal_matrix(text)
    assert parsed.h1_rows == (0, 1, 2, 3)
    assert parsed.H1 == tm.H1
    path = write_triorthogonal_matrix(tm, tmp_path / "H.txt")
    assert read_triorthogonal_matrix(path).H0 == tm.H0


def test_partition_header_must_match_rows():
    with pytest.raises(TriorthoError, match="do not match"):
        parse_triorthogonal_matrix("H1 1 H0 2\n2 3\n1 1 1\n0 0 0\n")


def test_rows_must_be_partitioned():
    with pytest.raises(TriorthoError, match="exactly one"):
        TriorthogonalMatrix(TritMatrix.identity(3), (0,), (0, 2))
