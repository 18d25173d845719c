import numpy as np
import pytest

from lib.errors import TriorthoError
from lib.trits import (
    TritMatrix,
    coefficient_grid,
    dot,
    format_matrix,
    in_rowspace,
    kernel,
    parse_matrix,
    rank,
    read_matrix,
    row_basis,
    rowspace_contains,
    rowspace_equal,
    rref,
    span_vectors,
    trit_vector,
    triple_dot,
    weight,
    write_matrix,
)


def test_dot_and_triple_dot_reduce_mod_3():
    u = trit_vector([1, 2, 2, 0])
    v = trit_vector([2, 2, 1, 1])
    assert dot(u, v) == (2 + 4 + 2) % 3
    assert triple_dot(u, u, u) == (1 + 8 + 8) % 3
    assert weight(u) == 3


def test_length_mismatch_is_rejected():
    with pytest.raises(TriorthoError, match="length mismatch"):
        dot(trit_vector([1, 2]), trit_vector([1, 2, 0]))


@pytest.mark.parametrize("bad", [[0, 3, 1], [-1, 0, 0]])
def test_trit_vector_rejects_out_of_range_entries(bad):
    with pytest.raises(TriorthoError):
        trit_vector(bad)


def test_rref_is_canonical_for_a_row_space():
    a = TritMatrix.from_rows([[1, 2, 0, 1], [0, 1, 1, 2]])
    b = TritMatrix.from_rows([[1, 0, 1, 0], [2, 2, 1, 1], [0, 2, 2, 1]])
    assert rowspace_equal(a, b)
    assert rref(a) == rref(b).nonzero_rows()
    assert row_basis(b).rows == rank(b) == 2


def test_kernel_annihilates_and_completes_the_rank():
    m = TritMatrix.from_rows([[1, 2, 0, 1, 1], [0, 1, 1, 2, 0], [1, 0, 1, 0, 1]])
    k = kernel(m)
    assert k.rows + rank(m) == m.cols
    assert not np.any((m.values @ k.values.T) % 3)


def test_kernel_of_full_rank_square_matrix_is_empty():
    assert kernel(TritMatrix.identity(4)).shape == (0, 4)


def test_rowspace_membership():
    m = TritMatrix.from_rows([[1, 1, 1, 0], [0, 1, 2, 1]])
    assert in_rowspace(m, trit_vector([1, 2, 0, 1]))
    assert not in_rowspace(m, trit_vector([1, 0, 0, 0]))
    assert rowspace_contains(m, TritMatrix.zeros(0, 4))
    assert not rowspace_contains(m, TritMatrix.identity(4))


def test_coefficient_grid_is_lexicographic():
    grid = coefficient_grid(2)
    assert grid.shape == (9, 2)
    assert grid[:4].tolist() == [[0, 0], [0, 1], [0, 2], [1, 0]]
    assert coefficient_grid(0).shape == (1, 0)


def test_span_vectors_lists_every_vector_once():
    m = TritMatrix.from_rows([[1, 1, 1, 0, 0], [0, 0, 1, 2, 2]])
    vectors = span_vectors(m)
    assert len(vectors) == 9
    assert len({tuple(v) for v in vectors}) == 9


def test_matrix_text_format(tmp_path):
    m = TritMatrix.from_rows([[0, 1, 2], [2, 2, 0]])
    assert format_matrix(m) == "2 3\n0 1 2\n2 2 0\n"
    path = write_matrix(m, tmp_path / "m.txt")
    assert read_matrix(path) == m


def test_empty_matrix_text_keeps_its_width():
    assert parse_matrix("0 7\n").shape == (0, 7)


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "Empty"),
        ("2\n0 1\n", "header"),
        ("2 2\n0 1\n", "announces 2 rows"),
        ("1 3\n0 1\n", "expected 3 entries"),
        ("1 2\n0 3\n", "digits 0, 1 or 2"),
    ],
)
def test_malformed_matrix_text(text, message):
    with pytest.raises(TriorthoError, match=message):
        parse_matrix(text)


def test_stack_rejects_mismatched_widths():
    with pytest.raises(TriorthoError):
        TritMatrix.identity(2).stack(TritMatrix.identity(3))


def test_delete_columns():
    m = TritMatrix.from_rows([[0, 1, 2, 1], [2, 2, 0, 1]])
    assert m.delete_columns([0, 2]).values.tolist() == [[1, 1], [2, 1]]


def _random_vectors(rng, count, n=12):
    return [trit_vector(v) for v in rng.integers(0, 3, size=(count, n))]


def test_dot_is_bilinear_and_triple_dot_is_trilinear(rng):
    for _ in range(50):
        u, v, w, x = _random_vectors(rng, 4)
        a, b = (int(c) for c in rng.integers(0, 3, size=2))
        combo = (a * u + b * v) % 3
        assert dot(combo, w) == (a * dot(u, w) + b * dot(v, w)) % 3
        assert dot(u, v) == dot(v, u)
        expected = (a * triple_dot(u, w, x) + b * triple_dot(v, w, x)) % 3
        assert triple_dot(combo, w, x) == expected
        assert triple_dot(w, combo, x) == expected
        assert triple_dot(w, x, combo) == expected


def test_rref_is_idempotent(rng):
    for _ in range(100):
        m = TritMatrix.from_array(rng.integers(0, 3, size=(6, 18)))
        once = rref(m)
        assert rref(once) == once


@pytest.mark.parametrize("shape", [(3, 7), (6, 18), (5, 5), (8, 4)])
def test_kernel_of_kernel_is_the_row_space(rng, shape):
    for _ in range(10):
        m = TritMatrix.from_array(rng.integers(0, 3, size=shape))
        k = kernel(m)
        assert rank(m) + k.rows == m.cols
        assert rowspace_equal(kernel(k), m)


def test_kernel_of_zero_matrix_is_the_identity():
    zero = TritMatrix.zeros(2, 3)
    assert rank(zero) == 0
    assert row_basis(zero).shape == (0, 3)
    assert kernel(zero) == TritMatrix.identity(3)


def test_empty_selections_keep_the_width():
    m = TritMatrix.from_array([[1, 1, 1]])
    assert m.take_rows([]).shape == (0, 3)
    assert TritMatrix.from_array([[0, 0, 0, 0]]).nonzero_rows().shape == (0, 4)
    assert TritMatrix.from_array(np.zeros((0, 5), dtype=np.int64)).shape == (0, 5)
