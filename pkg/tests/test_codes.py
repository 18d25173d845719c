import math

import numpy as np
import pytest

from lib.codes import (
    CodeParams,
    TriorthogonalCode,
    build_code,
    build_family_code,
    check_dimensions,
    code_summary,
    detects_single_errors,
    distance_x,
    distance_z,
    family_yield,
    yield_param,
)
from lib.errors import TriorthoError
from lib.triortho import PunctureSet, construct_T_m, puncture
from lib.trits import rank


def test_8_1_code(code_8_1):
    assert (code_8_1.n, code_8_1.k) == (8, 1)
    assert code_8_1.rank_Lx == 2
    assert code_8_1.rank_Lz == 8 - rank(code_8_1.matrix.H)
    assert code_8_1.d_z == 2
    assert code_8_1.d == 2
    assert code_8_1.label == "[8,1,2]_3"


def test_14_4_code(code_14_4):
    assert code_14_4.label == "[14,4,2]_3"
    assert code_14_4.params == CodeParams(14, 4, 2)


def test_x_stabilizers_lie_in_the_z_stabilizer_dual(code_17_1):
    assert not np.any((code_17_1.Lx.values @ code_17_1.Lz.values.T) % 3)
    assert not np.any((code_17_1.logical_x.values @ code_17_1.Lz.values.T) % 3)
    check_dimensions(code_17_1)


def test_family_distances_small():
    for m in (1, 2):
        for k in range(1, 3 * m - 1):
            assert distance_z(build_family_code(m, k, with_distances=False)) == 2


@pytest.mark.slow
@pytest.mark.parametrize("m", range(3, 9))
def test_family_distances(m):
    for k in range(1, 3 * m - 1):
        assert distance_z(build_family_code(m, k, with_distances=False)) == 2


def test_x_distance_is_at_least_z_distance(code_8_1, code_17_1):
    for code in (code_8_1, code_17_1):
        d_x = distance_x(code)
        assert d_x is not None and d_x >= code.d_z


def test_single_errors_are_detected(code_8_1, code_14_4):
    assert detects_single_errors(code_8_1)
    assert detects_single_errors(code_14_4)


def test_k_zero_has_no_distance():
    code = build_code(puncture(construct_T_m(1), PunctureSet(())))
    assert code.k == 0
    with pytest.raises(TriorthoError, match="k=0"):
        distance_z(code)


def test_punctures_must_match_k():
    with pytest.raises(TriorthoError, match="for k=2"):
        build_family_code(2, 2, PunctureSet.of([1, 4, 7]))


def test_explicit_punctures():
    code = build_family_code(2, 2, PunctureSet.of([1, 7]), with_distances=False)
    assert (code.n, code.k) == (16, 2)
    assert code.d is None
    assert code.label == "[16,2,?]_3"


@pytest.mark.parametrize(
    "n, k, d, gamma",
    [(15, 1, 3, 2.465), (14, 4, 2, 1.807), (20, 7, 2, 1.514), (50, 22, 2, 1.184)],
)
def test_yield_values(n, k, d, gamma):
    assert yield_param(n, k, d).gamma == pytest.approx(gamma, abs=0.005)


@pytest.mark.parametrize("m", [1, 2, 7, 100, 10_000])
def test_family_yield_closed_form(m):
    closed = family_yield(m).gamma
    assert closed == pytest.approx(math.log2(2 + 6 / (3 * m - 2)), abs=1e-12)
    assert closed == pytest.approx(yield_param(6 * m + 2, 3 * m - 2, 2).gamma, abs=1e-12)


@pytest.mark.parametrize("n, k, d", [(8, 0, 2), (4, 4, 2), (8, 1, 1)])
def test_yield_domain(n, k, d):
    with pytest.raises(TriorthoError):
        yield_param(n, k, d)


def test_code_summary(code_14_4):
    summary = code_summary(code_14_4, 2)
    assert summary["punctures"] == [1, 4, 7, 10]
    assert (summary["n"], summary["k"], summary["d"]) == (14, 4, 2)
    assert summary["gamma"] == pytest.approx(1.807, abs=0.001)


def test_rank_deficient_H_is_rejected(code_8_1):
    tm = code_8_1.matrix
    doubled = tm.H.stack(tm.H.take_rows([0]))
    bad = type(tm)(doubled, tm.h1_rows, tm.h0_rows + (tm.H.rows,))
    with pytest.raises(TriorthoError, match="rank deficient"):
        build_code(bad)


def test_code_str(code_8_1):
    assert isinstance(code_8_1, TriorthogonalCode)
    assert "[8,1,2]_3" in str(code_8_1)
