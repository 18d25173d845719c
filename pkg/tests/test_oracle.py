import numpy as np
import pytest

from lib.codes import TriorthogonalCode
from lib.constants import Orientation
from lib.distill import DiagonalChannel, class_probs_bruteforce, class_probs_charsum
from lib.errors import CodespaceNotPreservedError, TriorthoError
from lib.oracle import (
    StateVector,
    basis_index,
    calibrate_orientation,
    check_stabilizers,
    codeword,
    codewords,
    pattern_class,
    simulate_one_round,
    transversal_T_logical,
)
from lib.trits import TritMatrix

# v1 punctured at coordinate 1, with its first trit corrupted
CORRUPTED_LOGICAL = [2, 1, 0, 0, 0, 2, 2, 2]


def test_basis_index_puts_the_first_qutrit_first():
    assert basis_index(np.array([[0, 0, 1], [1, 0, 0], [2, 2, 2]])).tolist() == [1, 9, 26]


def test_codewords_are_orthonormal_stabilizer_states(code_8_1):
    words = codewords(code_8_1)
    gram = np.array([[a.inner(b) for b in words] for a in words])
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-12)
    for word in words:
        check_stabilizers(code_8_1, word)


def test_codeword_label_must_match_k(code_8_1):
    with pytest.raises(TriorthoError, match="k=1"):
        codeword(code_8_1, (1, 2))


def test_state_vectors_are_limited(code_17_1):
    with pytest.raises(TriorthoError, match="n <= 10"):
        codeword(code_17_1, (0,))
    with pytest.raises(TriorthoError, match="qutrits"):
        StateVector.uniform_over(11, np.zeros((1, 11), dtype=np.int64))


def test_transversal_T_is_a_logical_diagonal_gate(code_8_1):
    logical = transversal_T_logical(code_8_1)
    assert logical.is_diagonal()
    assert logical.ninth_root_exponents() == (0, 8, 7)
    np.testing.assert_allclose(logical.power(9).phase_aligned(), np.eye(3), atol=1e-10)


def test_corrupted_logical_leaves_the_codespace(code_8_1):
    corrupted = TriorthogonalCode(
        code_8_1.matrix,
        code_8_1.Lx,
        code_8_1.Lz,
        TritMatrix.from_rows([CORRUPTED_LOGICAL]),
    )
    with pytest.raises(CodespaceNotPreservedError, match="leaves the codespace"):
        transversal_T_logical(corrupted)


def test_simulation_matches_both_evaluators(code_8_1, rng):
    for probs in rng.dirichlet(np.ones(3), size=20):
        channel = DiagonalChannel(*probs)
        simulated = simulate_one_round(code_8_1, channel)
        assert simulated.max_difference(class_probs_bruteforce(code_8_1, channel)) < 1e-12
        assert simulated.max_difference(class_probs_charsum(code_8_1, channel)) < 1e-12


def test_pattern_classes(code_8_1):
    n = code_8_1.n
    assert pattern_class(code_8_1, np.zeros(n, dtype=np.int64)) == 0
    single = np.zeros(n, dtype=np.int64)
    single[3] = 1
    assert pattern_class(code_8_1, single) is None
    assert pattern_class(code_8_1, np.ones(n, dtype=np.int64)) == 2
    assert pattern_class(code_8_1, np.full(n, 2, dtype=np.int64)) == 1


def test_calibration(code_8_1):
    calibration = calibrate_orientation(code_8_1)
    assert calibration.orientation is Orientation.CONJUGATE
    assert calibration.all_ones_class == 2
    assert calibration.t_exponents == (0, 8, 7)


def test_calibration_needs_k_equal_one(code_14_4):
    with pytest.raises(TriorthoError, match="k=1"):
        calibrate_orientation(code_14_4)
