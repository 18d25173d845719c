import pytest

from lib import selftest
from lib.constants import Orientation
from lib.selftest import (
    SuiteFailure,
    SuiteResult,
    run_selftest,
    suite_calibration,
    suite_golden,
    suite_transversal,
    suite_triorthogonality,
    suite_wigner,
    suite_yield,
)
from lib.trits import TritMatrix, write_matrix


def test_suite_result_str():
    assert str(SuiteResult("yield", True, "ok")) == "[PASS] yield: ok"
    assert str(SuiteResult("golden", False)) == "[FAIL] golden"


def test_quick_suites():
    assert suite_golden() == "6x18 and 6x14 matrices match, [14,4,2]_3"
    assert "closed form" in suite_yield()
    assert "(0, 8, 7)" in suite_transversal()
    assert "0.467" in suite_wigner()


def test_golden_suite_compares_the_printed_matrices(monkeypatch):
    wrong = [row[:] for row in selftest.GOLDEN_H0]
    wrong[1][0] = 1
    monkeypatch.setattr(selftest, "GOLDEN_H0", wrong)
    with pytest.raises(SuiteFailure, match="H0"):
        suite_golden()


def test_calibration_suite_catches_the_wrong_orientation():
    assert "conjugate" in suite_calibration(Orientation.CONJUGATE)
    with pytest.raises(SuiteFailure, match="oracle implies conjugate"):
        suite_calibration(Orientation.DIRECT)


def test_bad_basis_file_fails_the_triorthogonality_suite(tmp_path):
    path = write_matrix(TritMatrix.from_rows([[1, 1, 0, 0]]), tmp_path / "bad.txt")
    with pytest.raises(SuiteFailure, match="bad.txt"):
        suite_triorthogonality(path)


@pytest.mark.slow
def test_wrong_orientation_is_reported():
    results = {r.name: r for r in run_selftest(Orientation.DIRECT)}
    assert not results["calibration"].passed
    assert results["yield"].passed
