from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .codes import build_family_code, distance_z, family_yield, yield_param
from .constants import CALIBRATED_ORIENTATION, MaximalityStatus, Orientation
from .distill import (
    DiagonalChannel,
    class_probs_bruteforce,
    class_probs_charsum,
    depolarizing_threshold,
)
from .errors import TriorthoError
from .oracle import calibrate_orientation, simulate_one_round, transversal_T_logical
from .triortho import (
    PunctureSet,
    construct_T_m,
    is_maximal,
    is_triorthogonal,
    puncture,
)
from .trits import TritMatrix, in_rowspace, read_matrix, rowspace_equal
from .wigner import PHASE_POINT_OPERATORS, check_phase_point_operators, polytope_depolarizing_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}" + (f": {self.detail}" if self.detail else "")


class SuiteFailure(Exception):
    pass


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise SuiteFailure(message)


def suite_triorthogonality(basis: Path | None) -> str:
    for m in range(1, 5):
        space = construct_T_m(m)
        _expect(is_triorthogonal(space.basis), f"T_{m} is not triorthogonal")
        verdict = is_maximal(space)
        _expect(verdict.status is MaximalityStatus.MAXIMAL, f"T_{m} maximality: {verdict}")
    if basis is not None:
        matrix = read_matrix(basis)
        _expect(is_triorthogonal(matrix), f"{basis} does not span a triorthogonal space")
        return f"T_1..T_4 and {basis.name} verified"
    return "T_1..T_4 triorthogonal and maximal"


def _t2_rows() -> list[list[int]]:
    rows = [[0, 1, 2] * 6]
    for block in range(5):
        row = [0] * 18
        row[3 * block : 3 * block + 3] = [1, 1, 1]
        row[15:18] = [2, 2, 2]
        rows.append(row)
    return rows


GOLDEN_T2 = _t2_rows()
GOLDEN_H1 = [[0] * (2 * a) + [1, 1] + [0] * (9 - 2 * a) + [2, 2, 2] for a in range(4)]
GOLDEN_H0 = [
    [1, 2, 1, 2, 1, 2, 1, 2, 0, 1, 2, 0, 1, 2],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 2],
]


def suite_golden() -> str:
    space = construct_T_m(2)
    _expect(rowspace_equal(space.basis, TritMatrix.from_rows(GOLDEN_T2)), "T_2 generator matrix")
    tm = puncture(space, PunctureSet.of([1, 4, 7, 10]))
    _expect(len(tm.h1_rows) == 4 and len(tm.h0_rows) == 2, f"partition {tm.h1_rows}/{tm.h0_rows}")
    H0 = TritMatrix.from_rows(GOLDEN_H0)
    _expect(rowspace_equal(tm.H0, H0), "H0 of the punctured T_2")
    for row, printed in zip(tm.H1.values, GOLDEN_H1):
        _expect(in_rowspace(H0, (row - np.array(printed)) % 3), f"H1 row {row.tolist()}")
    code = build_family_code(2, 4)
    _expect(code.label == "[14,4,2]_3", f"built {code.label}")
    return f"6x18 and 6x14 matrices match, {code.label}"


def suite_yield() -> str:
    expected = {(15, 1, 3): 2.465, (14, 4, 2): 1.807, (20, 7, 2): 1.514, (50, 22, 2): 1.184}
    for (n, k, d), gamma in expected.items():
        got = yield_param(n, k, d).gamma
        _expect(abs(got - gamma) < 0.005, f"gamma[{n},{k},{d}] = {got:.4f}")
    for m in (1, 2, 3, 8, 100):
        closed = family_yield(m).gamma
        direct = yield_param(6 * m + 2, 3 * m - 2, 2).gamma
        _expect(abs(closed - direct) < 1e-12, f"family yield mismatch at m={m}")
    return "4 reference values and closed form"


def suite_oracle(seed: int = 7, channels: int = 5) -> str:
    code = build_family_code(1, 1)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for probs in rng.dirichlet(np.ones(3), size=channels):
        channel = DiagonalChannel(*probs)
        brute = class_probs_bruteforce(code, channel)
        worst = max(worst, brute.max_difference(class_probs_charsum(code, channel)))
        worst = max(worst, brute.max_difference(simulate_one_round(code, channel)))
    _expect(worst < 1e-12, f"evaluators disagree by {worst:.3g}")
    return f"{channels} channels, max difference {worst:.2e}"


def suite_transversal() -> str:
    code = build_family_code(1, 1)
    logical = transversal_T_logical(code)
    return f"logical T exponents {logical.ninth_root_exponents()}"


def suite_calibration(orientation: Orientation) -> str:
    calibration = calibrate_orientation(build_family_code(1, 1))
    _expect(
        calibration.orientation is orientation,
        f"oracle implies {calibration.orientation}, build uses {orientation}",
    )
    return str(calibration)


def suite_thresholds(orientation: Orientation) -> str:
    code = build_family_code(1, 1, with_distances=False)
    _expect(distance_z(code) == 2, "[8,1] code does not have Z distance 2")
    delta = depolarizing_threshold(code, orientation).delta_star
    _expect(abs(delta - 0.317) <= 0.001, f"delta* of [8,1,2]_3 = {delta:.4f}")
    return f"[8,1,2]_3 delta*={delta:.4f}"


def suite_wigner() -> str:
    check_phase_point_operators(PHASE_POINT_OPERATORS)
    bound = polytope_depolarizing_bound()
    _expect(abs(bound - 0.467) <= 0.001, f"polytope bound {bound:.4f}")
    return f"polytope bound {bound:.4f}"


def run_selftest(
    orientation: Orientation = CALIBRATED_ORIENTATION, basis: Path | None = None
) -> list[SuiteResult]:
    suites: dict[str, Callable[[], str]] = {
        "triorthogonality": lambda: suite_triorthogonality(basis),
        "golden": suite_golden,
        "yield": suite_yield,
        "oracle": suite_oracle,
        "transversal": suite_transversal,
        "calibration": lambda: suite_calibration(orientation),
        "thresholds": lambda: suite_thresholds(orientation),
        "wigner": suite_wigner,
    }
    results = []
    for name, suite in suites.items():
        try:
            results.append(SuiteResult(name, True, suite()))
        except (SuiteFailure, TriorthoError) as e:
            logger.debug("Suite %s failed", name, exc_info=True)
            results.append(SuiteResult(name, False, str(e)))
    return results

