import numpy as np
import pytest

from lib.codes import TriorthogonalCode, build_family_code
from lib.triortho import TriorthogonalSpace, construct_T_m


@pytest.fixture(scope="session")
def t1() -> TriorthogonalSpace:
    return construct_T_m(1)


@pytest.fixture(scope="session")
def t2() -> TriorthogonalSpace:
    return construct_T_m(2)


@pytest.fixture(scope="session")
def code_8_1() -> TriorthogonalCode:
    return build_family_code(1, 1)


@pytest.fixture(scope="session")
def code_14_4() -> TriorthogonalCode:
    return build_family_code(2, 4)


@pytest.fixture(scope="session")
def code_17_1() -> TriorthogonalCode:
    return build_family_code(2, 1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)
