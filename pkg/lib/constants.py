from enum import Enum, IntEnum


class PrettyEnum(IntEnum):
    def __str__(self) -> str:
        return f"{self.name} ({self.value})"


class ExitCode(PrettyEnum):
    OK = 0
    DOMAIN_ERROR = 1
    BUDGET = 2
    INVARIANT = 3


class MaximalityStatus(Enum):
    MAXIMAL = "maximal"
    NOT_MAXIMAL = "not_maximal"
    INCONCLUSIVE = "inconclusive"

    def __str__(self) -> str:
        return self.value


class BasinLabel(Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"
    MIXED = "MIXED"
    UNRESOLVED = "UNRESOLVED"

    @property
    def is_magic(self) -> bool:
        return self in (BasinLabel.M0, BasinLabel.M1, BasinLabel.M2)

    def rotated(self) -> "BasinLabel":
        """Label after the input simplex is rotated by one Z conjugation (M0 -> M1 -> M2 -> M0)."""
        match self:
            case BasinLabel.M0:
                return BasinLabel.M1
            case BasinLabel.M1:
                return BasinLabel.M2
            case BasinLabel.M2:
                return BasinLabel.M0
            case _:
                return self

    def __str__(self) -> str:
        return self.value


class Orientation(Enum):
    """Which logical class feeds eps1' and which feeds eps2'.

    DIRECT reads (eps1', eps2') = (P_1, P_2); CONJUGATE reads (P_2, P_1), i.e. the output is
    complex-conjugated back into the |M_j> family."""

    DIRECT = "direct"
    CONJUGATE = "conjugate"

    @property
    def classes(self) -> tuple[int, int]:
        return (1, 2) if self is Orientation.DIRECT else (2, 1)

    @property
    def flipped(self) -> "Orientation":
        return Orientation.CONJUGATE if self is Orientation.DIRECT else Orientation.DIRECT

    def __str__(self) -> str:
        return self.value


class SearchMode(Enum):
    EXHAUSTIVE = "exhaustive"
    RANDOMIZED = "randomized"

    def __str__(self) -> str:
        return self.value


# Calibrated against the state-vector oracle on the [8,1,2]_3 code: an input in which every
# qutrit carries Z^1 lands in logical class 2, and transversal T acts as a logical T^dagger.
CALIBRATED_ORIENTATION = Orientation.CONJUGATE

ITERATION_CAP = 200
CONVERGENCE_TOL = 1e-10
CLASSIFICATION_TOL = 1e-6
BISECTION_TOL = 1e-4
IMAGINARY_TOL = 1e-12

MAXIMALITY_BUDGET = 3**12
BRUTE_FORCE_BUDGET = 3**16
JOINT_CHARSUM_MAX_K = 12
CHARSUM_BUDGET = 3**18
DISTANCE_X_BUDGET = 3**10
STATE_VECTOR_MAX_QUTRITS = 10
SIMULATION_MAX_QUTRITS = 9
EXACT_POLYNOMIAL_MAX_N = 17
MAX_LENGTH = 128

POLYTOPE_TOL = 1e-10
OPERATOR_TOL = 1e-12
