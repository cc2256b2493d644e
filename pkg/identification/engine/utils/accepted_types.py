from enum import Enum


class _CaseInsensitiveEnum(str, Enum):

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for member in cls:
                if member.value.lower() == value.lower():
                    return member
        return None


class Variant(_CaseInsensitiveEnum):
    OE = "oe"
    EIV = "eiv"
    SS = "ss"


class SolveStatus(_CaseInsensitiveEnum):
    CONVERGED = "converged"
    MAX_ITERS = "max-iters"
    DIVERGED = "diverged"
    RANK_BREAKDOWN = "rank-breakdown"


class Method(_CaseInsensitiveEnum):
    FLCMO = "flcmo"
    ADAM = "adam"
    LS = "ls"


class NoiseKind(_CaseInsensitiveEnum):
    NONE = "none"
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


class PlantKind(_CaseInsensitiveEnum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class SystemKind(_CaseInsensitiveEnum):
    LTI = "lti"
    WH = "wh"
    MAGLEV = "maglev"


class ModelKind(_CaseInsensitiveEnum):
    LTI = "lti"
    MLP = "mlp"
    MAGLEV = "maglev"
    LINEAR_SS = "linear_ss"


class InputKind(_CaseInsensitiveEnum):
    WHITE = "white"
    IMPULSE = "impulse"
    ZERO = "zero"
    STAIRCASE = "staircase"


class AdamLoss(_CaseInsensitiveEnum):
    SIMULATION = "simulation"
    ONE_STEP = "one_step"

