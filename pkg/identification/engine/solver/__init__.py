from .config import SolverConfig
from .flcmo import SolveResult, StepDiagnostics, flcmo_step, solve
from .multi_seed import MultiSeedResult, run_seeds, solve_seed
from .stationarity import StationarityReport, verify_stationarity
from .trace import IterationRecord, SolverTrace

__all__ = [
    "SolverConfig",
    "SolveResult",
    "StepDiagnostics",
    "flcmo_step",
    "solve",
    "MultiSeedResult",
    "run_seeds",
    "solve_seed",
    "StationarityReport",
    "verify_stationarity",
    "IterationRecord",
    "SolverTrace",
]
