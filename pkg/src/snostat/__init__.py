"""Stationarity notions, Morse data and regularization paths for structured nonsmooth optimization."""

from .errors import (
    DomainError,
    ExprSyntaxError,
    InfeasiblePointError,
    LicqError,
    PathDivergenceError,
    SnoError,
    UnsupportedConeError,
)
from .expr import evaluate, gradient, hessian, parse
from .levelset import LevelProfile, grid_components, sweep
from .morse import MorseReport, Verdict
from .problem import ConeKind, SnoProblem, active_pattern, cone_project, feasible, load_problem
from .regularization import RegularizedNlp, ScholtesPath, kkt_points_at, path_follow
from .report import StationarityReport, analyze_point
from .scan import ScanResult, stratified_scan
from .tolerances import Tolerances

__all__ = [
    "ConeKind",
    "DomainError",
    "ExprSyntaxError",
    "InfeasiblePointError",
    "LevelProfile",
    "LicqError",
    "MorseReport",
    "PathDivergenceError",
    "RegularizedNlp",
    "ScanResult",
    "ScholtesPath",
    "SnoError",
    "SnoProblem",
    "StationarityReport",
    "Tolerances",
    "UnsupportedConeError",
    "Verdict",
    "active_pattern",
    "analyze_point",
    "cone_project",
    "evaluate",
    "feasible",
    "gradient",
    "grid_components",
    "hessian",
    "kkt_points_at",
    "load_problem",
    "parse",
    "path_follow",
    "stratified_scan",
    "sweep",
]
