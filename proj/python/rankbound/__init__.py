"""SDP lower bounds on cpsd-, cp-, nonnegative and psd-rank."""

from ._core import (
    ConflictingFix,
    Error,
    IllFormed,
    LevelError,
    ModeError,
    ParamRange,
    ParseError,
    UnknownFamily,
    analytic_cpsd,
    analytic_psd,
    baselines,
    compute_bound,
    export_sdpa,
    families,
    gen,
    load,
    parse_matrix,
)

__all__ = [
    "ConflictingFix",
    "Error",
    "IllFormed",
    "LevelError",
    "ModeError",
    "ParamRange",
    "ParseError",
    "UnknownFamily",
    "analytic_cpsd",
    "analytic_psd",
    "baselines",
    "compute_bound",
    "export_sdpa",
    "families",
    "gen",
    "load",
    "parse_matrix",
]
