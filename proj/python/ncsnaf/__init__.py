"""Networked-control NAF learner for the Chua circuit."""

from ._core import (
    Config,
    ConfigError,
    DimensionError,
    Error,
    FormatError,
    NumericsError,
    advantage,
    assemble_L,
    chua_deriv,
    evaluate,
    known_keys,
    reward,
    simulate_chua,
    train,
    verify,
)

__all__ = [
    "Config",
    "ConfigError",
    "DimensionError",
    "Error",
    "FormatError",
    "NumericsError",
    "advantage",
    "assemble_L",
    "chua_deriv",
    "evaluate",
    "known_keys",
    "reward",
    "simulate_chua",
    "train",
    "verify",
]
