"""Goodness-of-fit test for independent component models in high dimensions."""
from .errors import (
    DegenerateVariance,
    IcgofError,
    IngestError,
    InvalidInput,
    NotPSD,
    ZeroDenominator,
)
from .gof import TestResult, delta_stat, normal_cdf, normal_quantile, run_test, sigma_hat_sq

__all__ = [
    "DegenerateVariance",
    "IcgofError",
    "IngestError",
    "InvalidInput",
    "NotPSD",
    "TestResult",
    "ZeroDenominator",
    "delta_stat",
    "normal_cdf",
    "normal_quantile",
    "run_test",
    "sigma_hat_sq",
]
__version__ = "0.1.0"
