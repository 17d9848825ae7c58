"""Quantum dynamics in a cylindrical trap with a uniformly moving wall."""

from ._core import (
    DomainError,
    NumericError,
    QtrapError,
    b_coeffs,
    bessel_j,
    bessel_zeros,
    density_profile,
    density_timeseries,
    energy_ratio,
    moments,
    verify,
)

__all__ = [
    "DomainError",
    "NumericError",
    "QtrapError",
    "b_coeffs",
    "bessel_j",
    "bessel_zeros",
    "density_profile",
    "density_timeseries",
    "energy_ratio",
    "moments",
    "verify",
]
__version__ = "0.1.0"
