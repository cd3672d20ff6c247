"""Tolerance and budget defaults, declared in one place.

Strict inequalities in the second-order taxonomy are decided with a margin
``tau_strict``; values inside the margin are reported as marginal, never as
silently strict.  ``tau_sing`` is the relative threshold below which the
y-block of a Hessian is treated as degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    tau_strict: float = 1e-8      # margin for strict definiteness / Re(lambda) sign calls
    tau_sing: float = 1e-8        # relative singularity threshold for B-invertibility
    tau_station: float = 1e-6     # gradient norm below which a point counts as stationary
    symmetry_rtol: float = 1e-10  # |m_ij - m_ji| <= symmetry_rtol * max|m|
    fd_h_grad: float = 1e-5       # central-difference step for gradients
    fd_h_hess: float = 1e-4       # central-difference step for Hessians
    dim_cap: int = 64             # largest matrix the eigensolvers accept
    grid_cap: int = 10**7         # largest number of grid cells a sweep may touch


DEFAULT_TOL = Tolerances()

# gamma ladder used by the infinity-GDA membership check
DEFAULT_GAMMA_LADDER = (10.0, 100.0, 1000.0, 10000.0)

JSON_SCHEMA_VERSION = 1
