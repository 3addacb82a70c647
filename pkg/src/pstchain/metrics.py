"""Speed-limit figures of merit.

The reference chain is ``optimal_chain(n)``: transfer time pi and largest
coupling ``reference_max_coupling(n)``.  Efficiency is the product of largest
coupling and transfer time relative to that reference, so values above one
mean slower transfer for the same coupling budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pstchain.core import ChainSpec, reference_max_coupling
from pstchain.spectral import EigenDecomposition, eigendecompose

REFERENCE_TAU = math.pi


@dataclass(frozen=True)
class EfficiencyReport:
    n: int
    omega_max: float
    tau: float
    ref_omega_max: float
    ref_tau: float
    eta: float
    delta_lambda: float
    range_bound_residual: float


@dataclass(frozen=True)
class MLBound:
    """Margolus-Levitin orthogonalisation time of the site-1 state."""

    mean_energy_above_ground: float
    energy_uncertainty: float
    min_orthogonal_time: float


def range_bound_residual(c: ChainSpec, decomposition: EigenDecomposition | None = None) -> float:
    """``Delta_lambda + 4 omega_max - Delta_E``; never negative beyond rounding.

    Follows from pushing every coupling to ``omega_max`` and every potential to
    its extreme, using that the top (bottom) level increases (decreases)
    monotonically with each coupling.
    """
    dec = decomposition if decomposition is not None else eigendecompose(c)
    return c.delta_lambda + 4.0 * c.omega_max - dec.values.range


def efficiency(c: ChainSpec, tau: float, decomposition: EigenDecomposition | None = None) -> EfficiencyReport:
    if not tau > 0.0:
        raise ValueError("transfer time must be positive")
    ref = reference_max_coupling(c.n)
    eta = (c.omega_max * tau) / (ref * REFERENCE_TAU)
    return EfficiencyReport(
        n=c.n,
        omega_max=c.omega_max,
        tau=float(tau),
        ref_omega_max=ref,
        ref_tau=REFERENCE_TAU,
        eta=eta,
        delta_lambda=c.delta_lambda,
        range_bound_residual=range_bound_residual(c, decomposition),
    )


def sos_efficiency(n):
    """Efficiency of n-1 sequential swaps, each at coupling ``reference_max_coupling(n)``.

    One swap takes ``pi / (2 omega)``; relative to the reference time pi the
    ratio is ``(n - 1) / (2 * reference_max_coupling(n))``, which rises from 1
    at ``n = 2`` towards 2.  Accepts an integer or an integer array.
    """
    ref = reference_max_coupling(n)
    if np.ndim(ref) == 0:
        return (n - 1) / (2.0 * ref)
    return (np.asarray(n, dtype=float) - 1.0) / (2.0 * ref)


def ml_bound(c: ChainSpec, decomposition: EigenDecomposition | None = None) -> MLBound:
    """Margolus-Levitin bound for the excitation starting on site 1.

    The ground energy is the lower of the vacuum (exactly 0) and the bottom of
    the single-excitation band.  The energy spread of ``|1>`` is ``omega_1``.
    """
    dec = decomposition if decomposition is not None else eigendecompose(c)
    mean = float(c.lam[0])
    ground = min(0.0, float(dec.energies[-1]))
    above = mean - ground
    spread = abs(float(c.omega[0]))
    bound = max(math.pi / (2.0 * above), math.pi / (2.0 * spread))
    return MLBound(above, spread, bound)
