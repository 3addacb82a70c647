"""Exact single-excitation dynamics from the spectral decomposition.

Nothing here integrates in time: ``U(t) = sum_k exp(-i E_k t) |e_k><e_k|``
is evaluated directly.  Amplitude arguments live in (-pi, pi]; phases that
describe a transfer (``extract_phase``) are reported in [0, 2*pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pstchain.core import ChainSpec, wrap_phase
from pstchain.errors import IndexOutOfRangeError, NotAtTransferError, NotNormalizedError
from pstchain.spectral import EigenDecomposition, eigendecompose

TRANSFER_MAGNITUDE_TOL = 1e-6
NORM_TOL = 1e-9
MIRROR_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FidelityCurve:
    times: np.ndarray
    magnitudes: np.ndarray
    phases: np.ndarray


def _check_site(c: ChainSpec, x: int) -> None:
    if not 1 <= x <= c.n:
        raise IndexOutOfRangeError(f"site {x} outside 1..{c.n}")


def transfer_amplitude(
    c: ChainSpec, x: int, t: float, decomposition: EigenDecomposition | None = None
) -> complex:
    """Amplitude ``<xbar| exp(-i H t) |x>`` with ``xbar = n + 1 - x``."""
    _check_site(c, x)
    dec = decomposition if decomposition is not None else eigendecompose(c)
    v = dec.vectors
    weights = v[:, c.n - x] * v[:, x - 1]
    return complex(np.sum(weights * np.exp(-1j * dec.energies * t)))


def propagator(c: ChainSpec, t: float, decomposition: EigenDecomposition | None = None) -> np.ndarray:
    """The n x n matrix ``exp(-i H t)``."""
    dec = decomposition if decomposition is not None else eigendecompose(c)
    v = dec.vectors
    return (v.T * np.exp(-1j * dec.energies * t)) @ v


def evolve(c: ChainSpec, amp, t: float, decomposition: EigenDecomposition | None = None) -> np.ndarray:
    amp = np.asarray(amp, dtype=complex).reshape(-1)
    if amp.size != c.n:
        raise ValueError(f"state must have {c.n} amplitudes, got {amp.size}")
    if abs(np.linalg.norm(amp) - 1.0) > NORM_TOL:
        raise NotNormalizedError("input state is not normalised")
    dec = decomposition if decomposition is not None else eigendecompose(c)
    v = dec.vectors
    return v.T @ (np.exp(-1j * dec.energies * t) * (v @ amp))


def fidelity_curve(c: ChainSpec, t_max: float, steps: int) -> FidelityCurve:
    """End-to-end amplitude sampled at ``steps`` evenly spaced times in [0, t_max]."""
    if steps < 2:
        raise ValueError("need at least two samples")
    if not t_max > 0.0:
        raise ValueError("t_max must be positive")
    dec = eigendecompose(c)
    times = np.linspace(0.0, t_max, steps)
    v = dec.vectors
    weights = v[:, c.n - 1] * v[:, 0]
    amps = np.exp(-1j * np.outer(times, dec.energies)) @ weights
    return FidelityCurve(times, np.abs(amps), np.angle(amps))


def extract_phase(c: ChainSpec, tau: float, decomposition: EigenDecomposition | None = None) -> float:
    """Phase ``phi`` of the end-to-end amplitude ``exp(i phi)`` at transfer time ``tau``."""
    amp = transfer_amplitude(c, 1, tau, decomposition)
    if abs(amp) < 1.0 - TRANSFER_MAGNITUDE_TOL:
        raise NotAtTransferError(f"|amplitude| = {abs(amp):.6g} at t = {tau!r}")
    return wrap_phase(float(np.angle(amp)))


def mirror_symmetric(c: ChainSpec, rtol: float = MIRROR_RTOL) -> bool:
    """True when the chain is invariant under site reversal.

    Entries are compared relative to the chain's energy scale (largest
    absolute coupling or potential), so zero potentials compare sensibly.
    """
    scale = max(float(np.max(np.abs(c.omega))), float(np.max(np.abs(c.lam))))
    tol = rtol * scale
    return bool(
        np.all(np.abs(c.omega - c.omega[::-1]) <= tol)
        and np.all(np.abs(c.lam - c.lam[::-1]) <= tol)
    )
