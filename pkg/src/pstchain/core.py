"""Domain types, built-in chains and spectra, and transfer-window validation.

Conventions used throughout the package:

* energies are in arbitrary units with hbar = 1, times in inverse energy units;
* eigenvalues are always ordered descending, ``E_1 > E_2 > ... > E_N``;
* site and eigenvalue indices in the public API are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from pstchain.errors import (
    DegenerateSpectrumError,
    IncommensurateSpectrumError,
    InterlacingError,
    InvalidChainError,
    InvalidSizeError,
    NoTransferWindowError,
)

TWO_PI = 2.0 * math.pi

DEGENERACY_RTOL = 1e-12
COMMENSURABILITY_RTOL = 1e-9
MAX_DENOMINATOR = 1000


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidChainError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


def wrap_phase(angle: float) -> float:
    """Map an angle onto [0, 2*pi)."""
    phi = math.fmod(angle, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    if phi >= TWO_PI:
        phi = 0.0
    return phi


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """An XY spin chain restricted to its single-excitation subspace.

    ``omega[j-1]`` couples sites j and j+1; ``lam[j-1]`` is the on-site
    potential of site j.  The single-excitation Hamiltonian is the symmetric
    tridiagonal matrix with diagonal ``lam`` and off-diagonal ``omega``.
    """

    n: int
    omega: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InvalidSizeError(f"site count must be an integer, got {self.n!r}")
        n = int(self.n)
        if n < 2:
            raise InvalidSizeError(f"a chain needs at least 2 sites, got {n}")
        omega = _frozen(self.omega, "omega")
        lam = _frozen(self.lam, "lambda")
        if omega.size != n - 1:
            raise InvalidChainError(f"omega must have {n - 1} entries, got {omega.size}")
        if lam.size != n:
            raise InvalidChainError(f"lambda must have {n} entries, got {lam.size}")
        if np.any(omega <= 0.0):
            raise InvalidChainError("all couplings must be strictly positive")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "lam", lam)

    @property
    def omega_max(self) -> float:
        return float(self.omega.max())

    @property
    def delta_lambda(self) -> float:
        return float(self.lam.max() - self.lam.min())

    def matrix(self) -> np.ndarray:
        """Dense single-excitation Hamiltonian."""
        return np.diag(self.lam) + np.diag(self.omega, 1) + np.diag(self.omega, -1)

    def scaled(self, factor: float) -> "ChainSpec":
        return ChainSpec(self.n, factor * self.omega, factor * self.lam)

    def __eq__(self, other):
        if not isinstance(other, ChainSpec):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.omega, other.omega)
            and np.array_equal(self.lam, other.lam)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Spectrum:
    """A non-degenerate spectrum stored in descending order."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, "spectrum")
        if values.size < 1:
            raise InvalidSizeError("empty spectrum")
        gaps = -np.diff(values)
        span = float(values[0] - values[-1]) if values.size > 1 else 0.0
        if np.any(gaps <= DEGENERACY_RTOL * max(1.0, span)):
            raise DegenerateSpectrumError(
                "eigenvalues must be strictly descending and non-degenerate"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_unsorted(cls, values) -> "Spectrum":
        return cls(np.sort(np.asarray(values, dtype=float))[::-1])

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def gaps(self) -> np.ndarray:
        return -np.diff(self.values)

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min())

    @property
    def range(self) -> float:
        return float(self.values[0] - self.values[-1])

    @property
    def center(self) -> float:
        return 0.5 * float(self.values[0] + self.values[-1])

    def to_gap_sequence(self, atol: float = 1e-9) -> "GapSequence":
        """Read the gaps back as integers; raises ValueError if they are not."""
        gaps = self.gaps
        ints = np.rint(gaps)
        if np.any(np.abs(gaps - ints) > atol * np.maximum(1.0, gaps)):
            raise ValueError("spectrum gaps are not integers")
        return GapSequence(tuple(int(g) for g in ints), self.center)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True)
class GapSequence:
    """Integer gap encoding of a spectrum with rational gap ratios."""

    gaps: tuple[int, ...]
    center: float = 0.0

    def __post_init__(self):
        gaps = []
        for g in self.gaps:
            if isinstance(g, bool) or int(g) != g:
                raise ValueError(f"gaps must be integers, got {g!r}")
            if g < 1:
                raise ValueError(f"gaps must be at least 1, got {g!r}")
            gaps.append(int(g))
        if not gaps:
            raise InvalidSizeError("a gap sequence needs at least one gap")
        if not math.isfinite(self.center):
            raise ValueError("center must be finite")
        object.__setattr__(self, "gaps", tuple(gaps))
        object.__setattr__(self, "center", float(self.center))

    @classmethod
    def parse(cls, text: str, center: float = 0.0) -> "GapSequence":
        """Parse ``"3,1,3"``."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        try:
            gaps = tuple(int(p) for p in parts)
        except ValueError:
            raise ValueError(f"gaps must be comma-separated integers: {text!r}") from None
        return cls(gaps, center)

    @property
    def n(self) -> int:
        return len(self.gaps) + 1


@dataclass(frozen=True)
class TransferWindow:
    tau: float
    phi: float

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ValueError("transfer time must be positive")


@dataclass(frozen=True, eq=False)
class MirrorSplit:
    """Eigenvalues of the mirror-symmetric (``nu``) and antisymmetric (``mu``) sectors.

    Both are descending and strictly interlace, ``nu[0] > mu[0] > nu[1] > ...``.
    """

    nu: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        nu = _frozen(self.nu, "nu")
        mu = _frozen(self.mu, "mu")
        if not (nu.size == mu.size or nu.size == mu.size + 1):
            raise InterlacingError("sector sizes must differ by at most one")
        merged = np.empty(nu.size + mu.size)
        merged[0::2] = nu
        merged[1::2] = mu
        if np.any(np.diff(merged) >= 0.0):
            raise InterlacingError("sector spectra do not strictly interlace")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "mu", mu)


def _check_size(n) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise InvalidSizeError(f"size must be an integer, got {n!r}")
    if n < 2:
        raise InvalidSizeError(f"size must be at least 2, got {n}")
    return int(n)


def optimal_chain(n: int) -> ChainSpec:
    """Couplings ``omega_j = sqrt(j (n - j)) / 2`` with zero potentials.

    Its single-excitation spectrum is linear with unit spacing, so the end
    site is transferred perfectly at time pi.
    """
    n = _check_size(n)
    omega = [0.5 * math.sqrt(j * (n - j)) for j in range(1, n)]
    return ChainSpec(n, omega, np.zeros(n))


def linear_spectrum(n: int) -> Spectrum:
    n = _check_size(n)
    return Spectrum(0.5 * (n - 1) - np.arange(n, dtype=float))


def spectrum_from_gaps(g: GapSequence) -> Spectrum:
    """Descending spectrum with the given consecutive gaps, centred on ``g.center``."""
    offsets = np.concatenate(([0.0], np.cumsum(g.gaps, dtype=float)))
    top = g.center + 0.5 * offsets[-1]
    return Spectrum(top - offsets)


def reference_max_coupling(n):
    """Largest coupling of ``optimal_chain(n)``.

    ``sqrt(n**2 - 1) / 4`` for odd ``n`` and ``n / 4`` for even ``n``.
    Accepts an integer or an integer array.
    """
    arr = np.asarray(n)
    if arr.ndim == 0:
        n = _check_size(n)
        return 0.25 * math.sqrt(n * n - 1) if n % 2 else n / 4.0
    if not np.issubdtype(arr.dtype, np.integer) or np.any(arr < 2):
        raise InvalidSizeError("sizes must be integers >= 2")
    nf = arr.astype(float)
    return np.where(arr % 2 == 1, 0.25 * np.sqrt(nf * nf - 1.0), nf / 4.0)


def _commensurate_integers(gaps: np.ndarray, rtol: float) -> np.ndarray:
    """Coprime integers proportional to ``gaps`` (within ``rtol``)."""
    dmin = float(gaps.min())
    fracs = []
    for gap in gaps:
        ratio = float(gap) / dmin
        frac = Fraction(ratio).limit_denominator(MAX_DENOMINATOR)
        if abs(ratio - float(frac)) > rtol * ratio:
            raise IncommensurateSpectrumError(
                f"gap ratio {ratio!r} is not rational within relative tolerance {rtol}"
            )
        fracs.append(frac)
    lcm = 1
    for frac in fracs:
        lcm = lcm * frac.denominator // math.gcd(lcm, frac.denominator)
    ints = [int(frac * lcm) for frac in fracs]
    common = 0
    for k in ints:
        common = math.gcd(common, k)
    return np.array([k // common for k in ints], dtype=np.int64)


def validate_pst_spectrum(s: Spectrum, rtol: float = COMMENSURABILITY_RTOL) -> TransferWindow:
    """Find the first perfect-transfer time of a mirror-symmetric chain with spectrum ``s``.

    Transfer at time ``tau`` requires ``exp(-i E_k tau) = (-1)**(k-1) exp(i phi)``
    for all ``k``; adjacent levels then give ``Delta_k tau = (odd) * pi``.  The
    gaps are written as coprime integer multiples of a unit ``u``; transfer is
    possible iff every multiple is odd, and the earliest time is ``pi / u``.
    The returned phase is the argument of the end-to-end amplitude at ``tau``.

    Raises
    ------
    IncommensurateSpectrumError
        A gap ratio is irrational within ``rtol``.
    NoTransferWindowError
        Gaps are commensurate but some multiple is even.
    """
    if s.n < 2:
        raise NoTransferWindowError("a single level has no transfer window")
    gaps = s.gaps
    ints = _commensurate_integers(gaps, rtol)
    if np.any(ints % 2 == 0):
        raise NoTransferWindowError(
            f"gaps are in ratio {tuple(int(k) for k in ints)}; all must be odd"
        )
    unit = float(np.dot(gaps, ints) / np.dot(ints, ints))
    tau = math.pi / unit
    signs = np.where(np.arange(s.n) % 2 == 0, 1.0, -1.0)
    phasor = np.mean(signs * np.exp(-1j * s.values * tau))
    return TransferWindow(tau, wrap_phase(float(np.angle(phasor))))
