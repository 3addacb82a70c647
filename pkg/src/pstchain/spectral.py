"""Deterministic spectral computations for symmetric tridiagonal chains.

Eigenvalues come from Sturm-sequence bisection and eigenvectors from inverse
iteration, both vectorised over all eigenpairs at once.  The module also holds
the arrowhead-to-tridiagonal Lanczos reduction and the full 2**n spin
Hamiltonian used to cross-check the single-excitation picture.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from pstchain.core import ChainSpec, Spectrum, _frozen
from pstchain.errors import (
    ConvergenceError,
    IndexOutOfRangeError,
    LanczosBreakdownError,
    SizeLimitError,
)

MAX_ITERATIONS = 100
FULL_SPACE_MAX_SITES = 12
LANCZOS_BREAKDOWN_RTOL = 1e-12
ZERO_ENTRY_RTOL = 0.0

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Spectrum plus eigenvectors; ``vectors[k]`` pairs with ``values.values[k]``.

    Every vector has a strictly positive first component.
    """

    values: Spectrum
    vectors: np.ndarray

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=float)
        vecs.flags.writeable = False
        object.__setattr__(self, "vectors", vecs)

    @property
    def energies(self) -> np.ndarray:
        return self.values.values


@dataclass(frozen=True, eq=False)
class ArrowheadForm:
    """Symmetric arrowhead matrix ``[[diag(diag), border], [border^T, corner]]``."""

    diag: np.ndarray
    border: np.ndarray
    corner: float

    def __post_init__(self):
        diag = _frozen(self.diag, "diag")
        border = _frozen(self.border, "border")
        if diag.size != border.size:
            raise ValueError("diag and border must have equal length")
        if np.any(border < 0.0):
            raise ValueError("border entries must be non-negative")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "border", border)
        object.__setattr__(self, "corner", float(self.corner))

    @property
    def size(self) -> int:
        return self.diag.size + 1

    def matrix(self) -> np.ndarray:
        m = self.size
        a = np.zeros((m, m))
        a[np.arange(m - 1), np.arange(m - 1)] = self.diag
        a[:-1, -1] = self.border
        a[-1, :-1] = self.border
        a[-1, -1] = self.corner
        return a


def _gershgorin(diag: np.ndarray, off: np.ndarray) -> tuple[float, float]:
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def _sturm_count(diag, off2, shifts, pivmin):
    """Number of eigenvalues strictly below each shift (LDL^T inertia)."""
    d = diag[0] - shifts
    d[np.abs(d) < pivmin] = -pivmin
    count = (d < 0.0).astype(np.int64)
    for i in range(1, diag.size):
        d = (diag[i] - shifts) - off2[i - 1] / d
        d[np.abs(d) < pivmin] = -pivmin
        count += d < 0.0
    return count


def tridiagonal_eigenvalues(diag, off) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending, by bisection."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = diag.size
    if n == 1:
        return diag.copy()
    lo, hi = _gershgorin(diag, off)
    tnorm = max(abs(lo), abs(hi))
    off2 = off * off
    pivmin = np.finfo(float).tiny * max(1.0, float(off2.max()))
    pad = 2.0 * _EPS * tnorm + 4.0 * pivmin
    lower = np.full(n, lo - pad)
    upper = np.full(n, hi + pad)
    target = np.arange(n)
    abstol = _EPS * tnorm
    for _ in range(MAX_ITERATIONS):
        width = upper - lower
        tol = np.maximum(abstol, 2.0 * _EPS * np.maximum(np.abs(lower), np.abs(upper)))
        active = width > tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        mid = 0.5 * (lower[idx] + upper[idx])
        above = _sturm_count(diag, off2, mid, pivmin) > target[idx]
        upper[idx[above]] = mid[above]
        lower[idx[~above]] = mid[~above]
    else:
        raise ConvergenceError(f"bisection did not converge in {MAX_ITERATIONS} steps")
    return 0.5 * (lower + upper)


def _tridiagonal_lu(diag, off, shifts, tiny):
    """LU with partial pivoting of ``T - s I`` for every shift (LAPACK gttrf layout)."""
    k, n = shifts.size, diag.size
    d = diag[None, :] - shifts[:, None]
    dl = np.tile(off, (k, 1))
    du = np.tile(off, (k, 1))
    du2 = np.zeros((k, max(n - 2, 0)))
    swap = np.zeros((k, n - 1), dtype=bool)
    for i in range(n - 1):
        di, li, ui, dn = d[:, i], dl[:, i], du[:, i].copy(), d[:, i + 1]
        s = np.abs(di) < np.abs(li)
        f_keep = li / np.where(s, 1.0, di)
        f_swap = di / np.where(s, li, 1.0)
        d[:, i] = np.where(s, li, di)
        dl[:, i] = np.where(s, f_swap, f_keep)
        du[:, i] = np.where(s, dn, ui)
        d[:, i + 1] = np.where(s, ui - f_swap * dn, dn - f_keep * ui)
        if i < n - 2:
            un = du[:, i + 1].copy()
            du2[:, i] = np.where(s, un, 0.0)
            du[:, i + 1] = np.where(s, -f_swap * un, un)
        swap[:, i] = s
    small = np.abs(d) < tiny
    d = np.where(small, np.where(d < 0.0, -tiny, tiny), d)
    return dl, d, du, du2, swap


def _tridiagonal_solve(factors, b):
    dl, d, du, du2, swap = factors
    x = b.copy()
    n = x.shape[1]
    for i in range(n - 1):
        s = swap[:, i]
        xi, xn = x[:, i].copy(), x[:, i + 1].copy()
        x[:, i] = np.where(s, xn, xi)
        x[:, i + 1] = np.where(s, xi - dl[:, i] * xn, xn - dl[:, i] * xi)
    x[:, n - 1] /= d[:, n - 1]
    if n > 1:
        x[:, n - 2] = (x[:, n - 2] - du[:, n - 2] * x[:, n - 1]) / d[:, n - 2]
    for i in range(n - 3, -1, -1):
        x[:, i] = (x[:, i] - du[:, i] * x[:, i + 1] - du2[:, i] * x[:, i + 2]) / d[:, i]
    return x


def _clusters(values: np.ndarray, sep: float) -> list[np.ndarray]:
    breaks = np.flatnonzero(np.diff(values) > sep) + 1
    return [c for c in np.split(np.arange(values.size), breaks) if c.size > 1]


def _twisted_vectors(diag, off, evals, pivmin):
    """One inverse-iteration step per shift with a twisted factorisation.

    Combines the top-down and bottom-up LDL^T pivots of ``T - s I``, twists at
    the index where the eigenvector is largest and builds the remaining
    components as products of pivot ratios.  Small tail components keep their
    relative accuracy, so sign patterns survive strong localisation.
    """
    k, n = evals.size, diag.size
    shifted = diag[None, :] - evals[:, None]
    off2 = off * off

    def guard(d):
        return np.where(np.abs(d) < pivmin, -pivmin, d)

    down = np.empty((k, n))
    down[:, 0] = guard(shifted[:, 0])
    for i in range(1, n):
        down[:, i] = guard(shifted[:, i] - off2[i - 1] / down[:, i - 1])
    up = np.empty((k, n))
    up[:, n - 1] = guard(shifted[:, n - 1])
    for i in range(n - 2, -1, -1):
        up[:, i] = guard(shifted[:, i] - off2[i] / up[:, i + 1])
    twist = np.argmin(np.abs(down + up - shifted), axis=1)
    z = np.zeros((k, n))
    z[np.arange(k), twist] = 1.0
    for i in range(n - 2, -1, -1):
        z[:, i] = np.where(i < twist, -off[i] / down[:, i] * z[:, i + 1], z[:, i])
    for i in range(1, n):
        z[:, i] = np.where(i > twist, -off[i - 1] / up[:, i] * z[:, i - 1], z[:, i])
    return z


def _orthonormalize(x, groups):
    x /= np.linalg.norm(x, axis=1)[:, None]
    for group in groups:
        for a, i in enumerate(group):
            for j in group[:a]:
                x[i] -= (x[i] @ x[j]) * x[j]
            x[i] /= np.linalg.norm(x[i])
    return x


def _inverse_iteration(diag, off, evals):
    n = diag.size
    tnorm = max(1.0, float(np.max(np.abs(evals))), float(np.max(np.abs(diag))))
    tiny = _EPS * tnorm
    pivmin = np.finfo(float).tiny * max(1.0, float(np.max(off * off)))
    groups = _clusters(evals, 1e-3 * tnorm)
    tol = 16.0 * n * _EPS * tnorm
    x = _orthonormalize(_twisted_vectors(diag, off, evals, pivmin), groups)
    factors = None
    for _ in range(MAX_ITERATIONS):
        tx = diag * x
        tx[:, :-1] += off * x[:, 1:]
        tx[:, 1:] += off * x[:, :-1]
        resid = np.linalg.norm(tx - evals[:, None] * x, axis=1)
        if np.all(resid <= tol):
            return x
        if factors is None:
            factors = _tridiagonal_lu(diag, off, evals, tiny)
        x = _orthonormalize(_tridiagonal_solve(factors, x), groups)
    raise ConvergenceError(f"inverse iteration did not converge in {MAX_ITERATIONS} steps")


def eigendecompose(c: ChainSpec) -> EigenDecomposition:
    """Eigenpairs of the single-excitation Hamiltonian, descending.

    Bit-for-bit deterministic (no random start vectors).  Raises
    ConvergenceError past the iteration cap of 100 steps per stage.
    """
    diag, off = np.asarray(c.lam), np.asarray(c.omega)
    evals = tridiagonal_eigenvalues(diag, off)
    vecs = _inverse_iteration(diag, off, evals)
    signs = np.where(vecs[:, 0] < 0.0, -1.0, 1.0)
    vecs = vecs * signs[:, None]
    return EigenDecomposition(Spectrum(evals[::-1]), vecs[::-1])


def sign_change_count(v, zero_rtol: float = ZERO_ENTRY_RTOL) -> int:
    """Sign flips between consecutive entries.

    Entries with ``|v_i| <= zero_rtol * max|v|`` are skipped.  The default
    skips exact zeros only: eigenvectors from :func:`eigendecompose` keep the
    relative accuracy of their small tail components, and discarding those
    tails would drop genuine sign changes of localised states.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    if scale == 0.0:
        raise ValueError("sign changes of an all-zero vector are undefined")
    kept = v[np.abs(v) > zero_rtol * scale]
    return int(np.count_nonzero(np.signbit(kept[1:]) != np.signbit(kept[:-1])))


def eigenvalue_gradients(c: ChainSpec, k: int, decomposition: EigenDecomposition | None = None):
    """Derivatives of ``E_k`` with respect to the potentials and the couplings.

    By Hellmann-Feynman, ``dE_k/dlam_j = v_j**2`` and
    ``dE_k/domega_j = 2 v_j v_{j+1}`` for the normalised eigenvector ``v``.
    ``k`` is 1-based in descending order.
    """
    if not 1 <= k <= c.n:
        raise IndexOutOfRangeError(f"eigenvalue index {k} outside 1..{c.n}")
    dec = decomposition if decomposition is not None else eigendecompose(c)
    v = dec.vectors[k - 1]
    return v * v, 2.0 * v[:-1] * v[1:]


def lanczos(matvec: Callable[[np.ndarray], np.ndarray], start, steps: int, scale: float):
    """Lanczos with full reorthogonalisation.

    Returns the diagonal (``steps`` entries) and positive off-diagonal
    (``steps - 1`` entries) of the Jacobi matrix generated from ``start``.
    """
    q = np.asarray(start, dtype=float)
    q = q / np.linalg.norm(q)
    basis = np.zeros((steps, q.size))
    alpha = np.zeros(steps)
    beta = np.zeros(max(steps - 1, 0))
    for j in range(steps):
        basis[j] = q
        w = matvec(q)
        alpha[j] = q @ w
        if j == steps - 1:
            break
        done = basis[: j + 1]
        w = w - done.T @ (done @ w)
        w = w - done.T @ (done @ w)
        b = float(np.linalg.norm(w))
        if b < LANCZOS_BREAKDOWN_RTOL * scale:
            raise LanczosBreakdownError(
                f"Lanczos breakdown at step {j + 1}: beta = {b:.3e}"
            )
        beta[j] = b
        q = w / b
    return alpha, beta


def lanczos_tridiagonalize(a: ArrowheadForm) -> ChainSpec:
    """Reduce an arrowhead matrix to an equivalent Jacobi matrix.

    Lanczos is seeded with the corner basis vector and the result is reversed,
    so the corner lands on the last site and the full border weight becomes the
    last coupling, ``omega[-1] == norm(border)``.
    """
    if not np.any(a.border > 0.0):
        raise LanczosBreakdownError("arrowhead border is identically zero")
    mat = a.matrix()
    m = a.size
    start = np.zeros(m)
    start[-1] = 1.0
    alpha, beta = lanczos(lambda q: mat @ q, start, m, float(np.linalg.norm(mat)))
    return ChainSpec(m, beta[::-1], alpha[::-1])


def build_full_hamiltonian(c: ChainSpec) -> np.ndarray:
    """Dense spin Hamiltonian on all 2**n basis states.

    Basis states are ordered by integer value with site j stored in bit j-1
    (bit set = spin up).  Hopping ``omega_j (XX + YY) / 2`` swaps an excitation
    between sites j and j+1; ``lam_j (Z + 1) / 2`` counts the excitation on
    site j, so the all-down state has energy exactly zero.
    """
    n = c.n
    if n > FULL_SPACE_MAX_SITES:
        raise SizeLimitError(
            f"full Hilbert space limited to {FULL_SPACE_MAX_SITES} sites, got {n}"
        )
    dim = 1 << n
    idx = np.arange(dim)
    bits = (idx[:, None] >> np.arange(n)) & 1
    h = np.zeros((dim, dim))
    h[idx, idx] = bits @ c.lam
    for j in range(n - 1):
        movable = idx[bits[:, j] != bits[:, j + 1]]
        h[movable, movable ^ (0b11 << j)] = c.omega[j]
    return h


def excitation_numbers(n: int) -> np.ndarray:
    """Total up-spin count of each basis state of ``build_full_hamiltonian``."""
    idx = np.arange(1 << n)
    return ((idx[:, None] >> np.arange(n)) & 1).sum(axis=1)


def single_excitation_indices(n: int) -> np.ndarray:
    """Basis indices of the states with one excitation on site 1, 2, ..., n."""
    return 1 << np.arange(n)
