"""Inverse eigenvalue problem for mirror-symmetric chains.

A mirror-symmetric chain splits into a symmetric and an antisymmetric sector
whose spectra are the odd- and even-position eigenvalues.  The half chain is
recovered from the two sector spectra:

* even ``N``: the sectors differ only by ``+/- omega_{N/2}`` on the last site
  of the half chain, a rank-one modification;
* odd ``N``: the symmetric sector is the antisymmetric one bordered by the
  centre site, an arrowhead matrix after diagonalising the shared block.

The persymmetric oracle solves the same problem independently from end
weights of the full chain.
"""

from __future__ import annotations

import math

import numpy as np

from pstchain.core import ChainSpec, MirrorSplit, Spectrum, validate_pst_spectrum
from pstchain.errors import (
    InterlacingError,
    InvalidSizeError,
    ParityError,
)
from pstchain.spectral import ArrowheadForm, lanczos, lanczos_tridiagonalize

NEGATIVE_RADICAND_RTOL = 1e-10
LOG_PRODUCT_MIN_SIZE = 41


def split_mirror_spectra(s: Spectrum) -> MirrorSplit:
    """Odd-position (``nu``) and even-position (``mu``) eigenvalues."""
    return MirrorSplit(s.values[0::2], s.values[1::2])


def center_coupling_even(s: Spectrum) -> float:
    """Central coupling ``omega_{N/2}`` of an even chain, half the trace difference of the sectors."""
    if s.n % 2:
        raise ParityError("central coupling formula requires an even number of sites")
    return 0.5 * float(np.sum(s.gaps[0::2]))


def _residues(points, roots, poles, use_logs: bool) -> np.ndarray:
    """``-prod_j (x - roots_j) / prod_{j != k} (x - poles_j)`` at each ``x = points[k]``.

    ``points`` and ``poles`` are the same array.  With ``use_logs`` the
    products are accumulated as log-magnitudes plus a sign count.
    """
    out = np.empty(points.size)
    for k, x in enumerate(points):
        num = x - roots
        den = np.delete(x - poles, k)
        if use_logs:
            sign = (-1.0) ** (np.count_nonzero(num < 0) + np.count_nonzero(den < 0) + 1)
            mag = np.sum(np.log(np.abs(num))) - np.sum(np.log(np.abs(den)))
            out[k] = sign * math.exp(mag)
        else:
            out[k] = -np.prod(num) / np.prod(den)
    return out


def _clamp_radicands(values: np.ndarray, scale: float) -> np.ndarray:
    floor = -NEGATIVE_RADICAND_RTOL * scale
    if np.any(values < floor):
        raise InterlacingError("negative radicand: sector spectra do not interlace")
    return np.maximum(values, 0.0)


def arrowhead_from_spectra(split: MirrorSplit) -> ArrowheadForm:
    """Arrowhead form of the symmetric sector of an odd chain.

    The diagonal is the antisymmetric spectrum ``mu``, the corner is the trace
    difference and the squared border entries are the residues of the
    characteristic polynomial ratio at each ``mu_k``.  Their sum equals
    ``2 * omega_m**2`` for the centre coupling ``omega_m``.
    """
    nu, mu = split.nu, split.mu
    if nu.size != mu.size + 1:
        raise ParityError("arrowhead form needs one more symmetric than antisymmetric level")
    corner = float(np.sum(nu) - np.sum(mu))
    if mu.size == 0:
        return ArrowheadForm(mu, mu, corner)
    scale = float(nu[0] - nu[-1]) ** 2
    use_logs = nu.size + mu.size >= LOG_PRODUCT_MIN_SIZE
    b2 = _clamp_radicands(_residues(mu, nu, mu, use_logs), scale)
    return ArrowheadForm(mu, np.sqrt(b2), corner)


def _mirror(half_lam, half_omega, center_omegas) -> tuple[np.ndarray, np.ndarray]:
    lam = np.concatenate((half_lam, half_lam[::-1]))
    omega = np.concatenate((half_omega, center_omegas, half_omega[::-1]))
    return lam, omega


def _even_chain(s: Spectrum) -> ChainSpec:
    split = split_mirror_spectra(s)
    nu, mu = split.nu, split.mu
    h = mu.size
    w_center = center_coupling_even(s)
    scale = float(s.range) ** 2
    use_logs = s.n >= LOG_PRODUCT_MIN_SIZE
    # squared last-site components of the antisymmetric sector eigenvectors
    weights = _clamp_radicands(_residues(mu, nu, mu, use_logs), scale) / (2.0 * w_center)
    alpha, beta = lanczos(lambda q: mu * q, np.sqrt(weights), h, float(np.max(np.abs(mu))) + scale)
    half_lam = alpha[::-1].copy()
    half_lam[-1] += w_center
    lam, omega = _mirror(half_lam, beta[::-1], [w_center])
    return ChainSpec(s.n, omega, lam)


def _odd_chain(s: Spectrum) -> ChainSpec:
    half = lanczos_tridiagonalize(arrowhead_from_spectra(split_mirror_spectra(s)))
    w_center = half.omega[-1] / math.sqrt(2.0)
    lam = np.concatenate((half.lam, half.lam[-2::-1]))
    omega = np.concatenate((half.omega[:-1], [w_center, w_center], half.omega[-2::-1]))
    return ChainSpec(s.n, omega, lam)


def _two_site_chain(s: Spectrum) -> ChainSpec:
    e1, e2 = s.values
    mid = 0.5 * (e1 + e2)
    return ChainSpec(2, [0.5 * (e1 - e2)], [mid, mid])


def _three_site_chain(s: Spectrum) -> ChainSpec:
    # antisymmetric sector is site 1 alone; symmetric sector is
    # [[lam_1, sqrt2 w], [sqrt2 w, lam_2]] with trace E1+E3 and determinant E1*E3
    e1, e2, e3 = s.values
    d1, d2 = s.gaps
    w = math.sqrt(0.5 * d1 * d2)
    return ChainSpec(3, [w, w], [e2, e1 + e3 - e2, e2])


def reconstruct_chain(s: Spectrum, force: bool = False) -> ChainSpec:
    """The unique mirror-symmetric chain with positive couplings and spectrum ``s``.

    Unless ``force`` is set the spectrum must first pass
    :func:`validate_pst_spectrum`; reconstruction itself needs only a
    non-degenerate spectrum.
    """
    if s.n < 2:
        raise InvalidSizeError("need at least two levels")
    if not force:
        validate_pst_spectrum(s)
    if s.n == 2:
        return _two_site_chain(s)
    if s.n == 3:
        return _three_site_chain(s)
    if s.n % 2 == 0:
        return _even_chain(s)
    return _odd_chain(s)


def end_weights(s: Spectrum) -> np.ndarray:
    """Squared first components of the eigenvectors of the persymmetric chain with spectrum ``s``.

    Proportional to ``1 / prod_{j != k} |E_k - E_j|``, normalised to sum to one.
    """
    e = s.values
    logs = np.array([-np.sum(np.log(np.abs(np.delete(ek - e, k)))) for k, ek in enumerate(e)])
    logs -= logs.max()
    w = np.exp(logs)
    return w / w.sum()


def persymmetric_oracle(s: Spectrum, force: bool = False) -> ChainSpec:
    """Reconstruct the full chain in one pass by Lanczos from the end weights."""
    if s.n < 2:
        raise InvalidSizeError("need at least two levels")
    if not force:
        validate_pst_spectrum(s)
    e = s.values
    alpha, beta = lanczos(
        lambda q: e * q, np.sqrt(end_weights(s)), s.n, float(np.max(np.abs(e))) + s.range
    )
    return ChainSpec(s.n, beta, alpha)


def _center_coupling_sq(values: np.ndarray) -> float:
    gaps = -np.diff(values)
    if values.size == 3:
        return 0.5 * gaps[0] * gaps[1]
    n = values.size
    return _center_coupling_sq(values[:-2]) + 0.5 * gaps[n - 2] * float(np.sum(gaps[0 : n - 1 : 2]))


def center_coupling_recursion(s: Spectrum) -> float:
    """Squared centre coupling of an odd chain (``N >= 5``) built up two levels at a time.

    ``omega_m**2 = wbar**2 + Delta_{N-1} * (Delta_1 + Delta_3 + ... + Delta_{N-2}) / 2``
    where ``wbar`` is the centre coupling for the spectrum without its two
    lowest levels.  The three-level base case is ``Delta_1 * Delta_2 / 2``.
    """
    if s.n % 2 == 0:
        raise ParityError("recursion applies to odd chains only")
    if s.n < 5:
        raise InvalidSizeError("recursion needs at least five levels")
    return float(_center_coupling_sq(s.values))
