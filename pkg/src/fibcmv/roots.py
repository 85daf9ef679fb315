"""Simultaneous-iteration polynomial root finder.

Coefficients are in ascending order, ``c[0] + c[1] z + ... + c[n] z^n``,
matching ``numpy.polynomial``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError


def _horner(c, z):
    """Evaluate p and p' at the points z (ascending coefficients)."""
    p = np.full_like(z, c[-1], dtype=complex)
    dp = np.zeros_like(z, dtype=complex)
    for a in c[-2::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def residual_scale(c, r):
    """Sum |c_k| |r|^k, the natural size of p near r."""
    mags = np.abs(c)
    rr = np.abs(r)
    out = np.zeros(len(r))
    for a in mags[::-1]:
        out = out * rr + a
    return out


def poly_roots(coefficients, on_circle=False, tol=1e-10, max_iter=500):
    """All roots of a polynomial by Aberth-Ehrlich simultaneous iteration.

    Parameters
    ----------
    coefficients : array_like
        Ascending coefficients; the last entry must be nonzero.
    on_circle : bool
        When the roots are known to lie on the unit circle, finish with a
        Newton step per root followed by projection onto the circle.
    tol : float
        Required relative residual ``|p(r)| <= tol * sum_k |c_k| |r|^k``.
    max_iter : int
        Iteration cap.

    Returns
    -------
    numpy.ndarray of complex roots, unsorted.

    Raises
    ------
    ConvergenceError
        If the cap is reached; ``residual`` holds the worst relative residual.
    """
    c = np.asarray(coefficients, dtype=complex)
    c = np.trim_zeros(c, "b")
    n = len(c) - 1
    if n < 1:
        raise ValueError("poly_roots needs degree >= 1 with a nonzero leading coefficient")
    c = c / c[-1]
    if n == 1:
        return np.array([-c[0]])

    # zero roots are split off exactly
    nz = 0
    while nz < n and c[nz] == 0:
        nz += 1
    if nz:
        rest = poly_roots(c[nz:], on_circle=False, tol=tol, max_iter=max_iter) if n - nz >= 1 else np.array([])
        return np.concatenate([np.zeros(nz, dtype=complex), rest])

    radius = 1.0 if on_circle else abs(c[0]) ** (1.0 / n)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    eye = np.eye(n, dtype=bool)
    worst = np.inf
    for _ in range(max_iter):
        p, dp = _horner(c, z)
        diff = z[:, None] - z[None, :]
        diff[eye] = 1.0
        inv = 1.0 / diff
        inv[eye] = 0.0
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        res = np.abs(_horner(c, z)[0]) / residual_scale(c, z)
        worst = res.max()
        if worst <= tol * 1e-3 or (worst <= tol and np.abs(w).max() <= 1e-14 * max(1.0, np.abs(z).max())):
            break
    if on_circle:
        p, dp = _horner(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(dp != 0, p / dp, 0.0)
        zn = z - step
        zn = zn / np.abs(zn)
        res_new = np.abs(_horner(c, zn)[0]) / residual_scale(c, zn)
        z = np.where(res_new <= np.maximum(res, tol), zn, z)
        res = np.abs(_horner(c, z)[0]) / residual_scale(c, z)
        worst = res.max()
    if not worst <= tol:
        raise ConvergenceError(f"poly_roots: residual {worst:.3e} above {tol:.1e} after {max_iter} iterations", residual=worst)
    return z
