"""Verblunsky coefficients, Szegő transfer matrices, OPUC and CMV matrices.

Polynomials are coefficient arrays in ascending order.  Transfer matrices
are plain 2x2 complex ``numpy`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .roots import poly_roots


def rho(alpha):
    """ρ = (1 - |α|²)^{1/2}; works elementwise on arrays."""
    a = np.abs(alpha)
    if np.any(a >= 1):
        raise ValueError("Verblunsky coefficients must satisfy |α| < 1")
    return np.sqrt((1.0 - a) * (1.0 + a))


class VerblunskySequence:
    """An index -> coefficient map in the open unit disc.

    Build it from a finite array (one-sided, indices ``0..len-1``) or from a
    callable.  Two-sided sequences accept negative indices.
    """

    def __init__(self, generator: Callable[[int], complex], two_sided: bool = False, length: int | None = None):
        self._gen = generator
        self.two_sided = two_sided
        self.length = length
        self._cache: dict[int, complex] = {}

    @classmethod
    def from_array(cls, values) -> "VerblunskySequence":
        arr = np.asarray(values, dtype=complex)
        rho(arr)
        return cls(lambda n: arr[n], two_sided=False, length=len(arr))

    def __getitem__(self, n: int) -> complex:
        n = int(n)
        if n < 0 and not self.two_sided:
            raise IndexError(f"one-sided sequence has no index {n}")
        if self.length is not None and n >= self.length:
            raise IndexError(f"index {n} beyond the sequence length {self.length}")
        if n not in self._cache:
            a = complex(self._gen(n))
            if abs(a) >= 1:
                raise ValueError(f"α_{n} = {a} is not in the open unit disc")
            self._cache[n] = a
        return self._cache[n]

    def values(self, start: int, stop: int) -> np.ndarray:
        return np.array([self[n] for n in range(start, stop)], dtype=complex)

    def __len__(self):
        if self.length is None:
            raise TypeError("sequence has no finite length")
        return self.length


def _as_alphas(seq, n=None) -> np.ndarray:
    if isinstance(seq, VerblunskySequence):
        if n is None:
            n = len(seq)
        return seq.values(0, n)
    arr = np.asarray(seq, dtype=complex)
    return arr if n is None else arr[:n]


def transfer_single(z: complex, alpha: complex) -> np.ndarray:
    """T(z, α) = ρ^{-1} (z, -ᾱ; -α z, 1), with determinant z."""
    alpha = complex(alpha)
    r = float(rho(alpha))
    return np.array([[z, -alpha.conjugate()], [-alpha * z, 1.0]], dtype=complex) / r


def transfer_word(z: complex, word: Sequence[complex]) -> np.ndarray:
    """T(z, α_ℓ) ... T(z, α_1) for ``word = (α_1, ..., α_ℓ)``."""
    out = np.eye(2, dtype=complex)
    for a in word:
        out = transfer_single(z, a) @ out
    return out


def opnorm2(m) -> np.ndarray:
    """Largest singular value of 2x2 matrices (shape (..., 2, 2)), closed form."""
    m = np.asarray(m)
    s = np.max(np.abs(m), axis=(-2, -1))
    s = np.where(s > 0, s, 1.0)
    m = m / s[..., None, None]
    fro2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    det = np.abs(m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0])
    disc = np.maximum(fro2 * fro2 - 4.0 * det * det, 0.0)
    return s * np.sqrt(0.5 * (fro2 + np.sqrt(disc)))


def reversal_norm_pair(z: complex, word: Sequence[complex]) -> tuple[float, float]:
    """(‖T(z, w)‖, ‖T(z, w^R)‖) for a coefficient word w."""
    w = list(word)
    return float(opnorm2(transfer_word(z, w))), float(opnorm2(transfer_word(z, w[::-1])))


def solution_sequence(z: complex, alphas, initial=(1.0, 1.0), n_max: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Iterate (ξ_{n+1}, ζ_{n+1}) = T(z, α_n)(ξ_n, ζ_n) for n < n_max.

    Returns the arrays ξ_0..ξ_{n_max} and ζ_0..ζ_{n_max}.
    """
    if not math.isclose(abs(initial[0]), 1.0, abs_tol=1e-12) or not math.isclose(abs(initial[1]), 1.0, abs_tol=1e-12):
        raise ValueError("initial pair must satisfy |ξ_0| = |ζ_0| = 1")
    a = _as_alphas(alphas, n_max)
    if len(a) < n_max:
        raise ValueError(f"need {n_max} coefficients, got {len(a)}")
    r = rho(a)
    z = complex(z)
    xi = np.empty(n_max + 1, dtype=complex)
    zeta = np.empty(n_max + 1, dtype=complex)
    x, y = complex(initial[0]), complex(initial[1])
    xi[0], zeta[0] = x, y
    ac = a.conjugate()
    for n in range(n_max):
        x, y = (z * x - ac[n] * y) / r[n], (-a[n] * z * x + y) / r[n]
        xi[n + 1], zeta[n + 1] = x, y
    return xi, zeta


def solution_norm(xi, L: float) -> float:
    """‖ξ‖_L² = Σ_{n ≤ ⌊L⌋} |ξ_n|² + (L - ⌊L⌋)|ξ_{⌊L⌋+1}|², square-rooted."""
    if L < 0:
        raise ValueError("L must be non-negative")
    xi = np.asarray(xi)
    fl = int(math.floor(L))
    frac = L - fl
    need = fl + 2 if frac > 0 else fl + 1
    if len(xi) < need:
        raise ValueError(f"solution has {len(xi)} terms, L = {L} needs {need}")
    total = float(np.sum(np.abs(xi[: fl + 1]) ** 2))
    if frac > 0:
        total += frac * abs(xi[fl + 1]) ** 2
    return math.sqrt(total)


@dataclass(frozen=True)
class PolyPair:
    """Monic Φ_n and its reflection Φ_n*, ascending coefficients."""

    phi: np.ndarray
    phi_star: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.phi) - 1

    def __call__(self, z):
        from numpy.polynomial import polynomial as P

        return P.polyval(z, self.phi), P.polyval(z, self.phi_star)


def reflect(coeffs) -> np.ndarray:
    """Coefficients of p*(z) = z^n conj(p(1/z̄)): conjugate and reverse."""
    return np.conj(np.asarray(coeffs, dtype=complex))[::-1].copy()


def szego_polynomials(alphas, n: int) -> PolyPair:
    """Monic Szegő recursion Φ_{k+1} = zΦ_k - ᾱ_k Φ_k*, Φ*_{k+1} = Φ_k* - α_k zΦ_k."""
    if n < 0:
        raise ValueError("n must be non-negative")
    a = _as_alphas(alphas, n)
    if len(a) < n:
        raise ValueError(f"need {n} coefficients, got {len(a)}")
    phi = np.ones(1, dtype=complex)
    star = np.ones(1, dtype=complex)
    for k in range(n):
        zphi = np.concatenate([[0.0], phi])
        star_ext = np.concatenate([star, [0.0]])
        phi, star = zphi - np.conj(a[k]) * star_ext, star_ext - a[k] * zphi
    return PolyPair(phi, star)


def paraorthogonal(alphas, n: int, gamma: complex) -> np.ndarray:
    """Ψ_{n+1}(z) = zΦ_n(z) + γΦ_n*(z) for |γ| = 1, ascending coefficients."""
    if not math.isclose(abs(gamma), 1.0, abs_tol=1e-10):
        raise ValueError(f"|γ| = {abs(gamma)} is not 1")
    pp = szego_polynomials(alphas, n)
    return np.concatenate([[0.0], pp.phi]) + gamma * np.concatenate([pp.phi_star, [0.0]])


def paraorthogonal_zeros(alphas, n: int, gamma: complex) -> np.ndarray:
    """Zeros of Ψ_{n+1} as sorted angles in [0, 2π)."""
    r = poly_roots(paraorthogonal(alphas, n, gamma), on_circle=True)
    return np.sort(np.mod(np.angle(r), 2 * np.pi))


def _cmv_entry(alpha_of, r: int, c: int) -> complex:
    """Entry (r, c) of the extended CMV matrix built from ``alpha_of``."""

    def al(j):
        return complex(alpha_of(j))

    def rh(j):
        return math.sqrt(max(0.0, 1.0 - abs(al(j)) ** 2))

    if r % 2 == 0:
        i = r
        if c == i - 1:
            return al(i).conjugate() * rh(i - 1)
        if c == i:
            return -al(i).conjugate() * al(i - 1)
        if c == i + 1:
            return rh(i) * al(i + 1).conjugate()
        if c == i + 2:
            return rh(i) * rh(i + 1)
        return 0.0
    i = r - 1
    if c == i - 1:
        return rh(i) * rh(i - 1)
    if c == i:
        return -rh(i) * al(i - 1)
    if c == i + 1:
        return -al(i) * al(i + 1).conjugate()
    if c == i + 2:
        return -al(i) * rh(i + 1)
    return 0.0


def extended_cmv_window(alpha_of, rows: range, cols: range) -> np.ndarray:
    """Block of the extended CMV matrix E over the given row and column ranges.

    ``alpha_of`` maps every integer index to a coefficient (a
    :class:`VerblunskySequence` with ``two_sided=True`` or any callable).
    Even row 2i carries ᾱ_{2i}ρ_{2i-1}, -ᾱ_{2i}α_{2i-1}, ρ_{2i}ᾱ_{2i+1},
    ρ_{2i}ρ_{2i+1} in columns 2i-1..2i+2; odd row 2i+1 carries
    ρ_{2i}ρ_{2i-1}, -ρ_{2i}α_{2i-1}, -α_{2i}ᾱ_{2i+1}, -α_{2i}ρ_{2i+1}.
    """
    get = alpha_of.__getitem__ if isinstance(alpha_of, VerblunskySequence) else alpha_of
    out = np.zeros((len(rows), len(cols)), dtype=complex)
    for ii, r in enumerate(rows):
        for jj, c in enumerate(cols):
            if c - r <= 2 and r - c <= 2:
                out[ii, jj] = _cmv_entry(get, r, c)
    return out


def cmv_finite(alphas) -> np.ndarray:
    """Upper-left n x n block of the one-sided CMV matrix for α_0..α_{n-1}.

    Uses the extended-matrix entry formulas with α_{-1} = -1, which is what
    the one-sided matrix is.  Its eigenvalues are the zeros of Φ_n.
    """
    a = _as_alphas(alphas)
    n = len(a)
    if n < 2:
        raise ValueError("cmv_finite needs n >= 2")
    rho(a)

    def alpha_of(j):
        if j < 0:
            return -1.0
        if j >= n:
            return 0.0  # only reached through entries outside the block
        return a[j]

    return extended_cmv_window(alpha_of, range(n), range(n))


def cmv_lm(alphas, size: int) -> np.ndarray:
    """size x size block of L·M for the one-sided case, kept as a cross-check.

    ``alphas`` must have at least ``size + 1`` entries so that the blocks
    touching the last row and column are complete.
    """
    a = _as_alphas(alphas)
    n = size + 2
    if len(a) < n:
        a = np.concatenate([a, np.zeros(n - len(a))])
    r = rho(a)
    Lm = np.zeros((n, n), dtype=complex)
    Mm = np.zeros((n, n), dtype=complex)
    Mm[0, 0] = 1.0

    def theta(j):
        return np.array([[np.conj(a[j]), r[j]], [r[j], -a[j]]])

    for j in range(0, n - 1, 2):
        Lm[j : j + 2, j : j + 2] = theta(j)
    for j in range(1, n - 1, 2):
        Mm[j : j + 2, j : j + 2] = theta(j)
    if n % 2 == 1:
        Lm[n - 1, n - 1] = 1.0
    else:
        Mm[n - 1, n - 1] = 1.0
    return (Lm @ Mm)[:size, :size]
