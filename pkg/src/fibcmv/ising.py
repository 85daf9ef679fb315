"""Nearest-neighbour Ising rings in a complex field and their Lee-Yang zeros.

A ring has L spins σ_0..σ_{L-1} and L bonds J_i between σ_i and
σ_{i+1 mod L}.  The fugacity is h = exp(2H / k_B τ) and β_i = exp(2J_i / k_B τ).
On the unit circle h = e^{iθ} with θ in [0, 2π) and √h = e^{iθ/2}; off the
circle the same cut along the positive real axis is used.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .cmv import rho
from .errors import NumericalInconsistency
from .measures import CircleZeroSet, hausdorff, kolmogorov, zero_measure
from .roots import poly_roots
from .words import SubshiftPoint, fib_length, repeatable_prefix_lengths

TWO_PI = 2 * math.pi
BRUTE_FORCE_CAP = 20


def sqrt_h(h):
    """√h with arg h taken in [0, 2π)."""
    h = np.asarray(h, dtype=complex)
    th = np.mod(np.angle(h), TWO_PI)
    out = np.sqrt(np.abs(h)) * np.exp(0.5j * th)
    return complex(out) if out.ndim == 0 else out


@dataclass
class IsingRing:
    """Couplings J_0..J_{L-1} (ℜJ > 0), temperature τ, Boltzmann constant k_B."""

    J: np.ndarray
    tau: float = 1.0
    kB: float = 1.0

    def __post_init__(self):
        self.J = np.atleast_1d(np.asarray(self.J, dtype=complex))
        if self.J.ndim != 1 or len(self.J) < 1:
            raise ValueError("need at least one coupling")
        if self.tau <= 0 or self.kB <= 0:
            raise ValueError("τ and k_B must be positive")
        if np.any(self.J.real <= 0):
            raise ValueError("couplings must have positive real part")

    @classmethod
    def from_betas(cls, betas, tau: float = 1.0, kB: float = 1.0) -> "IsingRing":
        """Ring with β_i given directly; J_i = (k_B τ / 2) log β_i (principal log)."""
        b = np.atleast_1d(np.asarray(betas, dtype=complex))
        if np.any(np.abs(b) <= 1):
            raise ValueError("β values must lie outside the closed unit disc")
        return cls(0.5 * kB * tau * np.log(b), tau, kB)

    @property
    def L(self) -> int:
        return len(self.J)

    @property
    def K(self) -> np.ndarray:
        return self.J / (self.kB * self.tau)

    @property
    def betas(self) -> np.ndarray:
        return np.exp(2 * self.K)

    @property
    def real(self) -> bool:
        return bool(np.all(self.J.imag == 0))


def energy(sigma, ring: IsingRing, H: complex = 0.0) -> complex:
    """-(1/k_B τ) Σ_i (J_i σ_i σ_{i+1} + H σ_i), indices mod L."""
    s = np.asarray(sigma)
    if s.shape != (ring.L,) or not np.all(np.abs(s) == 1):
        raise ValueError(f"need {ring.L} spins of value ±1")
    bonds = np.sum(ring.J * s * np.roll(s, -1))
    return complex(-(bonds + H * s.sum()) / (ring.kB * ring.tau))


def _configs(L: int) -> np.ndarray:
    if L > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force is capped at L = {BRUTE_FORCE_CAP}")
    idx = np.arange(2**L)[:, None]
    return 1 - 2 * ((idx >> np.arange(L)[None, :]) & 1)


def partition_coefficients(ring: IsingRing) -> np.ndarray:
    """c_0..c_L with Z(h) = (√h)^{-L} Σ_m c_m h^m, m = number of up spins."""
    s = _configs(ring.L)
    w = np.exp(np.sum(ring.K[None, :] * s * np.roll(s, -1, axis=1), axis=1))
    ups = (s == 1).sum(axis=1)
    return np.bincount(ups, weights=w.real, minlength=ring.L + 1) + 1j * np.bincount(ups, weights=w.imag, minlength=ring.L + 1)


def partition_bruteforce(ring: IsingRing, h: complex) -> complex:
    """Σ over all 2^L configurations of e^{-E(σ)}."""
    s = _configs(ring.L)
    bond = np.sum(ring.K[None, :] * s * np.roll(s, -1, axis=1), axis=1)
    r = sqrt_h(h)
    return complex(np.sum(np.exp(bond) * r ** s.sum(axis=1).astype(float)))


def _trace_product(mats_a, mats_b, mats_c, mats_d):
    """Tr(M_{L-1} ... M_0) for per-factor entry arrays of shape (L, ...)."""
    p00 = np.ones_like(mats_a[0])
    p01 = np.zeros_like(mats_a[0])
    p10 = np.zeros_like(mats_a[0])
    p11 = np.ones_like(mats_a[0])
    for a, b, c, d in zip(mats_a, mats_b, mats_c, mats_d):
        p00, p01, p10, p11 = a * p00 + b * p10, a * p01 + b * p11, c * p00 + d * p10, c * p01 + d * p11
    return p00 + p11


def partition_transfer(ring: IsingRing, h) -> complex:
    """Tr ∏ M_i(h), M_i = (β_i h)^{-1/2} (β_i h, √h; √h, β_i)."""
    h = np.asarray(h, dtype=complex)
    if np.any(h == 0):
        raise ValueError("h must be nonzero")
    r = sqrt_h(h)
    K = ring.K.reshape((-1,) + (1,) * h.ndim)
    # (β h)^{-1/2} = e^{-K} / √h
    a = np.exp(K) * r
    b = np.exp(-K) * np.ones_like(r)
    d = np.exp(K) / r
    out = _trace_product(a, b, b, d)
    return complex(out) if out.ndim == 0 else out


def partition_tilde(ring: IsingRing, h) -> complex:
    """Tr ∏ M̃_i(h), M̃_i = (h, √h/β̄_i; √h/β_i, 1)."""
    h = np.asarray(h, dtype=complex)
    if np.any(h == 0):
        raise ValueError("h must be nonzero")
    r = sqrt_h(h)
    be = ring.betas.reshape((-1,) + (1,) * h.ndim)
    a = np.ones_like(be) * h
    b = r / np.conj(be)
    c = r / be
    d = np.ones_like(a)
    out = _trace_product(a, b, c, d)
    return complex(out) if out.ndim == 0 else out


def tilde_ratio(ring: IsingRing, h: complex) -> complex:
    """∏ (β_i h)^{-1/2} β_i, which equals Z/Z̃ for real couplings."""
    r = sqrt_h(h)
    return complex(np.prod(np.exp(ring.K) / r))


def tilde_polynomial(ring: IsingRing) -> np.ndarray:
    """Z̃ as a degree-L polynomial in h (ascending coefficients).

    Conjugating M̃_i by diag(1, √h) gives (h, h/β̄_i; 1/β_i, 1), whose entries
    are polynomials in h.
    """
    return _trace_poly([([0, 1], [0, 1.0 / np.conj(b)], [1.0 / b], [1.0]) for b in ring.betas])


def _trace_poly(factors) -> np.ndarray:
    p00, p01, p10, p11 = np.array([1.0 + 0j]), np.array([0j]), np.array([0j]), np.array([1.0 + 0j])
    for a, b, c, d in factors:
        a, b, c, d = (np.asarray(x, dtype=complex) for x in (a, b, c, d))
        p00, p01, p10, p11 = (
            P.polyadd(P.polymul(a, p00), P.polymul(b, p10)),
            P.polyadd(P.polymul(a, p01), P.polymul(b, p11)),
            P.polyadd(P.polymul(c, p00), P.polymul(d, p10)),
            P.polyadd(P.polymul(c, p01), P.polymul(d, p11)),
        )
    return P.polyadd(p00, p11)


def theta_inversion(beta) -> np.ndarray:
    """α_i = 1/β_i; requires |β_i| > 1."""
    b = np.atleast_1d(np.asarray(beta, dtype=complex))
    if np.any(np.abs(b) <= 1):
        raise ValueError("Θ needs every |β_i| > 1")
    return 1.0 / b


def theta_inverse(alpha) -> np.ndarray:
    """β_i = 1/α_i, the inverse of :func:`theta_inversion`; requires 0 < |α_i| < 1."""
    a = np.atleast_1d(np.asarray(alpha, dtype=complex))
    if np.any(np.abs(a) >= 1) or np.any(a == 0):
        raise ValueError("Θ^{-1} needs every 0 < |α_i| < 1")
    return 1.0 / a


def discriminant(h, alphas, L: int | None = None):
    """Δ_L(h) = Tr T(h, α_{L-1}) ... T(h, α_0)."""
    a = np.atleast_1d(np.asarray(alphas, dtype=complex))
    L = len(a) if L is None else L
    if L < 1 or L > len(a):
        raise ValueError("L must be between 1 and the number of coefficients")
    a = a[:L]
    h = np.asarray(h, dtype=complex)
    r = rho(a).reshape((-1,) + (1,) * h.ndim)
    a = a.reshape(r.shape)
    out = _trace_product(h / r * np.ones_like(a), -np.conj(a) / r * np.ones_like(h), -a * h / r, np.ones_like(h) / r * np.ones_like(a))
    return complex(out) if out.ndim == 0 else out


def discriminant_poly(alphas, L: int | None = None) -> np.ndarray:
    """Δ_L as a polynomial in h (ascending coefficients)."""
    a = np.atleast_1d(np.asarray(alphas, dtype=complex))
    L = len(a) if L is None else L
    a = a[:L]
    r = rho(a)
    return _trace_poly([([0, 1 / ri], [-np.conj(ai) / ri], [0, -ai / ri], [1 / ri]) for ai, ri in zip(a, r)])


def _half_angle_factors(theta, a):
    """Entries of e^{-iθ/2} T(e^{iθ}, α) per coefficient; shape (L, len(θ))."""
    e = np.exp(0.5j * theta)[None, :]
    r = rho(a)[:, None]
    ac = np.conj(a)[:, None]
    al = a[:, None]
    return e / r, -ac / (e * r), -al * e / r, 1.0 / (e * r)


def normalized_discriminant(theta, alphas) -> np.ndarray:
    """g(θ) = e^{-iLθ/2} Δ_L(e^{iθ}), real and continuous in θ."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    a = np.asarray(alphas, dtype=complex)
    return _trace_product(*_half_angle_factors(theta, a)).real


def normalized_discriminant_with_derivative(theta, alphas):
    """(g(θ), g'(θ)); each factor N satisfies dN/dθ = (i/2) N diag(1, -1)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    a = np.asarray(alphas, dtype=complex)
    fa, fb, fc, fd = _half_angle_factors(theta, a)
    n = theta.shape[0]
    p = [np.ones(n, complex), np.zeros(n, complex), np.zeros(n, complex), np.ones(n, complex)]
    dp = [np.zeros(n, complex) for _ in range(4)]
    for a_, b_, c_, d_ in zip(fa, fb, fc, fd):
        # dN = (i/2)(a, -b; c, -d)
        da, db, dc, dd = 0.5j * a_, -0.5j * b_, 0.5j * c_, -0.5j * d_
        np_ = [a_ * p[0] + b_ * p[2], a_ * p[1] + b_ * p[3], c_ * p[0] + d_ * p[2], c_ * p[1] + d_ * p[3]]
        ndp = [
            da * p[0] + db * p[2] + a_ * dp[0] + b_ * dp[2],
            da * p[1] + db * p[3] + a_ * dp[1] + b_ * dp[3],
            dc * p[0] + dd * p[2] + c_ * dp[0] + d_ * dp[2],
            dc * p[1] + dd * p[3] + c_ * dp[1] + d_ * dp[3],
        ]
        p, dp = np_, ndp
    return (p[0] + p[3]).real, (dp[0] + dp[3]).real


def _bisect(f, lo, hi, tol=1e-12, max_iter=200):
    """Vectorized bisection for sign changes of f on the brackets [lo, hi]."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    flo = f(lo)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def scan_zeros(func, expected: int, lo: float = 0.0, hi: float = TWO_PI, density: int = 16, refinements: int = 3, tol: float = 1e-12):
    """Zeros of a real continuous function on [lo, hi] by grid sign changes and bisection.

    The grid starts at ``density * expected`` points and is refined 4x, up
    to ``refinements`` times, while the number of zeros found differs from
    ``expected``.  Zeros are merged modulo 2π.
    """
    n = max(density * expected, 64)
    found = np.array([])
    for _ in range(refinements + 1):
        grid = np.linspace(lo, hi, n + 1)
        v = func(grid)
        exact = grid[v == 0]
        s = np.sign(v)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        roots = _bisect(func, grid[idx], grid[idx + 1], tol=tol) if len(idx) else np.array([])
        found = np.sort(np.mod(np.concatenate([roots, exact]), TWO_PI))
        if len(found) > 1:
            gaps = np.diff(np.concatenate([found, [found[0] + TWO_PI]]))
            keep = np.concatenate([[True], gaps[:-1] > 10 * tol])
            if gaps[-1] <= 10 * tol:
                keep[0] = False if len(found) > 1 else True
            found = found[keep]
        if len(found) == expected:
            return found
        n *= 4
    return found


def zeros_on_circle(alphas, L: int | None = None, method: str = "A", tol: float = 1e-8) -> CircleZeroSet:
    """Zeros of Δ_L on the unit circle.

    Method "A" scans the real function g(θ) for sign changes; method "B"
    finds the roots of Δ_L as a polynomial in h.  "both" runs the two and
    raises ``NumericalInconsistency`` if they differ by more than ``tol``.
    Either method raises when it does not find exactly L zeros.
    """
    a = np.atleast_1d(np.asarray(alphas, dtype=complex))
    L = len(a) if L is None else L
    a = a[:L]
    if method == "both":
        za = zeros_on_circle(a, L, "A", tol)
        zb = zeros_on_circle(a, L, "B", tol)
        d = hausdorff(za.angles, zb.angles)
        if d > tol:
            raise NumericalInconsistency(f"methods A and B differ by {d:.3e}")
        return za
    if method == "A":
        ang = scan_zeros(lambda t: normalized_discriminant(t, a), L)
        res = np.abs(normalized_discriminant(ang, a)) if len(ang) else np.array([])
    elif method == "B":
        coeffs = discriminant_poly(a)
        r = poly_roots(coeffs, on_circle=True)
        if np.abs(np.abs(r) - 1).max() > tol:
            raise NumericalInconsistency(f"discriminant root off the circle by {np.abs(np.abs(r) - 1).max():.3e}")
        ang = np.mod(np.angle(r), TWO_PI)
        res = np.abs(P.polyval(np.exp(1j * ang), coeffs)) / np.sum(np.abs(coeffs))
    else:
        raise ValueError(f"unknown method {method!r}")
    if len(ang) != L:
        raise NumericalInconsistency(f"found {len(ang)} zeros, expected {L}")
    return CircleZeroSet(ang, res, method)


def partition_zeros(ring: IsingRing, which: str = "Z") -> CircleZeroSet:
    """Zeros of Z (physical transfer matrices, real couplings) or of Z̃ (polynomial roots)."""
    L = ring.L
    if which == "Z":
        if not ring.real:
            raise ValueError("the sign-change route for Z needs real couplings")
        # with √h = e^{iθ/2} each M_i has the form (a, b; b̄, ā), so Z is real
        ang = scan_zeros(lambda t: partition_transfer(ring, np.exp(1j * t)).real, L)
        res = np.abs(partition_transfer(ring, np.exp(1j * ang))) if len(ang) else np.array([])
    elif which == "Ztilde":
        coeffs = tilde_polynomial(ring)
        r = poly_roots(coeffs, on_circle=True)
        ang = np.mod(np.angle(r), TWO_PI)
        res = np.abs(P.polyval(np.exp(1j * ang), coeffs)) / np.sum(np.abs(coeffs))
        if np.abs(np.abs(r) - 1).max() > 1e-8:
            raise NumericalInconsistency("Z̃ root off the unit circle")
    else:
        raise ValueError(f"unknown partition function {which!r}")
    if len(ang) != L:
        raise NumericalInconsistency(f"found {len(ang)} zeros of {which}, expected {L}")
    return CircleZeroSet(ang, res, which)


@dataclass(frozen=True)
class Band:
    """A closed arc [left, right] (counterclockwise) containing one zero of Δ."""

    left: float
    right: float
    zero: float

    @property
    def length(self) -> float:
        return (self.right - self.left) % TWO_PI if self.right != self.left else 0.0

    def contains(self, theta: float, strict: bool = True) -> bool:
        d = (theta - self.left) % TWO_PI
        return (0 < d < self.length) if strict else (d <= self.length)


def bands(alphas, L: int | None = None, closed_gap_tol: float = 1e-12) -> list[Band]:
    """Arcs where |g| ≤ 2, one per zero of Δ_L, in order of their zeros.

    Between consecutive zeros g has a single critical point θ*.  When
    |g(θ*)| ≤ 2 (up to ``closed_gap_tol``) the gap is closed and both band
    edges sit at θ*; otherwise the edges are where |g| = 2 on either side.
    """
    a = np.atleast_1d(np.asarray(alphas, dtype=complex))
    L = len(a) if L is None else L
    a = a[:L]
    z = zeros_on_circle(a, L, "A").angles
    lo = z
    hi = np.concatenate([z[1:], [z[0] + TWO_PI]])

    def gfun(t):
        return normalized_discriminant(t, a)

    def dgfun(t):
        return normalized_discriminant_with_derivative(t, a)[1]

    crit = _bisect(dgfun, lo, hi)
    gc = gfun(crit)
    closed = np.abs(gc) - 2.0 <= closed_gap_tol
    left_edge = _bisect(lambda t: np.abs(gfun(t)) - 2.0, lo, crit)  # right end of band i
    right_edge = _bisect(lambda t: np.abs(gfun(t)) - 2.0, crit, hi)  # left end of band i+1
    band_right = np.where(closed, crit, left_edge)
    next_left = np.where(closed, crit, right_edge)
    band_left = np.roll(next_left, 1)
    out = []
    for i in range(L):
        out.append(Band(float(band_left[i] % TWO_PI), float(band_right[i] % TWO_PI), float(z[i])))
    if L == 1 and closed[0]:
        out = [Band(float(crit[0] % TWO_PI), float(crit[0] % TWO_PI), float(z[0]))]
    return out


def gamma_n(band_list: list[Band]) -> complex:
    """(-1)^L times the product of the right endpoints, L = number of bands."""
    L = len(band_list)
    return complex((-1) ** L * np.prod(np.exp(1j * np.array([b.right for b in band_list]))))


def interlacing_check(first, second) -> bool:
    """True when the two equal-size angle sets alternate around the circle."""
    a = np.mod(np.asarray(first, dtype=float), TWO_PI)
    b = np.mod(np.asarray(second, dtype=float), TWO_PI)
    if len(a) != len(b):
        raise ValueError("interlacing needs equal counts")
    if len(a) == 1:
        return bool(a[0] != b[0])
    lab = np.concatenate([np.zeros(len(a)), np.ones(len(b))])
    allpts = np.concatenate([a, b])
    order = np.lexsort((lab, allpts))
    srt = lab[order]
    pts = allpts[order]
    if np.any(np.diff(pts) == 0):
        return False
    return bool(np.all(srt != np.roll(srt, 1)))


def fibonacci_couplings(pattern, omega: SubshiftPoint, L: int, tau: float = 1.0, kB: float = 1.0) -> IsingRing:
    """Ring with J_i = p(ω_i), i = 0..L-1; ``pattern`` maps 'a' and 'b' to couplings."""
    p = dict(pattern) if not isinstance(pattern, (tuple, list)) else {"a": pattern[0], "b": pattern[1]}
    for k in ("a", "b"):
        if np.real(p[k]) <= 0:
            raise ValueError(f"p({k}) must have positive real part")
    return IsingRing(np.array([p[c] for c in omega.window(0, L)], dtype=complex), tau, kB)


def ring_alphas(ring: IsingRing) -> np.ndarray:
    """Θβ for the ring."""
    return theta_inversion(ring.betas)


def in_band_fraction(angles, band_list: list[Band]) -> float:
    if len(angles) == 0:
        return 0.0
    hit = [any(b.contains(t, strict=False) for b in band_list) for t in angles]
    return float(np.mean(hit))


def dos_convergence(pattern, k_ladder, omegas=(), tau: float = 1.0, kB: float = 1.0, threads: int = 1) -> dict:
    """Distances between zero-counting measures along a ladder of L = F_k.

    ``successive`` holds Kolmogorov and Hausdorff distances between ν_{F_k}
    and ν_{F_{k+1}} for ω = u.  ``cross_omega`` compares ω = u against each
    ω in ``omegas`` at every k and flags whether ω's prefix of length F_k is
    repeatable.  ``in_band`` is the share of the F_k zeros lying in the
    bands of the last ladder entry.  Work is spread over ``threads`` workers;
    results do not depend on the count.
    """
    u = SubshiftPoint("shift", 0)
    ks = list(k_ladder)
    if len(ks) < 2:
        raise ValueError("need at least two ladder entries")
    jobs = [(u, k) for k in ks] + [(om, k) for om in omegas for k in ks]

    def zeros_for(job):
        om, k = job
        ring = fibonacci_couplings(pattern, om, fib_length(k), tau, kB)
        return zeros_on_circle(ring_alphas(ring), method="A").angles

    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        found = dict(zip(jobs, ex.map(zeros_for, jobs)))
    zs = {k: found[(u, k)] for k in ks}
    top = ks[-1]
    top_bands = bands(ring_alphas(fibonacci_couplings(pattern, u, fib_length(top), tau, kB)))
    successive = []
    for k0, k1 in zip(ks, ks[1:]):
        successive.append(
            {
                "k": k0,
                "k_next": k1,
                "kolmogorov": kolmogorov(zero_measure(zs[k0]), zero_measure(zs[k1])),
                "hausdorff": hausdorff(zs[k0], zs[k1]),
            }
        )
    cross = []
    for om in omegas:
        rep = set(repeatable_prefix_lengths(om, max(ks)))
        for k in ks:
            zk = found[(om, k)]
            cross.append(
                {
                    "omega": om.describe(),
                    "k": k,
                    "F_k": fib_length(k),
                    "repeatable": fib_length(k) in rep,
                    "kolmogorov": kolmogorov(zero_measure(zs[k]), zero_measure(zk)),
                    "hausdorff": hausdorff(zs[k], zk),
                }
            )
    frac = [{"k": k, "in_band_fraction": in_band_fraction(zs[k], top_bands)} for k in ks]
    return {"successive": successive, "cross_omega": cross, "in_band": frac}
