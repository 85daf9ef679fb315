"""Fibonacci trace map, Fricke-Vogt invariant, spectrum masks, transport constants.

Half-traces are normalized to be real on the unit circle:
x_k(z) = ½ z^{-F_k} Tr M_k(z), with M_k the transfer product over the
zero-interleaved block of S^k(a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cmv import opnorm2
from .errors import CapExceeded, NumericalInconsistency
from .words import GOLDEN, fib_length, fib_word, length_cap

PHI = GOLDEN
OVERFLOW = 1e150


@dataclass(frozen=True)
class CoinAngles:
    """Rotation angles θ_a, θ_b, each strictly inside (-π/2, π/2)."""

    theta_a: float
    theta_b: float

    def __post_init__(self):
        for name in ("theta_a", "theta_b"):
            t = getattr(self, name)
            if not -math.pi / 2 < t < math.pi / 2:
                raise ValueError(f"{name} = {t} is outside (-π/2, π/2)")

    def theta(self, letter: str) -> float:
        return self.theta_a if letter == "a" else self.theta_b

    @property
    def sec_a(self):
        return 1.0 / math.cos(self.theta_a)

    @property
    def sec_b(self):
        return 1.0 / math.cos(self.theta_b)


@dataclass(frozen=True)
class TraceTriple:
    """(x_{k-1}, x_k, x_{k+1}) at index k."""

    x_prev: float
    x: float
    x_next: float
    k: int = 0

    def as_tuple(self):
        return (self.x_prev, self.x, self.x_next)


def _check_circle(z, tol=1e-12):
    if np.any(np.abs(np.abs(z) - 1.0) > tol):
        raise ValueError("z must lie on the unit circle")


def initial_traces(z, angles: CoinAngles):
    """x_{-1}, x_0, x_1 at z (scalar or array), as a TraceTriple or three arrays.

    x_1 = ℜ(z²) sec θ_a sec θ_b + tan θ_a tan θ_b, which is what the block
    products give.
    """
    _check_circle(z)
    c = np.real(z)
    c2 = np.real(np.asarray(z) ** 2)
    sa, sb = angles.sec_a, angles.sec_b
    xm1 = c * sb
    x0 = c * sa
    x1 = c2 * sa * sb + math.tan(angles.theta_a) * math.tan(angles.theta_b)
    if np.ndim(z) == 0:
        return TraceTriple(float(xm1), float(x0), float(x1), k=0)
    return xm1, x0, x1


def fricke_vogt(x1, x0, xm1):
    """I = x_1² + x_0² + x_{-1}² - 2 x_1 x_0 x_{-1} - 1."""
    return x1 * x1 + x0 * x0 + xm1 * xm1 - 2.0 * x1 * x0 * xm1 - 1.0


def fricke_vogt_expanded(z, angles: CoinAngles):
    """The invariant written directly in (z, θ_a, θ_b)."""
    c = np.real(z)
    c2 = np.real(np.asarray(z) ** 2)
    sa, sb = angles.sec_a, angles.sec_b
    ta, tb = math.tan(angles.theta_a), math.tan(angles.theta_b)
    s = math.sin(angles.theta_a) * math.sin(angles.theta_b)
    return c**2 * (sa**2 + sb**2) + (c2 * sa * sb + ta * tb) ** 2 - 2 * c**2 * sa**2 * sb**2 * (c2 + s) - 1.0


@dataclass
class TraceOrbit:
    """x_{-1}, x_0, ..., up to k_max or the overflow stop.

    ``values[k + 1]`` is x_k.  ``escape_index`` is the first j at which the
    escape test fired, or None.
    """

    values: np.ndarray
    k_max: int
    escaped: bool
    escape_index: int | None
    overflowed: bool

    def x(self, k: int) -> float:
        return float(self.values[k + 1])

    def invariants(self) -> np.ndarray:
        v = self.values
        return fricke_vogt(v[2:], v[1:-1], v[:-2])


def _escape_at(xp, x, xn):
    """|x_j| > 1, |x_{j+1}| > 1 and |x_{j+1}| > |x_{j-1}|: the orbit is unbounded."""
    ax, an = np.abs(x), np.abs(xn)
    return (ax > 1.0) & (an > 1.0) & (an > np.abs(xp))


def trace_orbit(triple: TraceTriple | tuple, k_max: int) -> TraceOrbit:
    """Iterate x_{k+1} = 2 x_k x_{k-1} - x_{k-2} from (x_{-1}, x_0, x_1)."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    xm1, x0, x1 = triple.as_tuple() if isinstance(triple, TraceTriple) else triple
    vals = [float(xm1), float(x0), float(x1)]
    overflowed = False
    for _ in range(2, k_max + 1):
        nxt = 2.0 * vals[-1] * vals[-2] - vals[-3]
        if not abs(nxt) <= OVERFLOW:
            overflowed = True
            break
        vals.append(nxt)
    v = np.array(vals)
    esc = None
    for j in range(0, len(v) - 2):
        if _escape_at(v[j], v[j + 1], v[j + 2]):
            esc = j
            break
    return TraceOrbit(v, k_max, esc is not None or overflowed, esc, overflowed)


def _orbit_grid(xm1, x0, x1, k_max):
    """Vectorized orbit; rows are x_{-1}..x_{k_max}; overflowed entries become nan."""
    out = np.empty((k_max + 2,) + np.shape(x0))
    out[0], out[1], out[2] = xm1, x0, x1
    with np.errstate(over="ignore", invalid="ignore"):
        for r in range(3, k_max + 2):
            nxt = 2.0 * out[r - 1] * out[r - 2] - out[r - 3]
            out[r] = np.where(np.abs(nxt) <= OVERFLOW, nxt, np.nan)
    return out


def escape_depth(z, angles: CoinAngles, k_max: int) -> np.ndarray:
    """First j ≤ k_max - 1 at which the escape test fires, or -1 if none."""
    grid = _orbit_grid(*initial_traces(np.atleast_1d(z), angles), k_max)
    first = np.full(grid.shape[1:], -1, dtype=int)
    with np.errstate(invalid="ignore"):
        for j in range(0, k_max):
            xp, x, xn = grid[j], grid[j + 1], grid[j + 2]
            hit = _escape_at(xp, x, xn) | np.isnan(xn)
            first = np.where((first < 0) & hit, j, first)
    return first


def _block(angles: CoinAngles, k: int) -> np.ndarray:
    """The Verblunsky block s̃_k: sin θ of each letter of S^k(a) followed by a 0."""
    w = fib_word(k)
    out = np.zeros(2 * len(w))
    out[0::2] = [math.sin(angles.theta(c)) for c in w]
    return out


def half_trace_direct(z, angles: CoinAngles, k: int, check_real: bool = True, tol: float = 1e-9):
    """½ z^{-F_k} Tr T(z, s̃_k) by explicit multiplication of 2F_k transfer matrices.

    Vectorized over ``z``.  Raises ``NumericalInconsistency`` when the
    imaginary part exceeds ``tol`` relative to max(1, |x|).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if 2 * fib_length(k) > length_cap():
        raise CapExceeded(f"block length 2F_{k} exceeds the length cap")
    z = np.asarray(z, dtype=complex)
    _check_circle(z)
    zinv = 1.0 / z
    m00 = np.ones_like(z)
    m01 = np.zeros_like(z)
    m10 = np.zeros_like(z)
    m11 = np.ones_like(z)
    for step, a in enumerate(_block(angles, k)):
        r = math.sqrt(1.0 - a * a)
        # T(z, a) with real a; every second step removes one factor of z
        t00, t01, t10, t11 = z / r, -a / r, -a * z / r, 1.0 / r
        if step % 2 == 1:
            t00, t01, t10, t11 = t00 * zinv, t01 * zinv, t10 * zinv, t11 * zinv
        m00, m01, m10, m11 = (
            t00 * m00 + t01 * m10,
            t00 * m01 + t01 * m11,
            t10 * m00 + t11 * m10,
            t10 * m01 + t11 * m11,
        )
    half = 0.5 * (m00 + m11)
    if check_real:
        bad = np.abs(half.imag) > tol * np.maximum(1.0, np.abs(half.real))
        if np.any(bad):
            raise NumericalInconsistency(f"half-trace has imaginary part {np.abs(half.imag).max():.3e}")
    out = half.real
    return float(out) if out.ndim == 0 else out


def trace_sup_bound(z, angles: CoinAngles):
    """C(z) = max{2 + √(8 + I(z)), sec θ_a, sec θ_b}."""
    xm1, x0, x1 = initial_traces(np.atleast_1d(z), angles)
    inv = fricke_vogt(x1, x0, xm1)
    if np.any(inv < -8):
        raise NumericalInconsistency("Fricke-Vogt invariant below -8 on the unit circle")
    c = np.maximum(2.0 + np.sqrt(8.0 + inv), max(angles.sec_a, angles.sec_b))
    return float(c[0]) if np.ndim(z) == 0 else c


def nests_matrices(z: complex, angles: CoinAngles):
    """A(z), B(z), T(z) = diag(z, 1)."""

    def rot(theta):
        s = math.sin(theta)
        return np.array([[z, -s], [-z * s, 1.0]], dtype=complex) / math.cos(theta)

    return rot(angles.theta_a), rot(angles.theta_b), np.diag([z, 1.0]).astype(complex)


def nests_norms(z: complex, angles: CoinAngles) -> tuple[float, float, float]:
    """Operator norms of TA, TBTA and TATBTA."""
    A, B, T = nests_matrices(z, angles)
    ta = T @ A
    tbta = T @ B @ ta
    tatbta = T @ A @ tbta
    return float(opnorm2(ta)), float(opnorm2(tbta)), float(opnorm2(tatbta))


def nests_bounds(angles: CoinAngles) -> dict:
    """Closed-form values to compare nests_norms against.

    ``ta_measured_form`` is sec θ_a (1 + |sin θ_a|), the exact norm of TA;
    ``ta_stated_form`` is sec θ_a (1 + |sin θ_a|)², an upper bound for it.
    """
    sa, sb = angles.sec_a, angles.sec_b
    s = abs(math.sin(angles.theta_a))
    return {
        "ta_measured_form": sa * (1 + s),
        "ta_stated_form": sa * (1 + s) ** 2,
        "tbta_bound": 12.0 * (sa * sb) ** 1.5,
        "tatbta_bound": 48.0 * sa**2.5 * sb**1.5,
    }


@dataclass
class TransportBound:
    z: complex
    I: float
    C: float
    gamma1: float
    K: float
    gamma2: float
    beta: float
    norms: tuple = field(default=(1.0, 1.0, 1.0))
    sound: bool = True

    def as_dict(self):
        return {
            "z": self.z,
            "I": self.I,
            "C": self.C,
            "gamma1": self.gamma1,
            "K": self.K,
            "gamma2": self.gamma2,
            "beta": self.beta,
            "sound": self.sound,
        }


def dkl_scaling_exponent(gamma_lower: float, gamma_upper: float) -> float:
    """2γ_l / (γ_l + γ_u)."""
    if gamma_lower <= 0 or gamma_upper <= 0:
        raise ValueError("both exponents must be positive")
    return 2.0 * gamma_lower / (gamma_lower + gamma_upper)


def transport_constants(z: complex, angles: CoinAngles, depth: int = 12) -> TransportBound:
    """I, C, γ1, K, γ2, β at z, with sup_k |x_k| replaced by C(z).

    ``sound`` is False when the orbit at z escapes within ``depth`` steps,
    i.e. z is outside the spectrum approximation.
    """
    _check_circle(z)
    t = initial_traces(z, angles)
    inv = float(fricke_vogt(t.x_next, t.x, t.x_prev))
    C = float(trace_sup_bound(z, angles))
    gamma1 = math.log1p(1.0 / (4.0 * C * C)) / (16.0 * math.log(PHI))
    norms = nests_norms(z, angles)
    m = max(1.0, C)
    K = max(8.0 * m, 4.0 * norms[0], 4.0 * norms[1], 4.0 * norms[2]) * (4.0 + 4.0 * m)
    gamma2 = 4.0 * math.log2(K)
    beta = 2.0 * gamma1 / (gamma1 + 2.0 * gamma2 + 1.0)
    sound = bool(escape_depth(z, angles, depth)[0] < 0)
    return TransportBound(complex(z), inv, C, gamma1, K, gamma2, beta, norms, sound)


@dataclass
class SpectrumApprox:
    """Grid mask of points whose trace orbit has not escaped by ``depth``."""

    angles: CoinAngles
    depth: int
    grid: int
    theta: np.ndarray
    mask: np.ndarray

    @property
    def fraction(self) -> float:
        return float(self.mask.mean())

    def arcs(self) -> list[tuple[float, float]]:
        """Maximal runs of in-spectrum grid angles as (start, end), wrapping at 2π."""
        m = self.mask
        n = len(m)
        if not m.any():
            return []
        if m.all():
            return [(0.0, 2 * math.pi)]
        # rotate so that index 0 is outside the spectrum
        off = int(np.argmin(m))
        rolled = np.roll(m, -off)
        out = []
        i = 0
        while i < n:
            if rolled[i]:
                j = i
                while j + 1 < n and rolled[j + 1]:
                    j += 1
                out.append((self.theta[(i + off) % n], self.theta[(j + off) % n]))
                i = j + 1
            else:
                i += 1
        return sorted(out)

    def points(self) -> np.ndarray:
        return np.exp(1j * self.theta[self.mask])


def spectrum_approx(angles: CoinAngles, depth: int, grid: int) -> SpectrumApprox:
    """Mark grid angles 2πj/M whose trace orbit does not escape by step ``depth``."""
    if grid < 1000 or depth < 3:
        raise ValueError("spectrum_approx needs grid >= 1000 and depth >= 3")
    theta = 2 * math.pi * np.arange(grid) / grid
    mask = escape_depth(np.exp(1j * theta), angles, depth) < 0
    return SpectrumApprox(angles, depth, grid, theta, mask)


def transport_constants_grid(z, angles: CoinAngles) -> dict:
    """Vectorized I, C, γ1, K, γ2, β over an array of unit-circle points."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_circle(z)
    xm1, x0, x1 = initial_traces(z, angles)
    inv = fricke_vogt(x1, x0, xm1)
    C = trace_sup_bound(z, angles)
    gamma1 = np.log1p(1.0 / (4.0 * C * C)) / (16.0 * math.log(PHI))
    A, B, T = _nests_stack(z, angles)
    ta = T @ A
    tbta = T @ B @ ta
    tatbta = T @ A @ tbta
    m = np.maximum(1.0, C)
    K = np.maximum.reduce([8.0 * m, 4.0 * opnorm2(ta), 4.0 * opnorm2(tbta), 4.0 * opnorm2(tatbta)]) * (4.0 + 4.0 * m)
    gamma2 = 4.0 * np.log2(K)
    beta = 2.0 * gamma1 / (gamma1 + 2.0 * gamma2 + 1.0)
    return {"I": inv, "C": C, "gamma1": gamma1, "K": K, "gamma2": gamma2, "beta": beta}


def _nests_stack(z, angles: CoinAngles):
    n = len(z)

    def rot(theta):
        s = math.sin(theta)
        m = np.empty((n, 2, 2), dtype=complex)
        m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1] = z, -s, -z * s, 1.0
        return m / math.cos(theta)

    T = np.zeros((n, 2, 2), dtype=complex)
    T[:, 0, 0], T[:, 1, 1] = z, 1.0
    return rot(angles.theta_a), rot(angles.theta_b), T


def bound_over_support(angles: CoinAngles, z_samples) -> float:
    """max β(z) over the samples."""
    zs = np.atleast_1d(np.asarray(z_samples, dtype=complex))
    if zs.size == 0:
        raise ValueError("no sample points")
    return float(np.max(transport_constants_grid(zs, angles)["beta"]))
