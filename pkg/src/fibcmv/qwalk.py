"""Coined quantum walk on the line, its CMV form, and spreading moments.

Basis relabeling: e_{2n} = |n, up>, e_{2n+1} = |n, down>.  One step sends
|n, up> to c11_n |n+1, up> + c21_n |n-1, down> and
|n, down> to c12_n |n+1, up> + c22_n |n-1, down>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cmv import VerblunskySequence, solution_norm, solution_sequence
from .errors import BoundaryContact
from .tracemap import CoinAngles
from .words import SubshiftPoint

Coin = np.ndarray
CoinMap = Callable[[int], Coin]


def rotation_coin(theta: float) -> Coin:
    """(cos θ, -sin θ; sin θ, cos θ)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def check_unitary(coin, tol=1e-12) -> None:
    coin = np.asarray(coin)
    if coin.shape != (2, 2) or np.abs(coin.conj().T @ coin - np.eye(2)).max() > tol:
        raise ValueError("coin is not a unitary 2x2 matrix")


def coin_assignment(omega: SubshiftPoint, angles: CoinAngles) -> CoinMap:
    """n -> C_{ω_n}, with C_a, C_b the rotations by θ_a, θ_b."""
    ca, cb = rotation_coin(angles.theta_a), rotation_coin(angles.theta_b)

    def coin_of(n: int) -> Coin:
        return ca if omega[n] == "a" else cb

    return coin_of


def coin_arrays(coin_of: CoinMap, sites: np.ndarray):
    """c11, c12, c21, c22 as arrays over the given sites."""
    cs = np.array([coin_of(int(n)) for n in sites], dtype=complex)
    return cs[:, 0, 0], cs[:, 0, 1], cs[:, 1, 0], cs[:, 1, 1]


class WalkState:
    """Amplitudes over sites -P..P; ``amp[n + P, s]`` with s = 0 up, 1 down."""

    def __init__(self, half_width: int, amp=None):
        self.P = int(half_width)
        self.amp = np.zeros((2 * self.P + 1, 2), dtype=complex) if amp is None else np.asarray(amp, dtype=complex)
        if self.amp.shape != (2 * self.P + 1, 2):
            raise ValueError("amplitude array has the wrong shape")

    @classmethod
    def basis(cls, m: int, half_width: int) -> "WalkState":
        """The state e_m."""
        st = cls(half_width)
        n, s = divmod(m, 2)
        if abs(n) > st.P:
            raise ValueError(f"e_{m} lies outside the window")
        st.amp[n + st.P, s] = 1.0
        return st

    @classmethod
    def from_vector(cls, vec: dict, half_width: int) -> "WalkState":
        st = cls(half_width)
        for m, v in vec.items():
            n, s = divmod(int(m), 2)
            st.amp[n + st.P, s] = v
        return st

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.P, self.P + 1)

    def e_indices(self) -> np.ndarray:
        """e-index of every entry of ``amp.ravel()``."""
        return (2 * self.sites[:, None] + np.arange(2)[None, :]).ravel()

    def e_vector(self) -> np.ndarray:
        """Amplitudes ordered by e-index from -2P to 2P+1."""
        return self.amp.ravel().copy()

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp) ** 2)))

    def support_radius(self) -> int:
        nz = np.nonzero(np.any(self.amp != 0, axis=1))[0]
        if len(nz) == 0:
            return 0
        return int(max(abs(nz[0] - self.P), abs(nz[-1] - self.P)))

    def copy(self) -> "WalkState":
        return WalkState(self.P, self.amp.copy())


class Walk:
    """A walk unitary on a fixed window, with coin arrays cached."""

    def __init__(self, coin_of: CoinMap, half_width: int):
        self.P = int(half_width)
        self.coin_of = coin_of
        self.c11, self.c12, self.c21, self.c22 = coin_arrays(coin_of, np.arange(-self.P, self.P + 1))

    def step(self, state: WalkState) -> WalkState:
        if state.P != self.P:
            raise ValueError("state and walk windows differ")
        a, b = state.amp[:, 0], state.amp[:, 1]
        if a[0] != 0 or a[-1] != 0 or b[0] != 0 or b[-1] != 0:
            raise BoundaryContact("walk state reached the window edge; enlarge the window")
        up = self.c11 * a + self.c12 * b
        down = self.c21 * a + self.c22 * b
        new = np.zeros_like(state.amp)
        new[1:, 0] = up[:-1]
        new[:-1, 1] = down[1:]
        return WalkState(self.P, new)


def step(state: WalkState, coin_of: CoinMap) -> WalkState:
    """One application of U on the state's window."""
    return Walk(coin_of, state.P).step(state)


def u_matrix_window(coin_of: CoinMap, rows: range, cols: range) -> np.ndarray:
    """Block of the walk matrix in the row-image convention.

    Entry (r, c) is the coefficient of e_c in U e_r, which is how the
    matrix of U is conventionally displayed next to the extended CMV matrix.
    """
    out = np.zeros((len(rows), len(cols)), dtype=complex)
    col_pos = {c: j for j, c in enumerate(cols)}
    for i, r in enumerate(rows):
        n, s = divmod(r, 2)
        C = coin_of(n)
        # image of |n, s>: C[0, s] at |n+1, up>, C[1, s] at |n-1, down>
        for target, val in ((2 * (n + 1), C[0, s]), (2 * (n - 1) + 1, C[1, s])):
            if target in col_pos:
                out[i, col_pos[target]] = val
    return out


def u_column_window(coin_of: CoinMap, rows: range, cols: range) -> np.ndarray:
    """Block of the matrix whose columns are the images U e_c."""
    return u_matrix_window(coin_of, cols, rows).T


class CgmvData:
    """Gauge phases λ_m and Verblunsky coefficients α_m for a coin map.

    λ_0 = λ_{-1} = 1, λ_{2n+2} = e^{-iσ¹_n} λ_{2n}, λ_{2n+1} = e^{iσ²_n} λ_{2n-1},
    with c^{kk}_n = |c^{kk}_n| e^{iσ^k_n}.  Then α_{2n+1} = 0 and
    α_{2n} = (λ_{2n}/λ_{2n-1}) conj(c21_n).
    """

    def __init__(self, coin_of: CoinMap):
        self.coin_of = coin_of
        self._lam = {0: 1.0 + 0j, -1: 1.0 + 0j}

    def _sigma(self, n: int, k: int) -> complex:
        c = complex(self.coin_of(n)[k - 1, k - 1])
        if c == 0:
            raise ValueError(f"coin {n} has a zero diagonal entry; the gauge phase is undefined")
        return c / abs(c)

    def lam(self, m: int) -> complex:
        m = int(m)
        if m in self._lam:
            return self._lam[m]
        if m % 2 == 0:
            n = m // 2
            if m > 0:
                val = self.lam(m - 2) / self._sigma(n - 1, 1)
            else:
                val = self.lam(m + 2) * self._sigma(n, 1)
        else:
            n = (m - 1) // 2
            if m > 0:
                val = self.lam(m - 2) * self._sigma(n, 2)
            else:
                val = self.lam(m + 2) / self._sigma(n + 1, 2)
        self._lam[m] = val
        return val

    def alpha(self, m: int) -> complex:
        m = int(m)
        if m % 2:
            return 0j
        n = m // 2
        return self.lam(m) / self.lam(m - 1) * complex(self.coin_of(n)[1, 0]).conjugate()

    def sequence(self) -> VerblunskySequence:
        return VerblunskySequence(self.alpha, two_sided=True)

    def gauge(self, idx: range) -> np.ndarray:
        return np.array([self.lam(m) for m in idx])


def cgmv_coefficients(coin_of: CoinMap) -> CgmvData:
    """λ and α for the coin map; see :class:`CgmvData`."""
    return CgmvData(coin_of)


def moment(state: WalkState, p: float) -> float:
    """Σ_m (1 + |m|^p) |<e_m, ψ>|² over the window."""
    prob = np.abs(state.amp.ravel()) ** 2
    m = np.abs(state.e_indices()).astype(float)
    return float(np.sum((1.0 + m**p) * prob))


@dataclass
class MomentSeries:
    """M(n, p) for n = 0..N-1 and the running means M̃(N, p)."""

    p: float
    M: np.ndarray

    @property
    def Mtilde(self) -> np.ndarray:
        return np.cumsum(self.M) / np.arange(1, len(self.M) + 1)

    def time_avg(self, N: int) -> float:
        return time_avg_moments(self.M, N)


def time_avg_moments(M, N: int) -> float:
    """(1/N) Σ_{n<N} M(n, p)."""
    M = np.asarray(M, dtype=float)
    if N < 1 or N > len(M):
        raise ValueError(f"N = {N} outside 1..{len(M)}")
    return float(np.mean(M[:N]))


def moment_series(coin_of: CoinMap, n_steps: int, ps=(2.0,), psi: dict | None = None, half_width: int | None = None):
    """Evolve ψ (default e_0) for n_steps - 1 steps and record M(n, p) for each p.

    The window half-width defaults to (initial support radius) + n_steps + 2,
    which the walk cannot leave.  Returns one MomentSeries per p.
    """
    psi = {0: 1.0} if psi is None else psi
    radius = max(abs(divmod(int(m), 2)[0]) for m in psi)
    P = radius + n_steps + 2 if half_width is None else half_width
    walk = Walk(coin_of, P)
    state = WalkState.from_vector(psi, P)
    nrm = state.norm()
    if nrm == 0:
        raise ValueError("initial state is zero")
    state.amp /= nrm
    m = np.abs(state.e_indices()).astype(float)
    weights = [1.0 + m**p for p in ps]
    out = np.empty((len(ps), n_steps))
    for t in range(n_steps):
        prob = np.abs(state.amp.ravel()) ** 2
        for i, w in enumerate(weights):
            out[i, t] = w @ prob
        if t + 1 < n_steps:
            state = walk.step(state)
    return [MomentSeries(float(p), out[i]) for i, p in enumerate(ps)]


def geometric_ladder(lo_exp: int = 4, hi_exp: int = 12) -> list[int]:
    return [2**j for j in range(lo_exp, hi_exp + 1)]


def empirical_exponent(Ns, Mtilde, p: float) -> dict:
    """Finite-N transport exponent estimates from M̃ on a geometric ladder.

    ``beta_tilde_fit`` is the least-squares slope of log M̃ against p log N
    over the upper half of the ladder; ``beta_minus`` and ``beta_plus`` are
    the smallest and largest slopes between neighbouring ladder points in
    that half.
    """
    Ns = np.asarray(Ns, dtype=float)
    Mt = np.asarray(Mtilde, dtype=float)
    if len(Ns) < 4 or len(Ns) != len(Mt):
        raise ValueError("empirical_exponent needs at least 4 ladder points")
    start = len(Ns) - (len(Ns) + 1) // 2
    x = p * np.log(Ns[start:])
    y = np.log(Mt[start:])
    slope = float(np.polyfit(x, y, 1)[0])
    pair = np.diff(y) / np.diff(x)
    return {"p": p, "beta_tilde_fit": slope, "beta_minus": float(pair.min()), "beta_plus": float(pair.max())}


def fibonacci_alphas(omega: SubshiftPoint, angles: CoinAngles, n: int) -> np.ndarray:
    """α_0..α_{n-1} with α_{2j} = sin θ_{ω_j} and odd entries zero."""
    out = np.zeros(n)
    letters = omega.window(0, (n + 1) // 2)
    out[0::2] = [math.sin(angles.theta(c)) for c in letters]
    return out


def norm_powerlaw_check(z: complex, omega: SubshiftPoint, angles: CoinAngles, L_ladder, slack: float = 0.1) -> dict:
    """Fit the growth exponent of ‖ξ‖_L and compare it with [γ1 - slack, 2γ2 + 1 + slack]."""
    from .tracemap import transport_constants

    L_ladder = np.asarray(L_ladder, dtype=float)
    if len(L_ladder) < 3:
        raise ValueError("L ladder too short")
    n = int(math.floor(L_ladder.max())) + 2
    xi, _ = solution_sequence(z, fibonacci_alphas(omega, angles, n), (1.0, 1.0), n)
    norms = np.array([solution_norm(xi, L) for L in L_ladder])
    slope = float(np.polyfit(np.log(L_ladder), np.log(norms), 1)[0])
    tb = transport_constants(z, angles)
    lo, hi = tb.gamma1 - slack, 2 * tb.gamma2 + 1 + slack
    return {"exponent": slope, "lower": lo, "upper": hi, "ok": bool(lo <= slope <= hi), "norms": norms}
