"""Invariant suites with measured residuals, used by ``fibcmv verify``."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import cmv, ising, qwalk, roots, tracemap, words
from .measures import hausdorff


@dataclass
class Check:
    suite: str
    name: str
    measured: float
    tolerance: float
    passed: bool

    def as_dict(self):
        return asdict(self)


def _check(suite, name, measured, tol, le=True):
    measured = float(measured)
    ok = measured <= tol if le else measured >= tol
    return Check(suite, name, measured, float(tol), bool(ok))


def suite_words(rng, quick):
    out = []
    kmax = 7 if quick else 10
    top = words.fib_length(kmax)
    bad = 0
    for ell in range(1, top + 1):
        if len(words.factors(ell)) != ell + 1:
            bad += 1
    out.append(_check("words", f"factor count l+1 for l <= {top}", bad, 0))
    bad = 0
    for k in range(2, kmax + 1):
        try:
            words.factor_census(k)
        except Exception:
            bad += 1
    out.append(_check("words", f"one nonrepeatable factor, k = 2..{kmax}", bad, 0))
    bad = 0
    for j in range(20):
        for pt in (words.SubshiftPoint("shift", j), words.SubshiftPoint("rotation", j / 20)):
            if not words.is_factor(pt.window(-50, 50)):
                bad += 1
    out.append(_check("words", "subshift windows are factors", bad, 0))
    return out


def _rand_disc(rng, n):
    r = 0.95 * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))


def _rand_phase_word(rng, n):
    """Real word in (-0.95, 0.95) times one common phase; walk-derived words are of this kind."""
    return rng.uniform(-0.95, 0.95, n) * np.exp(2j * np.pi * rng.uniform())


def suite_cmv(rng, quick):
    out = []
    draws = 20 if quick else 100
    worst = 0.0
    for a in _rand_disc(rng, draws):
        z = np.exp(2j * np.pi * rng.uniform())
        worst = max(worst, abs(np.linalg.det(cmv.transfer_single(z, a)) - z))
    out.append(_check("cmv", "det T(z, a) = z", worst, 1e-12))
    worst = 0.0
    for _ in range(draws):
        z = np.exp(2j * np.pi * rng.uniform())
        w = _rand_disc(rng, rng.integers(1, 17))
        T = cmv.transfer_word(z, w)
        worst = max(worst, abs(np.linalg.det(T) - z ** len(w)) / cmv.opnorm2(T) ** 2)
    out.append(_check("cmv", "det T(z, w) = z^|w|, relative to |T|^2", worst, 1e-12))
    worst = 0.0
    n = 200 if quick else 1000
    for _ in range(10 if quick else 50):
        z = np.exp(2j * np.pi * rng.uniform())
        a = _rand_disc(rng, n) * 0.8
        init = np.exp(2j * np.pi * rng.uniform(size=2))
        xi, zeta = cmv.solution_sequence(z, a, init, n)
        worst = max(worst, float(np.max(np.abs(np.abs(xi) - np.abs(zeta)) / np.maximum(1, np.abs(xi)))))
    out.append(_check("cmv", "|xi_n| = |zeta_n|", worst, 1e-10))
    worst = 0.0
    for _ in range(draws):
        z = np.exp(2j * np.pi * rng.uniform())
        w = _rand_phase_word(rng, rng.integers(1, 17))
        p, q = cmv.reversal_norm_pair(z, w)
        worst = max(worst, abs(p - q) / p)
    out.append(_check("cmv", "reversal norm equality, common-phase words", worst, 1e-10))
    worst = 0.0
    for deg in (5, 20, 64):
        c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        r = roots.poly_roots(c)
        worst = max(worst, abs(r.sum() + c[-2] / c[-1]), abs(np.prod(r) - (-1) ** deg * c[0] / c[-1]) / abs(c[0] / c[-1]))
    out.append(_check("cmv", "poly_roots Vieta sum/product", worst, 1e-8))
    return out


def suite_trace(rng, quick, threads=1):
    out = []
    ang = tracemap.CoinAngles(math.pi / 3, math.pi / 6)
    npts = 20 if quick else 100
    kmax = 8 if quick else 12
    z = np.exp(2j * np.pi * rng.uniform(size=npts))
    xm1, x0, x1 = tracemap.initial_traces(z, ang)

    def one(k):
        d = tracemap.half_trace_direct(z, ang, k)
        w = 0.0
        for i in range(npts):
            o = tracemap.trace_orbit((xm1[i], x0[i], x1[i]), max(kmax, 1))
            if k + 1 < len(o.values):
                w = max(w, abs(d[i] - o.values[k + 1]) / max(1.0, abs(o.values[k + 1])))
        return w

    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        worst = max(ex.map(one, range(kmax + 1)))
    out.append(_check("trace", f"trace_orbit = half_trace_direct, k <= {kmax}", worst, 1e-9))
    worst = 0.0
    for i in range(npts):
        o = tracemap.trace_orbit((xm1[i], x0[i], x1[i]), 20)
        stop = o.escape_index + 2 if o.escape_index is not None else len(o.values)
        inv = o.invariants()[: max(1, stop - 2)]
        worst = max(worst, float(np.max(np.abs(inv - inv[0]))) / (1 + abs(inv[0])))
    out.append(_check("trace", "Fricke-Vogt drift, k <= 20 before escape", worst, 1e-8))
    sp = tracemap.spectrum_approx(ang, 12, 2000)
    worst = 0.0
    for zz in sp.points()[:: max(1, len(sp.points()) // 50)]:
        o = tracemap.trace_orbit(tracemap.initial_traces(zz, ang), 25)
        worst = max(worst, float(np.max(np.abs(o.values[: (o.escape_index or len(o.values))]))) - tracemap.trace_sup_bound(zz, ang))
    out.append(_check("trace", "sup |x_k| - C(z) on spectrum samples", worst, 0.0))
    out.extend(nests_checks(rng, 20 if quick else 100))
    return out


def nests_checks(rng, draws):
    """Norm inequalities for TBTA and TATBTA, and TA against both closed forms."""
    worst2 = worst3 = worst_eq = worst_st = -np.inf
    for _ in range(draws):
        z = np.exp(2j * np.pi * rng.uniform())
        ang = tracemap.CoinAngles(*rng.uniform(-1.5, 1.5, 2))
        ta, tbta, tatbta = tracemap.nests_norms(z, ang)
        b = tracemap.nests_bounds(ang)
        worst2 = max(worst2, tbta - b["tbta_bound"])
        worst3 = max(worst3, tatbta - b["tatbta_bound"])
        worst_eq = max(worst_eq, abs(ta - b["ta_measured_form"]) / ta)
        worst_st = max(worst_st, ta - b["ta_stated_form"])
    return [
        _check("trace", "|TBTA| - 12 (sec a sec b)^1.5", worst2, 0.0),
        _check("trace", "|TATBTA| - 48 sec a^2.5 sec b^1.5", worst3, 0.0),
        _check("trace", "|TA| vs sec a (1 + |sin a|)", worst_eq, 1e-12),
        _check("trace", "|TA| - sec a (1 + |sin a|)^2", worst_st, 0.0),
    ]


def suite_qwalk(rng, quick):
    out = []
    ang = tracemap.CoinAngles(math.pi / 3, math.pi / 6)
    worst = 0.0
    for om in ("u", "shift:1", "shift:2", "shift:5"):
        co = qwalk.coin_assignment(words.SubshiftPoint.parse(om), ang)
        d = qwalk.cgmv_coefficients(co)
        R = range(-32, 32)
        worst = max(worst, float(np.abs(qwalk.u_matrix_window(co, R, R) - cmv.extended_cmv_window(d.alpha, R, R)).max()))
    out.append(_check("qwalk", "U window = extended CMV window", worst, 1e-12))
    worst = max(abs(d.lam(m) - 1) for m in range(-64, 64))
    out.append(_check("qwalk", "gauge lambda = 1 for rotation coins", worst, 1e-15))
    co = qwalk.coin_assignment(words.SubshiftPoint("u"), ang)
    walk = qwalk.Walk(co, 30)
    worst = 0.0
    for _ in range(20 if quick else 100):
        st = qwalk.WalkState(30)
        st.amp[10:50] = rng.normal(size=(40, 2)) + 1j * rng.normal(size=(40, 2))
        worst = max(worst, abs(walk.step(st).norm() - st.norm()) / st.norm())
    out.append(_check("qwalk", "unitarity of one step", worst, 1e-12))
    R = range(-20, 20)
    D = qwalk.u_matrix_window(co, R, R)
    band = np.abs(np.subtract.outer(np.arange(40), np.arange(40))) > 2
    out.append(_check("qwalk", "locality |m - k| > 2 gives zero", float(np.abs(D[band]).max()), 0.0))
    free = qwalk.coin_assignment(words.SubshiftPoint("u"), tracemap.CoinAngles(0.0, 0.0))
    n = 64 if quick else 256
    s = qwalk.moment_series(free, n, ps=(2.0,))[0]
    out.append(_check("qwalk", "ballistic M(n,2) = 1 + (2n)^2", float(np.abs(s.M - (1 + (2 * np.arange(n)) ** 2)).max()), 0.0))
    return out


def suite_ising(rng, quick):
    out = []
    worst = 0.0
    for _ in range(20 if quick else 100):
        L = int(rng.integers(1, 13))
        J = rng.uniform(0.01, 2, L) + (1j * rng.uniform(-2, 2, L) if rng.uniform() < 0.5 else 0)
        ring = ising.IsingRing(J, tau=rng.uniform(0.5, 2))
        h = np.exp(2j * np.pi * rng.uniform()) * rng.uniform(0.5, 2)
        a, b = ising.partition_bruteforce(ring, h), ising.partition_transfer(ring, h)
        worst = max(worst, abs(a - b) / abs(a))
    out.append(_check("ising", "brute force = transfer trace", worst, 1e-10))
    worst = 0.0
    gap = np.inf
    for L in ((13, 21) if quick else (13, 21, 34, 55)):
        ring = ising.fibonacci_couplings((1.0, 0.5), words.SubshiftPoint("u"), L)
        al = ising.ring_alphas(ring)
        za = ising.partition_zeros(ring, "Z").angles
        zt = ising.partition_zeros(ring, "Ztilde").angles
        zd = ising.zeros_on_circle(al, method="B").angles
        worst = max(worst, hausdorff(za, zt), hausdorff(zt, zd), hausdorff(za, zd))
        gap = min(gap, ising.zeros_on_circle(al, method="A").min_gap())
    out.append(_check("ising", "zeros of Z, Z~, Delta coincide", worst, 1e-8))
    out.append(_check("ising", "zeros simple (min gap)", gap, 1e-9, le=False))
    return out


SUITES = {
    "words": suite_words,
    "cmv": suite_cmv,
    "trace": suite_trace,
    "qwalk": suite_qwalk,
    "ising": suite_ising,
}


def run_suites(selector: str = "all", quick: bool = False, seed: int = 0, threads: int = 1) -> list[Check]:
    """Run the named suite (or all of them) with a seeded generator per suite."""
    names = list(SUITES) if selector == "all" else [selector]
    out = []
    for i, name in enumerate(names):
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
        rng = np.random.default_rng([seed, i])
        fn = SUITES[name]
        out.extend(fn(rng, quick, threads) if name == "trace" else fn(rng, quick))
    return out


def format_table(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'suite':<7} {'check':<{width}} {'measured':>12} {'tolerance':>10}  result"]
    for c in checks:
        lines.append(f"{c.suite:<7} {c.name:<{width}} {c.measured:>12.3e} {c.tolerance:>10.1e}  {'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
