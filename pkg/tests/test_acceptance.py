"""Acceptance criteria, one test per criterion, each printing a single PASS/FAIL line."""

import math
import time

import numpy as np

from fibcmv import cmv, ising, qwalk, tracemap, verify, words
from fibcmv.measures import hausdorff

U = words.SubshiftPoint("u")
FIB = tracemap.CoinAngles(math.pi / 3, math.pi / 6)
FREE = tracemap.CoinAngles(0.0, 0.0)
PATTERN = (1.0, 0.5)


def _report(n, title, ok, detail, elapsed):
    print(f"criterion {n} {'PASS' if ok else 'FAIL'}: {title}; {detail}; {elapsed:.2f} s")
    return ok


def test_criterion_1_ising_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for i in range(100):
        L = int(rng.integers(1, 13))
        J = rng.uniform(0, 2, L)
        J = np.where(J == 0, 2.0, J)
        if i % 2:
            J = J + 1j * rng.uniform(-2, 2, L)
        ring = ising.IsingRing(J, tau=rng.uniform(0.5, 2.0))
        h = rng.uniform(0.2, 3.0) * np.exp(2j * np.pi * rng.uniform())
        a, b = ising.partition_bruteforce(ring, h), ising.partition_transfer(ring, h)
        worst = max(worst, abs(a - b) / abs(a))
    dt = time.perf_counter() - t0
    ok = _report(1, "brute force vs transfer, 100 rings", worst <= 1e-10 and dt < 10, f"max rel err {worst:.2e} (tol 1e-10)", dt)
    assert ok


def _raw_root_modulus(coeffs):
    """Max | |r| - 1 | over roots found without projection onto the circle."""
    from fibcmv.roots import poly_roots

    return float(np.abs(np.abs(poly_roots(coeffs, on_circle=False)) - 1).max())


def test_criterion_2_zero_chain():
    t0 = time.perf_counter()
    worst_h = worst_mod = 0.0
    gap = np.inf
    for L in (13, 21, 34, 55):
        ring = ising.fibonacci_couplings(PATTERN, U, L)
        al = ising.ring_alphas(ring)
        z = ising.partition_zeros(ring, "Z")
        zt = ising.partition_zeros(ring, "Ztilde")
        zd = ising.zeros_on_circle(al, method="B")
        worst_h = max(worst_h, hausdorff(z.angles, zt.angles), hausdorff(zt.angles, zd.angles), hausdorff(z.angles, zd.angles))
        worst_mod = max(worst_mod, _raw_root_modulus(ising.tilde_polynomial(ring)), _raw_root_modulus(ising.discriminant_poly(al)))
        gap = min(gap, z.min_gap(), zt.min_gap(), zd.min_gap())
    dt = time.perf_counter() - t0
    ok = worst_h <= 1e-8 and worst_mod <= 1e-8 and gap > 1e-6 and dt < 30
    detail = f"Hausdorff {worst_h:.2e}, off-circle {worst_mod:.2e}, min gap {gap:.3e}, L = 13, 21, 34, 55"
    assert _report(2, "zeros of Z, Z~, Delta(Theta) coincide", ok, detail, dt)


def test_criterion_3_trace_map_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    z = np.exp(2j * np.pi * rng.uniform(size=100))
    xm1, x0, x1 = tracemap.initial_traces(z, FIB)
    orbits = [tracemap.trace_orbit((xm1[i], x0[i], x1[i]), 20) for i in range(100)]
    worst = 0.0
    for k in range(13):
        d = tracemap.half_trace_direct(z, FIB, k)
        for i, o in enumerate(orbits):
            if k + 1 < len(o.values):
                v = o.values[k + 1]
                worst = max(worst, abs(d[i] - v) / max(1.0, abs(v)))
    drift = 0.0
    for o in orbits:
        stop = o.escape_index + 2 if o.escape_index is not None else len(o.values)
        inv = o.invariants()[: max(1, stop - 2)]
        drift = max(drift, float(np.max(np.abs(inv - inv[0]))) / (1 + abs(inv[0])))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and drift <= 1e-8 and dt < 10
    assert _report(3, "trace_orbit = half_trace_direct, invariant drift", ok, f"oracle {worst:.2e} (1e-9), drift {drift:.2e} (1e-8)", dt)


def test_criterion_4_cgmv_identity():
    t0 = time.perf_counter()
    R = range(-32, 32)
    worst = lam = 0.0
    for om in ("u", "shift:1", "shift:2", "shift:5"):
        co = qwalk.coin_assignment(words.SubshiftPoint.parse(om), FIB)
        d = qwalk.cgmv_coefficients(co)
        worst = max(worst, float(np.abs(qwalk.u_matrix_window(co, R, R) - cmv.extended_cmv_window(d.alpha, R, R)).max()))
        lam = max(lam, max(abs(d.lam(m) - 1) for m in range(-64, 64)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and lam <= 1e-15
    assert _report(4, "walk window = extended CMV window, lambda = 1", ok, f"entrywise {worst:.2e} (1e-12), |lambda - 1| {lam:.1e}", dt)


def _running_max_norms(z, alphas):
    T = np.eye(2, dtype=complex)
    out = [1.0]
    for a in alphas:
        T = cmv.transfer_single(z, a) @ T
        out.append(float(cmv.opnorm2(T)))
    return np.maximum.accumulate(out)


def test_criterion_5_transfer_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(505)
    det1 = max(abs(np.linalg.det(cmv.transfer_single(z, a)) - z) for z, a in zip(np.exp(2j * np.pi * rng.uniform(size=200)), verify._rand_disc(rng, 200)))
    alphas = qwalk.fibonacci_alphas(U, FIB, 1000)
    moduli = 0.0
    for zz in np.exp(2j * np.pi * rng.uniform(size=20)):
        xi, zeta = cmv.solution_sequence(zz, alphas, (1, 1), 1000)
        moduli = max(moduli, float(np.max(np.abs(np.abs(xi) - np.abs(zeta)) / _running_max_norms(zz, alphas))))
    rev = 0.0
    for _ in range(100):
        zz = np.exp(2j * np.pi * rng.uniform())
        p, q = cmv.reversal_norm_pair(zz, verify._rand_phase_word(rng, int(rng.integers(1, 17))))
        rev = max(rev, abs(p - q) / p)
    nests = verify.nests_checks(rng, 100)
    by = {c.name: c for c in nests}
    ta_ok = by["|TBTA| - 12 (sec a sec b)^1.5"].passed and by["|TATBTA| - 48 sec a^2.5 sec b^1.5"].passed
    ta = tracemap.nests_norms(1j, FIB)[0]
    forms = tracemap.nests_bounds(FIB)
    dt = time.perf_counter() - t0
    print(
        f"  |TA| at z = i, theta_a = pi/3: measured {ta:.15f}, sec(1 + |sin|) {forms['ta_measured_form']:.15f}, "
        f"sec(1 + |sin|)^2 {forms['ta_stated_form']:.15f}; max rel gap to first form over 100 draws "
        f"{by['|TA| vs sec a (1 + |sin a|)'].measured:.1e}"
    )
    ok = det1 <= 1e-12 and moduli <= 1e-10 and rev <= 1e-10 and ta_ok
    detail = (
        f"det {det1:.1e}, |xi| - |zeta| {moduli:.1e}, reversal {rev:.1e}, "
        f"TBTA excess {by['|TBTA| - 12 (sec a sec b)^1.5'].measured:.2f}, TATBTA excess {by['|TATBTA| - 48 sec a^2.5 sec b^1.5'].measured:.2f}"
    )
    assert _report(5, "transfer-matrix identities and norm bounds", ok, detail, dt)


def test_criterion_6_transport_exponent():
    t0 = time.perf_counter()
    Ns = qwalk.geometric_ladder(4, 12)
    idx = np.array(Ns) - 1
    fib = qwalk.moment_series(qwalk.coin_assignment(U, FIB), Ns[-1])[0]
    fit = qwalk.empirical_exponent(Ns, fib.Mtilde[idx], 2.0)
    free = qwalk.moment_series(qwalk.coin_assignment(U, FREE), Ns[-1])[0]
    free_fit = qwalk.empirical_exponent(Ns, free.Mtilde[idx], 2.0)
    bound = tracemap.bound_over_support(FIB, tracemap.spectrum_approx(FIB, 12, 20000).points())
    dt = time.perf_counter() - t0
    ok = bound <= 1e-4 and fit["beta_tilde_fit"] > 100 * bound and abs(free_fit["beta_tilde_fit"] - 1) <= 0.05 and dt < 60
    detail = f"fit {fit['beta_tilde_fit']:.4f} vs bound {bound:.3e}, free fit {free_fit['beta_tilde_fit']:.4f}"
    assert _report(6, "finite-N exponent above the lower bound", ok, detail, dt)


def test_criterion_7_band_structure():
    t0 = time.perf_counter()
    lines = []
    ok = True
    for L in (21, 34):
        al = ising.ring_alphas(ising.fibonacci_couplings(PATTERN, U, L))
        bl = ising.bands(al)
        one_each = all(b.contains(b.zero) for b in bl) and len({b.zero for b in bl}) == L
        zeros = [b.zero for b in bl]
        psi = cmv.paraorthogonal_zeros(al, L - 1, ising.gamma_n(bl))
        dist = hausdorff(psi, [b.right for b in bl])
        inter = ising.interlacing_check(zeros, psi)
        good = len(bl) == L and one_each and dist <= 1e-8 and inter
        ok = ok and good
        lines.append(f"L = {L}: {len(bl)} bands, one zero each {one_each}, Psi vs right ends {dist:.3e} (1e-8), interlacing {inter}")
    dt = time.perf_counter() - t0
    assert _report(7, "band and zero structure", ok, "; ".join(lines), dt)


def test_criterion_8_omega_independence():
    t0 = time.perf_counter()
    shifts = [words.SubshiftPoint("shift", 1), words.SubshiftPoint("shift", 3)]
    res = ising.dos_convergence(PATTERN, range(2, 9), omegas=shifts, threads=4)
    succ = res["successive"]
    self_h = {r["k"]: r["hausdorff"] for r in succ}
    self_h[succ[-1]["k_next"]] = succ[-1]["hausdorff"]
    rows = [r for r in res["cross_omega"] if r["repeatable"]]
    cross_ok = bool(rows) and all(r["hausdorff"] <= self_h[r["k"]] for r in rows)
    ks = [r["kolmogorov"] for r in succ]
    mono = all(b <= 1.1 * a for a, b in zip(ks, ks[1:]))
    dt = time.perf_counter() - t0
    ok = cross_ok and mono and dt < 120
    cross_max = max(r["hausdorff"] for r in rows) if rows else float("nan")
    detail = f"{len(rows)} repeatable (omega, F_k) pairs, max cross Hausdorff {cross_max:.1e}, Kolmogorov ladder {', '.join(f'{x:.4f}' for x in ks)}"
    assert _report(8, "zero sets independent of omega", ok, detail, dt)


def test_criterion_9_combinatorics():
    t0 = time.perf_counter()
    top = words.fib_length(10)
    prefix = words.fixed_point_prefix(20 * top)
    bad_counts = [ell for ell in range(1, top + 1) if len({prefix[i : i + ell] for i in range(len(prefix) - ell)}) != ell + 1 or len(words.factors(ell)) != ell + 1]
    placed = 0
    for k in range(2, 11):
        c = words.factor_census(k)
        placed += c.count == c.length + 1 and c.repeatable == c.length and c.nonrepeatable_word == words.nonrepeatable_characterization(k)
    dt = time.perf_counter() - t0
    ok = not bad_counts and placed == 9 and dt < 10
    assert _report(9, "Fibonacci factor combinatorics", ok, f"counts l + 1 for l <= {top}: {not bad_counts}, nonrepeatable placed at F_k = 3..{top}: {placed}/9", dt)
