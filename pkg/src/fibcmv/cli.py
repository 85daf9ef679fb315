"""Command-line front end: ``fibcmv {fib,spectrum,walk,ising,verify}``.

Every output carries a schema tag and the full run configuration.  CSV
outputs put them in ``#`` comment lines above the column header; JSON
outputs wrap the payload as {schema, command, config, payload}.  Floats are
written with 17 significant digits.  Angles are in radians.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import ising, qwalk, tracemap, verify, words
from .errors import ConvergenceError, NumericalInconsistency

SCHEMA = "fibcmv/1"


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- writers


def fmt_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return format(x, ".17g")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def to_json(obj) -> str:
    """JSON text with floats at 17 significant digits; non-finite floats become null."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class Table:
    """Column names plus row tuples; written as CSV or as a JSON object."""

    def __init__(self, columns, rows):
        self.columns = list(columns)
        self.rows = [tuple(r) for r in rows]

    def as_dict(self):
        return {"columns": self.columns, "rows": [list(r) for r in self.rows]}


def render(command: str, config: dict, payload, fmt: str) -> str:
    if fmt == "json":
        body = payload.as_dict() if isinstance(payload, Table) else payload
        env = {"schema": SCHEMA, "command": command, "config": config, "payload": body}
        return to_json(env) + "\n"
    if not isinstance(payload, Table):
        payload = Table(["key", "value"], [(k, v if np.isscalar(v) else to_json(v)) for k, v in payload.items()])
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n# command: {command}\n# config: {to_json(config)}\n")
    buf.write(",".join(payload.columns) + "\n")
    for r in payload.rows:
        buf.write(",".join(_cell(v) for v in r) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------- parsing


def _common(p):
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--threads", type=int, default=1, help="worker threads, 0 = auto")


def _angle(p, name, default=None):
    p.add_argument(name, type=float, default=default, required=default is None, help="radians")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="fibcmv", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fib = sub.add_parser("fib", help="Fibonacci word combinatorics")
    fsub = fib.add_subparsers(dest="action", required=True, parser_class=_Parser)
    census = fsub.add_parser("census", help="factor census at length F_k")
    census.add_argument("--k", type=int, required=True)
    _common(census)

    sp = sub.add_parser("spectrum", help="trace-map spectrum approximation and transport constants")
    _angle(sp, "--theta-a")
    _angle(sp, "--theta-b")
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--grid", type=int, default=20000)
    _common(sp)

    walk = sub.add_parser("walk", help="quantum walk moments and transport exponents")
    walk.add_argument("mode", nargs="?", choices=("series", "exponents"), default="series")
    _angle(walk, "--theta-a")
    _angle(walk, "--theta-b")
    walk.add_argument("--omega", default="u", help="u, shift:J or rot:THETA")
    walk.add_argument("--steps", type=int, default=4096)
    walk.add_argument("--p", type=float, default=2.0)
    walk.add_argument("--depth", type=int, default=12, help="spectrum depth for the theory bound")
    walk.add_argument("--grid", type=int, default=20000, help="spectrum grid for the theory bound")
    _common(walk)

    isg = sub.add_parser("ising", help="Lee-Yang zeros of Fibonacci Ising rings")
    isub = isg.add_subparsers(dest="action", required=True, parser_class=_Parser)
    zeros = isub.add_parser("zeros", help="zeros, residuals and band indices")
    dos = isub.add_parser("dos", help="density-of-states ladder distances")
    for p in (zeros, dos):
        p.add_argument("--ja", type=float, required=True)
        p.add_argument("--jb", type=float, required=True)
        p.add_argument("--tau", type=float, default=1.0)
        p.add_argument("--kb", type=float, default=1.0)
    zeros.add_argument("--omega", default="u", help="u, shift:J or rot:THETA")
    zeros.add_argument("--length", type=int, required=True)
    zeros.add_argument("--method", choices=("A", "B", "both"), default="A")
    zeros.add_argument("--tol", type=float, default=1e-8, help="zero-count and method agreement tolerance")
    dos.add_argument("--kmin", type=int, default=2)
    dos.add_argument("--kmax", type=int, required=True)
    dos.add_argument("--cross", default="shift:1,shift:3", help="comma-separated omegas compared with u")
    _common(zeros)
    _common(dos)

    ver = sub.add_parser("verify", help="invariant suites with residuals")
    ver.add_argument("suite", nargs="?", choices=("all",) + tuple(verify.SUITES), default="all")
    ver.add_argument("--quick", action="store_true")
    _common(ver)
    return top


_SKIP = {"out", "format", "threads"}


def config_of(ns: argparse.Namespace) -> dict:
    """The run configuration: every parsed option except output plumbing."""
    return {k: v for k, v in sorted(vars(ns).items()) if k not in _SKIP}


def config_to_argv(config: dict) -> list[str]:
    """Rebuild an argument vector that parses back to ``config``."""
    argv = [config["command"]]
    if "action" in config:
        argv.append(config["action"])
    if "mode" in config:
        argv.append(config["mode"])
    if "suite" in config:
        argv.append(config["suite"])
    for k, v in config.items():
        if k in ("command", "action", "mode", "suite"):
            continue
        flag = "--" + k.replace("_", "-")
        if isinstance(v, bool):
            if v:
                argv.append(flag)
        else:
            argv += [flag, fmt_float(v) if isinstance(v, float) else str(v)]
    return argv


def _threads(n: int) -> int:
    if n < 0:
        raise ValueError("--threads must be >= 0")
    return os.cpu_count() or 1 if n == 0 else n


# ---------------------------------------------------------------- commands


def cmd_fib(ns):
    return words.factor_census(ns.k).as_dict(), "json"


def cmd_spectrum(ns):
    ang = tracemap.CoinAngles(ns.theta_a, ns.theta_b)
    sp = tracemap.spectrum_approx(ang, ns.depth, ns.grid)
    idx = np.flatnonzero(sp.mask)
    chunks = [c for c in np.array_split(idx, _threads(ns.threads)) if len(c)]
    with ThreadPoolExecutor(max_workers=max(1, len(chunks))) as ex:
        parts = list(ex.map(lambda c: tracemap.transport_constants_grid(np.exp(1j * sp.theta[c]), ang), chunks))
    names = ("I", "C", "gamma1", "gamma2", "beta")
    vals = {n: np.full(ns.grid, np.nan) for n in names}
    for c, part in zip(chunks, parts):
        for n in names:
            vals[n][c] = part[n]
    rows = []
    for i in range(ns.grid):
        inside = bool(sp.mask[i])
        rows.append((sp.theta[i], inside) + tuple(vals[n][i] if inside else None for n in names))
    return Table(("angle", "in_spectrum") + names, rows), "csv"


def _walk_setup(ns):
    ang = tracemap.CoinAngles(ns.theta_a, ns.theta_b)
    omega = words.SubshiftPoint.parse(ns.omega)
    if ns.steps < 1:
        raise ValueError("--steps must be positive")
    series = qwalk.moment_series(qwalk.coin_assignment(omega, ang), ns.steps, ps=(ns.p,))[0]
    return ang, series


def cmd_walk(ns):
    ang, s = _walk_setup(ns)
    if ns.mode == "series":
        return Table(("n", "M", "Mtilde"), zip(range(ns.steps), s.M, s.Mtilde)), "csv"
    Ns = [n for n in qwalk.geometric_ladder(4, 40) if n <= ns.steps]
    if len(Ns) < 4:
        raise ValueError("walk exponents needs --steps >= 128")
    out = qwalk.empirical_exponent(Ns, s.Mtilde[np.array(Ns) - 1], ns.p)
    sp = tracemap.spectrum_approx(ang, ns.depth, ns.grid)
    out["theory_lower_bound"] = tracemap.bound_over_support(ang, sp.points())
    out["ladder"] = Ns
    return out, "json"


def cmd_ising(ns):
    if ns.action == "zeros":
        ring = ising.fibonacci_couplings((ns.ja, ns.jb), words.SubshiftPoint.parse(ns.omega), ns.length, ns.tau, ns.kb)
        al = ising.ring_alphas(ring)
        zs = ising.zeros_on_circle(al, method=ns.method, tol=ns.tol)
        bl = ising.bands(al)
        rows = []
        for t, r in zip(zs.angles, zs.residuals):
            hit = [i for i, b in enumerate(bl) if b.contains(t, strict=False)]
            if len(hit) != 1:
                raise NumericalInconsistency(f"zero at {t} lies in {len(hit)} bands")
            rows.append((t, r, hit[0]))
        return Table(("angle", "residual", "band_index"), rows), "csv"
    if ns.kmin < 2 or ns.kmax <= ns.kmin:
        raise ValueError("need 2 <= --kmin < --kmax")
    cross = [words.SubshiftPoint.parse(s) for s in ns.cross.split(",") if s]
    out = ising.dos_convergence((ns.ja, ns.jb), range(ns.kmin, ns.kmax + 1), cross, ns.tau, ns.kb, _threads(ns.threads))
    return out, "json"


def cmd_verify(ns):
    checks = verify.run_suites(ns.suite, ns.quick, ns.seed, _threads(ns.threads))
    ok = all(c.passed for c in checks)
    if ns.format is None:
        return verify.format_table(checks) + "\n", None, ok
    cols = ("suite", "check", "measured", "tolerance", "passed")
    return Table(cols, [(c.suite, c.name, c.measured, c.tolerance, c.passed) for c in checks]), "json", ok


COMMANDS = {"fib": cmd_fib, "spectrum": cmd_spectrum, "walk": cmd_walk, "ising": cmd_ising}


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse, execute and write; returns 0, 1 (validation) or 2 (numerical inconsistency)."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = build_parser().parse_args(argv)
        config = config_of(ns)
        name = " ".join(str(config[k]) for k in ("command", "action", "mode", "suite") if k in config)
        ok = True
        if ns.command == "verify":
            payload, default_fmt, ok = cmd_verify(ns)
        else:
            payload, default_fmt = COMMANDS[ns.command](ns)
        text = payload if default_fmt is None else render(name, config, payload, ns.format or default_fmt)
        if ns.out == "-":
            stdout.write(text)
        else:
            with open(ns.out, "w", encoding="utf-8") as fh:
                fh.write(text)
    except ValidationError as e:
        print(e, file=stderr)
        return 1
    except (NumericalInconsistency, ConvergenceError) as e:
        print(f"numerical inconsistency: {e}", file=stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=stderr)
        return 1
    return 0 if ok else 2


def main() -> None:
    sys.exit(run())
