"""Command-line front end: ``ale <subcommand> [options]``.

Every subcommand prints (or writes with ``--out``) one JSON report holding the
computed data and a list of named checks. Exit status is 0 when every check
passes, 1 when a check fails or a computation does not converge, and 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
from scipy.special import ellipk

from . import __version__
from . import aklines, delliptic, nodal, picard, weylmetrics
from .errors import AleError, ParseError
from .polycore import ComplexPoly, roots

SECTIONS = ("picard", "aklines", "nodal", "delliptic", "metrics")
METRIC_CHECKS = ("eh-ricci", "moment", "hyperbolic", "weyl-form", "toda")

# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class PicardParams:
    types: list[str] | None = None
    blowup_d: list[int] = field(default_factory=lambda: list(range(4, 13)))


@dataclass
class AklinesParams:
    k: list[int] = field(default_factory=lambda: list(range(7)))
    draws: int = 200


@dataclass
class NodalParams:
    ell: list[int] = field(default_factory=lambda: [2, 3])


@dataclass
class DellipticParams:
    moduli: int = 5


@dataclass
class MetricsParams:
    checks: list[str] = field(default_factory=lambda: list(METRIC_CHECKS))
    h: float = 1e-3


@dataclass
class RunConfig:
    """Parameters of a verification run; ``tol`` overrides every numeric
    tolerance when set."""

    command: str = "verify-all"
    tol: float | None = None
    seed: int = 0
    only: list[str] = field(default_factory=lambda: list(SECTIONS))
    out: str | None = None
    picard: PicardParams = field(default_factory=PicardParams)
    aklines: AklinesParams = field(default_factory=AklinesParams)
    nodal: NodalParams = field(default_factory=NodalParams)
    delliptic: DellipticParams = field(default_factory=DellipticParams)
    metrics: MetricsParams = field(default_factory=MetricsParams)

    def to_json(self) -> dict:
        """Echo of every parameter that can change results (not ``out``)."""
        d = asdict(self)
        d.pop("out")
        return d


_SUB = {
    "picard": PicardParams,
    "aklines": AklinesParams,
    "nodal": NodalParams,
    "delliptic": DellipticParams,
    "metrics": MetricsParams,
}


def _int_list(v, where, lo=None):
    if isinstance(v, int) and not isinstance(v, bool):
        v = [v]
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise ParseError("expected an integer or a list of integers", where)
    if lo is not None and any(x < lo for x in v):
        raise ParseError(f"values must be >= {lo}", where)
    return v


def _positive(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
        raise ParseError("expected a positive number", where)
    return float(v)


def _validate_sub(name: str, data: Any):
    if not isinstance(data, dict):
        raise ParseError("expected an object", name)
    cls = _SUB[name]
    allowed = {f.name for f in fields(cls)}
    for key in data:
        if key not in allowed:
            raise ParseError(f"unknown field {key!r}", f"{name}.{key}")
    out = cls()
    for key, v in data.items():
        where = f"{name}.{key}"
        if key == "types":
            if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
                raise ParseError("expected a list of type names", where)
            for t in v:
                try:
                    picard.CurveConfig.from_name(t)
                except AleError as exc:
                    raise ParseError(str(exc), where) from None
        elif key in ("blowup_d",):
            v = _int_list(v, where, lo=4)
        elif key == "k":
            v = _int_list(v, where, lo=0)
        elif key == "ell":
            v = _int_list(v, where, lo=1)
        elif key in ("draws", "moduli"):
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ParseError("expected a positive integer", where)
        elif key == "h":
            v = _positive(v, where)
        elif key == "checks":
            if not isinstance(v, list) or any(c not in METRIC_CHECKS for c in v):
                raise ParseError(f"checks must be drawn from {list(METRIC_CHECKS)}", where)
        setattr(out, key, v)
    return out


def parse_config(text: str) -> RunConfig:
    """Strict parse of a JSON run configuration; missing fields take defaults."""
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", "<root>")
    cfg = RunConfig()
    allowed = {f.name for f in fields(RunConfig)}
    for key, v in data.items():
        if key not in allowed:
            raise ParseError(f"unknown field {key!r}", key)
        if key == "tol":
            cfg.tol = None if v is None else _positive(v, key)
        elif key == "seed":
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ParseError("seed must be a non-negative integer", key)
            cfg.seed = v
        elif key == "only":
            if isinstance(v, str):
                v = [v]
            if not isinstance(v, list) or any(s not in SECTIONS for s in v):
                raise ParseError(f"only must list sections from {list(SECTIONS)}", key)
            cfg.only = list(v)
        elif key == "command":
            if v not in ("verify-all",):
                raise ParseError("only 'verify-all' can be configured from a file", key)
        elif key == "out":
            if v is not None and not isinstance(v, str):
                raise ParseError("out must be a path string", key)
            cfg.out = v
        else:
            setattr(cfg, key, _validate_sub(key, v))
    return cfg


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    value: Any
    tol: float | None
    passed: bool

    def to_json(self):
        return {"name": self.name, "value": self.value, "tol": self.tol, "pass": self.passed}


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
            "data": self.data,
            "pass": self.passed,
            "wall_time": self.wall_time,
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            if math.isnan(o):
                return '"nan"'
            if math.isinf(o):
                return '"inf"' if o > 0 else '"-inf"'
            return "%.17g" % o
        return json.dumps(o)

    return enc(_plain(obj), 0) + "\n"


# ---------------------------------------------------------------------------
# verification sections
# ---------------------------------------------------------------------------


def _tol(cfg: RunConfig, default: float) -> float:
    return default if cfg.tol is None else cfg.tol


def _num(name, value, tol) -> Check:
    return Check(name, float(value), tol, bool(value <= tol))


def run_picard(cfg: RunConfig) -> tuple[list[Check], dict]:
    configs = (
        [picard.CurveConfig.from_name(t) for t in cfg.picard.types]
        if cfg.picard.types
        else picard.supported_configs()
    )
    checks, rows = [], []
    for c in configs:
        rep = picard.verify_theorem(c)
        rows.append(rep.to_json())
        checks.append(Check(f"picard/{c.type}/theorem", {"Q2": rep.Q2, "KQ": rep.KQ}, 0.0, rep.passed))
    for k in cfg.picard.blowup_d:
        res = picard.blowup_crosscheck(f"D({k})")
        checks.append(Check(f"picard/blowup/D({k})", res, 0.0, all(res.values())))
    return checks, {"theorem": rows}


def run_aklines(cfg: RunConfig) -> tuple[list[Check], dict]:
    tol = _tol(cfg, 1e-10)
    rng = np.random.default_rng(cfg.seed)
    checks, worst = [], {}
    for k in cfg.aklines.k:
        m = 0.0
        for _ in range(cfg.aklines.draws):
            params = aklines.random_params(k, rng)
            line = aklines.build_line(params)
            m = max(m, aklines.residual_ak(line, params.levels))
        worst[str(k)] = m
        checks.append(_num(f"aklines/k={k}/max_residual", m, tol))
    return checks, {"max_residual": worst, "draws": cfg.aklines.draws}


def _nodal_seed_solution(ell: int) -> nodal.NodalSolution:
    if ell == 2:
        return nodal.newton_solve(nodal.seed_ell2())
    if ell == 3:
        return nodal.solve_ell3_on_roots_of_unity()
    return nodal.newton_solve(nodal.default_instance(ell))


def _nodal_checks(sol: nodal.NodalSolution, tol: float) -> list[Check]:
    ell = sol.candidate.ell
    pre = f"nodal/ell={ell}"
    g = nodal.genus_report(sol)
    return [
        _num(f"{pre}/residual", sol.residual, tol),
        Check(f"{pre}/node_count", sol.node_count, None, sol.node_count == ell - 1),
        Check(f"{pre}/tangent_dim", sol.tangent_dim, None, sol.tangent_dim == 3),
        Check(f"{pre}/sv_gap", sol.sv_gap, 1e3, bool(ell == 1 or sol.sv_gap >= 1e3)),
        Check(f"{pre}/geometric_genus", g["genus_geom"], None, g["pass"]),
    ]


def run_nodal(cfg: RunConfig) -> tuple[list[Check], dict]:
    tol = _tol(cfg, 1e-10)
    checks, data = [], {}
    for ell in cfg.nodal.ell:
        sol = _nodal_seed_solution(ell)
        checks += _nodal_checks(sol, tol)
        data[str(ell)] = sol.to_json()
    return checks, data


def run_delliptic(cfg: RunConfig) -> tuple[list[Check], dict]:
    tol = _tol(cfg, 1e-8)
    rng = np.random.default_rng(cfg.seed)
    checks = []
    z = ComplexPoly((1, 0, 0, 0, -1))
    w1, w2 = delliptic.periods(z)
    lemniscate = math.sqrt(2) * float(ellipk(0.5))
    # the reduced basis of this square lattice has |w| = sqrt(2) * lemniscate constant
    half_real = abs(w1 + w2) / 2 if abs((w1 + w2).imag) < abs((w1 - w2).imag) else abs(w1 - w2) / 2
    checks.append(_num("delliptic/lemniscate_half_period", abs(half_real - lemniscate), tol))
    worst = 0.0
    for _ in range(cfg.delliptic.moduli):
        m = float(rng.uniform(0.05, 0.95))
        zl = ComplexPoly((1, 0, -(1 + m), 0, m))
        p1, p2 = delliptic.periods(zl)
        K, Kp = float(ellipk(m)), float(ellipk(1 - m))
        for v in (4 * K, 2j * Kp):
            worst = max(worst, delliptic.lattice_distance(v, p1, p2))
        # both generators of the computed lattice lie in the oracle lattice
        for v in (p1, p2):
            worst = max(worst, delliptic.lattice_distance(v, 4 * K, 2j * Kp))
    checks.append(_num("delliptic/legendre_lattice", worst, tol))
    zc = ComplexPoly((0.3 + 0.1j, -0.2j, 1.1, 0.4 - 0.2j, 0.9 + 0.3j))
    curve = delliptic.elliptic_curve(zc)
    P = curve.point(0.7 - 0.4j)
    inf = [delliptic.CurvePoint.infinity(1, zc), delliptic.CurvePoint.infinity(-1, zc)]
    res = delliptic.principality_residual(curve, [P, P.involution()], inf)
    checks.append(_num("delliptic/divisor_of_u_minus_u0", res.lattice_distance, tol))
    # divisor of w - q(u): four finite zeros against double poles at both infinities
    q = ComplexPoly((0.2, -0.5 + 0.3j, 0.4j))
    zs = [delliptic.CurvePoint(complex(u), complex(q(u))) for u in roots(zc - q * q).roots]
    res2 = delliptic.principality_residual(curve, zs, inf * 2)
    checks.append(_num("delliptic/divisor_of_w_minus_q", res2.lattice_distance, tol))
    triv = delliptic.principality_residual(curve, [], [])
    checks.append(Check("delliptic/trivial_divisor", triv.lattice_distance, 0.0, triv.lattice_distance == 0.0))
    return checks, {"lemniscate_periods": [w1, w2]}


def run_metric_check(name: str, cfg: RunConfig, h: float | None = None, grid: weylmetrics.GridFunction | None = None):
    h = cfg.metrics.h if h is None else h
    if name == "eh-ricci":
        rep = weylmetrics.eh_ricci_check(h=h)
        return [
            _num("metrics/eh-ricci/max_ricci", rep["max_ricci"], _tol(cfg, 1e-6)),
            Check("metrics/eh-ricci/order", rep["order"], 1.9, rep["order"] >= 1.9),
        ], rep
    if name == "moment":
        rng = np.random.default_rng(cfg.seed)
        samples = [Fraction(int(rng.integers(1001, 10001)), 1000) for _ in range(50)]
        rep = weylmetrics.moment_check(samples)
        return [
            Check("metrics/moment/identity_exact", rep["max_identity_error"], 0.0, rep["exact"]),
        ], rep
    if name == "hyperbolic":
        rep = weylmetrics.hyperbolic_check(h=min(h, 5e-4))
        return [
            _num("metrics/hyperbolic/max_deviation", rep["max_deviation"], _tol(cfg, 1e-5)),
            _num("metrics/hyperbolic/pairing_error", rep["pairing_error"], _tol(cfg, 1e-12)),
        ], rep
    if name == "weyl-form":
        rep = weylmetrics.weyl_form_check(np.linspace(1.2, 6.0, 25))
        return [
            _num("metrics/weyl-form/max_curl", rep["max_curl"], _tol(cfg, 1e-12)),
            _num("metrics/weyl-form/integral_error", rep["integral_error"], _tol(cfg, 1e-10)),
        ], rep
    if name == "toda":
        if grid is None:
            xs = np.linspace(0.0, 1.0, 7)
            grid = weylmetrics.GridFunction.from_function(lambda x, y, t: np.log(t), xs, xs, np.linspace(1.0, 2.0, 11))
        res = weylmetrics.toda_residual(grid)
        return [_num("metrics/toda/max_residual", res.max_abs, _tol(cfg, 1e-8))], {
            "max_residual": res.max_abs,
            "index": list(res.index),
            "location": list(res.location),
        }
    raise ValueError(f"unknown metric check {name!r}")


def run_metrics(cfg: RunConfig) -> tuple[list[Check], dict]:
    checks, data = [], {}
    for name in cfg.metrics.checks:
        c, d = run_metric_check(name, cfg)
        checks += c
        data[name] = d
    return checks, data


RUNNERS: dict[str, Callable[[RunConfig], tuple[list[Check], dict]]] = {
    "picard": run_picard,
    "aklines": run_aklines,
    "nodal": run_nodal,
    "delliptic": run_delliptic,
    "metrics": run_metrics,
}


def _num_threads() -> int:
    raw = os.environ.get("ALE_NUM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ParseError(f"ALE_NUM_THREADS must be an integer, got {raw!r}", "ALE_NUM_THREADS") from None
    if n < 1:
        raise ParseError("ALE_NUM_THREADS must be at least 1", "ALE_NUM_THREADS")
    return n


def _guarded(section: str, runner, cfg: RunConfig):
    try:
        return runner(cfg)
    except AleError as exc:
        return [Check(f"{section}/error", f"{type(exc).__name__}: {exc}", None, False)], {}


def verify_all(cfg: RunConfig | None = None) -> Report:
    """Run the selected sections; results are assembled in a fixed order."""
    cfg = cfg or RunConfig()
    t0 = time.perf_counter()
    sections = [s for s in SECTIONS if s in cfg.only]
    workers = min(_num_threads(), max(1, len(sections)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_guarded, s, RUNNERS[s], cfg) for s in sections]
            results = [f.result() for f in futures]
    else:
        results = [_guarded(s, RUNNERS[s], cfg) for s in sections]
    rep = Report("verify-all", cfg.to_json())
    for s, (checks, data) in zip(sections, results):
        rep.checks += checks
        rep.data[s] = data
    rep.wall_time = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _UsageError(Exception):
    pass


def _complex(text: str) -> complex:
    t = text.strip().replace(" ", "")
    try:
        if "," in t:
            re_, im_ = t.split(",")
            return complex(float(re_), float(im_))
        return complex(t.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read {text!r} as a complex number") from None


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(p.strip().replace("i", "j")) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read {text!r} as a list of complex numbers") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read {text!r} as a list of numbers") from None


def _int_list_arg(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read {text!r} as a list of integers") from None


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _only(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in SECTIONS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown section(s) {bad}; choose from {list(SECTIONS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=argparse.SUPPRESS, help="override numeric tolerances")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for random sweeps (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the JSON report here instead of stdout")
    common.add_argument("--only", type=_only, default=argparse.SUPPRESS, help="comma-separated sections to run")
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON run configuration")

    p = argparse.ArgumentParser(prog="ale", description="Verification runs for ALE twistor computations.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("verify-all", parents=[common], help="run every verification section")

    sp = sub.add_parser("picard", parents=[common], help="intersection-theory checks")
    sp.add_argument("--type", action="append", dest="types", help="configuration such as A5, D(7), E8; repeatable")

    sp = sub.add_parser("ak-line", parents=[common], help="build one A_k twistor line")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--c", type=_complex, required=True, help="RE,IM")
    sp.add_argument("--A", dest="A", type=_complex, required=True, help="RE,IM")
    sp.add_argument("--levels", type=_float_list, required=True)

    sp = sub.add_parser("nodal", parents=[common], help="solve for a maximally nodal curve")
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--branch", type=_complex_list, help="target branch points z1,...,z2L")
    sp.add_argument("--seed-file", "--seed-json", dest="seed_file", help="JSON candidate to start from")
    sp.add_argument("--steps", type=int, default=20, help="continuation steps towards --branch")

    sp = sub.add_parser("d4", parents=[common], help="D4 principality constraint")
    sp.add_argument("--z", type=_complex_list, required=True, help="c0,...,c4")
    sp.add_argument("--a", type=_float_list, required=True)
    sp.add_argument("--signs", type=_int_list_arg, required=True)
    sp.add_argument("--selector", type=_int_list_arg, default=None, help="root index per a_j")
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--solve-coeff", type=int, default=None)

    sp = sub.add_parser("metrics", parents=[common], help="curvature and Toda checks")
    sp.add_argument("--check", choices=METRIC_CHECKS, required=True)
    sp.add_argument("--grid", help="GridFunction JSON for --check toda")
    sp.add_argument("--h", type=_positive_float, default=None)
    return p


def _config_from_args(args) -> RunConfig:
    if hasattr(args, "config"):
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc.strerror}", args.config) from None
        cfg = parse_config(text)
    else:
        cfg = RunConfig()
    cfg.command = args.command
    for key in ("tol", "seed", "out", "only"):
        if hasattr(args, key):
            setattr(cfg, key, getattr(args, key))
    return cfg


def _single(command: str, cfg: RunConfig, checks: list[Check], data: dict, t0: float) -> Report:
    rep = Report(command, cfg.to_json(), checks, data)
    rep.wall_time = time.perf_counter() - t0
    return rep


def _cmd_picard(args, cfg):
    if args.types:
        cfg.picard.types = args.types
        cfg.picard.blowup_d = [int(t[2:-1] if "(" in t else t[1:]) for t in args.types if t.upper().startswith("D")]
    return run_picard(cfg)


def _cmd_ak_line(args, cfg):
    params = aklines.AkParams(args.k, args.a, args.c, args.A, tuple(args.levels))
    line = aklines.build_line(params)
    out = line.to_json()
    return [_num("ak-line/residual", out["residual"], _tol(cfg, 1e-10))], out


def _cmd_nodal(args, cfg):
    tol = _tol(cfg, 1e-10)
    if args.seed_file:
        start = nodal.NodalCandidate.from_json(json.loads(Path(args.seed_file).read_text()))
        if start.ell != args.ell:
            raise ParseError(f"seed has l={start.ell} but --ell is {args.ell}", args.seed_file)
    else:
        start = None
    if args.branch is not None:
        if len(args.branch) != 2 * args.ell:
            raise ParseError(f"--branch needs {2 * args.ell} points", "--branch")
        if start is None:
            start = (nodal.seed_ell3() if args.ell == 3 else nodal.newton_solve(nodal.default_instance(args.ell)).candidate)
        sol = nodal.reach_branch(start, args.branch, steps=args.steps, seed=cfg.seed)
    else:
        sol = nodal.newton_solve(start) if start is not None else _nodal_seed_solution(args.ell)
    return _nodal_checks(sol, tol), sol.to_json()


def _cmd_d4(args, cfg):
    z = ComplexPoly(tuple(args.z))
    if len(args.a) != 4 or len(args.signs) != 4:
        raise ParseError("--a and --signs need four entries", "--a/--signs")
    if any(s not in (1, -1) for s in args.signs):
        raise ParseError("signs must be +1 or -1", "--signs")
    tol = _tol(cfg, 1e-8)
    curve = delliptic.elliptic_curve(z)
    selector = tuple(args.selector) if args.selector else (0, 0, 0, 0)
    data: dict = {"periods": list(curve.periods)}
    if args.exhaustive:
        ex = delliptic.d4_exhaustive(curve, args.a, args.signs)
        selector = ex.best_selector
        data["exhaustive"] = {
            "best_selector": list(selector),
            "distances": {"".join(map(str, k)): v for k, v in sorted(ex.residuals.items())},
        }
    zeros, poles = delliptic.d4_divisor_points(z, args.a, args.signs, selector)
    res = delliptic.principality_residual(curve, zeros, poles)
    data.update(
        selector=list(selector),
        zeros=[P.to_json() for P in zeros],
        poles=[P.to_json() for P in poles],
        residual=res.to_json(),
    )
    checks = [_num("d4/lattice_distance", res.lattice_distance, tol)]
    if args.solve_coeff is not None:
        sol = delliptic.constraint_solve(z, args.solve_coeff, args.a, args.signs, selector, tol=tol)
        data["solved_z"] = sol.z.to_json()
        data["solved_residual"] = sol.residual.to_json()
        data["iterations"] = sol.iterations
        checks = [_num("d4/solved_lattice_distance", sol.residual.lattice_distance, tol)]
    return checks, data


def _cmd_metrics(args, cfg):
    grid = None
    if args.grid:
        if args.check != "toda":
            raise ParseError("--grid only applies to --check toda", "--grid")
        try:
            grid = weylmetrics.GridFunction.from_json(json.loads(Path(args.grid).read_text()))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"cannot read grid: {exc}", args.grid) from None
    return run_metric_check(args.check, cfg, args.h, grid)


COMMANDS = {
    "picard": _cmd_picard,
    "ak-line": _cmd_ak_line,
    "nodal": _cmd_nodal,
    "d4": _cmd_d4,
    "metrics": _cmd_metrics,
}


def _emit(report: Report, out: str | None) -> None:
    text = dumps(report.to_json())
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


_NEGATIVE = re.compile(r"^-[\d.]")


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--opt -1,2`` as ``--opt=-1,2`` so argparse keeps negative values."""
    out: list[str] = []
    for tok in argv:
        if _NEGATIVE.match(tok) and out and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        t0 = time.perf_counter()
        if args.command == "verify-all":
            report = verify_all(cfg)
        else:
            checks, data = COMMANDS[args.command](args, cfg)
            report = _single(args.command, cfg, checks, data, t0)
    except ParseError as exc:
        where = f" ({exc.where})" if exc.where else ""
        print(f"ale: error: {exc}{where}", file=sys.stderr)
        return 2
    except AleError as exc:
        code = 2 if isinstance(exc, ValueError) else 1
        print(f"ale: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    except ValueError as exc:
        print(f"ale: error: {exc}", file=sys.stderr)
        return 2
    _emit(report, cfg.out)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
