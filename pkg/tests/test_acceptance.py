"""Acceptance suite: one test per criterion, each reporting a single line."""

import json
import re
from fractions import Fraction

import numpy as np

from aletwistor import aklines, cli, delliptic, nodal, picard, weylmetrics
from aletwistor.picard import CurveConfig
from aletwistor.polycore import ComplexPoly, double_root_clusters, roots
from oracles import agm_K, lemniscate_half_period


def theorem_configs():
    return (
        [CurveConfig.a_series(ell) for ell in range(1, 7)]
        + [CurveConfig.from_name(f"D{k}") for k in range(4, 11)]
        + [CurveConfig.from_name(f"E{k}") for k in (6, 7, 8)]
    )


def table_Q(cfg):
    letter, n = cfg.type[0], int(cfg.type[1:])
    if letter == "A":
        return {"C": (n + 1) // 2, "D1": 1, "D2": 1}
    if letter == "D":
        return {"C": 2 * n - 4, "E": 2, "F": n - 2, "G": n - 2}
    return {6: {"C": 12, "E": 4, "F": 6, "G": 4}, 7: {"C": 24, "E": 6, "F": 12, "G": 8}, 8: {"C": 60, "E": 12, "F": 30, "G": 20}}[n]


def group_order(cfg):
    letter, n = cfg.type[0], int(cfg.type[1:])
    if letter == "A":
        return n + 1
    if letter == "D":
        return 4 * (n - 2)
    return {6: 24, 7: 48, 8: 120}[n]


def test_criterion_1_theorem_suite(acceptance):
    bad = []
    for cfg in theorem_configs():
        rep = picard.verify_theorem(cfg)
        q = picard.solve_Q(cfg).as_dict()
        if q != table_Q(cfg) or rep.Q2 != group_order(cfg) or rep.KQ != -4:
            bad.append(cfg.type)
    acceptance(1, not bad, f"{len(theorem_configs())} types, exact Q, Q^2=|G|, KQ=-4; mismatches={bad}")


def test_criterion_2_blowup_crosscheck(acceptance):
    bad = []
    for k in range(4, 13):
        lat, cl = picard.blowup_model(f"D({k})")
        selfs = [lat.dot(cl[x], cl[x]) for x in ("C", "E", "F", "G")]
        anti = 2 * cl["C"] + cl["E"] + cl["F"] + cl["G"] == -lat.K
        if selfs != [-1, -(k - 2), -2, -2] or not anti:
            bad.append(k)
    acceptance(2, not bad, f"D(k) k=4..12 self-intersections and -K=2C+E+F+G; failures={bad}")


def test_criterion_3_node_ledger(acceptance):
    bad = []
    for cfg in picard.supported_configs():
        rep = picard.verify_theorem(cfg)
        delta = Fraction(rep.Q2, 2) - 1
        ga = Fraction(rep.KQ + rep.Q2, 2) + 1
        if rep.delta != delta or rep.Q2 + 1 - 2 * rep.delta != 3 or ga != rep.delta:
            bad.append(cfg.type)
    acceptance(3, not bad, f"delta=|G|/2-1, Q^2+1-2delta=3, p_a=delta on all supported types; failures={bad}")


def test_criterion_4_ak_residual(acceptance):
    rng = np.random.default_rng(0)
    worst = 0.0
    for k in range(7):
        for _ in range(200):
            p = aklines.random_params(k, rng)
            worst = max(worst, aklines.residual_ak(aklines.build_line(p), p.levels))
    acceptance(4, worst <= 1e-10, f"max residual_ak over 7x200 draws = {worst:.3e} (tol 1e-10)")


def _nodal_ok(sol, ell):
    cl = double_root_clusters(sol.candidate.r, tol=1e-8)
    return (
        sol.residual <= 1e-10
        and sol.node_count == ell - 1
        and len(cl.double) == ell - 1
        and not cl.higher
        and sol.tangent_dim == 3
        and sol.sv_gap >= 1e3
    )


def test_criterion_5_nodal_solver(acceptance):
    sols = {2: nodal.newton_solve(nodal.seed_ell2()), 3: nodal.solve_ell3_on_roots_of_unity()}
    seeded = {ell: _nodal_ok(s, ell) for ell, s in sols.items()}
    reverse = {}
    for ell in range(2, 6):
        rng = np.random.default_rng(ell)
        cand = nodal.construct_instance(
            ell,
            rng.normal(size=ell - 1) + 1j * rng.normal(size=ell - 1),
            rng.normal(size=2) + 1j * rng.normal(size=2),
            ComplexPoly(tuple(0.3 * rng.normal(size=ell)) + (1.0,)),
            lead=-2.0,
        )
        reverse[ell] = _nodal_ok(nodal.newton_solve(cand), ell)
    gaps = {ell: f"{s.sv_gap:.1e}" for ell, s in sols.items()}
    res = {ell: f"{s.residual:.1e}" for ell, s in sols.items()}
    ok = all(seeded.values()) and all(reverse.values())
    acceptance(5, ok, f"seeded l=2,3 residual={res} sv_gap={gaps}; reverse l=2..5 ok={reverse}")


def test_criterion_6_elliptic(acceptance):
    ref = lemniscate_half_period()
    w1, w2 = delliptic.periods(ComplexPoly((1, 0, 0, 0, -1)))
    # the square lattice generated by ref (1 + i), ref (1 - i)
    lem_err = max(abs(abs(w1) - ref * 2**0.5), abs(abs(w2) - ref * 2**0.5))
    lem_ok = lem_err <= 1e-8 and delliptic.lattice_distance(2 * ref, w1, w2) <= 1e-8
    rng = np.random.default_rng(2024)
    leg_err = 0.0
    for m in rng.uniform(0.02, 0.98, 20):
        per = delliptic.periods(ComplexPoly((1, 0, -(1 + m), 0, m)))
        oracle = (4 * agm_K(m), 2j * agm_K(1 - m))
        leg_err = max(leg_err, *(delliptic.lattice_distance(v, *per) for v in oracle))
        leg_err = max(leg_err, *(delliptic.lattice_distance(v, *oracle) for v in per))
    curve = delliptic.elliptic_curve(ComplexPoly((0.3 + 0.1j, -0.2j, 1.1, 0.4 - 0.2j, 0.9 + 0.3j)))
    inf = [delliptic.CurvePoint.infinity(1, curve.z), delliptic.CurvePoint.infinity(-1, curve.z)]
    P = curve.point(0.7 - 0.4j)
    div = delliptic.principality_residual(curve, [P, P.involution()], inf).lattice_distance
    # u - u0 cancels by the sheet symmetry; w - q(u) has no such shortcut
    q = ComplexPoly((0.2 - 0.1j, 0.5, -0.3j))
    zeros = [delliptic.CurvePoint(complex(u), complex(q(u))) for u in roots(curve.z - q * q).roots]
    wq = delliptic.principality_residual(curve, zeros, inf * 2).lattice_distance
    triv = delliptic.principality_residual(curve, [], []).lattice_distance
    ok = lem_ok and leg_err <= 1e-8 and div <= 1e-8 and wq <= 1e-8 and triv == 0
    acceptance(
        6,
        ok,
        f"half period {ref:.10f} err={lem_err:.1e}; Legendre x20 err={leg_err:.1e}; "
        f"div(u-u0)={div:.1e}; div(w-q)={wq:.1e}; trivial={triv}",
    )


def test_criterion_7_metrics(acceptance):
    eh = weylmetrics.eh_ricci_check()
    rng = np.random.default_rng(7)
    samples = [Fraction(int(n), 997) for n in rng.integers(998, 9971, 50)]
    mom = weylmetrics.moment_check(samples)
    hyp = weylmetrics.hyperbolic_check()
    ax = np.linspace(-1, 1, 9)
    toda = weylmetrics.toda_residual(
        weylmetrics.GridFunction.from_function(lambda x, y, t: np.log(t), ax, ax, np.linspace(1, 2, 9))
    ).max_abs
    wf = weylmetrics.weyl_form_check(np.linspace(1.5, 4.0, 11))
    ok = (
        eh["max_ricci"] <= 1e-6
        and eh["order"] >= 1.9
        and mom["exact"]
        and hyp["max_deviation"] <= 1e-5
        and toda <= 1e-10
        and wf["integral_error"] <= 1e-10
    )
    acceptance(
        7,
        ok,
        f"EH max|Ric|={eh['max_ricci']:.1e} order={eh['order']:.2f}; moment exact={mom['exact']}; "
        f"hyperbolic K={hyp['curvature']:.6f} spread={hyp['max_deviation']:.1e}; toda={toda:.1e}; "
        f"int omega err={wf['integral_error']:.1e}",
    )


def test_criterion_8_determinism_and_exit_codes(acceptance, tmp_path, monkeypatch):
    def run(argv, name):
        out = tmp_path / name
        code = cli.main([*argv, "--out", str(out)])
        text = out.read_text() if out.exists() else None
        return code, text

    strip = lambda t: re.sub(r'"wall_time": [^\n]*', "", t)
    c1, a = run(["verify-all"], "a.json")
    c2, b = run(["verify-all"], "b.json")
    monkeypatch.setenv("ALE_NUM_THREADS", "3")
    c3, c = run(["verify-all"], "c.json")
    monkeypatch.delenv("ALE_NUM_THREADS")
    identical = strip(a) == strip(b) == strip(c)
    c_fail, fail_text = run(["verify-all", "--tol", "1e-300"], "fail.json")
    bad = tmp_path / "bad.json"
    bad.write_text('{"tol": -1')
    c_parse, parse_text = run(["verify-all", "--config", str(bad)], "parse.json")
    ok = (
        identical
        and (c1, c2, c3) == (0, 0, 0)
        and json.loads(a)["pass"]
        and c_fail == 1
        and json.loads(fail_text)["pass"] is False
        and c_parse == 2
        and parse_text is None
    )
    acceptance(
        8,
        ok,
        f"byte-identical={identical}; exit codes pass={c1} injected-failure={c_fail} bad-config={c_parse} "
        f"(partial report written={parse_text is not None})",
    )
