"""Nodal hyperelliptic curves ``w^2 + p(x) w + q(x) = 0`` for A(2l-1).

``q(x) = c prod (x - a_i)`` over ``2l`` fixed branch points and ``p`` has degree
``l``. The curve has a node over every double zero of ``r = p^2 - 4q``, so the
solver imposes ``r(s_j) = r'(s_j) = 0`` at ``l - 1`` unknown points ``s_j``.
Unknowns (all complex) are ordered ``p_0 .. p_l, c, s_1 .. s_{l-1}``, which
gives ``2l + 1`` unknowns against ``2(l - 1)`` equations and a 3-dimensional
solution family.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import Divergence, RankDeficient
from .picard import CurveConfig, verify_theorem
from .polycore import ComplexPoly, double_root_clusters, roots

#: real gauge coordinates frozen by default during Newton
DEFAULT_FROZEN = ("re_c", "im_c", "re_p0")


@dataclass(frozen=True)
class NodalCandidate:
    ell: int
    branch: tuple[complex, ...]
    c: complex
    p: ComplexPoly
    s: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "branch", tuple(complex(b) for b in self.branch))
        object.__setattr__(self, "s", tuple(complex(v) for v in self.s))
        object.__setattr__(self, "c", complex(self.c))
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if len(self.branch) != 2 * self.ell:
            raise ValueError(f"need {2 * self.ell} branch points")
        if len(self.s) != self.ell - 1:
            raise ValueError(f"need {self.ell - 1} double-root locations")
        if self.p.degree > self.ell:
            raise ValueError("p has degree above ell")
        if self.c == 0:
            raise ValueError("c must be nonzero")

    @property
    def n_unknowns(self) -> int:
        return 2 * self.ell + 1

    @property
    def q(self) -> ComplexPoly:
        return ComplexPoly.from_roots(self.branch, self.c)

    @property
    def r(self) -> ComplexPoly:
        return self.p * self.p - 4 * self.q

    def p_coeffs(self) -> np.ndarray:
        cs = np.zeros(self.ell + 1, dtype=complex)
        cs[: len(self.p.coeffs)] = self.p.coeffs
        return cs

    def vector(self) -> np.ndarray:
        return np.concatenate([self.p_coeffs(), [self.c], np.array(self.s, dtype=complex)])

    def with_vector(self, v: np.ndarray) -> "NodalCandidate":
        l = self.ell
        return replace(self, p=ComplexPoly(tuple(v[: l + 1])), c=complex(v[l + 1]), s=tuple(v[l + 2 :]))

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "branch": [[b.real, b.imag] for b in self.branch],
            "p": [[z.real, z.imag] for z in self.p_coeffs()],
            "c": [self.c.real, self.c.imag],
            "s": [[z.real, z.imag] for z in self.s],
        }

    @classmethod
    def from_json(cls, d: dict) -> "NodalCandidate":
        cx = lambda v: complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)  # noqa: E731
        return cls(
            int(d["ell"]),
            tuple(cx(b) for b in d["branch"]),
            cx(d["c"]),
            ComplexPoly(tuple(cx(z) for z in d["p"])),
            tuple(cx(z) for z in d.get("s", [])),
        )


@dataclass(frozen=True)
class NodalSolution:
    candidate: NodalCandidate
    residual: float
    node_count: int
    tangent_dim: int
    iterations: int = 0
    singular_values: tuple[float, ...] = ()
    sv_gap: float = float("inf")
    doubles: tuple[complex, ...] = ()
    simple: tuple[complex, ...] = field(default=())

    def to_json(self) -> dict:
        g = genus_report(self)
        return {
            "p": [[z.real, z.imag] for z in self.candidate.p_coeffs()],
            "c": [self.candidate.c.real, self.candidate.c.imag],
            "doubles": [[z.real, z.imag] for z in self.doubles],
            "residual": self.residual,
            "node_count": self.node_count,
            "tangent_dim": self.tangent_dim,
            "genus": {"arith": g["genus_arith"], "geom": g["genus_geom"]},
        }


# ---------------------------------------------------------------------------
# constraint system
# ---------------------------------------------------------------------------


def constraint_system(cand: NodalCandidate) -> np.ndarray:
    """``(r(s_1), r'(s_1), ..., r(s_{l-1}), r'(s_{l-1}))`` for ``r = p^2 - 4q``."""
    r = cand.r
    dr = r.derivative()
    out = []
    for s in cand.s:
        out += [r(s), dr(s)]
    return np.array(out, dtype=complex)


def scaled_constraint_residual(cand: NodalCandidate) -> float:
    """Worst constraint residual relative to the coefficient size of ``p^2`` and
    ``4q``, times ``max(1, |s|)^(2l)``."""
    if cand.ell == 1:
        return 0.0
    f = np.abs(constraint_system(cand))
    base = max(cand.p.max_coeff() ** 2, 4 * cand.q.max_coeff())
    reach = np.maximum(1.0, np.abs(np.array(cand.s))) ** (2 * cand.ell)
    scale = base * np.repeat(reach, 2) * np.tile([1.0, 2 * cand.ell], cand.ell - 1)
    return float((f / scale).max())


def constraint_jacobian(cand: NodalCandidate) -> np.ndarray:
    """Complex Jacobian of :func:`constraint_system` with respect to all unknowns."""
    l = cand.ell
    p = cand.p
    dp = p.derivative()
    q1 = ComplexPoly.from_roots(cand.branch)
    dq1 = q1.derivative()
    r = cand.r
    dr = r.derivative()
    ddr = dr.derivative()
    jac = np.zeros((2 * (l - 1), 2 * l + 1), dtype=complex)
    for j, s in enumerate(cand.s):
        ps, dps = p(s), dp(s)
        row0, row1 = 2 * j, 2 * j + 1
        for i in range(l + 1):
            jac[row0, i] = 2 * ps * s**i
            jac[row1, i] = 2 * (s**i * dps + (i * s ** (i - 1) if i else 0) * ps)
        jac[row0, l + 1] = -4 * q1(s)
        jac[row1, l + 1] = -4 * dq1(s)
        jac[row0, l + 2 + j] = dr(s)
        jac[row1, l + 2 + j] = ddr(s)
    return jac


def _frozen_indices(ell: int, frozen: Sequence[str]) -> list[int]:
    n = 2 * ell + 1
    names = [f"p{i}" for i in range(ell + 1)] + ["c"] + [f"s{j}" for j in range(1, ell)]
    out = []
    for f in frozen:
        part, _, name = f.partition("_")
        if part not in ("re", "im") or name not in names:
            raise ValueError(f"unknown gauge coordinate {f!r}")
        out.append(names.index(name) + (n if part == "im" else 0))
    return out


def _realify(jac: np.ndarray) -> np.ndarray:
    return np.block([[jac.real, -jac.imag], [jac.imag, jac.real]])


def kernel_report(cand: NodalCandidate, rel_cut: float = 1e-7) -> tuple[int, tuple[float, ...], float]:
    """Complex kernel dimension of the constraint Jacobian, its singular values
    (padded with zeros to the number of unknowns) and the gap between the
    smallest kept and largest discarded value."""
    n = cand.n_unknowns
    if cand.ell == 1:
        return n, (0.0,) * n, float("inf")
    sv = np.linalg.svd(constraint_jacobian(cand), compute_uv=False)
    sv = np.concatenate([sv, np.zeros(n - len(sv))])
    cut = rel_cut * sv[0]
    kept = sv[sv > cut]
    dropped = sv[sv <= cut]
    floor = np.finfo(float).eps * sv[0]
    gap = kept.min() / max(dropped.max() if len(dropped) else 0.0, floor) if len(kept) else 0.0
    return n - len(kept), tuple(float(x) for x in sv), float(gap)


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


def newton_solve(
    seed: NodalCandidate,
    frozen: Sequence[str] = DEFAULT_FROZEN,
    tol: float = 1e-10,
    maxiter: int = 60,
    cluster_tol: float = 1e-8,
) -> NodalSolution:
    """Gauss-Newton on the double-zero conditions with some real coordinates frozen.

    Steps are minimum-norm least-squares updates in the remaining real
    coordinates, with step halving whenever the residual norm would grow. On
    convergence the node count is certified independently by clustering the
    roots of ``p^2 - 4q``, and the tangent dimension is read off the complex
    Jacobian.
    """
    ell = seed.ell
    if ell == 1:
        n = seed.n_unknowns
        return NodalSolution(seed, 0.0, 0, n, 0, (0.0,) * n, float("inf"))

    fixed = _frozen_indices(ell, frozen)
    n = seed.n_unknowns
    free = [i for i in range(2 * n) if i not in fixed]
    v = seed.vector()
    x = np.concatenate([v.real, v.imag])

    def cand_of(xr):
        return seed.with_vector(xr[:n] + 1j * xr[n:])

    def fnorm(cand):
        f = constraint_system(cand)
        return np.concatenate([f.real, f.imag])

    cand = cand_of(x)
    f = fnorm(cand)
    it = 0
    while scaled_constraint_residual(cand) > tol * 1e-3:
        if it >= maxiter:
            if scaled_constraint_residual(cand) <= tol:
                break
            raise Divergence(f"no convergence in {maxiter} iterations (residual {scaled_constraint_residual(cand):.2e})")
        it += 1
        jr = _realify(constraint_jacobian(cand))[:, free]
        step = np.linalg.lstsq(jr, -f, rcond=None)[0]
        lam, base = 1.0, np.linalg.norm(f)
        while True:
            xt = x.copy()
            xt[free] += lam * step
            ct = cand_of(xt)
            ft = fnorm(ct)
            if np.all(np.isfinite(ft)) and (np.linalg.norm(ft) < base or lam < 1e-3):
                break
            lam /= 2
        if not np.all(np.isfinite(ft)):
            raise Divergence("iteration left the finite range")
        if np.linalg.norm(ft) >= base and scaled_constraint_residual(ct) > tol:
            if scaled_constraint_residual(cand) <= tol:
                break
            raise Divergence("Gauss-Newton stalled")
        x, cand, f = xt, ct, ft

    resid = scaled_constraint_residual(cand)
    if resid > tol:
        raise Divergence(f"final residual {resid:.2e} above {tol:.1e}")
    tdim, sv, gap = kernel_report(cand)
    if tdim != 3:
        raise RankDeficient(f"constraint Jacobian has a {tdim}-dimensional kernel, expected 3")
    cl = double_root_clusters(cand.r, tol=cluster_tol)
    return NodalSolution(
        cand, resid, cl.node_count, tdim, it, sv, gap, tuple(cl.double), tuple(cl.simple)
    )


# ---------------------------------------------------------------------------
# instance construction and continuation
# ---------------------------------------------------------------------------


def construct_instance(
    ell: int,
    doubles: Sequence[complex],
    simple: Sequence[complex],
    p: ComplexPoly,
    lead: complex = 1.0,
) -> NodalCandidate:
    """Build a solved instance backwards: fix ``r = lead * prod(x - s_j)^2 * prod(x - t)``
    and ``p``, then ``q = (p^2 - r)/4`` determines ``c`` and the branch points."""
    if len(doubles) != ell - 1 or len(simple) != 2:
        raise ValueError(f"need {ell - 1} doubles and 2 simple roots")
    r = ComplexPoly.from_roots(list(doubles) + list(doubles) + list(simple), lead)
    q = (p * p - r) * 0.25
    if q.degree != 2 * ell:
        raise ValueError("p^2 - r must have degree 2l; adjust lead")
    branch = roots(q).roots
    return NodalCandidate(ell, tuple(branch), q.leading, p, tuple(doubles))


def match_branch(src: Sequence[complex], dst: Sequence[complex]) -> list[complex]:
    """Reorder ``dst`` to pair each point with the nearest in ``src``."""
    cost = np.abs(np.subtract.outer(np.array(src), np.array(dst)))
    _, cols = linear_sum_assignment(cost)
    return [complex(dst[j]) for j in cols]


def continue_branch(
    start: NodalCandidate,
    target: Sequence[complex],
    steps: int = 20,
    frozen: Sequence[str] = (),
    tol: float = 1e-10,
    min_step: float = 1e-4,
) -> NodalSolution:
    """Move the branch points linearly to ``target``, re-solving at each step.

    The step halves on failure. With no frozen coordinates each update is the
    minimum-norm correction, so the solution tracks the family continuously.
    """
    b0 = np.array(start.branch)
    b1 = np.array(match_branch(start.branch, target))
    t, dt = 0.0, 1.0 / steps
    cur = start
    sol = None
    while t < 1.0:
        t_new = min(1.0, t + dt)
        trial = replace(cur, branch=tuple((1 - t_new) * b0 + t_new * b1))
        try:
            sol = newton_solve(trial, frozen=frozen, tol=tol)
        except (Divergence, RankDeficient):
            dt /= 2
            if dt < min_step:
                raise Divergence(f"continuation stalled at t={t:.4f}")
            continue
        cur, t = sol.candidate, t_new
        dt = min(dt * 1.5, 1.0 / steps * 4)
    if sol is None:
        sol = newton_solve(cur, frozen=frozen, tol=tol)
    return sol


def reach_branch(
    start: NodalCandidate,
    target: Sequence[complex],
    steps: int = 20,
    attempts: int = 6,
    seed: int = 0,
) -> NodalSolution:
    """``continue_branch`` with detours: when the straight path stalls (the
    family can degenerate along it), go through a randomly displaced complex
    midpoint instead."""
    b1 = np.array(match_branch(start.branch, target))
    try:
        return continue_branch(start, b1, steps=steps)
    except Divergence:
        pass
    rng = np.random.default_rng(seed)
    b0 = np.array(start.branch)
    scale = max(1.0, float(np.max(np.abs(b1 - b0))))
    for _ in range(attempts):
        bump = 0.3 * scale * (rng.normal(size=len(b0)) + 1j * rng.normal(size=len(b0)))
        try:
            mid = continue_branch(start, (b0 + b1) / 2 + bump, steps=steps)
            return continue_branch(mid.candidate, b1, steps=steps)
        except Divergence:
            continue
    raise Divergence(f"no continuation path found after {attempts} detours")


def node_check(sol: NodalSolution | NodalCandidate) -> float:
    """Largest of ``|F|, |dF/dx|, |dF/dw|`` at each node ``(s, -p(s)/2)`` of
    ``F = w^2 + p w + q``, scaled by the size of the terms of ``F``."""
    cand = sol.candidate if isinstance(sol, NodalSolution) else sol
    p, q = cand.p, cand.q
    dp, dq = p.derivative(), q.derivative()
    worst = 0.0
    for s in cand.s:
        w = -p(s) / 2
        f = w * w + p(s) * w + q(s)
        fx = dp(s) * w + dq(s)
        fw = 2 * w + p(s)
        scale = max(abs(w) ** 2, abs(p(s) * w), abs(q(s)), abs(dp(s) * w), abs(dq(s)), 1e-300)
        worst = max(worst, abs(f) / scale, abs(fx) / scale, abs(fw) / scale)
    return worst


def genus_report(sol: NodalSolution, config: CurveConfig | None = None) -> dict:
    """Arithmetic genus from the intersection numbers, geometric genus after
    subtracting the certified nodes."""
    cfg = config or CurveConfig.a_series(sol.candidate.ell)
    rep = verify_theorem(cfg)
    g_arith = rep.genus_arith
    g_geom = g_arith - sol.node_count
    return {"genus_arith": g_arith, "genus_geom": g_geom, "pass": g_geom == 0}


# ---------------------------------------------------------------------------
# documented seeds
# ---------------------------------------------------------------------------


def seed_ell2() -> NodalCandidate:
    """Seed on branch points ``(1, -1, 2, -2)``, a perturbation of the exact
    solution ``p = x^2 + 4, c = 1`` (there ``p^2 - 4q = x^2 (28 - 3 x^2)``).
    With ``Re p_0`` frozen, Newton lands on a nearby member of the family."""
    return NodalCandidate(2, (1, -1, 2, -2), 1.0, ComplexPoly((4.2, 0.0, 1.0)), (0.05,))


def seed_ell3() -> NodalCandidate:
    """Reverse-constructed instance for l = 3, used as the start of a
    continuation to the sixth roots of unity."""
    p = ComplexPoly((0.1, 0.0, 0.0, 1.0))
    return construct_instance(3, (0.45, -0.4 + 0.3j), (1.2, -0.9j), p, lead=-3.0)


def sixth_roots_of_unity() -> list[complex]:
    return [complex(np.exp(2j * np.pi * k / 6)) for k in range(6)]


def solve_ell3_on_roots_of_unity(steps: int = 20) -> NodalSolution:
    return continue_branch(seed_ell3(), sixth_roots_of_unity(), steps=steps)


def default_instance(ell: int) -> NodalCandidate:
    """Deterministic reverse-constructed instance for any ``l >= 1``: doubles
    spread on a circle of radius 1/2, simple roots at ``+-1.3``."""
    doubles = [0.5 * np.exp(2j * np.pi * (j + 0.25) / max(ell - 1, 1)) for j in range(ell - 1)]
    p = ComplexPoly(tuple([0.1] + [0.0] * (ell - 1) + [1.0]))
    return construct_instance(ell, doubles, (1.3, -1.3), p, lead=-2.0)
