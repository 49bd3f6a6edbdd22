"""Exact intersection theory for the compactified fibre surfaces.

Two independent routes are provided:

* :class:`CurveConfig` holds the configuration of rational curves at infinity
  (``C, E, F, G`` or ``C, D1, D2``) with its intersection matrix. The class
  ``Q`` of a twistor-line image, its square, its canonical degree and the node
  count all come from this matrix alone.
* :func:`blowup_model` rebuilds the same curves as strict transforms inside an
  explicit blow-up of the plane (D series) or of a Hirzebruch surface (A
  series), and is used to cross-check the configuration data.

Everything is integer or rational arithmetic; no floats appear here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import NonIntegralSolution, SingularSystem, UnsupportedType

# ---------------------------------------------------------------------------
# small exact linear algebra
# ---------------------------------------------------------------------------


def _solve_exact(mat: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction]:
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(mat, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem("intersection matrix of the configuration is degenerate")
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def _bilinear(gram, x, y) -> int:
    return sum(x[i] * gram[i][j] * y[j] for i in range(len(x)) for j in range(len(y)))


# ---------------------------------------------------------------------------
# divisor classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivisorClass:
    """Integer combination of the basis of a lattice or configuration."""

    basis: tuple[str, ...]
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.basis) != len(self.coeffs):
            raise ValueError("basis and coefficient lengths differ")
        if not all(isinstance(c, int) for c in self.coeffs):
            raise TypeError("divisor coefficients must be integers")

    @classmethod
    def from_mapping(cls, basis: Sequence[str], terms: Mapping[str, int]) -> "DivisorClass":
        unknown = set(terms) - set(basis)
        if unknown:
            raise KeyError(f"unknown basis elements {sorted(unknown)}")
        return cls(tuple(basis), tuple(int(terms.get(b, 0)) for b in basis))

    def _check(self, other: "DivisorClass"):
        if self.basis != other.basis:
            raise ValueError("divisor classes live on different bases")

    def __add__(self, other):
        self._check(other)
        return DivisorClass(self.basis, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return DivisorClass(self.basis, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return DivisorClass(self.basis, tuple(-a for a in self.coeffs))

    def __rmul__(self, k: int):
        return DivisorClass(self.basis, tuple(k * a for a in self.coeffs))

    def as_dict(self) -> dict[str, int]:
        return {b: c for b, c in zip(self.basis, self.coeffs) if c}

    def __str__(self):
        parts = []
        for b, c in zip(self.basis, self.coeffs):
            if c:
                parts.append(f"{c:+d}{b}" if abs(c) != 1 else f"{'+' if c > 0 else '-'}{b}")
        return "".join(parts).lstrip("+") or "0"


# ---------------------------------------------------------------------------
# configurations at infinity
# ---------------------------------------------------------------------------

_TYPE_RE = re.compile(r"^\s*([ADE])\s*\(?\s*(\d+)\s*\)?\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class CurveConfig:
    """Named rational curves with self-intersections and transverse meetings.

    ``curves[0]`` is always the curve ``C`` on which ``Q`` has degree 2.
    """

    type: str
    curves: tuple[str, ...]
    self_int: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]
    gamma_order: int

    def __post_init__(self):
        n = len(self.curves)
        if len(self.self_int) != n or len(self.adjacency) != n:
            raise ValueError("inconsistent configuration sizes")
        for i in range(n):
            if len(self.adjacency[i]) != n or self.adjacency[i][i] != 0:
                raise ValueError("adjacency must be square with zero diagonal")
            for j in range(n):
                if self.adjacency[i][j] != self.adjacency[j][i]:
                    raise ValueError("adjacency must be symmetric")

    @property
    def gram(self) -> list[list[int]]:
        n = len(self.curves)
        return [[self.self_int[i] if i == j else self.adjacency[i][j] for j in range(n)] for i in range(n)]

    def index(self, name: str) -> int:
        return self.curves.index(name)

    def divisor(self, **terms: int) -> DivisorClass:
        return DivisorClass.from_mapping(self.curves, terms)

    def canonical_degrees(self) -> list[int]:
        """``K . C_i = -2 - C_i^2`` for each (smooth rational) curve."""
        return [-2 - s for s in self.self_int]

    # -- factories --------------------------------------------------------
    @classmethod
    def a_series(cls, ell: int) -> "CurveConfig":
        """``A(2l-1)``: fibre ``C`` (square 0) meeting sections ``D1, D2`` (square ``-l``)."""
        if ell < 1:
            raise ValueError("A(2l-1) needs l >= 1")
        adj = ((0, 1, 1), (1, 0, 0), (1, 0, 0))
        return cls(f"A{2 * ell - 1}", ("C", "D1", "D2"), (0, -ell, -ell), adj, 2 * ell)

    @classmethod
    def d_series(cls, k: int) -> "CurveConfig":
        if k < 4:
            raise ValueError("D(k) needs k >= 4")
        return cls(f"D{k}", ("C", "E", "F", "G"), (-1, -(k - 2), -2, -2), _STAR, 4 * (k - 2))

    @classmethod
    def e_series(cls, k: int) -> "CurveConfig":
        orders = {6: 24, 7: 48, 8: 120}
        if k not in orders:
            raise ValueError("E(k) needs k in {6, 7, 8}")
        return cls(f"E{k}", ("C", "E", "F", "G"), (-1, 3 - k, -2, -3), _STAR, orders[k])

    @classmethod
    def from_name(cls, name: str) -> "CurveConfig":
        """Parse ``"A5"``, ``"D(7)"``, ``"E8"`` and similar."""
        m = _TYPE_RE.match(name)
        if not m:
            raise UnsupportedType(f"cannot parse configuration type {name!r}")
        letter, n = m.group(1).upper(), int(m.group(2))
        if letter == "A":
            if n % 2 == 0:
                raise UnsupportedType("only A(2l-1) with odd index is modelled")
            return cls.a_series((n + 1) // 2)
        if letter == "D":
            return cls.d_series(n)
        return cls.e_series(n)


_STAR = ((0, 1, 1, 1), (1, 0, 0, 0), (1, 0, 0, 0), (1, 0, 0, 0))


def supported_configs() -> list[CurveConfig]:
    """The configurations exercised by the verification suite."""
    out = [CurveConfig.a_series(l) for l in range(1, 7)]
    out += [CurveConfig.d_series(k) for k in range(4, 11)]
    out += [CurveConfig.e_series(k) for k in (6, 7, 8)]
    return out


# ---------------------------------------------------------------------------
# Q and its numerical invariants
# ---------------------------------------------------------------------------


def solve_Q(config: CurveConfig) -> DivisorClass:
    """Integer class in the span of the curves with ``Q.C = 2`` and ``Q.X = 0``
    for every other configuration curve."""
    rhs = [2] + [0] * (len(config.curves) - 1)
    sol = _solve_exact(config.gram, rhs)
    if any(x.denominator != 1 for x in sol):
        raise NonIntegralSolution(f"Q for {config.type} is not integral: {[str(x) for x in sol]}")
    return DivisorClass(config.curves, tuple(int(x) for x in sol))


def pairings(config: CurveConfig, d: DivisorClass) -> dict[str, int]:
    """Self-intersection and canonical degree of a class in the curve span."""
    if d.basis != config.curves:
        raise ValueError("divisor is not expressed in this configuration's curves")
    return {
        "self": _bilinear(config.gram, d.coeffs, d.coeffs),
        "canonical": sum(c * k for c, k in zip(d.coeffs, config.canonical_degrees())),
    }


@dataclass(frozen=True)
class TheoremReport:
    type: str
    Q: DivisorClass
    Q2: int
    KQ: int
    delta: int
    family_dim: int
    genus_arith: int
    gamma_order: int
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "type": self.type,
            "Q": {"coeffs": self.Q.as_dict()},
            "Q2": self.Q2,
            "KQ": self.KQ,
            "delta": self.delta,
            "family_dim": self.family_dim,
            "genus_arith": self.genus_arith,
            "pass": self.passed,
        }


def verify_theorem(config: CurveConfig) -> TheoremReport:
    q = solve_Q(config)
    pr = pairings(config, q)
    q2, kq = pr["self"], pr["canonical"]
    if config.gamma_order % 2:
        raise ValueError("group order must be even")
    delta = config.gamma_order // 2 - 1
    family_dim = q2 + 1 - 2 * delta
    two_g_minus_2 = kq + q2
    genus = two_g_minus_2 // 2 + 1
    checks = {
        "Q2_equals_gamma_order": q2 == config.gamma_order,
        "KQ_equals_minus_4": kq == -4,
        "family_dim_equals_3": family_dim == 3,
        "genus_equals_delta": two_g_minus_2 % 2 == 0 and genus == delta,
    }
    return TheoremReport(config.type, q, q2, kq, delta, family_dim, genus, config.gamma_order, checks)


# ---------------------------------------------------------------------------
# blow-up lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PicardLattice:
    """Lattice with an integer Gram matrix and a canonical class.

    For plane models the basis is ``H`` followed by one exceptional class per
    blow-up, the Gram matrix is ``diag(1, -1, ..., -1)`` and
    ``K = -3H + sum(exceptional)``. Infinitely near points are handled on the
    curve side: strict transforms subtract every exceptional class they pass
    through, so the basis stays orthogonal.
    """

    basis: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]
    canonical: tuple[int, ...]

    def dot(self, a: DivisorClass, b: DivisorClass) -> int:
        if a.basis != self.basis or b.basis != self.basis:
            raise ValueError("class not expressed in this lattice's basis")
        return _bilinear(self.gram, a.coeffs, b.coeffs)

    @property
    def K(self) -> DivisorClass:
        return DivisorClass(self.basis, self.canonical)

    def cls(self, **terms: int) -> DivisorClass:
        return DivisorClass.from_mapping(self.basis, terms)


class _BlowupBuilder:
    """Track curve classes through successive point blow-ups.

    Each blow-up adds an exceptional class ``e`` (square -1, orthogonal to
    everything else) and subtracts ``mult * e`` from the classes of the curves
    listed as passing through the point. The caller names those curves,
    including exceptional curves of earlier blow-ups when the new point is
    infinitely near.
    """

    def __init__(self, basis, gram, canonical):
        self.basis = list(basis)
        self.gram = [list(r) for r in gram]
        self.canonical = list(canonical)
        self.curves: dict[str, dict[str, int]] = {}

    def add_curve(self, name, terms):
        self.curves[name] = dict(terms)

    def blow_up(self, point, through=(), mult=None):
        n = len(self.basis)
        self.basis.append(point)
        for row in self.gram:
            row.append(0)
        self.gram.append([0] * n + [-1])
        self.canonical.append(1)
        mult = mult or {}
        for c in through:
            cur = self.curves[c]
            cur[point] = cur.get(point, 0) - mult.get(c, 1)
        self.curves[point] = {point: 1}

    def lattice(self) -> PicardLattice:
        return PicardLattice(tuple(self.basis), tuple(tuple(r) for r in self.gram), tuple(self.canonical))

    def classes(self, lat: PicardLattice, names) -> dict[str, DivisorClass]:
        return {k: DivisorClass.from_mapping(lat.basis, self.curves[v]) for k, v in names.items()}


def blowup_model(type_: str | CurveConfig) -> tuple[PicardLattice, dict[str, DivisorClass]]:
    """Explicit blow-up lattice carrying the configuration curves.

    ``D(k)``: the plane with a conic ``E`` and a line ``G`` tangent to it at
    ``f`` and passing through ``x``. Blow up ``x``, ``f`` and ``e_1..e_k`` on the
    conic, then the point ``a`` on the exceptional curve of ``f`` where the three
    strict transforms still meet; its exceptional curve is ``C``.

    ``A(2l-1)``: the Hirzebruch surface ``P(O + O(l))`` with fibre ``C``, the
    negative section ``D1`` and the zero section blown up at ``2l`` points,
    whose strict transform is ``D2``.

    E-series configurations are not modelled and raise :class:`UnsupportedType`.
    """
    cfg = CurveConfig.from_name(type_) if isinstance(type_, str) else type_
    letter, n = cfg.type[0], int(cfg.type[1:])
    if letter == "D":
        b = _BlowupBuilder(("H",), ((1,),), (-3,))
        b.add_curve("conic", {"H": 2})
        b.add_curve("line", {"H": 1})
        b.blow_up("X", through=["line"])
        b.blow_up("Ff", through=["conic", "line"])
        for i in range(1, n + 1):
            b.blow_up(f"E{i}", through=["conic"])
        b.blow_up("C", through=["conic", "line", "Ff"])
        lat = b.lattice()
        return lat, b.classes(lat, {"C": "C", "E": "conic", "F": "Ff", "G": "line"})
    if letter == "A":
        ell = (n + 1) // 2
        # basis: negative section s (s^2 = -l), fibre f; zero section s + l f
        b = _BlowupBuilder(("S", "Fib"), ((-ell, 1), (1, 0)), (-2, -(ell + 2)))
        b.add_curve("fibre", {"Fib": 1})
        b.add_curve("neg", {"S": 1})
        b.add_curve("zero", {"S": 1, "Fib": ell})
        for i in range(1, 2 * ell + 1):
            b.blow_up(f"A{i}", through=["zero"])
        lat = b.lattice()
        return lat, b.classes(lat, {"C": "fibre", "D1": "neg", "D2": "zero"})
    raise UnsupportedType(f"no blow-up model for {cfg.type}; E-series is configuration-only")


def anticanonical_combination(cfg: CurveConfig) -> dict[str, int]:
    """Coefficients of the anticanonical divisor supported on the configuration."""
    if cfg.type[0] == "A":
        return {"C": 2, "D1": 1, "D2": 1}
    return {"C": 2, "E": 1, "F": 1, "G": 1}


def blowup_crosscheck(type_: str | CurveConfig) -> dict[str, bool]:
    """Compare the blow-up model against the configuration Gram matrix and the
    anticanonical identity ``-K = 2C + E + F + G`` (``2C + D1 + D2`` for A)."""
    cfg = CurveConfig.from_name(type_) if isinstance(type_, str) else type_
    lat, cl = blowup_model(cfg)
    gram_ok = all(
        lat.dot(cl[a], cl[b]) == cfg.gram[i][j]
        for i, a in enumerate(cfg.curves)
        for j, b in enumerate(cfg.curves)
    )
    combo = anticanonical_combination(cfg)
    total = DivisorClass(lat.basis, (0,) * len(lat.basis))
    for name, k in combo.items():
        total = total + k * cl[name]
    return {"gram_matches_config": gram_ok, "anticanonical": total == -lat.K}
