"""Complex univariate polynomials, certified roots, resultants and root clusters.

Coefficients are stored in ascending order of degree. All floating point
work is in double precision; nothing here is symbolic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AmbiguousClustering, NonConvergence, ZeroPolynomial

#: default certification tolerance for scaled root residuals
CERT_TOL = 1e-10


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial ``sum(coeffs[i] * u**i)`` with complex coefficients.

    Exact zeros at the top are dropped on construction, so the zero polynomial
    has ``coeffs == ()``. Small but nonzero leading coefficients are kept unless
    :meth:`trimmed` is called explicitly.
    """

    coeffs: tuple[complex, ...] = ()

    def __post_init__(self):
        cs = [complex(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    # -- construction -----------------------------------------------------
    @classmethod
    def from_roots(cls, roots: Iterable[complex], leading: complex = 1.0) -> "ComplexPoly":
        out = cls((leading,))
        for r in roots:
            out = out * cls((-r, 1.0))
        return out

    @classmethod
    def monomial(cls, degree: int, coeff: complex = 1.0) -> "ComplexPoly":
        return cls((0,) * degree + (coeff,))

    @classmethod
    def constant(cls, c: complex) -> "ComplexPoly":
        return cls((c,))

    # -- basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        if not self.coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def max_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def trimmed(self, atol: float) -> "ComplexPoly":
        """Drop leading coefficients with modulus ``<= atol``."""
        cs = list(self.coeffs)
        while cs and abs(cs[-1]) <= atol:
            cs.pop()
        return ComplexPoly(tuple(cs))

    # -- evaluation -------------------------------------------------------
    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        acc = np.zeros_like(u)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc if acc.ndim else complex(acc)

    def abs_eval(self, u):
        """``sum |c_i| |u|^i``, the natural scale for residuals at ``u``."""
        r = np.abs(np.asarray(u, dtype=complex))
        acc = np.zeros_like(r)
        for c in reversed(self.coeffs):
            acc = acc * r + abs(c)
        return acc if acc.ndim else float(acc)

    def derivative(self, order: int = 1) -> "ComplexPoly":
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [i * c for i, c in enumerate(cs)][1:]
        return ComplexPoly(tuple(cs))

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "ComplexPoly":
        if isinstance(other, ComplexPoly):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return ComplexPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return ComplexPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return ComplexPoly()
        out = [0j] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return ComplexPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = ComplexPoly((1,))
        for _ in range(n):
            out = out * self
        return out

    def scale_variable(self, lam: complex) -> "ComplexPoly":
        """Return ``u -> p(lam * u)``."""
        return ComplexPoly(tuple(c * lam**i for i, c in enumerate(self.coeffs)))

    def reversed(self, degree: int | None = None) -> "ComplexPoly":
        """Return ``u**degree * p(1/u)``; ``degree`` defaults to ``self.degree``."""
        d = self.degree if degree is None else degree
        cs = self.coeffs + (0,) * (d + 1 - len(self.coeffs))
        return ComplexPoly(tuple(reversed(cs)))

    def max_diff(self, other: "ComplexPoly") -> float:
        """Largest coefficientwise modulus of ``self - other``."""
        return (self - other).max_coeff()

    def to_json(self):
        return [[c.real, c.imag] for c in self.coeffs]

    def __repr__(self):
        return f"ComplexPoly({list(self.coeffs)!r})"


def poly_arith(a: ComplexPoly, b: ComplexPoly, op: str) -> ComplexPoly:
    """Apply ``op`` in ``{"add", "sub", "mul"}`` to two polynomials."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicity together with their certification data.

    ``residuals[i]`` is ``|p(r_i)|`` relative to ``max_j |c_j| * max(1, |r_i|)^n``,
    a norm-wise backward error of root ``i``. ``reconstruction_error`` is the coefficientwise gap
    between ``p`` and ``leading * prod(u - r_i)`` relative to ``max |c_j|``.
    """

    roots: np.ndarray
    residuals: np.ndarray
    reconstruction_error: float
    tol: float
    certified: bool = field(default=False)

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def scaled_residuals(p: ComplexPoly, rs) -> np.ndarray:
    """``|p(r)| / (max_j |c_j| * max(1, |r|)^deg p)`` for each ``r``."""
    rs = np.atleast_1d(np.asarray(rs, dtype=complex))
    scale = p.max_coeff() * np.maximum(1.0, np.abs(rs)) ** max(p.degree, 0)
    if p.max_coeff() == 0:
        return np.zeros(len(rs))
    return np.abs(p(rs)) / scale


def _companion_roots(p: ComplexPoly) -> np.ndarray:
    a = p.array()
    n = p.degree
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -a[-2::-1] / a[-1]
    comp[1:, :-1] = np.eye(n - 1)
    return np.linalg.eigvals(comp)


def _aberth_step(p: ComplexPoly, dp: ComplexPoly, z: np.ndarray) -> np.ndarray:
    pz = p(z)
    dpz = dp(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = pz / dpz
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        inv = 1.0 / diff
        inv[~np.isfinite(inv)] = 0.0
        s = inv.sum(axis=1)
        step = ratio / (1.0 - ratio * s)
    step[~np.isfinite(step)] = 0.0
    return z - step


def roots(p: ComplexPoly, tol: float = CERT_TOL, maxiter: int = 50, strict: bool = True) -> RootSet:
    """All complex roots of ``p`` with multiplicity.

    Companion-matrix eigenvalues seed a simultaneous Aberth iteration; each
    sweep is kept only if it lowers the worst scaled residual. With
    ``strict=True`` an uncertified result raises :class:`NonConvergence`,
    otherwise it is returned with ``certified=False``.
    """
    if p.is_zero:
        raise ZeroPolynomial("cannot take roots of the zero polynomial")
    if p.degree < 1:
        raise ValueError("roots() needs degree >= 1")
    if p.degree == 1:
        z = np.array([-p.coeffs[0] / p.coeffs[1]])
    else:
        z = _companion_roots(p)
    if not np.all(np.isfinite(z)):
        raise NonConvergence("eigenvalue step produced non-finite roots")

    dp = p.derivative()
    res = scaled_residuals(p, z)
    best, best_res = z, res.max()
    stall = 0
    for _ in range(maxiter):
        if best_res <= tol * 1e-4 or p.degree == 1:
            break
        z = _aberth_step(p, dp, best)
        res = scaled_residuals(p, z)
        if np.all(np.isfinite(z)) and res.max() < best_res:
            best, best_res = z, res.max()
            stall = 0
        else:
            stall += 1
            if stall >= 2:
                break

    res = scaled_residuals(p, best)
    recon = ComplexPoly.from_roots(best, p.leading)
    recon_err = recon.max_diff(p) / p.max_coeff()
    certified = bool(res.max() <= tol)
    if strict and not certified:
        raise NonConvergence(f"worst scaled residual {res.max():.3e} exceeds tolerance {tol:.1e}")
    order = np.lexsort((best.imag, best.real))
    return RootSet(best[order], res[order], float(recon_err), tol, certified)


# ---------------------------------------------------------------------------
# resultant / discriminant
# ---------------------------------------------------------------------------


def sylvester_matrix(p: ComplexPoly, q: ComplexPoly) -> np.ndarray:
    n, m = p.degree, q.degree
    a = p.array()[::-1]
    b = q.array()[::-1]
    size = n + m
    mat = np.zeros((size, size), dtype=complex)
    for i in range(m):
        mat[i, i : i + n + 1] = a
    for i in range(n):
        mat[m + i, i : i + m + 1] = b
    return mat


def resultant(p: ComplexPoly, q: ComplexPoly) -> complex:
    """Sylvester resultant, ``lc(p)**deg(q) * prod q(alpha_i)`` over the roots of ``p``."""
    if p.is_zero or q.is_zero:
        return 0j
    if p.degree == 0:
        return p.coeffs[0] ** q.degree
    if q.degree == 0:
        return q.coeffs[0] ** p.degree
    return complex(np.linalg.det(sylvester_matrix(p, q)))


def discriminant(p: ComplexPoly) -> complex:
    """Discriminant normalised so that ``disc(x^2 + b x + c) == b^2 - 4c``."""
    n = p.degree
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(p, p.derivative()) / p.leading


# ---------------------------------------------------------------------------
# multiplicity detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootClusters:
    double: list[complex]
    simple: list[complex]
    higher: list[tuple[complex, int]]

    @property
    def node_count(self) -> int:
        return len(self.double)


def _single_linkage(points: Sequence[complex], radius: float) -> list[list[int]]:
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(n), 2):
        if abs(points[i] - points[j]) <= radius:
            parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def _refine_multiple(p: ComplexPoly, start: complex, mult: int, cert_tol: float) -> complex | None:
    """Newton on ``p^(mult-1)`` from ``start``; return the point if it is a root
    of ``p, p', ..., p^(mult-1)`` to ``cert_tol`` in scaled residual, else None."""
    d = p.derivative(mult - 1)
    dd = d.derivative()
    z = complex(start)
    for _ in range(30):
        dz = dd(z)
        if dz == 0:
            break
        step = d(z) / dz
        z -= step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    for j in range(mult):
        pj = p.derivative(j)
        if pj.degree < 1 or scaled_residuals(pj, [z])[0] > cert_tol:
            return None
    return z


def _collapse_multiple_roots(p, rs, merge_radius, cert_tol):
    rs = list(rs)
    for group in _single_linkage(rs, merge_radius):
        if len(group) < 2:
            continue
        centroid = sum(rs[i] for i in group) / len(group)
        z = _refine_multiple(p, centroid, len(group), cert_tol)
        if z is not None:
            for i in group:
                rs[i] = z
    return rs


def double_root_clusters(
    p: ComplexPoly,
    tol: float = 1e-8,
    merge_radius: float = 1e-4,
    cert_tol: float = CERT_TOL,
) -> RootClusters:
    """Split the roots of ``p`` into double, simple and higher clusters.

    Numerically multiple roots spread out by roughly the square root of the
    backward error, so roots closer than ``merge_radius`` are first tested as a
    single multiple root: the centroid is polished by Newton on the matching
    derivative and accepted when ``p`` and its derivatives vanish there to
    ``cert_tol``. The refined roots are then clustered by single linkage at
    ``tol``; if clustering at ``2 * tol`` disagrees, :class:`AmbiguousClustering`
    is raised.
    """
    if p.degree < 2:
        raise ValueError("double_root_clusters needs degree >= 2")
    rs = roots(p, tol=cert_tol, strict=False).roots
    rs = _collapse_multiple_roots(p, rs, merge_radius, cert_tol)
    groups = _single_linkage(rs, tol)
    if groups != _single_linkage(rs, 2 * tol):
        raise AmbiguousClustering(f"root clustering differs between tol={tol:g} and {2 * tol:g}")

    double, simple, higher = [], [], []
    for g in groups:
        c = complex(sum(rs[i] for i in g) / len(g))
        if len(g) == 1:
            simple.append(c)
        elif len(g) == 2:
            double.append(c)
        else:
            higher.append((c, len(g)))
    key = lambda z: (round(z.real, 12), round(z.imag, 12))  # noqa: E731
    return RootClusters(sorted(double, key=key), sorted(simple, key=key), sorted(higher, key=lambda t: key(t[0])))
