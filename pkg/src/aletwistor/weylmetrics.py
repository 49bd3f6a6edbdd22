"""Numerical curvature checks for the Eguchi-Hanson metric and its relatives.

Metrics are written in the left-invariant coframe of SU(2), realised in Euler
angles ``(theta, phi, psi)``::

    sigma1 =  cos(psi) dtheta + sin(psi) sin(theta) dphi
    sigma2 = -sin(psi) dtheta + cos(psi) sin(theta) dphi
    sigma3 =  dpsi + cos(theta) dphi

so that ``sigma1^2 + sigma2^2 = dtheta^2 + sin(theta)^2 dphi^2`` and
``(sigma1^2 + sigma2^2 + sigma3^2) / 4`` is the unit round 3-sphere.

Curvature is obtained by finite differences: Christoffel symbols from central
differences of the metric, the Riemann tensor from central differences of the
Christoffel symbols, followed by one Richardson step in ``h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, GridTooSmall

# ---------------------------------------------------------------------------
# coframe metrics
# ---------------------------------------------------------------------------


def euler_forms(theta: float, psi: float) -> np.ndarray:
    """Rows are ``sigma1, sigma2, sigma3`` in the basis ``(dtheta, dphi, dpsi)``."""
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cp, sp * st, 0.0],
            [-sp, cp * st, 0.0],
            [0.0, ct, 1.0],
        ]
    )


@dataclass(frozen=True)
class CoframeMetric:
    """Diagonal metric ``A(x) dx^2 + sum_i B_i(x) sigma_i^2`` in a radial variable ``x``.

    ``coefficients(x)`` returns ``(A, B1, B2, B3)``. With ``dim = 3`` the
    ``sigma3`` term is dropped and the coordinates are ``(x, theta, phi)``; this
    needs ``B1 == B2`` so the result does not depend on ``psi``.
    """

    coefficients: Callable[[float], Sequence[float]]
    domain: tuple[float, float]
    dim: int = 4
    name: str = ""

    def check(self, x: float, margin: float = 0.0) -> None:
        lo, hi = self.domain
        if not (lo + margin < x < hi - margin):
            raise DomainError(f"{self.name or 'metric'}: x={x} outside ({lo}, {hi}) with margin {margin}")

    def __call__(self, coords: Sequence[float]) -> np.ndarray:
        """Coordinate-basis matrix at ``(x, theta, phi[, psi])``."""
        x, theta, phi = coords[0], coords[1], coords[2]
        psi = coords[3] if self.dim == 4 else 0.0
        A, B1, B2, B3 = self.coefficients(x)
        E = euler_forms(theta, psi)
        n = self.dim
        g = np.zeros((n, n))
        g[0, 0] = A
        ang = B1 * np.outer(E[0], E[0]) + B2 * np.outer(E[1], E[1])
        if n == 4:
            ang = ang + B3 * np.outer(E[2], E[2])
            g[1:, 1:] = ang
        else:
            if B1 != B2:
                raise ValueError("a 3-dimensional coframe metric needs equal sigma1, sigma2 coefficients")
            g[1:, 1:] = ang[:2, :2]
        return g


def eh_coframe_coefficients(r):
    """``(A, B1, B2, B3)`` of Eguchi-Hanson:
    ``dr^2 / (1 - r^-4) + r^2/4 (sigma1^2 + sigma2^2) + r^2/4 (1 - r^-4) sigma3^2``.

    Works with floats and ``Fraction``; at ``r = 1`` the ``dr^2`` coefficient
    is infinite and is returned as ``math.inf``.
    """
    f = 1 - r ** -4
    A = math.inf if f == 0 else 1 / f
    return (A, r * r / 4, r * r / 4, r * r / 4 * f)


def eguchi_hanson() -> CoframeMetric:
    return CoframeMetric(eh_coframe_coefficients, (1.0, math.inf), 4, "eguchi-hanson")


def round_sphere_product() -> CoframeMetric:
    """``dx^2 + (sigma1^2 + sigma2^2 + sigma3^2)/4``: a line times the unit 3-sphere."""
    return CoframeMetric(lambda x: (1.0, 0.25, 0.25, 0.25), (-math.inf, math.inf), 4, "line x S3")


def hyperbolic_model() -> CoframeMetric:
    """``rho^2 / (1 - rho^4)^2 (drho^2 + rho^2/4 (sigma1^2 + sigma2^2))`` on ``0 < rho < 1``."""

    def coeff(rho):
        w = rho * rho / (1 - rho**4) ** 2
        return (w, w * rho * rho / 4, w * rho * rho / 4, 0.0)

    return CoframeMetric(coeff, (0.0, 1.0), 3, "hyperbolic")


def eh_metric(r: float, theta: float, phi: float, psi: float) -> np.ndarray:
    """Eguchi-Hanson in the coordinates ``(r, theta, phi, psi)``."""
    if not r > 1:
        raise DomainError(f"Eguchi-Hanson needs r > 1, got {r}")
    return eguchi_hanson()((r, theta, phi, psi))


def flat_cone_metric(r: float, theta: float, phi: float, psi: float) -> np.ndarray:
    """``dr^2 + r^2/4 (sigma1^2 + sigma2^2 + sigma3^2)``, the large-``r`` model."""
    m = CoframeMetric(lambda x: (1.0, x * x / 4, x * x / 4, x * x / 4), (0.0, math.inf), 4)
    return m((r, theta, phi, psi))


# ---------------------------------------------------------------------------
# finite-difference curvature
# ---------------------------------------------------------------------------

MetricFn = Callable[[np.ndarray], np.ndarray]


def _dmetric(g: MetricFn, x: np.ndarray, h: float) -> np.ndarray:
    """``dg[c, a, b] = d_c g_ab`` by central differences."""
    n = len(x)
    out = np.empty((n, n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        out[c] = (g(x + e) - g(x - e)) / (2 * h)
    return out


def christoffel(g: MetricFn, x: np.ndarray, h: float) -> np.ndarray:
    """``Gamma[a, b, c] = Gamma^a_{bc}``."""
    x = np.asarray(x, dtype=float)
    ginv = np.linalg.inv(g(x))
    dg = _dmetric(g, x, h)
    # lower[e, b, c] = (d_b g_ec + d_c g_eb - d_e g_bc) / 2
    lower = 0.5 * (np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg)
    return np.einsum("ae,ebc->abc", ginv, lower)


def _riemann_once(g: MetricFn, x: np.ndarray, h: float) -> np.ndarray:
    n = len(x)
    G = christoffel(g, x, h)
    dG = np.empty((n, n, n, n))  # dG[c, a, b, d] = d_c Gamma^a_{bd}
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        dG[c] = (christoffel(g, x + e, h) - christoffel(g, x - e, h)) / (2 * h)
    # R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
    R = np.einsum("cadb->abcd", dG) - np.einsum("dacb->abcd", dG)
    R += np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G)
    return R


def riemann_numeric(g: MetricFn, x: Sequence[float], h: float = 1e-3, richardson: bool = True) -> np.ndarray:
    """``R[a, b, c, d] = R^a_{bcd}``; with ``richardson`` the steps ``h`` and ``h/2``
    are combined as ``(4 R(h/2) - R(h)) / 3``."""
    x = np.asarray(x, dtype=float)
    R1 = _riemann_once(g, x, h)
    if not richardson:
        return R1
    R2 = _riemann_once(g, x, h / 2)
    return (4 * R2 - R1) / 3


def ricci_from_riemann(R: np.ndarray) -> np.ndarray:
    return np.einsum("abad->bd", R)


def _as_metric_fn(metric) -> MetricFn:
    if isinstance(metric, CoframeMetric):

        def g(x):
            metric.check(x[0])
            return metric(x)

        return g
    return metric


def ricci_numeric(metric, point: Sequence[float], h: float = 1e-3, richardson: bool = True) -> np.ndarray:
    """Ricci tensor ``Ric_{bd}`` at ``point``; raises DomainError when the
    stencil (reach ``2h``) leaves the metric's domain."""
    if isinstance(metric, CoframeMetric):
        metric.check(point[0], margin=2 * h)
    return ricci_from_riemann(riemann_numeric(_as_metric_fn(metric), point, h, richardson))


def sectional_curvature(g_at: np.ndarray, R: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    Rlow = np.einsum("ae,ebcd->abcd", g_at, R)
    num = np.einsum("abcd,a,b,c,d->", Rlow, X, Y, X, Y)
    den = (X @ g_at @ X) * (Y @ g_at @ Y) - (X @ g_at @ Y) ** 2
    return float(num / den)


def convergence_order(metric, point, hs: Sequence[float] = (1e-2, 5e-3, 2.5e-3, 1.25e-3)) -> tuple[float, list[float]]:
    """Least-squares slope of ``log max|Ric(h)|`` against ``log h`` (no Richardson)."""
    errs = [float(np.max(np.abs(ricci_numeric(metric, point, h, richardson=False)))) for h in hs]
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    return float(slope), errs


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

EH_SAMPLES = (
    (1.5, 1.0, 0.3, 0.7),
    (1.2, 0.6, 1.1, 2.0),
    (2.0, 1.3, -0.4, 0.2),
    (3.0, 2.2, 2.5, -1.0),
    (5.0, 0.9, 0.0, 1.5),
)


def eh_ricci_check(points: Sequence[Sequence[float]] = EH_SAMPLES, h: float = 1e-3) -> dict:
    metric = eguchi_hanson()
    maxes = [float(np.max(np.abs(ricci_numeric(metric, p, h)))) for p in points]
    order, _ = convergence_order(metric, points[0])
    return {"max_ricci": max(maxes), "per_point": maxes, "order": order, "h": h}


def moment_identity_error(r) -> object:
    """``B3(r) - (t - 1/t)/4`` with ``t = r^2``; exactly 0 for ``Fraction`` input."""
    t = r * r
    return eh_coframe_coefficients(r)[3] - (t - 1 / t) / 4


def toda_constant(r: float) -> float:
    """``|X| / |d(r^2)|`` for the Killing field ``X = d/dpsi``.

    If ``lambda * r^2`` is a moment map for ``X`` this ratio is ``lambda``.
    """
    A, _, _, B3 = eh_coframe_coefficients(r)
    x_norm2 = B3
    dt_norm2 = (2 * r) ** 2 / A
    return math.sqrt(x_norm2 / dt_norm2)


def moment_check(samples: Sequence) -> dict:
    errs = [moment_identity_error(r) for r in samples]
    consts = [toda_constant(float(r)) for r in samples]
    return {
        "max_identity_error": float(max(abs(e) for e in errs)),
        "exact": all(isinstance(e, Fraction) and e == 0 for e in errs),
        "toda_constant": float(np.mean(consts)),
        "toda_constant_spread": float(max(consts) - min(consts)),
    }


def rho_to_r(rho: float) -> float:
    """Solve ``2 r^2 = rho^2 + rho^-2`` for ``r > 0``."""
    return math.sqrt((rho * rho + rho**-2) / 2)


HYPERBOLIC_SAMPLES = tuple(np.round(np.linspace(0.15, 0.85, 10), 6))


def hyperbolic_check(samples: Sequence[float] = HYPERBOLIC_SAMPLES, h: float = 5e-4, theta: float = 1.1) -> dict:
    """Sectional curvatures of the hyperbolic model on the three coordinate
    planes at each sample; the common value is measured."""
    metric = hyperbolic_model()
    g = _as_metric_fn(metric)
    curv = []
    pair_err = []
    for rho in samples:
        if not 0.1 <= rho <= 0.9:
            raise DomainError(f"rho={rho} outside the sampled range [0.1, 0.9]")
        x = np.array([rho, theta, 0.4])
        R = riemann_numeric(g, x, h)
        gx = g(x)
        basis = np.eye(3)
        for i, j in ((0, 1), (0, 2), (1, 2)):
            curv.append(sectional_curvature(gx, R, basis[i], basis[j]))
        r = rho_to_r(rho)
        pair_err.append(abs(2 * r * r - rho * rho - rho**-2))
    mean = float(np.mean(curv))
    return {
        "curvature": mean,
        "curvatures": curv,
        "max_deviation": float(max(abs(k - mean) for k in curv)),
        "pairing_error": float(max(pair_err)),
    }


def weyl_form(t):
    """Coefficient of ``dt`` in ``omega = -d log(t^2 - 1)``."""
    return -2 * t / (t * t - 1)


def weyl_form_check(samples: Sequence[float], h: float = 1e-4) -> dict:
    """Certify that ``omega = -2t/(t^2 - 1) dt`` is closed and equals ``-d log(t^2 - 1)``.

    The curl is taken on a ``(t, s)`` grid where ``omega`` is ``(f(t), 0)``; it
    vanishes because ``f`` does not depend on ``s``. The exactness check
    compares ``f`` with a central difference of ``-log(t^2 - 1)``.
    """
    ts = np.asarray(samples, dtype=float)
    if np.any(ts <= 1 + 1e-6):
        raise DomainError("omega is singular at t = 1; samples must exceed 1 + 1e-6")
    ss = np.linspace(-1, 1, 5)
    T, S = np.meshgrid(ts, ss, indexing="ij")
    wt = weyl_form(T)
    ws = np.zeros_like(S)
    curl = np.gradient(ws, ts, axis=0) - np.gradient(wt, ss, axis=1) if len(ts) > 1 else -np.gradient(wt, ss, axis=1)
    hh = h * np.maximum(1.0, ts)
    hh = np.minimum(hh, (ts - 1) / 4)
    pot = lambda t: -np.log(t * t - 1)
    fd = (pot(ts + hh) - pot(ts - hh)) / (2 * hh)
    exact_err = np.abs(fd - weyl_form(ts)) / np.maximum(1.0, np.abs(weyl_form(ts)))
    integral, _ = quad(weyl_form, 2.0, 3.0, epsabs=1e-13, epsrel=1e-13)
    return {
        "max_curl": float(np.max(np.abs(curl))),
        "exactness_error": float(np.max(exact_err)),
        "integral_2_3": integral,
        "integral_error": abs(integral + math.log(8 / 3)),
    }


# ---------------------------------------------------------------------------
# Toda residual
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridFunction:
    """Samples ``u[i, j, k] = u(x0 + i hx, y0 + j hy, t0 + k ht)``."""

    values: np.ndarray
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    shape: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 3:
            raise ValueError("values must be a 3-dimensional array")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "shape", vals.shape)
        if any(h <= 0 for h in self.spacing):
            raise ValueError("grid spacings must be positive")

    @classmethod
    def from_function(cls, f, xs: np.ndarray, ys: np.ndarray, ts: np.ndarray) -> "GridFunction":
        X, Y, T = np.meshgrid(xs, ys, ts, indexing="ij")
        sp = tuple(float(a[1] - a[0]) if len(a) > 1 else 1.0 for a in (xs, ys, ts))
        return cls(f(X, Y, T), sp, (float(xs[0]), float(ys[0]), float(ts[0])))

    def coords(self, idx: tuple[int, int, int]) -> tuple[float, float, float]:
        return tuple(o + i * h for o, i, h in zip(self.origin, idx, self.spacing))

    def to_json(self):
        return {"values": self.values.tolist(), "spacing": list(self.spacing), "origin": list(self.origin)}

    @classmethod
    def from_json(cls, data: dict) -> "GridFunction":
        return cls(np.array(data["values"], dtype=float), tuple(data["spacing"]), tuple(data.get("origin", (0, 0, 0))))


@dataclass(frozen=True)
class TodaResidual:
    max_abs: float
    index: tuple[int, int, int]
    location: tuple[float, float, float]
    field: np.ndarray


def _second_diff(a: np.ndarray, axis: int, h: float) -> np.ndarray:
    n = a.shape[axis]
    lo = np.take(a, range(0, n - 2), axis=axis)
    mid = np.take(a, range(1, n - 1), axis=axis)
    hi = np.take(a, range(2, n), axis=axis)
    return (hi - 2 * mid + lo) / (h * h)


def toda_residual(u: GridFunction) -> TodaResidual:
    """``u_xx + u_yy + (e^u)_tt`` by central differences on interior points."""
    if min(u.shape) < 5:
        raise GridTooSmall(f"need at least 5 points per axis, got {u.shape}")
    v = u.values
    hx, hy, ht = u.spacing
    res = (
        _second_diff(v, 0, hx)[:, 1:-1, 1:-1]
        + _second_diff(v, 1, hy)[1:-1, :, 1:-1]
        + _second_diff(np.exp(v), 2, ht)[1:-1, 1:-1, :]
    )
    flat = int(np.argmax(np.abs(res)))
    inner = np.unravel_index(flat, res.shape)
    idx = tuple(int(i) + 1 for i in inner)
    return TodaResidual(float(np.abs(res).max()), idx, u.coords(idx), res)
