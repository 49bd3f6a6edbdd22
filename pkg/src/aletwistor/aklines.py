"""Twistor lines for the A_k equation ``x y = prod_i (z - a_i u)``.

A line is fixed by a real ``a``, a nonzero complex ``c`` and a nonzero complex
``A``. The quadratic ``z(u) = c u^2 + a u - conj(c)`` is split against every
level ``a_i``; the two roots of ``z - a_i u`` are told apart by the sign of the
(positive, real) square root of the discriminant, the ``+`` root going to
``x`` and the ``-`` root to ``y``. Only ``A / |A|`` is a genuine coordinate;
``|A|`` rescales ``x`` and ``y`` oppositely and leaves ``x y`` unchanged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonPositiveDiscriminant
from .polycore import ComplexPoly


@dataclass(frozen=True)
class AkParams:
    k: int
    a: float
    c: complex
    A: complex
    levels: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(x) for x in self.levels))
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "A", complex(self.A))
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if len(self.levels) != self.k + 1:
            raise ValueError(f"A_{self.k} needs {self.k + 1} levels, got {len(self.levels)}")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError("levels must be distinct")
        if self.A == 0:
            raise ValueError("A must be nonzero")
        if isinstance(self.a, complex) and self.a.imag != 0:
            raise ValueError("a must be real")
        object.__setattr__(self, "a", float(np.real(self.a)))

    def discriminants(self) -> list[float]:
        cc = (self.c * self.c.conjugate()).real
        return [(self.a - ai) ** 2 + 4 * cc for ai in self.levels]


@dataclass(frozen=True)
class TwistorLineAk:
    z: ComplexPoly
    x: ComplexPoly
    y: ComplexPoly
    alphas: tuple[complex, ...]
    betas: tuple[complex, ...]
    params: AkParams | None = None

    def to_json(self, levels: Sequence[float] | None = None) -> dict:
        levels = levels if levels is not None else (self.params.levels if self.params else None)
        out = {
            "alphas": [[a.real, a.imag] for a in self.alphas],
            "betas": [[b.real, b.imag] for b in self.betas],
            "x": self.x.to_json(),
            "y": self.y.to_json(),
            "z": self.z.to_json(),
        }
        if levels is not None:
            out["residual"] = residual_ak(self, levels)
        return out


def split_roots(params: AkParams) -> tuple[tuple[complex, ...], tuple[complex, ...]]:
    """Roots ``(alpha_i, beta_i)`` of ``z - a_i u = c (u - alpha_i)(u - beta_i)``."""
    alphas, betas = [], []
    c = params.c
    if c == 0:
        raise NonPositiveDiscriminant("c = 0 gives a degenerate quadratic")
    for ai, disc in zip(params.levels, params.discriminants()):
        if not disc > 0:
            raise NonPositiveDiscriminant(f"discriminant {disc} at level {ai} is not positive")
        root = math.sqrt(disc)
        b = params.a - ai
        alphas.append((-b + root) / (2 * c))
        betas.append((-b - root) / (2 * c))
    return tuple(alphas), tuple(betas)


def z_polynomial(params: AkParams) -> ComplexPoly:
    return ComplexPoly((-params.c.conjugate(), params.a, params.c))


def build_line(params: AkParams) -> TwistorLineAk:
    alphas, betas = split_roots(params)
    x = ComplexPoly.from_roots(alphas, params.A)
    y = ComplexPoly.from_roots(betas, params.c ** (params.k + 1) / params.A)
    return TwistorLineAk(z_polynomial(params), x, y, alphas, betas, params)


def level_product(z: ComplexPoly, levels: Sequence[float]) -> ComplexPoly:
    """``prod_i (z - a_i u)``."""
    out = ComplexPoly((1,))
    for ai in levels:
        out = out * (z - ComplexPoly((0, ai)))
    return out


def residual_ak(line: TwistorLineAk, levels: Sequence[float]) -> float:
    """Relative coefficient residual of ``x y - prod (z - a_i u)``."""
    rhs = level_product(line.z, levels)
    scale = rhs.max_coeff()
    diff = (line.x * line.y - rhs).max_coeff()
    if scale == 0:
        return diff
    return diff / scale


def residual_dk(x: ComplexPoly, y: ComplexPoly, z: ComplexPoly, levels: Sequence[float]) -> float:
    """Scaled residual of ``z x^2 - (z y + u^k prod a_i)^2 + prod (z + a_i^2 u^2)``.

    Candidate D_k lines are only checked here, never constructed. The scale is
    the largest coefficient among the three terms, so a zero identity scores 0.
    """
    k = len(levels)
    prod_a = math.prod(levels)
    t1 = z * x * x
    t2 = (z * y + ComplexPoly.monomial(k, prod_a)) ** 2
    t3 = ComplexPoly((1,))
    for ai in levels:
        t3 = t3 * (z + ComplexPoly.monomial(2, ai * ai))
    scale = max(t1.max_coeff(), t2.max_coeff(), t3.max_coeff())
    if scale == 0:
        return 0.0
    return (t1 - t2 + t3).max_coeff() / scale


def random_params(k: int, rng: np.random.Generator) -> AkParams:
    """A random well-posed parameter set: ``|c|`` bounded away from 0 and the
    levels spread on ``[-2, 2]``."""
    while True:
        levels = np.sort(rng.uniform(-2, 2, k + 1))
        if k == 0 or np.min(np.diff(levels)) > 1e-3:
            break
    c = cmath.rect(rng.uniform(0.2, 2.0), rng.uniform(0, 2 * math.pi))
    A = cmath.rect(rng.uniform(0.2, 2.0), rng.uniform(0, 2 * math.pi))
    return AkParams(k, float(rng.uniform(-2, 2)), c, A, tuple(levels))
