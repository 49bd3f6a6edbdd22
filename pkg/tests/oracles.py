"""Independent reference computations used by the tests.

None of these import the code under test; they rely on mpmath, plain
floating point or exact rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import mpmath as mp
import numpy as np


def agm_K(m: float, iters: int = 40) -> float:
    """Complete elliptic integral ``K(m) = pi / (2 AGM(1, sqrt(1 - m)))``."""
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(iters):
        a, b = (a + b) / 2, math.sqrt(a * b)
    return math.pi / (2 * a)


def lemniscate_half_period(dps: int = 30) -> float:
    """``int_{-1}^{1} du / sqrt(1 - u^4)`` by tanh-sinh quadrature."""
    with mp.workdps(dps):
        return float(2 * mp.quad(lambda u: 1 / mp.sqrt(1 - u**4), [0, 1]))


def mp_roots(coeffs_ascending) -> list[complex]:
    with mp.workdps(40):
        rs = mp.polyroots([mp.mpc(c) for c in reversed(list(coeffs_ascending))], maxsteps=200, extraprec=200)
    return sorted((complex(r) for r in rs), key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def resultant_from_roots(p_coeffs, q_coeffs) -> complex:
    """``lc(p)^deg q * prod q(root of p)``, the Sylvester convention."""
    rp = mp_roots(p_coeffs)
    q = np.polynomial.Polynomial(q_coeffs)
    return complex(p_coeffs[-1]) ** (len(q_coeffs) - 1) * complex(np.prod([q(r) for r in rp]))


def quartic_invariants(c):
    """Weierstrass invariants ``g2, g3`` of ``c0 + c1 u + ... + c4 u^4``.

    Writing the quartic as ``a u^4 + 4b u^3 + 6c u^2 + 4d u + e``, the curve
    ``w^2 = quartic`` has ``du/w`` with the same period lattice as
    ``dx/y`` on ``y^2 = 4x^3 - g2 x - g3``.
    """
    e, d4, c6, b4, a = (complex(x) for x in c)
    b, cc, d = b4 / 4, c6 / 6, d4 / 4
    g2 = a * e - 4 * b * d + 3 * cc * cc
    g3 = a * cc * e + 2 * b * cc * d - cc**3 - a * d * d - b * b * e
    return g2, g3


def lattice_invariants(w1: complex, w2: complex, terms: int = 60):
    """``g2 = 60 G4``, ``g3 = 140 G6`` of ``Z w1 + Z w2`` from q-expansions."""
    tau = w2 / w1
    if tau.imag < 0:
        tau = -tau
    with mp.workdps(30):
        q = mp.exp(2j * mp.pi * mp.mpc(tau))
        s3 = sum(_sigma(n, 3) * q**n for n in range(1, terms))
        s5 = sum(_sigma(n, 5) * q**n for n in range(1, terms))
        E4 = 1 + 240 * s3
        E6 = 1 - 504 * s5
        f = 2 * mp.pi / mp.mpc(w1)
        return complex(f**4 * E4 / 12), complex(f**6 * E6 / 216)


def _sigma(n: int, k: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def brute_nearest_lattice_distance(v: complex, w1: complex, w2: complex, span: int = 40) -> float:
    """Exhaustive search over a window centred on the real coordinates of ``v``."""
    x, y = np.linalg.solve([[w1.real, w2.real], [w1.imag, w2.imag]], [v.real, v.imag])
    m0, n0 = int(round(x)), int(round(y))
    best = math.inf
    for m, n in product(range(m0 - span, m0 + span + 1), range(n0 - span, n0 + span + 1)):
        best = min(best, abs(v - m * w1 - n * w2))
    return best


def fraction_gram_product(gram, x, y) -> Fraction:
    return sum(Fraction(x[i]) * gram[i][j] * y[j] for i in range(len(x)) for j in range(len(y)))
