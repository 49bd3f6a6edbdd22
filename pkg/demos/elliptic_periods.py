"""
Periods, the Abel map, and the D4 constraint
============================================

Periods of w^2 = z(u) for a quartic z, principality of divisors by Abel sums,
and a coefficient of z tuned so that the D4 divisor becomes principal.
"""

import numpy as np
from scipy.special import ellipk

from aletwistor import delliptic
from aletwistor.polycore import ComplexPoly, roots

# %%
# The lemniscatic curve w^2 = 1 - u^4: a square lattice. The integral of
# du/w from -1 to 1 is half of the cycle around that cut.
w1, w2 = delliptic.periods(ComplexPoly((1, 0, 0, 0, -1)))
half = np.sqrt(2) * ellipk(0.5)
print("basis", w1, w2)
print("|w1| / sqrt(2) =", abs(w1) / np.sqrt(2), " reference", half)

# %%
# The Legendre quartic (1 - u^2)(1 - m u^2) against K(m), K(1 - m).
m = 0.3
print(delliptic.periods(ComplexPoly((1, 0, -(1 + m), 0, m))), 4 * ellipk(m), 2j * ellipk(1 - m))

# %%
# Divisors of functions are principal: w - q(u) has its zeros at the roots
# of z - q^2 and a double pole at each point at infinity.
curve = delliptic.elliptic_curve(ComplexPoly((0.3 + 0.1j, -0.2j, 1.1, 0.4 - 0.2j, 0.9 + 0.3j)))
q = ComplexPoly((0.2 - 0.1j, 0.5, -0.3j))
zeros = [delliptic.CurvePoint(complex(u), complex(q(u))) for u in roots(curve.z - q * q).roots]
inf = [delliptic.CurvePoint.infinity(s, curve.z) for s in (1, -1)]
print("w - q(u):", delliptic.principality_residual(curve, zeros, inf * 2).lattice_distance)
print("random divisor:", delliptic.principality_residual(curve, zeros[:2], inf).lattice_distance)

# %%
# The D4 divisor on a tuned curve, and the search over root assignments.
ex = delliptic.certified_d4_example()
exh = delliptic.d4_exhaustive(delliptic.elliptic_curve(ex.z), ex.a, ex.signs)
ranked = sorted(exh.residuals.items(), key=lambda kv: kv[1])
print("best selectors", [(s, float(d)) for s, d in ranked[:3]])

# %%
# Perturb the constant coefficient and solve it back.
cs = list(ex.z.coeffs)
cs[0] += 1e-3
res = delliptic.constraint_solve(ComplexPoly(tuple(cs)), 0, ex.a, ex.signs, ex.selector)
print("recovered c0", res.z.coeffs[0], "in", res.iterations, "steps; distance", res.residual.lattice_distance)
