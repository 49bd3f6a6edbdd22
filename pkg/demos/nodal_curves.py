"""
Maximally nodal spectral curves
===============================

Newton's method on the double-root conditions for p^2 - 4q, starting from a
seed for l = 2, then continuation of an l = 3 solution to the sixth roots of
unity and to a real target.
"""

import numpy as np

from aletwistor import nodal

# %%
# l = 2: one double root, and a three-dimensional family of solutions.
sol = nodal.newton_solve(nodal.seed_ell2())
print("residual", sol.residual, "nodes", sol.node_count, "tangent dim", sol.tangent_dim)
print("singular values", np.round(sol.singular_values, 6))
print("double root", sol.doubles)

# %%
# l = 3 continued to branch points at the sixth roots of unity.
sol3 = nodal.solve_ell3_on_roots_of_unity()
print("branch points", np.round(sol3.candidate.branch, 12))
print("doubles", np.round(sol3.doubles, 8), "genus", nodal.genus_report(sol3))

# %%
# A real target, reached with detours around collisions when needed.
real = nodal.reach_branch(nodal.default_instance(3), [1, -1, 2, -2, 3, -3])
print("real branch target residual", real.residual, "nodes", real.node_count)

# %%
# Reverse construction: pick the nodes first and read off q.
cand = nodal.construct_instance(4, [0.3 + 0.2j, -0.5j, 0.8], [1.5, -1.4 + 0.1j], nodal.ComplexPoly((0.1, 0, 0.2, 0, 1.0)), lead=-2.0)
print("l=4 instance", nodal.newton_solve(cand).node_count, "nodes")
