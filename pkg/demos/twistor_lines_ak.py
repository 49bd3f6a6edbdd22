"""
Twistor lines for the A_k family
================================

Build the polynomials x, y, z of a line from (a, c, A) and the levels, and
confirm that xy equals the level product.
"""

import numpy as np

from aletwistor import aklines

# %%
# A single line with k = 2.
params = aklines.AkParams(k=2, a=0.4, c=0.3 - 0.8j, A=1.0, levels=(-1.0, 0.2, 1.5))
line = aklines.build_line(params)
print("z =", line.z)
print("x =", line.x)
print("y =", line.y)
print("residual", aklines.residual_ak(line, params.levels))

# %%
# Root splitting: each factor z - a_i u contributes one root to x and one to y.
for lvl, al, be in zip(params.levels, line.alphas, line.betas):
    print(f"level {lvl:+.1f}: alpha={al:.6f}  beta={be:.6f}")

# %%
# A random sweep over k = 0..6.
rng = np.random.default_rng(0)
for k in range(7):
    worst = 0.0
    for _ in range(200):
        p = aklines.random_params(k, rng)
        worst = max(worst, aklines.residual_ak(aklines.build_line(p), p.levels))
    print(f"k={k}: worst residual {worst:.2e}")
