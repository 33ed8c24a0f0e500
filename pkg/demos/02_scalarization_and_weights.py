# Scalarization is what turns one multi-objective problem into many scalar
# ones. This script contrasts the weighted sum with the Tchebycheff form on
# the corridor front, then shows weight generation, multiplicative weight
# adaptation, and reference-point tracking.

import numpy as np

from paretoq import (
    ReferencePoint,
    adapt_weights_psa,
    build_neighborhood,
    generate_weights_uniform,
    scalarize_tch,
    scalarize_ws,
)

FRONT = [(1.0, -1.0), (2.0, -2.0), (3.0, -3.0), (5.0, -4.0), (10.0, -5.0)]

# Weighted sum: sweep the weight simplex and record which front point wins.
# Only the two extremes ever do; the interior of the front is invisible to
# any linear preference.
print("weighted-sum winners across the simplex:")
for lam1 in np.linspace(0.0, 1.0, 11):
    lam = np.array([lam1, 1.0 - lam1])
    winner = max(FRONT, key=lambda f: scalarize_ws(f, lam))
    print(f"  lam = ({lam[0]:.1f}, {lam[1]:.1f}) -> {winner}")

# Tchebycheff measures the largest weighted distance to a utopian point, so
# minimizing it can single out the concave interior too.
z = ReferencePoint(m=2, tau=0.5)
z.update(FRONT)
print(f"\nadaptive reference point after seeing the front: {z.values}")
print("Tchebycheff winners across the simplex:")
for lam1 in np.linspace(0.0, 1.0, 11):
    lam = np.array([lam1, 1.0 - lam1])
    winner = min(FRONT, key=lambda f: scalarize_tch(f, lam, z))
    print(f"  lam = ({lam[0]:.1f}, {lam[1]:.1f}) -> {winner}")

# Uniform weight sets: an exact lattice for two objectives, the simplex
# lattice for more.
print("\nuniform weights, m=2 n=5:", [tuple(map(float, w)) for w in generate_weights_uniform(2, 5)])
print("uniform weights, m=3 n=6:", [tuple(map(float, w)) for w in generate_weights_uniform(3, 6)])

# Multiplicative adaptation nudges a subproblem away from its nearest
# neighbor: objectives it already wins get more weight.
lam = np.array([0.5, 0.5])
own, neighbor = np.array([2.0, -2.0]), np.array([1.0, -1.0])
for step in range(4):
    lam = adapt_weights_psa(lam, own, neighbor, delta=1.05)
    print(f"adaptation step {step}: lam = {lam}")

# Neighborhoods order subproblems by weight-vector distance.
weights = generate_weights_uniform(2, 5)
print("\nneighborhood lists (k=2):", build_neighborhood(weights, 2))
