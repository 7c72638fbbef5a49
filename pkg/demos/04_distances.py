"""
Distances between signed signals
================================

The signed transport distance between two signals equals a plain weighted
Euclidean distance between their transforms, so it can be computed once per
signal and compared cheaply afterwards.
"""

from scdt import Grid, gaussian, normalize_l1, scdt, signed_distance, transform_distance, uniform

grid = Grid(0.0, 1.0, 2048)
s0 = uniform(grid)

a = gaussian(grid, 0.40, 0.04) - gaussian(grid, 0.55, 0.03, 0.8)
b = gaussian(grid, 0.45, 0.05) - gaussian(grid, 0.62, 0.03, 0.6)
print(f"signed distance     {signed_distance(a, b, s0):.8f}")
print(f"transform distance  {transform_distance(scdt(a, s0), scdt(b, s0), s0):.8f}")

# For a shifted bump the distance is the shift itself.
bump = normalize_l1(gaussian(grid, 0.45, 0.05))
for tau in (0.01, 0.05, 0.1):
    moved = normalize_l1(gaussian(grid, 0.45 + tau, 0.05))
    print(f"shift {tau:.2f}: distance {signed_distance(bump, moved, s0):.5f}")

# Scaling changes only the mass coordinate.
print(f"doubled copy: distance {signed_distance(bump, 2 * bump, s0):.6f}")
