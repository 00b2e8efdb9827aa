"""Tour of the ambient group: the group law, the left-invariant frame and its curvature.

Run:  python demos/01_ambient_geometry.py
"""
import math

import numpy as np

from sol04 import ambient
from sol04.solgroup import Point, compose, inverse

p = Point(1.0, -2.0, 0.5, 0.3)
q = Point(0.2, 0.4, -1.0, -0.7)
print("p * q         =", compose(p, q))
print("p * p^-1      =", compose(p, inverse(p)))
print("associativity =", np.max(np.abs(compose(compose(p, q), p).as_array()
                                      - compose(p, compose(q, p)).as_array())))

# Sectional curvatures of the coordinate planes of the frame E1..E4.
E = np.eye(4)
print("\nsectional curvature K(Ei, Ej):")
for i in range(4):
    for j in range(i + 1, 4):
        print(f"  K(E{i + 1}, E{j + 1}) = {ambient.sectional_arrays(E[i], E[j]):+.6f}")

# The frame is left invariant, so a generic plane has the same curvature at every point.
X, Y = np.array([1.0, 0.5, -0.2, 0.3]), np.array([0.0, 1.0, 0.7, -0.4])
print(f"\nK(X, Y) for a generic plane: {ambient.sectional_arrays(X, Y):+.9f}")

print("\nidentity residuals (torsion, metric compatibility, ...):")
for kind in ambient.SELFCHECK_KINDS:
    print(f"  {kind:<24s} {ambient.ambient_selfcheck(kind):.2e}")

# A unit-speed geodesic along E4 is the t-axis.
ends, _ = ambient.geodesic_batch(np.zeros((1, 4)), E[3][None], 1.5, 2000)
print("\ngeodesic from the origin along E4 for length 1.5 ends at", np.round(ends[0], 12))
print("t-coordinate equals arc length:", math.isclose(ends[0, 3], 1.5))
