"""Tubes and parallel families traced by normal geodesics.

M1(r) is the tube of radius r about the plane {x = y = 0}; M2(r) and M3(r) are
parallel to M2(0) and M3(0).  We shoot geodesics and evaluate the implicit
equation of the target hypersurface at their endpoints.

Run:  python demos/03_tubes_and_parallels.py
"""
import numpy as np

from sol04 import catalog as cat
from sol04 import hypersurface as hs

rng = np.random.default_rng(1)
for r in (0.5, 1.0):
    z0, t0, alpha = rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 5), rng.uniform(0, 2 * np.pi, 5)
    ends = cat.tube_endpoints(r, z0, t0, alpha, steps=4000)
    res = max(abs(cat.implicit_residual("M1", p, r)) for p in ends)
    print(f"tube radius {r}: max implicit residual of M1({r}) over 5 geodesics = {res:.1e}")

for tag in ("M2", "M3"):
    for r in (0.25, 0.5, 1.0):
        print(f"{tag}(0) pushed a distance {r:4}: residual on {tag}({r}) = {cat.parallel_residual(tag, r, steps=4000):.1e}")

# Parallel hypersurfaces are not congruent: their Ricci spectra differ.
print("\nRicci spectra of M2(r):")
for r in (0.0, 0.25, 0.5, 1.0):
    patch = cat.family_patch("M2", r)
    print(f"  r = {r:4}: {np.round(np.sort(hs.induced_ricci(patch, patch.center())), 6)}")
