"""Each family is an orbit: subgroup elements move points along it and keep the spectrum.

Run:  python demos/04_homogeneity.py
"""
import numpy as np

from sol04 import catalog as cat
from sol04 import hypersurface as hs

rng = np.random.default_rng(7)
for tag, r in [("M1", 0.5), ("M2", 0.5), ("M3", 0.5), ("M4", 0.0)]:
    patch = cat.family_patch(tag, r)
    base = cat.base_point(tag, r)
    print(f"{tag}(r={r:g}) base point {np.round(base.as_array(), 4)}")
    for g in cat.random_group_params(tag, rng, 3):
        p = cat.orbit_sample(tag, g, r)
        kap = hs.shape_spectrum(patch, patch.locate(p.as_array())).kappas
        print(f"  g = {np.round(g, 3)} -> residual {cat.implicit_residual(tag, p, r):.1e}, kappas {np.round(kap, 6)}")
    rep = cat.homogeneity_report(tag, n=50, r=r, seed=0)
    print(f"  50 random elements: {'all checks pass' if rep.passed else 'FAILED'}\n")
