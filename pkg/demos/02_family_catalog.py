"""The four homogeneous families: principal curvatures, Ricci and sectional curvature.

Each family patch carries its implicit equation.  Principal curvatures come from
the shape operator computed numerically and are compared with the closed forms.

Run:  python demos/02_family_catalog.py
"""
import numpy as np

from sol04 import catalog as cat
from sol04 import hypersurface as hs

for tag, r in [("M1", 1.0), ("M2", 0.5), ("M3", 0.25), ("M4", 0.0)]:
    patch = cat.family_patch(tag, r)
    exp = cat.expected_invariants(tag, r)
    q = patch.center()
    sd = hs.shape_spectrum(patch, q)
    ric = hs.induced_ricci(patch, q)
    print(f"{tag}(r={r:g})  implicit: {exp.implicit}")
    print(f"  principal curvatures  numeric {np.round(sd.kappas, 6)}   closed form {np.round(np.sort(exp.kappas), 6)}")
    print(f"  mean curvature        {sd.H:+.2e}   (minimal: {exp.minimal})")
    print(f"  Ricci eigenvalues     {np.round(np.sort(ric), 6)}")
    if exp.constant_K is not None:
        print(f"  constant sectional curvature {exp.constant_K:+.6f}")
    print(f"  Gauss/Codazzi residuals {hs.fundamental_residuals(patch, q)}")
    print()

# The flat family M4 is the level t = const.  Its spectrum with normal E4 is {1, 1, -2};
# flipping the normal (here by swapping two parameters) gives {-1, -1, 2}.
m4 = cat.family_patch("M4")
swapped = hs.HypersurfacePatch(lambda q: m4(q[[1, 0, 2]]), m4.lower, m4.upper)
print("M4 normal", hs.normal_coeffs(m4, m4.center()), "spectrum", hs.shape_spectrum(m4, m4.center()).kappas)
print("M4 normal", hs.normal_coeffs(swapped, swapped.center()), "spectrum",
      hs.shape_spectrum(swapped, swapped.center()).kappas)
