"""From angle functions back to a family.

A hypersurface with constant principal curvatures is described by the
components (a, b, c, d) of its unit normal in the left-invariant frame.  Each
admissible case has explicit commuting tangent fields.  Integrating them gives
an immersion, and ``canonicalize`` finds the isometry carrying it onto the
matching normal form.

Run:  python demos/05_reconstruction.py
"""
import math

import numpy as np

from sol04 import hypersurface as hs
from sol04 import reconstruct as rc

th1, sh1 = math.tanh(1.0), 1 / math.cosh(1.0)

# Case I-(i): (a, b) rotate at constant speed; compare the ODE with its closed form.
u = np.linspace(0, 2 * math.pi * math.sinh(1.0), 7)
tab = rc.integrate_case1i(th1, sh1, 0.0, u)
print("case I-(i) angle ODE, (u, a, b):")
print(np.round(tab, 6))

labels = [
    rc.CaseLabel("I_i", {"d": th1, "a0": 0.6 * sh1, "b0": 0.8 * sh1}),
    rc.CaseLabel("I_ii", {"a": 0.48, "b": 0.64, "d": 0.6}),
    rc.CaseLabel("I_iii", {"d": 0.6, "a_sign": -1}),
    rc.CaseLabel("II", {"c": sh1, "d": th1}),
    rc.CaseLabel("III"),
]
print("\nreconstructed patches:")
for lab in labels:
    patch = rc.reconstructed_patch(lab, start=(0.2, -0.1, 0.3, 0.4))
    kap = hs.shape_spectrum(patch, patch.center()).kappas
    m = rc.canonicalize(patch)
    print(f"  {lab.tag:<6s} {lab.params}")
    print(f"         kappas {np.round(kap, 6)} -> {m.family}, residual {m.residual:.1e}")

# In case II the symmetry of the second fundamental form forces a*c = 0.
print("\ncase II obstruction (independent of T1, proportional to a*c):")
for a, c in [(0.5, 0.5), (0.3, 0.2), (0.1, 0.7)]:
    b = 0.2
    d = math.sqrt(1 - a * a - b * b - c * c)
    vals = [rc.symmetry_obstruction(a, b, c, d, t) for t in (-1.0, 0.0, 2.5)]
    print(f"  a={a}, c={c}: {np.round(vals, 12)}  ratio to a*c = {vals[0] / (a * c):.9f}")
