"""Betti numbers of the residue field over three small rings.

    python demos/residue_field.py
"""

from artinlen import build_algebra, load_ring, poincare_of_k
from artinlen.series import fit_rational, ratios

for name, (d, a) in [("m2zero", (2, 0)), ("x2y2", (2, 1)), ("lescot132", (3, 2))]:
    A = build_algebra(load_ring(name))
    betti = poincare_of_k(A, 10)
    print(f"{name:10s} dim {A.dim}  betti {betti}")
    print(f"{'':10s} matches 1/(1 - {d}z + {a}z^2): {fit_rational(betti, d, a)}")
    print(f"{'':10s} last ratio {float(ratios(betti)[-1]):.4f}")
