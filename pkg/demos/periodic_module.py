"""A module with bounded Betti numbers and how its periodicity is certified.

    python demos/periodic_module.py
"""

from artinlen import build_algebra, cyclic_module, is_isomorphic, load_ring, resolve
from artinlen.modules import image_module

A = build_algebra(load_ring("x2y2"))
for form in ["x", "x + y", "x + 3y"]:
    M = cyclic_module(A, [form])
    table, diffs = resolve(M, 8)
    per = table.periodic
    print(f"A/({form}): betti {table.betti}, lengths {table.syzygy_lengths}")
    print(f"  Omega^{per.i} = Omega^{per.j} ({per.method})")
    print(f"  Omega^1 isomorphic to M: {is_isomorphic(M.module, image_module(diffs[0]))}")
