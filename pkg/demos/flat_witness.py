"""Restriction of scalars along R -> R (x) T keeps lengths and boundedness.

    python demos/flat_witness.py
"""

from artinlen import build_algebra, cyclic_module, load_ring, resolve, tensor_algebra
from artinlen.modules import restrict_scalars

R = build_algebra(load_ring("uv2"))
T = build_algebra(load_ring("z3"))
S = tensor_algebra(R, T)
print(f"S = {R.name} (x) {T.name}: dim {S.dim}")

N = cyclic_module(S, [S.gens[0]])
tS, _ = resolve(N, 8)
NR = restrict_scalars(R, S.gens[: R.nvars], N.module)
tR, _ = resolve(NR, 8)
print(f"over S: length {tS.syzygy_lengths[0]}, betti {tS.betti}, periodic {tS.periodic}")
print(f"over R: length {tR.syzygy_lengths[0]}, betti {tR.betti}, periodic {tR.periodic}")
