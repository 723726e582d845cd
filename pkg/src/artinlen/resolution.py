"""Minimal free resolutions, Betti numbers and Tor.

``resolve`` computes d_1, d_2, ... of a minimal resolution

    ... -> A^{b_2} --d_2--> A^{b_1} --d_1--> A^{b_0} -> M -> 0

one syzygy at a time.  Each differential is split into the connected
components of its support and every component is resolved on its own; the
kernel of a component only depends on its entries, so repeated components
are computed once.  For k over (x, y)^2 all components are copies of the
1 x 2 matrix [x y], which keeps the work linear in the Betti numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Optional, Union

import numpy as np

from .algebra import LocalAlgebra
from .exactla import rank as _rank
from .modules import (
    ActionModule,
    FreeMatrix,
    ModulePresentation,
    _minimal_kernel,
    cokernel,
    image_module,
    is_isomorphic,
    minimalize,
    present,
)

__all__ = ["BettiTable", "Periodicity", "StageBudgetExceeded", "resolve", "tor_dims", "bounded_flag"]

DEFAULT_CAP = 16384


@dataclass(frozen=True)
class Periodicity:
    """Omega^i M is isomorphic to Omega^j M (i < j)."""

    i: int
    j: int
    method: str  # "literal" (d_{i+1} == d_{j+1}) or "isomorphism"
    certified: bool = True

    @property
    def period(self) -> int:
        return self.j - self.i


@dataclass
class BettiTable:
    stages: int
    betti: list[int]
    syzygy_lengths: list[int]
    bounded_flag: bool
    periodic: Optional[Periodicity] = None
    truncated: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["periodic"] = None if self.periodic is None else asdict(self.periodic)
        return d


class StageBudgetExceeded(RuntimeError):
    """The next syzygy is too large; ``table`` holds the stages done so far."""

    def __init__(self, message, table: BettiTable, differentials):
        super().__init__(message)
        self.table = table
        self.differentials = differentials


def bounded_flag(values, window: int = 4) -> bool:
    """Plateau heuristic: the last ``window`` values are all equal."""
    if window < 1:
        raise ValueError("window must be positive")
    tail = list(values)[-window:]
    return len(tail) == window and max(tail) == min(tail)


class _Syzygies:
    """Block-wise minimal kernels with a cache keyed by block content."""

    # blocks with more algebra entries than this are not cached
    MEMO_LIMIT = 1 << 14

    def __init__(self, A: LocalAlgebra):
        self.A = A
        self.memo: dict = {}

    def _block(self, entries: np.ndarray, want_kernel: bool):
        small = entries.shape[0] * entries.shape[1] <= self.MEMO_LIMIT
        key = (entries.shape, entries.tobytes()) if small else None
        hit = self.memo.get(key) if small else None
        if hit is not None:
            return hit
        D = FreeMatrix(self.A, entries).scalar(sparse=None)
        if not want_kernel:
            return _rank(D, self.A.p), None
        rk, ker = _minimal_kernel(self.A, D, entries.shape[1])
        ker = ker.astype(entries.dtype)
        if small:
            self.memo[key] = (rk, ker)
        return rk, ker

    def step(self, d: FreeMatrix, want_kernel: bool = True):
        """Rank of d over k and (optionally) the next differential."""
        A = self.A
        n = A.dim
        s = d.cols
        total = 0
        pieces = []
        for rows, cols in d.blocks():
            sub = d.entries[np.ix_(rows, cols)]
            rk, ker = self._block(sub, want_kernel)
            total += rk
            if want_kernel and ker.shape[1]:
                pieces.append((cols, ker))
        if not want_kernel:
            return total, None
        g = sum(k.shape[1] for _, k in pieces)
        out = np.zeros((s, g, n), dtype=d.entries.dtype)
        c = 0
        for cols, ker in pieces:
            w = ker.shape[1]
            out[cols, c:c + w] = ker
            c += w
        return total, FreeMatrix(A, out)


def _as_presentation(M) -> FreeMatrix:
    if isinstance(M, ModulePresentation):
        return M.minimal
    if isinstance(M, FreeMatrix):
        return minimalize(M)
    if isinstance(M, ActionModule):
        return present(M)
    raise TypeError(f"cannot resolve {type(M).__name__}")


def resolve(M: Union[ModulePresentation, FreeMatrix, ActionModule], stages: int = 12,
            window: int = 4, cap: int = DEFAULT_CAP, trials: int = 64, seed: int = 0,
            periodicity: bool = True, iso_max_length: int = 48):
    """Minimal free resolution of ``M`` through ``stages`` syzygies.

    Returns ``(table, differentials)`` where ``differentials[i - 1]`` is
    d_i for i = 1..stages.  ``table.betti`` has ``stages + 1`` entries and
    ``table.syzygy_lengths[i]`` is the length of Omega^i M (Omega^0 = M).

    Raises :class:`StageBudgetExceeded` when a free module of rank b with
    ``b * dim A > cap`` would be needed.

    With ``periodicity`` set the first pair i < j with Omega^i = Omega^j is
    recorded: literally equal differentials d_{i+1} == d_{j+1} certify it at
    once (later differentials then repeat and are copied), otherwise pairs
    with equal rank and length up to ``iso_max_length`` are run through
    :func:`~artinlen.modules.is_isomorphic`.
    """
    if stages < 0:
        raise ValueError("stages must be non-negative")
    d1 = _as_presentation(M)
    A = d1.algebra
    n = A.dim
    syz = _Syzygies(A)
    betti = [d1.rows]
    lengths: list[int] = []
    diffs: list[FreeMatrix] = []
    periodic: Optional[Periodicity] = None
    modules: dict[int, ActionModule] = {}
    cur = d1

    def table(truncated=False):
        bl = list(betti)
        return BettiTable(stages=len(bl) - 1, betti=bl, syzygy_lengths=list(lengths),
                          bounded_flag=bounded_flag(bl, window) if len(bl) >= window else False,
                          periodic=periodic, truncated=truncated)

    def omega(i):
        if i not in modules:
            modules[i] = cokernel(diffs[0]) if i == 0 else image_module(diffs[i - 1])
        return modules[i]

    if d1.rows * n > cap:
        raise StageBudgetExceeded(f"b_0 * dim A = {d1.rows * n} exceeds cap {cap}", table(True), [])
    if stages == 0:
        rk, _ = syz.step(d1, want_kernel=False)
        lengths.append(d1.rows * n - rk)
        return table(), []

    copy_from: Optional[int] = None
    for i in range(1, stages + 1):
        b = cur.cols
        if b * n > cap:
            betti.append(b)
            diffs.append(cur)
            raise StageBudgetExceeded(f"b_{i} * dim A = {b * n} exceeds cap {cap}", table(True), diffs)
        betti.append(b)
        diffs.append(cur)
        if copy_from is not None:
            # d_i repeats d_{i - period}
            src = i - periodic.period
            rk = lengths[src] if src >= 1 else None
            if rk is None:
                rk, _ = syz.step(cur, want_kernel=False)
            nxt = diffs[src] if i < stages else None
        else:
            rk, nxt = syz.step(cur, want_kernel=i < stages)
        if i == 1:
            lengths.append(d1.rows * n - rk)
        lengths.append(rk)
        # exactness: len Omega^i = b_i dim A - len Omega^{i+1}
        if lengths[i - 1] + lengths[i] != betti[i - 1] * n:
            raise AssertionError(f"length identity fails at stage {i}")
        if periodicity and periodic is None and i < stages:
            for k in range(i):
                if diffs[k].shape == nxt.shape and diffs[k] == nxt:
                    periodic = Periodicity(k, i, "literal")
                    copy_from = k
                    break
        if periodicity and periodic is None:
            for k in range(i):
                if betti[k] != betti[i] or lengths[k] != lengths[i] or lengths[i] > iso_max_length:
                    continue
                if is_isomorphic(omega(k), omega(i), trials=trials, seed=seed) == "yes":
                    periodic = Periodicity(k, i, "isomorphism")
                    break
        if nxt is not None:
            cur = nxt
    return table(), diffs


def _action_matrix(N: ActionModule, d: FreeMatrix) -> np.ndarray:
    """The k-matrix of d (x) N: block (r, j) is the action of d[r, j] on N."""
    t, s = d.shape
    l = N.dim
    if t == 0 or s == 0 or l == 0:
        return np.zeros((t * l, s * l), dtype=np.int64)
    blocks = np.tensordot(d.ints(), N.basis_actions, axes=([2], [0])) % N.algebra.p
    return blocks.transpose(0, 2, 1, 3).reshape(t * l, s * l)


def _tensor_rank(N: ActionModule, d: FreeMatrix) -> int:
    total = 0
    for rows, cols in d.blocks():
        sub = FreeMatrix(d.algebra, d.entries[np.ix_(rows, cols)])
        total += _rank(_action_matrix(N, sub), N.algebra.p)
    return total


def tor_dims(M, N: Union[ActionModule, ModulePresentation], stages: int = 8,
             cap: int = DEFAULT_CAP) -> list[int]:
    """dim_k Tor_i(M, N) for i = 0..stages, from the resolution of M."""
    if isinstance(N, ModulePresentation):
        N = N.module
    _, diffs = resolve(M, stages + 1, cap=cap, periodicity=False)
    betti = [diffs[0].rows] + [d.cols for d in diffs]
    ranks = [0] + [_tensor_rank(N, d) for d in diffs]
    l = N.dim
    return [betti[i] * l - ranks[i] - ranks[i + 1] for i in range(stages + 1)]
