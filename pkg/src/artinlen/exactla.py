"""Dense linear algebra over a prime field GF(p).

Matrices are plain ``numpy`` integer arrays whose entries lie in ``[0, p)``.
Every elimination follows the leftmost-column / topmost-row pivot rule, and
the reduced row echelon form of a matrix is unique, so all bases derived
here are reproducible bit for bit.

Large eliminations work on panels of columns and apply each panel to the
rest of the matrix with one matrix product; for small primes those products
run through BLAS in float64, which is exact as long as every partial sum
stays below 2**53.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix, issparse
from scipy.sparse.csgraph import connected_components

__all__ = [
    "PrimeField",
    "NoSolution",
    "as_matrix",
    "matmul",
    "rref",
    "rank",
    "kernel_basis",
    "solve",
    "row_space",
]

# rows handled by the plain elimination loop before panels kick in
_BASE_ROWS = 48
_PANEL = 64
_FLOAT_EXACT = 2**53
# dense matrices above this many entries skip component detection when full
_DENSE_SKIP = 1 << 20


class NoSolution(ArithmeticError):
    """Raised by :func:`solve` when the linear system is inconsistent."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, math.isqrt(p) + 1):
        if p % d == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field GF(p) for a word-sized prime ``p``."""

    p: int = 7

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not _is_prime(int(self.p)):
            raise ValueError(f"{self.p!r} is not a prime")
        if self.p >= 2**31:
            raise ValueError("modulus must be below 2**31")

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, -1, self.p)

    def __call__(self, x):
        return as_matrix(x, self.p)

    def __int__(self):
        return int(self.p)


def _modulus(p) -> int:
    return int(p.p) if isinstance(p, PrimeField) else int(p)


def as_matrix(x, p) -> np.ndarray:
    """Coerce ``x`` to a 2-d int64 array reduced mod ``p``."""
    p = _modulus(p)
    a = np.asarray(x, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    if a.size and a.min() >= 0 and a.max() < p:
        return a  # already reduced; callers never write into it
    return np.mod(a, p)


def matmul(a: np.ndarray, b: np.ndarray, p) -> np.ndarray:
    """Exact product ``a @ b`` mod ``p`` for reduced int arrays."""
    p = _modulus(p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    sq = (p - 1) ** 2
    chunk = max(1, (_FLOAT_EXACT - 1) // max(sq, 1))
    if chunk >= 16:
        af = a.astype(np.float64)
        bf = b.astype(np.float64)
        out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        for lo in range(0, inner, chunk):
            part = af[..., lo:lo + chunk] @ bf[lo:lo + chunk]
            out = (out + np.mod(part, p).astype(np.int64)) % p
        return out
    # large primes: int64 with short inner chunks so nothing overflows
    chunk = max(1, (2**63 - 1) // max(sq, 1) - 1)
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    for lo in range(0, inner, chunk):
        out = (out + (a[..., lo:lo + chunk] @ b[lo:lo + chunk]) % p) % p
    return out


def _rref_small(a: np.ndarray, p: int):
    """Plain Gauss-Jordan on a reduced int64 array; modifies ``a``."""
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r, c:] = (a[r, c:] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _inverse_small(b: np.ndarray, p: int) -> np.ndarray:
    k = b.shape[0]
    aug = np.hstack([b % p, np.eye(k, dtype=np.int64)])
    red, piv = _rref_small(aug, p)
    return red[:, k:]


def _rref_blocked(a: np.ndarray, p: int):
    """Column-panel Gauss-Jordan with float64 matrix-product updates.

    Within a panel the pivot columns and a set of independent rows are
    found by plain elimination; the panel's pivot rows are then normalized
    by the inverse of their pivot block and eliminated from every other row
    in one product.  Rows that are still unused are zero left of the
    current panel, so updates only touch the trailing columns.

    A float64 argument is used as the work array and overwritten.
    """
    work = a if a.dtype == np.float64 else a.astype(np.float64)
    rows, cols = work.shape
    free_rows = np.ones(rows, dtype=bool)
    pivot_rows: list[int] = []
    pivots: list[int] = []
    c0 = 0
    while c0 < cols and len(pivot_rows) < rows:
        c1 = min(c0 + _PANEL, cols)
        cand = np.flatnonzero(free_rows)
        sub = work[cand, c0:c1]
        live = cand[sub.any(axis=1)]
        if live.size == 0:
            c0 = c1
            continue
        panel = work[live, c0:c1].astype(np.int64)
        _, q = _rref_small(panel.copy(), p)
        _, srel = _rref_small(panel[:, q].T.copy(), p)
        sel = live[srel]
        qabs = c0 + np.asarray(q)
        binv = _inverse_small(work[np.ix_(sel, qabs)].astype(np.int64), p)
        new = matmul(binv, work[sel, c0:].astype(np.int64), p).astype(np.float64)
        free_rows[sel] = False
        others = np.flatnonzero(free_rows)
        if pivot_rows:
            others = np.concatenate([np.asarray(pivot_rows), others])
        coef = work[np.ix_(others, qabs)]
        hit = others[coef.any(axis=1)]
        if hit.size:
            upd = work[np.ix_(hit, qabs)] @ new
            work[hit, c0:] = np.mod(work[hit, c0:] - upd, p)
        work[sel, c0:] = new
        pivot_rows.extend(int(i) for i in sel)
        pivots.extend(int(c) for c in qabs)
        c0 = c1
    if not pivot_rows:
        return np.zeros((0, cols), dtype=np.int64), []
    return work[pivot_rows].astype(np.int64), pivots


def _rref_dense(a: np.ndarray, p: int):
    """RREF of an array the caller owns (it may be overwritten)."""
    if a.shape[0] <= _BASE_ROWS or (p - 1) ** 2 * _PANEL >= _FLOAT_EXACT // 2:
        return _rref_small(a.astype(np.int64), p)
    return _rref_blocked(a, p)


def _prepare(m, p: int):
    """Reduce ``m`` mod p; sparse matrices stay sparse (CSR, int64)."""
    if issparse(m):
        s = csr_matrix(m, dtype=np.int64, copy=True)
        s.data %= p
        s.eliminate_zeros()
        return s
    return as_matrix(m, p)


def _blocks(a, comps):
    """Owned dense copies of the component submatrices of ``a``.

    Sparse sources give float64 blocks, filled from one pass over the
    nonzero entries grouped by component.
    """
    if not issparse(a):
        for rows, cols in comps:
            yield a[np.ix_(rows, cols)]
        return
    coo = a.tocoo()
    label = np.full(a.shape[0], -1, dtype=np.int64)
    for k, (rows, _) in enumerate(comps):
        label[rows] = k
    lab = label[coo.row]
    order = np.argsort(lab, kind="stable")
    bounds = np.searchsorted(lab[order], np.arange(len(comps) + 1))
    for k, (rows, cols) in enumerate(comps):
        sl = order[bounds[k]:bounds[k + 1]]
        blk = np.zeros((rows.size, cols.size), dtype=np.float64)
        blk[np.searchsorted(rows, coo.row[sl]), np.searchsorted(cols, coo.col[sl])] = coo.data[sl]
        yield blk


def _rref_compact(a, p: int, as_sparse: bool = False):
    """RREF of ``a`` without its zero rows, plus the pivot columns.

    If the support splits into independent row/column blocks each block is
    reduced on its own; the union of the block RREFs, sorted by pivot, is
    the RREF of the whole matrix.  With ``as_sparse`` the result is CSR.
    """
    def done(red, piv):
        return (csr_matrix(red), piv) if as_sparse else (red, piv)

    if not issparse(a) and a.shape[0] <= _BASE_ROWS:
        return done(*_rref_small(a.copy(), p))
    if not issparse(a) and a.size > _DENSE_SKIP and np.count_nonzero(a) > a.size // 8:
        # a dense matrix this full is connected; skip the support graph
        return done(*_rref_dense(a, p))
    comps = _components(a)
    if not comps:
        return done(np.zeros((0, a.shape[1]), dtype=np.int64), [])
    if len(comps) == 1:
        rows, cols = comps[0]
        if rows.size == a.shape[0] and cols.size == a.shape[1]:
            if issparse(a):
                return done(*_rref_dense(a.astype(np.float64).toarray(), p))
            return done(*_rref_dense(a, p))
    pivots = []
    parts = []  # (row offset, nonzero rows, nonzero cols, values) per block
    nrows = 0
    for (rows, cols), blk in zip(comps, _blocks(a, comps)):
        red, piv = _rref_dense(blk, p)
        if not piv:
            continue
        r, c = np.nonzero(red)
        parts.append((r + nrows, cols[c], red[r, c]))
        nrows += red.shape[0]
        pivots.extend(int(cols[c]) for c in piv)
    if not pivots:
        return done(np.zeros((0, a.shape[1]), dtype=np.int64), [])
    order = np.argsort(pivots, kind="stable")
    where = np.empty(nrows, dtype=np.int64)
    where[order] = np.arange(nrows)
    r = where[np.concatenate([x[0] for x in parts])]
    c = np.concatenate([x[1] for x in parts])
    v = np.concatenate([x[2] for x in parts]).astype(np.int64)
    pivots = [pivots[i] for i in order]
    if as_sparse:
        return csr_matrix((v, (r, c)), shape=(nrows, a.shape[1])), pivots
    red = np.zeros((nrows, a.shape[1]), dtype=np.int64)
    red[r, c] = v
    return red, pivots


def rref(m, p) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``m`` over GF(p) and its pivot columns.

    The returned matrix has the same shape as ``m``; the zero rows sit at
    the bottom.
    """
    p = _modulus(p)
    a = as_matrix(m, p)
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return a.copy(), []
    red, piv = _rref_compact(a, p)
    out = np.zeros_like(a)
    out[: red.shape[0]] = red
    return out, piv


def row_space(m, p, as_sparse: bool = False):
    """Nonzero rows of the RREF (a canonical basis of the row space).

    ``m`` may be a dense array or a scipy sparse matrix; the result is
    dense, or CSR with ``as_sparse``.
    """
    p = _modulus(p)
    a = _prepare(m, p)
    if a.shape[0] == 0 or a.shape[1] == 0:
        empty = np.zeros((0, a.shape[1]), dtype=np.int64)
        return (csr_matrix(empty) if as_sparse else empty), []
    return _rref_compact(a, p, as_sparse)


def _components(a):
    """Connected components of the bipartite row/column support graph.

    Returns ``(rows, cols)`` index arrays; zero rows and zero columns are
    dropped.
    """
    if issparse(a):
        coo = a.tocoo()
        r, c = coo.row, coo.col
    else:
        r, c = np.nonzero(a)
    if r.size == 0:
        return []
    nr, nc = a.shape
    g = coo_matrix((np.ones(r.size, dtype=np.int8), (r, c + nr)), shape=(nr + nc, nr + nc))
    _, labels = connected_components(g, directed=False)
    used_r = np.unique(r)
    used_c = np.unique(c)
    lab_r = labels[used_r]
    lab_c = labels[used_c + nr]
    out = []
    for lab in np.unique(lab_c):
        out.append((used_r[lab_r == lab], used_c[lab_c == lab]))
    return out


def rank(m, p) -> int:
    """Rank of ``m`` over GF(p); splits block-diagonal supports first."""
    p = _modulus(p)
    a = _prepare(m, p)
    if a.shape[0] == 0 or a.shape[1] == 0:
        return 0
    comps = _components(a)
    big = [(r, c) for r, c in comps if r.size > 1 and c.size > 1]
    # a block with one row or one column has rank 1 (zero lines are dropped)
    total = len(comps) - len(big)
    for blk in _blocks(a, big):
        total += len(_rref_dense(blk, p)[1])
    return total


def kernel_basis(m, p) -> np.ndarray:
    """Basis of the right null space of ``m``, one vector per column.

    For each non-pivot column ``f`` of the RREF the basis vector has a 1 in
    position ``f``, minus the RREF entries of column ``f`` at the pivot
    positions, and zeros elsewhere.  This basis depends only on ``m``.
    """
    return _kernel_and_free(m, p)[0]


def _kernel_and_free(m, p):
    """:func:`kernel_basis` plus the free (non-pivot) column indices.

    Restricted to the free rows the basis is the identity, so the kernel
    coordinates of any null vector ``w`` are ``w[free]``.
    """
    p = _modulus(p)
    a = _prepare(m, p)
    cols = a.shape[1]
    red, piv = row_space(a, p)
    pivset = set(piv)
    free = np.array([c for c in range(cols) if c not in pivset], dtype=np.int64)
    k = np.zeros((cols, free.size), dtype=np.int64)
    if not free.size:
        return k, free
    k[free, np.arange(free.size)] = 1
    if piv:
        k[np.asarray(piv)] = (-red[:, free]) % p
    return k, free


def solve(m, b, p) -> np.ndarray:
    """One solution ``x`` of ``m @ x = b`` over GF(p).

    The solution returned is the RREF particular solution: free variables
    are set to zero.  Raises :class:`NoSolution` if the system is
    inconsistent.
    """
    p = _modulus(p)
    a = as_matrix(m, p)
    rows, cols = a.shape
    b = np.mod(np.asarray(b, dtype=np.int64).reshape(-1), p)
    if b.size != rows:
        raise ValueError(f"right-hand side has length {b.size}, expected {rows}")
    aug = np.hstack([a, b.reshape(-1, 1)])
    red, piv = row_space(aug, p)
    if piv and piv[-1] == cols:
        raise NoSolution("system is inconsistent")
    x = np.zeros(cols, dtype=np.int64)
    if piv:
        x[np.asarray(piv)] = red[:, cols]
    return x
