"""Finitely generated modules over a :class:`~artinlen.algebra.LocalAlgebra`.

Two models are used side by side:

* :class:`FreeMatrix` -- a t x s matrix of algebra elements, i.e. a map
  A^s -> A^t.  A module is the cokernel of such a matrix
  (:class:`ModulePresentation`).
* :class:`ActionModule` -- a k-vector space together with one matrix per
  variable.  Lengths, socles, Hom spaces and Tor are computed here.

Vectors of A^t are flattened generator-major: coordinate ``r * n + b`` is the
coefficient of ``basis[b]`` in component ``r``.
"""

from __future__ import annotations

import json
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csr_matrix

from .algebra import LocalAlgebra, invert_unit, load_ring, build_algebra
from .exactla import _components, kernel_basis, matmul, rank, row_space
from .polynomial import ParseError

__all__ = [
    "FreeMatrix",
    "ActionModule",
    "ModulePresentation",
    "NotARingMap",
    "cokernel",
    "image_module",
    "minimalize",
    "min_generators",
    "present",
    "hom_space",
    "is_isomorphic",
    "extension_module",
    "restrict_scalars",
    "ring_map_powers",
    "submodule_data",
    "module_hilbert",
    "free_module",
    "cyclic_module",
    "load_module",
]


class NotARingMap(ValueError):
    pass


def _storage_dtype(p: int):
    if p < 2**7:
        return np.int8
    if p < 2**15:
        return np.int16
    if p < 2**31:
        return np.int32
    return np.int64


class FreeMatrix:
    """A t x s matrix over ``A``; ``entries`` has shape (t, s, dim A)."""

    def __init__(self, A: LocalAlgebra, entries):
        self.algebra = A
        e = np.asarray(entries, dtype=np.int64)
        if e.ndim != 3 or e.shape[2] != A.dim:
            raise ValueError(f"entries must have shape (t, s, {A.dim}), got {e.shape}")
        self.entries = (e % A.p).astype(_storage_dtype(A.p))

    @classmethod
    def zeros(cls, A, t, s):
        return cls(A, np.zeros((t, s, A.dim), dtype=np.int64))

    @classmethod
    def from_columns(cls, A, t: int, columns: Sequence[Sequence]):
        """Build from a list of columns, each a length-t list of polynomials."""
        e = np.zeros((t, len(columns), A.dim), dtype=np.int64)
        for j, col in enumerate(columns):
            if len(col) != t:
                raise ParseError(f"relation column {j} has length {len(col)}, expected {t}")
            for r, poly in enumerate(col):
                e[r, j] = A.element(poly) if isinstance(poly, (str, dict)) else np.asarray(poly)
        return cls(A, e)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape[:2]

    def ints(self) -> np.ndarray:
        return self.entries.astype(np.int64)

    def entry(self, r, j) -> np.ndarray:
        return self.entries[r, j].astype(np.int64)

    def scalar(self, sparse: Optional[bool] = False):
        """The (t n) x (s n) matrix of the map over k.

        Block (r, j) is the multiplication matrix of entry (r, j).  With
        ``sparse=True`` a scipy CSR matrix is returned; ``sparse=None``
        picks CSR when at most a quarter of the entries are nonzero.
        """
        A = self.algebra
        t, s = self.shape
        n = A.dim
        support = self.entries.any(axis=2) if t and s else np.zeros((t, s), dtype=bool)
        if sparse is None:
            sparse = t * s > 0 and support.mean() <= 0.25
        if sparse:
            r, j = np.nonzero(support)
            rows, cols, vals = [], [], []
            step = max(1, (1 << 20) // (n * n))
            for lo in range(0, r.size, step):
                rr, jj = r[lo:lo + step], j[lo:lo + step]
                blk = np.tensordot(self.entries[rr, jj].astype(np.int64), A.basis_left, axes=([1], [0])) % A.p
                m, k, b = np.nonzero(blk)
                rows.append(rr[m] * n + k)
                cols.append(jj[m] * n + b)
                vals.append(blk[m, k, b])
            if rows:
                rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
            return csr_matrix((vals, (rows, cols)), shape=(t * n, s * n), dtype=np.int64)
        out = np.zeros((t * n, s * n), dtype=np.int64)
        if t == 0 or s == 0:
            return out
        step = max(1, (1 << 22) // (s * n * n))
        for lo in range(0, t, step):
            hi = min(t, lo + step)
            blk = np.tensordot(self.entries[lo:hi].astype(np.int64), A.basis_left, axes=([2], [0])) % A.p
            out[lo * n:hi * n] = blk.transpose(0, 2, 1, 3).reshape((hi - lo) * n, s * n)
        return out

    def is_minimal(self) -> bool:
        e = self.entries
        return not (e[:, :, 0] != 0).any() and bool(e.any(axis=(0, 2)).all())

    def __eq__(self, other):
        if not isinstance(other, FreeMatrix):
            return NotImplemented
        return (self.algebra is other.algebra and self.entries.shape == other.entries.shape
                and np.array_equal(self.entries, other.entries))

    __hash__ = None

    def compose(self, other: "FreeMatrix") -> "FreeMatrix":
        """Matrix product ``self @ other`` over the algebra."""
        A = self.algebra
        a = self.ints()
        b = other.ints()
        prod = np.einsum("rka,kjb,abc->rjc", a, b, A.mult) % A.p
        return FreeMatrix(A, prod)

    def column_vectors(self) -> np.ndarray:
        """Columns as flattened vectors of A^t, shape (t n, s)."""
        t, s = self.shape
        return self.ints().transpose(0, 2, 1).reshape(t * self.algebra.dim, s)

    def blocks(self):
        """Connected components of the support, as (row index, col index) pairs."""
        if self.rows == 0 or self.cols == 0:
            return []
        support = self.entries.any(axis=2)
        comps = _components(support)
        return sorted(comps, key=lambda rc: int(rc[1][0]))

    def to_strings(self) -> list[list[str]]:
        A = self.algebra
        return [[A.element_str(self.entry(r, j)) for j in range(self.cols)] for r in range(self.rows)]

    def __repr__(self):
        return f"FreeMatrix({self.rows}x{self.cols} over {self.algebra.name})"


class ActionModule:
    """A module given by its k-dimension and the action of each variable."""

    def __init__(self, A: LocalAlgebra, actions, check: bool = True, lift=None):
        self.algebra = A
        acts = np.asarray(actions, dtype=np.int64) % A.p
        if acts.ndim != 3 or acts.shape[0] != A.nvars or acts.shape[1] != acts.shape[2]:
            raise ValueError("actions must have shape (nvars, l, l)")
        self.actions = acts
        # optional: coordinates of A^t picked as lifts of the basis (cokernels)
        self.lift = lift
        if check and self.dim <= 256:
            self.check()

    @property
    def dim(self) -> int:
        return self.actions.shape[1]

    length = dim

    @cached_property
    def basis_actions(self) -> np.ndarray:
        """Action matrices of every basis element of the algebra, (n, l, l)."""
        A = self.algebra
        p = A.p
        l = self.dim
        out = np.zeros((A.dim, l, l), dtype=np.int64)
        out[0] = np.eye(l, dtype=np.int64)
        index = {m: i for i, m in enumerate(A.monomials)}
        for i in np.argsort(A.degrees, kind="stable"):
            m = A.monomials[i]
            if i == 0:
                continue
            v = next(k for k, e in enumerate(m) if e)
            prev = list(m)
            prev[v] -= 1
            out[i] = matmul(self.actions[v], out[index[tuple(prev)]], p)
        return out

    def element_action(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return np.tensordot(a, self.basis_actions, axes=(0, 0)) % self.algebra.p

    def check(self):
        """Verify that the variable actions define an A-module structure."""
        A = self.algebra
        p = A.p
        X = self.actions
        for u in range(A.nvars):
            for v in range(u + 1, A.nvars):
                if not np.array_equal(matmul(X[u], X[v], p), matmul(X[v], X[u], p)):
                    raise ValueError("variable actions do not commute")
        R = self.basis_actions
        for v in range(A.nvars):
            # the variable image itself, then x_v * basis[l] for every l
            if not np.array_equal(self.element_action(A.gens[v]), X[v]):
                raise ValueError("variable action disagrees with its image in A")
            G = A.gen_matrices[v]  # column l = gens[v] * basis[l]
            lhs = np.einsum("ab,lbc->lac", X[v], R) % p
            rhs = np.einsum("ml,mac->lac", G, R) % p
            if not np.array_equal(lhs, rhs):
                raise ValueError("actions do not satisfy the relations of the algebra")

    def __repr__(self):
        return f"ActionModule(length={self.dim} over {self.algebra.name})"


def _block_diag_action(A: LocalAlgebra, t: int, v: int) -> np.ndarray:
    return np.kron(np.eye(t, dtype=np.int64), A.gen_matrices[v])


def _apply_var(A: LocalAlgebra, v: int, vecs: np.ndarray, t: int) -> np.ndarray:
    """Multiply flattened vectors of A^t (columns of ``vecs``) by variable v."""
    n = A.dim
    k = vecs.shape[1]
    if k == 0:
        return vecs.copy()
    blocks = vecs.reshape(t, n, k)
    out = np.einsum("ab,tbk->tak", A.gen_matrices[v], blocks) % A.p
    return out.reshape(t * n, k)


def cokernel(phi: FreeMatrix) -> ActionModule:
    """The cokernel of ``phi`` as an :class:`ActionModule`.

    The quotient basis consists of the coordinate vectors that are not pivot
    positions of the column space; ``module.lift`` records those
    coordinates and ``module.proj`` the projection onto them.
    """
    A = phi.algebra
    p = A.p
    t = phi.rows
    n = A.dim
    D = phi.scalar()
    red, piv = row_space(D.T, p) if D.size else (np.zeros((0, t * n), dtype=np.int64), [])
    pivset = set(piv)
    Q = np.array([c for c in range(t * n) if c not in pivset], dtype=np.int64)
    P = np.asarray(piv, dtype=np.int64)
    l = Q.size
    proj = np.zeros((l, t * n), dtype=np.int64)
    proj[np.arange(l), Q] = 1
    if P.size and l:
        proj[:, P] = (-red[:, Q].T) % p
    acts = np.zeros((A.nvars, l, l), dtype=np.int64)
    if l:
        unit = np.zeros((t * n, l), dtype=np.int64)
        unit[Q, np.arange(l)] = 1
        for v in range(A.nvars):
            acts[v] = matmul(proj, _apply_var(A, v, unit, t), p)
    M = ActionModule(A, acts, lift=Q)
    M.proj = proj
    M.ambient_rank = t
    return M


def image_module(phi: FreeMatrix) -> ActionModule:
    """The submodule of A^t generated by the columns of ``phi``.

    Its basis is the RREF basis of the column space; the coordinates of a
    vector ``w`` in the image are ``w[module.pivots]``.
    """
    A = phi.algebra
    p = A.p
    t = phi.rows
    D = phi.scalar()
    red, piv = row_space(D.T, p) if D.size else (np.zeros((0, t * A.dim), dtype=np.int64), [])
    P = np.asarray(piv, dtype=np.int64)
    l = P.size
    acts = np.zeros((A.nvars, l, l), dtype=np.int64)
    if l:
        for v in range(A.nvars):
            acts[v] = _apply_var(A, v, red.T.copy(), t)[P]
    M = ActionModule(A, acts, check=False)
    M.pivots = P
    M.basis_vectors = red
    M.ambient_rank = t
    return M


def minimalize(phi: FreeMatrix) -> FreeMatrix:
    """A minimal presentation of the same cokernel.

    Unit entries are cleared by Gaussian elimination over A, taking pivots
    in row-major order of the first unit entry; then only a minimal
    generating set of the columns is kept (greedy from the left), which
    also drops zero columns.  Entries of the result lie in m and its
    columns minimally generate the relation module.
    """
    A = phi.algebra
    p = A.p
    e = phi.ints()
    while e.size:
        units = np.argwhere(e[:, :, 0] != 0)
        if units.size == 0:
            break
        r, c = (int(x) for x in units[0])
        uinv = invert_unit(A, e[r, c])
        # Schur complement: e[i, j] -= e[i, c] * u^-1 * e[r, j]
        left = np.einsum("ia,b,abk->ik", e[:, c], uinv, A.mult) % p
        upd = np.einsum("ia,jb,abk->ijk", left, e[r], A.mult) % p
        e = (e - upd) % p
        e = np.delete(np.delete(e, r, axis=0), c, axis=1)
    if e.shape[0] == 0:
        return FreeMatrix(A, np.zeros((0, 0, A.dim), dtype=np.int64))
    if e.shape[1]:
        e = e[:, _independent_columns(A, e)]
    return FreeMatrix(A, e)


def _independent_columns(A: LocalAlgebra, e: np.ndarray) -> list[int]:
    """Columns whose classes modulo m * (column module) are a basis.

    These columns minimally generate the module spanned by all columns;
    zero columns are never kept.  The choice is greedy from the left.
    """
    t, s, n = e.shape
    V = e.transpose(0, 2, 1).reshape(t * n, s)
    mV = [_apply_var(A, v, V, t) for v in range(A.nvars)]
    stacked = np.hstack(mV + [V])
    _, piv = row_space(stacked, A.p)
    off = A.nvars * s
    return [c - off for c in piv if c >= off]


def min_generators(M: ActionModule) -> int:
    """mu(M) = dim M / mM."""
    if M.dim == 0:
        return 0
    if M.algebra.nvars == 0:
        return M.dim
    return M.dim - rank(np.hstack(list(M.actions)), M.algebra.p)


def _minimal_kernel(A: LocalAlgebra, D: np.ndarray, s: int):
    """Minimal generators of the kernel of an A-linear map from A^s.

    ``D`` is the k-matrix of the map, with column ``j * n + b`` the image of
    ``basis[b] * e_j``.  Returns ``(rank of D, entries)`` where ``entries``
    has shape (s, g, n) and lists ``g`` kernel elements whose classes form
    a basis of K / mK.

    The kernel basis is the identity on the free columns of D, so mK is
    computed in those coordinates; the generators kept are the kernel basis
    vectors at the non-pivot positions of the RREF of mK.
    """
    p = A.p
    n = A.dim
    size = s * n
    if D.shape[0]:
        red, piv = row_space(D, p, as_sparse=True)
    else:
        red, piv = csr_matrix((0, size), dtype=np.int64), []
    piv = np.asarray(piv, dtype=np.int64)
    free = np.setdiff1d(np.arange(size), piv)
    kappa = free.size
    rk = size - kappa
    if kappa == 0:
        return rk, np.zeros((s, 0, n), dtype=_storage_dtype(p))
    # kernel basis: identity on the free rows, kp on the pivot rows
    kp = red[:, free]
    kp.data = (-kp.data) % p
    del red
    eye = sparse.identity(s, dtype=np.int64, format="csr")
    basis = None
    mpiv: list = []
    for v in range(A.nvars):
        op = sparse.kron(eye, sparse.csr_matrix(A.gen_matrices[v]), format="csr")[free]
        # x_v K in kernel coordinates, one row per kernel basis vector
        prod = (op[:, piv] @ kp + op[:, free]).T.tocsr()
        prod.data %= p
        prod.eliminate_zeros()
        rows = prod if basis is None else sparse.vstack([basis, prod], format="csr")
        basis, mpiv = row_space(rows, p, as_sparse=True)
    pivset = set(mpiv)
    chosen = np.array([c for c in range(kappa) if c not in pivset], dtype=np.int64)
    gens = np.zeros((size, chosen.size), dtype=_storage_dtype(p))
    gens[free[chosen], np.arange(chosen.size)] = 1
    if rk and chosen.size:
        gens[piv] = kp[:, chosen].toarray()
    return rk, gens.reshape(s, n, chosen.size).transpose(0, 2, 1)


def present(M: ActionModule) -> FreeMatrix:
    """A minimal presentation matrix of ``M`` over its algebra."""
    A = M.algebra
    p = A.p
    n = A.dim
    l = M.dim
    if l == 0:
        return FreeMatrix(A, np.zeros((0, 0, n), dtype=np.int64))
    if A.nvars:
        red, piv = row_space(np.hstack(list(M.actions)).T, p)
    else:
        piv = []
    pivset = set(piv)
    Q = [c for c in range(l) if c not in pivset]
    mu = len(Q)
    # column (c, b) = basis[b] . g_c where g_c is the unit vector at Q[c]
    R = M.basis_actions  # (n, l, l)
    D = R[:, :, Q].transpose(1, 2, 0).reshape(l, mu * n)
    _, rel = _minimal_kernel(A, D, mu)
    return FreeMatrix(A, rel)


def module_hilbert(M: ActionModule) -> list[int]:
    """Dimensions of m^i M / m^{i+1} M."""
    A = M.algebra
    p = A.p
    dims = []
    span = np.eye(M.dim, dtype=np.int64)
    cur = M.dim
    while cur:
        nxt = np.hstack([matmul(X, span, p) for X in M.actions]) if A.nvars else np.zeros((M.dim, 0), dtype=np.int64)
        red, piv = row_space(nxt.T, p) if nxt.shape[1] else (np.zeros((0, M.dim), dtype=np.int64), [])
        dims.append(cur - len(piv))
        span = red.T
        cur = len(piv)
    return dims


def submodule_data(M: ActionModule) -> dict:
    A = M.algebra
    p = A.p
    l = M.dim
    h = module_hilbert(M)
    m_dim = l - (h[0] if h else 0)
    m2_dim = m_dim - (h[1] if len(h) > 1 else 0)
    if l and A.nvars:
        socle = l - rank(np.vstack(list(M.actions)), p)
    else:
        socle = l
    return {
        "length": l,
        "socle_dim": int(socle),
        "m_dim": int(m_dim),
        "m2_dim": int(m2_dim),
        "mu_m": int(m_dim - m2_dim),
    }


def hom_space(M: ActionModule, N: ActionModule) -> np.ndarray:
    """Basis of Hom_A(M, N), shape (d, len N, len M)."""
    A = M.algebra
    p = A.p
    lm, ln = M.dim, N.dim
    if lm == 0 or ln == 0:
        return np.zeros((0, ln, lm), dtype=np.int64)
    # phi flattened row-major: phi[a, b] -> a * lm + b
    eqs = []
    for v in range(A.nvars):
        left = np.kron(np.eye(ln, dtype=np.int64), M.actions[v].T)
        right = np.kron(N.actions[v], np.eye(lm, dtype=np.int64))
        eqs.append((left - right) % p)
    if eqs:
        K = kernel_basis(np.vstack(eqs), p)
    else:
        K = np.eye(ln * lm, dtype=np.int64)
    return K.T.reshape(-1, ln, lm)


def _quotient_coords(M: ActionModule):
    """Projection onto M / mM and the coordinates used as lifts."""
    A = M.algebra
    p = A.p
    l = M.dim
    if A.nvars and l:
        red, piv = row_space(np.hstack(list(M.actions)).T, p)
    else:
        red, piv = np.zeros((0, l), dtype=np.int64), []
    pivset = set(piv)
    Q = np.array([c for c in range(l) if c not in pivset], dtype=np.int64)
    proj = np.zeros((Q.size, l), dtype=np.int64)
    proj[np.arange(Q.size), Q] = 1
    if piv and Q.size:
        proj[:, np.asarray(piv)] = (-red[:, Q].T) % p
    return proj, Q


def _inverse_table(p):
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    return inv


def _batch_nonsingular(mats: np.ndarray, p: int, inv: np.ndarray) -> np.ndarray:
    """For a stack of square matrices mod p, which ones are invertible."""
    m = mats.copy() % p
    B, k, _ = m.shape
    ok = np.ones(B, dtype=bool)
    idx = np.arange(B)
    for c in range(k):
        nz = m[:, c:, c] != 0
        has = nz.any(axis=1)
        ok &= has
        piv = c + np.argmax(nz, axis=1)
        rows_c = m[idx, c].copy()
        m[idx, c] = m[idx, piv]
        m[idx, piv] = rows_c
        pv = inv[m[:, c, c]]
        norm = (m[:, c, :] * pv[:, None]) % p
        for r in range(c + 1, k):
            f = m[:, r, c]
            m[:, r, :] = (m[:, r, :] - f[:, None] * norm) % p
    return ok


def is_isomorphic(M: ActionModule, N: ActionModule, trials: int = 64, seed: int = 0,
                  exhaustive_limit: int = 7**8) -> str:
    """One-sided randomized isomorphism test: ``"yes"``, ``"no"`` or ``"unknown"``.

    A homomorphism between modules of equal length is an isomorphism iff
    the induced map on M/mM is bijective, so invertibility is tested on
    mu x mu matrices.  After ``trials`` random combinations of a Hom basis,
    an exhaustive sweep settles the question when the Hom space has at
    most ``exhaustive_limit`` elements.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if M.dim != N.dim:
        return "no"
    if M.dim == 0:
        return "yes"
    if min_generators(M) != min_generators(N) or module_hilbert(M) != module_hilbert(N):
        return "no"
    if submodule_data(M)["socle_dim"] != submodule_data(N)["socle_dim"]:
        return "no"
    p = M.algebra.p
    H = hom_space(M, N)
    d = H.shape[0]
    if d == 0:
        return "no"
    projN, _ = _quotient_coords(N)
    _, QM = _quotient_coords(M)
    Hbar = np.stack([matmul(projN, h[:, QM], p) for h in H])  # (d, mu, mu)
    mu = Hbar.shape[1]
    inv = _inverse_table(p) if p <= 2**20 else None
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        c = rng.integers(0, p, size=d)
        mat = np.tensordot(c, Hbar, axes=(0, 0)) % p
        if rank(mat, p) == mu:
            return "yes"
    if inv is None or p**d > exhaustive_limit:
        return "unknown"
    # invertibility is unchanged by scaling, so only coefficient vectors
    # whose first nonzero entry is 1 are enumerated
    flat = Hbar.reshape(d, mu * mu)
    chunk = max(1, 200_000 // max(1, mu * mu))
    for lead in range(d):
        rest = d - 1 - lead
        total = p**rest
        powers = p ** np.arange(rest - 1, -1, -1, dtype=np.int64)
        for lo in range(0, total, chunk):
            codes = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
            tail = (codes[:, None] // powers[None, :]) % p
            mats = (flat[lead] + tail @ flat[lead + 1:]) % p
            if _batch_nonsingular(mats.reshape(-1, mu, mu), p, inv).any():
                return "yes"
    return "no"


class ModulePresentation:
    """A module given as the cokernel of a :class:`FreeMatrix`."""

    def __init__(self, presentation: FreeMatrix, name: str = ""):
        self.presentation = presentation
        self.name = name

    @property
    def algebra(self) -> LocalAlgebra:
        return self.presentation.algebra

    @cached_property
    def minimal(self) -> FreeMatrix:
        return minimalize(self.presentation)

    @cached_property
    def module(self) -> ActionModule:
        return cokernel(self.minimal)

    @property
    def length(self) -> int:
        return self.module.dim

    @property
    def mu(self) -> int:
        return self.minimal.rows

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"ModulePresentation{label}({self.presentation.rows} gens, {self.presentation.cols} rels)"


def free_module(A: LocalAlgebra, t: int = 1) -> ModulePresentation:
    return ModulePresentation(FreeMatrix.zeros(A, t, 0), name=f"A^{t}")


def cyclic_module(A: LocalAlgebra, elements, name: str = "") -> ModulePresentation:
    """A / (f_1, ..., f_k) for algebra elements or polynomial strings."""
    cols = [[f] for f in elements]
    return ModulePresentation(FreeMatrix.from_columns(A, 1, cols), name=name)


def load_module(path, algebra: Optional[LocalAlgebra] = None) -> ModulePresentation:
    """Read a module spec file ``{"ring": ..., "generators": t, "relations": [...]}``."""
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(d, dict) or "generators" not in d:
        raise ParseError("module spec needs a 'generators' count")
    if algebra is None:
        ring = d.get("ring")
        if ring is None:
            raise ParseError("module spec names no ring")
        ring_path = path.parent / ring
        algebra = build_algebra(load_ring(ring_path if ring_path.is_file() else ring))
    try:
        t = int(d["generators"])
        rels = d.get("relations", [])
        phi = FreeMatrix.from_columns(algebra, t, rels)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed module spec: {exc}") from None
    return ModulePresentation(phi, name=d.get("name", path.stem))


def extension_module(M: ModulePresentation, N: ModulePresentation, cocycle=None,
                     seed: Optional[int] = None) -> ModulePresentation:
    """The extension 0 -> N -> E -> M -> 0 classified by ``cocycle``.

    ``cocycle`` is a matrix in Hom(Omega^1 M, N), in the bases of
    :func:`image_module` (for Omega^1 M) and of ``N.module``.  With no
    cocycle a random element of that Hom space is drawn from ``seed``.
    E is the cokernel of Omega^1 M -> A^{mu M} (+) N, w -> (w, -cocycle(w)).
    """
    A = M.algebra
    p = A.p
    n = A.dim
    d1 = M.minimal
    pn = N.minimal
    Nmod = N.module
    omega = image_module(d1)
    if cocycle is None:
        H = hom_space(omega, Nmod)
        rng = np.random.default_rng(seed)
        if H.shape[0]:
            c = rng.integers(0, p, size=H.shape[0])
            cocycle = np.tensordot(c, H, axes=(0, 0)) % p
        else:
            cocycle = np.zeros((Nmod.dim, omega.dim), dtype=np.int64)
    cocycle = np.asarray(cocycle, dtype=np.int64) % p
    t0, s0 = d1.shape
    tn, sn = pn.shape
    cols = d1.column_vectors()  # (t0 n, s0)
    coords = cols[omega.pivots] if omega.dim else np.zeros((0, s0), dtype=np.int64)
    images = matmul(cocycle, coords, p) if omega.dim else np.zeros((Nmod.dim, s0), dtype=np.int64)
    lifted = np.zeros((tn * n, s0), dtype=np.int64)
    if Nmod.dim:
        lifted[Nmod.lift] = images
    lower = (-lifted.reshape(tn, n, s0).transpose(0, 2, 1)) % p
    e = np.zeros((t0 + tn, s0 + sn, n), dtype=np.int64)
    e[:t0, :s0] = d1.ints()
    e[t0:, :s0] = lower
    e[t0:, s0:] = pn.ints()
    return ModulePresentation(FreeMatrix(A, e), name=f"ext({M.name},{N.name})")


def ring_map_powers(R: LocalAlgebra, S: LocalAlgebra, images) -> np.ndarray:
    """Images in S of R's basis monomials under x_v -> images[v].

    Raises :class:`NotARingMap` unless the assignment extends to a local
    homomorphism R -> S.
    """
    images = np.asarray(images, dtype=np.int64) % S.p
    if R.p != S.p:
        raise NotARingMap("characteristics differ")
    if images.shape != (R.nvars, S.dim):
        raise NotARingMap(f"need {R.nvars} images of length {S.dim}")
    if (images[:, 0] != 0).any():
        raise NotARingMap("generators must map into the maximal ideal")
    F = np.zeros((R.dim, S.dim), dtype=np.int64)
    F[0] = S.one()
    index = {m: i for i, m in enumerate(R.monomials)}
    for i in np.argsort(R.degrees, kind="stable"):
        if i == 0:
            continue
        m = R.monomials[i]
        v = next(k for k, e in enumerate(m) if e)
        prev = list(m)
        prev[v] -= 1
        F[i] = S.mul(images[v], F[index[tuple(prev)]])
    for v in range(R.nvars):
        if not np.array_equal(R.gens[v] @ F % S.p, images[v]):
            raise NotARingMap(f"image of variable {R.names[v]} is inconsistent")
        G = R.gen_matrices[v]
        for l in range(R.dim):
            lhs = S.mul(images[v], F[l])
            rhs = G[:, l] @ F % S.p
            if not np.array_equal(lhs, rhs):
                raise NotARingMap(f"relation fails on {R.names[v]} * {R.monomial_str(l)}")
    return F


def restrict_scalars(R: LocalAlgebra, images, M: ActionModule) -> ModulePresentation:
    """View the S-module ``M`` as an R-module through x_v -> images[v]."""
    ring_map_powers(R, M.algebra, images)
    images = np.asarray(images, dtype=np.int64) % R.p
    acts = np.zeros((R.nvars, M.dim, M.dim), dtype=np.int64)
    for v in range(R.nvars):
        acts[v] = M.element_action(images[v])
    MR = ActionModule(R, acts)
    pres = ModulePresentation(present(MR), name="restricted")
    if pres.length != M.dim:  # pragma: no cover - would be a bug in present()
        raise AssertionError("restriction changed the length")
    return pres
