"""Finite-dimensional local algebras k[X_1..X_v]/I over a prime field.

An algebra is stored as a basis of standard monomials (``basis[0] == 1``),
a structure-constant tensor ``mult[i, j] = basis[i] * basis[j]`` and the
images of the variables.  Bases are always adapted to the radical
filtration: the span of the basis monomials of degree >= i is m^i.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .exactla import PrimeField, NoSolution, kernel_basis, rank, row_space, solve
from .polynomial import ParseError, is_homogeneous, parse_polynomial

__all__ = [
    "RingSpec",
    "LocalAlgebra",
    "HilbertData",
    "Classification",
    "NotArtinian",
    "NonLocalRelation",
    "NotAUnit",
    "CharMismatch",
    "ParseError",
    "build_algebra",
    "load_ring",
    "hilbert",
    "classify",
    "invert_unit",
    "tensor_algebra",
    "stabilize_truncation",
    "monomial_ci",
]


class NotArtinian(ValueError):
    """The graded build reached ``degree_cap`` with nonzero components left."""


class NonLocalRelation(ValueError):
    """A relation has a nonzero constant term."""


class NotAUnit(ArithmeticError):
    pass


class CharMismatch(ValueError):
    pass


@dataclass(frozen=True)
class RingSpec:
    name: str
    char: int
    vars: tuple[str, ...]
    relations: tuple[str, ...]
    graded: bool = True
    truncate: Optional[int] = None
    degree_cap: int = 32

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "relations", tuple(self.relations))
        if not self.vars:
            raise ParseError("a ring needs at least one variable")
        if len(set(self.vars)) != len(self.vars):
            raise ParseError(f"duplicate variable names in {self.vars}")
        for v in self.vars:
            if not v.isidentifier() or any(ch.isdigit() for ch in v):
                # digits would be ambiguous with coefficients in "3x2"
                raise ParseError(f"bad variable name {v!r}")
        if not self.graded and not self.truncate:
            raise ParseError("ungraded rings need a truncation degree")
        if self.truncate is not None and self.truncate < 1:
            raise ParseError("truncate must be positive")
        if self.degree_cap < 1:
            raise ParseError("degree_cap must be positive")
        try:
            PrimeField(self.char)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    @classmethod
    def from_dict(cls, d: dict) -> "RingSpec":
        if not isinstance(d, dict):
            raise ParseError("ring spec must be a JSON object")
        try:
            return cls(
                name=str(d.get("name", "ring")),
                char=int(d.get("char", 7)),
                vars=tuple(d["vars"]),
                relations=tuple(d.get("relations", ())),
                graded=bool(d.get("graded", True)),
                truncate=d.get("truncate"),
                degree_cap=int(d.get("degree_cap", 32)),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed ring spec: {exc}") from None

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "char": self.char,
            "vars": list(self.vars),
            "relations": list(self.relations),
            "graded": self.graded,
            "degree_cap": self.degree_cap,
        }
        if self.truncate is not None:
            d["truncate"] = self.truncate
        return d


def load_ring(path_or_name) -> RingSpec:
    """Read a ring spec from a JSON file or from the bundled ring library."""
    p = Path(path_or_name)
    if p.is_file():
        text = p.read_text()
    else:
        name = p.name if p.suffix == ".json" else p.name + ".json"
        res = resources.files("artinlen") / "data" / "rings" / name
        if not res.is_file():
            raise FileNotFoundError(f"no ring spec at {path_or_name!r}")
        text = res.read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return RingSpec.from_dict(d)


def _grevlex_key(m: tuple[int, ...]):
    # larger key == larger monomial; degrees compare first, then the
    # smallest exponent of the last variable wins
    return (sum(m), tuple(-e for e in reversed(m)))


def _monomials_of_degree(nvars: int, d: int) -> list[tuple[int, ...]]:
    out = []
    for c in itertools.combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for i in c:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=_grevlex_key, reverse=True)
    return out


def _mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True)
class HilbertData:
    h: list[int]
    length: int
    embdim: int
    socle_dim: int


@dataclass(frozen=True)
class Classification:
    short: bool
    hypersurface: bool
    ci4_candidate: bool
    lescot: Optional[tuple]  # (h, r1, r2); h is None unless r1 == 1

    def to_dict(self):
        return {
            "short": self.short,
            "hypersurface": self.hypersurface,
            "ci4_candidate": self.ci4_candidate,
            "lescot": None if self.lescot is None else list(self.lescot),
        }


class LocalAlgebra:
    """A commutative local algebra with an explicit monomial basis.

    Parameters
    ----------
    p : prime characteristic
    names : variable names
    monomials : exponent tuples of the basis, ``monomials[0]`` all zero;
        the set must be closed under division
    mult : int array of shape (n, n, n)
    gens : int array of shape (v, n), the images of the variables
    """

    def __init__(self, p, names, monomials, mult, gens, name="A", spec=None, check=True):
        self.field = PrimeField(int(p))
        self.p = int(p)
        self.names = tuple(names)
        self.monomials = [tuple(m) for m in monomials]
        self.mult = np.asarray(mult, dtype=np.int64) % self.p
        self.gens = np.asarray(gens, dtype=np.int64).reshape(len(self.names), -1) % self.p
        self.name = name
        self.spec = spec
        self.degrees = np.array([sum(m) for m in self.monomials], dtype=np.int64)
        self._index = {m: i for i, m in enumerate(self.monomials)}
        if check:
            self._validate()

    # -- basic data -------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.monomials)

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def basis(self) -> list[tuple[int, ...]]:
        return self.monomials

    @cached_property
    def rad_filtration(self) -> list[np.ndarray]:
        """Index sets of m^0, m^1, ... ending with the empty set."""
        top = int(self.degrees.max()) if self.dim else 0
        return [np.flatnonzero(self.degrees >= i) for i in range(top + 2)]

    @cached_property
    def generators(self) -> list[Optional[int]]:
        """Basis index of each variable image, or None if it is not a basis monomial."""
        out = []
        for v in range(self.nvars):
            g = self.gens[v]
            nz = np.flatnonzero(g)
            out.append(int(nz[0]) if nz.size == 1 and g[nz[0]] == 1 else None)
        return out

    def monomial_str(self, i: int) -> str:
        parts = []
        for name, e in zip(self.names, self.monomials[i]):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def __repr__(self):
        return f"LocalAlgebra({self.name!r}, p={self.p}, dim={self.dim})"

    # -- arithmetic -------------------------------------------------------

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)

    def one(self) -> np.ndarray:
        e = self.zero()
        e[0] = 1
        return e

    def basis_vector(self, i: int) -> np.ndarray:
        e = self.zero()
        e[i] = 1
        return e

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.einsum("i,j,ijk->k", a, b, self.mult) % self.p

    @cached_property
    def basis_left(self) -> np.ndarray:
        """``basis_left[i]`` is the matrix of multiplication by basis[i]."""
        return np.ascontiguousarray(np.transpose(self.mult, (0, 2, 1)))

    def left_matrix(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return np.tensordot(a, self.basis_left, axes=(0, 0)) % self.p

    @cached_property
    def gen_matrices(self) -> np.ndarray:
        """Multiplication matrices of the variables, shape (v, n, n)."""
        return np.stack([self.left_matrix(g) for g in self.gens]) if self.nvars else np.zeros((0, self.dim, self.dim), dtype=np.int64)

    def power(self, a, e: int) -> np.ndarray:
        out = self.one()
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def monomial(self, exps: Sequence[int]) -> np.ndarray:
        """Image of the monomial with exponents ``exps`` in the variables."""
        exps = tuple(exps)
        if exps in self._index:
            return self.basis_vector(self._index[exps])
        out = self.one()
        for v, e in enumerate(exps):
            for _ in range(e):
                out = self.mul(out, self.gens[v])
        return out

    def element(self, poly) -> np.ndarray:
        """Element given by a polynomial string or ``{exponents: coeff}`` dict."""
        if isinstance(poly, str):
            poly = parse_polynomial(poly, list(self.names))
        out = self.zero()
        for mono, c in poly.items():
            out = (out + (c % self.p) * self.monomial(mono)) % self.p
        return out

    def is_unit(self, a) -> bool:
        return int(np.asarray(a)[0]) % self.p != 0

    def element_str(self, a) -> str:
        a = np.asarray(a) % self.p
        terms = []
        for i in np.flatnonzero(a):
            c = int(a[i])
            m = self.monomial_str(int(i))
            if m == "1":
                terms.append(str(c))
            else:
                terms.append(m if c == 1 else f"{c}{m}")
        return " + ".join(terms) or "0"

    # -- validation -------------------------------------------------------

    def _validate(self):
        n = self.dim
        p = self.p
        if n == 0 or any(self.monomials[0]):
            raise ValueError("basis[0] must be the monomial 1")
        if self.mult.shape != (n, n, n):
            raise ValueError("structure tensor has the wrong shape")
        eye = np.eye(n, dtype=np.int64)
        if not (self.mult[0] == eye).all() or not (self.mult[:, 0] == eye).all():
            raise ValueError("basis[0] is not a two-sided unit")
        if not (self.mult == np.transpose(self.mult, (1, 0, 2))).all():
            raise ValueError("multiplication is not commutative")
        if n <= 64:
            t2 = self.mult.reshape(n * n, n)
            left = (t2 @ self.mult.reshape(n, n * n)) % p  # ((b_i b_j) b_k)
            right = np.einsum("jkl,ilm->ijkm", self.mult, self.mult) % p
            if not (left.reshape(n, n, n, n) == right).all():
                raise ValueError("multiplication is not associative")
        # adapted radical filtration: products respect degrees, and
        # m^i is exactly the span of basis monomials of degree >= i
        for i in range(n):
            for j in range(n):
                prod = self.mult[i, j]
                if prod.any() and self.degrees[np.flatnonzero(prod)].min() < self.degrees[i] + self.degrees[j]:
                    raise ValueError("multiplication does not respect the radical filtration")
        if (self.gens[:, 0] != 0).any():
            raise ValueError("variables must map into the maximal ideal")
        power = np.eye(n, dtype=np.int64)[:, 1:]  # basis of m
        for i, idx in enumerate(self.rad_filtration[1:], start=1):
            if rank(power, p) != idx.size:
                raise ValueError("basis is not adapted to the radical filtration")
            if idx.size == 0:
                break
            power = self._times_m(power)
        # the variables must generate m, i.e. span m / m^2
        m2 = eye[:, self.rad_filtration[2]] if len(self.rad_filtration) > 2 else eye[:, :0]
        if rank(np.hstack([self.gens.T, m2]), p) != n - 1:
            raise ValueError("variables do not generate the maximal ideal")

    def _times_m(self, cols: np.ndarray) -> np.ndarray:
        """Spanning set of m * span(cols)."""
        if cols.shape[1] == 0 or self.nvars == 0:
            return np.zeros((self.dim, 0), dtype=np.int64)
        parts = [(g @ cols) % self.p for g in self.gen_matrices]
        return np.hstack(parts)


# -- construction ------------------------------------------------------------


def _parse_relations(spec: RingSpec):
    p = spec.char
    rels = []
    for text in spec.relations:
        poly = parse_polynomial(text, list(spec.vars))
        poly = {m: c % p for m, c in poly.items() if c % p}
        zero = tuple([0] * len(spec.vars))
        if zero in poly:
            raise NonLocalRelation(f"relation {text!r} has a constant term")
        if poly:
            rels.append(poly)
    return rels


def _reduce_block(monos, generators, p):
    """Row-reduce ``generators`` over the ordered monomial list.

    Returns the standard (non-pivot) monomials and a normal-form table
    sending every monomial in ``monos`` to a vector over the standard ones.
    """
    col = {m: i for i, m in enumerate(monos)}
    if generators:
        mat = np.zeros((len(generators), len(monos)), dtype=np.int64)
        for r, g in enumerate(generators):
            for m, c in g.items():
                mat[r, col[m]] = (mat[r, col[m]] + c) % p
        red, piv = row_space(mat, p)
    else:
        red, piv = np.zeros((0, len(monos)), dtype=np.int64), []
    pivset = set(piv)
    std = [i for i in range(len(monos)) if i not in pivset]
    table = {}
    for k, i in enumerate(std):
        v = np.zeros(len(std), dtype=np.int64)
        v[k] = 1
        table[monos[i]] = v
    std_idx = np.asarray(std, dtype=np.int64)
    for r, i in enumerate(piv):
        table[monos[i]] = (-red[r, std_idx]) % p if std else np.zeros(0, dtype=np.int64)
    return [monos[i] for i in std], table


def _build_graded(spec: RingSpec, rels):
    p = spec.char
    nv = len(spec.vars)
    for f in rels:
        if not is_homogeneous(f):
            raise ParseError(f"graded ring {spec.name!r} has an inhomogeneous relation")
    rel_deg = [sum(next(iter(f))) for f in rels]
    basis: list[tuple[int, ...]] = []
    tables = {}  # monomial -> (degree, vector over the standard monomials of that degree)
    offsets = {}
    d = 0
    while True:
        if d > spec.degree_cap:
            raise NotArtinian(f"{spec.name}: nonzero component in degree {spec.degree_cap}")
        monos = _monomials_of_degree(nv, d)
        gens = []
        for f, e in zip(rels, rel_deg):
            if e > d:
                continue
            for m in _monomials_of_degree(nv, d - e):
                gens.append({_mono_mul(m, t): c for t, c in f.items()})
        std, table = _reduce_block(monos, gens, p)
        if not std:
            break
        offsets[d] = len(basis)
        basis.extend(std)
        for m, v in table.items():
            tables[m] = (d, v)
        d += 1
    top = d - 1

    def nf(m):
        deg = sum(m)
        out = np.zeros(len(basis), dtype=np.int64)
        if deg > top:
            return out
        dd, v = tables[m]
        out[offsets[dd]: offsets[dd] + v.size] = v
        return out

    return basis, nf


def _build_truncated(spec: RingSpec, rels, truncate: int):
    p = spec.char
    nv = len(spec.vars)
    # local degree order: low degrees lead, grevlex within a degree
    monos = [m for d in range(truncate) for m in _monomials_of_degree(nv, d)]
    gens = []
    for f in rels:
        low = min(sum(t) for t in f)
        for d in range(truncate - low):
            for m in _monomials_of_degree(nv, d):
                g = {}
                for t, c in f.items():
                    prod = _mono_mul(m, t)
                    if sum(prod) < truncate:
                        g[prod] = c
                if g:
                    gens.append(g)
    basis, table = _reduce_block(monos, gens, p)

    def nf(m):
        if sum(m) >= truncate:
            return np.zeros(len(basis), dtype=np.int64)
        return table[m].copy()

    return basis, nf


def build_algebra(spec: RingSpec, truncate: Optional[int] = None) -> LocalAlgebra:
    """Build ``k[vars]/relations`` (graded), or ``k[vars]/(I + m^N)`` (ungraded)."""
    rels = _parse_relations(spec)
    if spec.graded:
        basis, nf = _build_graded(spec, rels)
    else:
        basis, nf = _build_truncated(spec, rels, truncate or spec.truncate)
    n = len(basis)
    nv = len(spec.vars)
    mult = np.zeros((n, n, n), dtype=np.int64)
    for i, a in enumerate(basis):
        for j in range(i, n):
            v = nf(_mono_mul(a, basis[j]))
            mult[i, j] = v
            mult[j, i] = v
    gens = np.zeros((nv, n), dtype=np.int64)
    for k in range(nv):
        e = [0] * nv
        e[k] = 1
        gens[k] = nf(tuple(e))
    return LocalAlgebra(spec.char, spec.vars, basis, mult, gens, name=spec.name, spec=spec)


def stabilize_truncation(spec: RingSpec, start: int = 2, limit: int = 64) -> LocalAlgebra:
    """Raise the truncation until the dimension is unchanged twice in a row."""
    prev = None
    same = 0
    alg = None
    for n in range(start, limit + 1):
        alg = build_algebra(spec, truncate=n)
        if alg.dim == prev:
            same += 1
            if same == 2:
                return alg
        else:
            same = 0
        prev = alg.dim
    raise NotArtinian(f"{spec.name}: dimension still growing at truncation {limit}")


def monomial_ci(exponents: Sequence[int], p: int = 7, names: Optional[Sequence[str]] = None) -> LocalAlgebra:
    """The algebra k[X_1..X_d]/(X_1^a_1, ..., X_d^a_d)."""
    d = len(exponents)
    if names is None:
        names = "xyzwuvst"[:d] if d <= 8 else [f"x{chr(97 + i)}" for i in range(d)]
    spec = RingSpec(
        name="ci" + "_".join(str(a) for a in exponents),
        char=p,
        vars=tuple(names),
        relations=tuple(f"{v}^{a}" for v, a in zip(names, exponents)),
    )
    return build_algebra(spec)


# -- invariants --------------------------------------------------------------


def hilbert(A: LocalAlgebra) -> HilbertData:
    filt = A.rad_filtration
    h = [int(filt[i].size - filt[i + 1].size) for i in range(len(filt) - 1)]
    if A.nvars:
        stacked = np.vstack(list(A.gen_matrices))
        socle = A.dim - rank(stacked, A.p)
    else:
        socle = A.dim
    return HilbertData(h=h, length=A.dim, embdim=h[1] if len(h) > 1 else 0, socle_dim=int(socle))


def _lescot(d: int, a: int):
    disc = d * d - 4 * a
    if disc <= 0:
        return None
    s = math.isqrt(disc)
    if s * s != disc or (d + s) % 2:
        return None
    r1, r2 = (d - s) // 2, (d + s) // 2
    if r1 < 1 or r1 >= r2:
        return None
    h = r2 if r1 == 1 else None
    return (h, r1, r2)


def classify(A: LocalAlgebra) -> Classification:
    hd = hilbert(A)
    h = hd.h
    short = len(h) == 3 and h[2] > 0
    hyper = hd.embdim <= 1
    ci4 = short and h == [1, 2, 1]
    lescot = None
    if short and hd.socle_dim == h[2]:
        lescot = _lescot(h[1], h[2])
    return Classification(short=short, hypersurface=hyper, ci4_candidate=ci4, lescot=lescot)


def invert_unit(A: LocalAlgebra, u) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64) % A.p
    if not A.is_unit(u):
        raise NotAUnit("element lies in the maximal ideal")
    try:
        return solve(A.left_matrix(u), A.one(), A.p)
    except NoSolution:  # pragma: no cover - impossible for a unit
        raise NotAUnit("left multiplication is singular") from None


def tensor_algebra(R: LocalAlgebra, T: LocalAlgebra, name: Optional[str] = None) -> LocalAlgebra:
    """The algebra R (x)_k T on the basis of ordered pairs."""
    if R.p != T.p:
        raise CharMismatch(f"characteristics {R.p} and {T.p} differ")
    pairs = sorted(
        ((i, j) for i in range(R.dim) for j in range(T.dim)),
        key=lambda ij: (R.degrees[ij[0]] + T.degrees[ij[1]], ij[0], ij[1]),
    )
    pos = {ij: k for k, ij in enumerate(pairs)}
    n = len(pairs)
    # mult[(i,j),(k,l)] = R.mult[i,k] (x) T.mult[j,l], re-indexed by pairs
    big = np.einsum("ikm,jln->ijklmn", R.mult, T.mult) % R.p
    big = big.reshape(R.dim * T.dim, R.dim * T.dim, R.dim * T.dim)
    order = np.array([i * T.dim + j for i, j in pairs])
    mult = big[np.ix_(order, order, order)]
    names = list(R.names)
    for nm in T.names:
        while nm in names:
            nm = nm + "_"
        names.append(nm)
    gens = []
    for g in R.gens:
        v = np.zeros(n, dtype=np.int64)
        for i in np.flatnonzero(g):
            v[pos[(int(i), 0)]] = g[i]
        gens.append(v)
    for g in T.gens:
        v = np.zeros(n, dtype=np.int64)
        for j in np.flatnonzero(g):
            v[pos[(0, int(j))]] = g[j]
        gens.append(v)
    monomials = [R.monomials[i] + T.monomials[j] for i, j in pairs]
    return LocalAlgebra(R.p, names, monomials, mult, np.array(gens).reshape(len(names), n),
                        name=name or f"{R.name}(x){T.name}")


def field_algebra(p: int = 7) -> LocalAlgebra:
    """The residue field k itself, presented as k[x]/(x)."""
    return build_algebra(RingSpec(name="k", char=p, vars=("x",), relations=("x",)))
