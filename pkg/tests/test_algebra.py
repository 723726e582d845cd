import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artinlen.algebra import (
    CharMismatch,
    NonLocalRelation,
    NotArtinian,
    NotAUnit,
    RingSpec,
    build_algebra,
    classify,
    field_algebra,
    hilbert,
    invert_unit,
    load_ring,
    monomial_ci,
    stabilize_truncation,
    tensor_algebra,
)
from artinlen.polynomial import ParseError, is_homogeneous, parse_polynomial


def spec(vars, relations, **kw):
    return RingSpec(name=kw.pop("name", "t"), char=kw.pop("char", 7), vars=tuple(vars),
                    relations=tuple(relations), **kw)


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


class TestParser:
    @pytest.mark.parametrize("text,expect", [
        ("x^2", {(2, 0): 1}),
        ("x*y - y^2", {(1, 1): 1, (0, 2): -1}),
        ("3x^2y", {(2, 1): 3}),
        (" 2 x y + x y ", {(1, 1): 3}),
        ("-1", {(0, 0): -1}),
    ])
    def test_grammar(self, text, expect):
        assert parse_polynomial(text, ["x", "y"]) == expect

    @pytest.mark.parametrize("bad", ["", "x^", "x + * y", "q^2", "x^-1", "2 3"])
    def test_rejects(self, bad):
        with pytest.raises(ParseError):
            parse_polynomial(bad, ["x", "y"])

    def test_homogeneity(self):
        assert is_homogeneous(parse_polynomial("x^2 - y^2", ["x", "y"]))
        assert not is_homogeneous(parse_polynomial("x - y^2", ["x", "y"]))


class TestBuild:
    def test_ci4(self):
        A = build_algebra(spec("xy", ["x^2", "y^2"]))
        assert A.dim == 4
        assert A.basis == [(0, 0), (1, 0), (0, 1), (1, 1)]

    def test_all_quadrics(self):
        A = build_algebra(spec("xy", ["x^2", "xy", "y^2"]))
        assert A.dim == 3 and hilbert(A).h == [1, 2]

    def test_ungraded_truncation(self):
        # x = x^2 = x^3 = ... = 0 modulo m^4
        A = build_algebra(spec("x", ["x - x^2"], graded=False, truncate=4))
        assert A.dim == 1

    def test_stabilized_truncation(self):
        A = stabilize_truncation(spec("xy", ["x^2 - y^3", "xy"], graded=False, truncate=2))
        assert A.dim == 5 and hilbert(A).h == [1, 2, 1, 1]

    def test_constant_term_rejected(self):
        with pytest.raises(NonLocalRelation):
            build_algebra(spec("x", ["x^2 + 1"]))

    def test_not_artinian(self):
        with pytest.raises(NotArtinian):
            build_algebra(spec("xy", ["x^2"], degree_cap=10))

    def test_spec_validation(self):
        with pytest.raises(ParseError):
            spec([], [])
        with pytest.raises(ParseError):
            spec("xx", ["x"])
        with pytest.raises(ParseError):
            spec("x", ["x^2"], graded=False)
        with pytest.raises(ParseError):
            spec("x", ["x^2"], char=8)

    def test_round_trip_and_bundled(self, tmp_path):
        s = load_ring("lescot132")
        path = tmp_path / "r.json"
        import json
        path.write_text(json.dumps(s.to_dict()))
        assert load_ring(path) == s
        with pytest.raises(FileNotFoundError):
            load_ring("no_such_ring")

    def test_unit_and_structure(self, x2y2):
        A = x2y2
        one = A.one()
        for i in range(A.dim):
            e = A.basis_vector(i)
            assert np.array_equal(A.mul(one, e), e)
        filt = A.rad_filtration
        assert [f.size for f in filt] == [4, 3, 1, 0]


def staircase_count(exps_box, gens):
    """Monomials in the box not divisible by any generator."""
    count = 0
    for m in itertools.product(*[range(a) for a in exps_box]):
        if not any(all(mi >= gi for mi, gi in zip(m, g)) for g in gens):
            count += 1
    return count


@st.composite
def monomial_ideals(draw):
    v = draw(st.integers(1, 3))
    powers = [draw(st.integers(1, 4)) for _ in range(v)]
    extra = draw(st.lists(st.tuples(*[st.integers(0, 3)] * v), max_size=3))
    extra = [e for e in extra if sum(e) > 0]
    return powers, extra


class TestProperties:
    @settings(max_examples=40, deadline=None)
    @given(monomial_ideals())
    def test_staircase_dimension(self, ideal):
        powers, extra = ideal
        names = "xyz"[: len(powers)]
        pure = [tuple(a if j == i else 0 for j in range(len(powers))) for i, a in enumerate(powers)]

        def mono(e):
            return "*".join(f"{n}^{k}" for n, k in zip(names, e) if k)

        A = build_algebra(spec(names, [mono(g) for g in pure + extra]))
        assert A.dim == staircase_count(powers, pure + extra)
        h = hilbert(A)
        assert sum(h.h) == A.dim and h.h[0] == 1

    @settings(max_examples=25, deadline=None)
    @given(monomial_ideals())
    def test_associative_commutative(self, ideal):
        powers, extra = ideal
        A = monomial_ci(powers)
        M = A.mult
        assert np.array_equal(M, M.transpose(1, 0, 2))
        left = np.einsum("ijk,klm->ijlm", M, M) % A.p   # (b_i b_j) b_l
        right = np.einsum("jlk,ikm->ijlm", M, M) % A.p  # b_i (b_j b_l)
        assert np.array_equal(left, right)

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.integers(1, 3), min_size=1, max_size=2), st.lists(st.integers(1, 3), min_size=1, max_size=2))
    def test_tensor_hilbert_product(self, a, b):
        R, T = monomial_ci(a), monomial_ci(b)
        S = tensor_algebra(R, T)
        assert S.dim == R.dim * T.dim
        assert hilbert(S).h == poly_mul(hilbert(R).h, hilbert(T).h)


class TestHilbertAndClassify:
    def test_ci4(self, x2y2):
        h = hilbert(x2y2)
        assert (h.h, h.length, h.socle_dim, h.embdim) == ([1, 2, 1], 4, 1, 2)
        c = classify(x2y2)
        assert c.short and c.ci4_candidate and c.lescot is None and not c.hypersurface

    def test_m2zero(self, m2zero):
        h = hilbert(m2zero)
        assert (h.h, h.length, h.socle_dim) == ([1, 2], 3, 2)
        assert not classify(m2zero).short

    def test_field(self):
        k = field_algebra(7)
        h = hilbert(k)
        assert (h.h, h.socle_dim) == ([1], 1)
        assert classify(k).hypersurface

    def test_lescot(self, lescot132):
        assert hilbert(lescot132).h == [1, 3, 2]
        assert classify(lescot132).lescot == (2, 1, 2)

    def test_square_free_discriminant(self):
        # Hilbert [1, 4, 2] with socle m^2: 16 - 8 = 8 is not a square
        A = build_algebra(spec("xyzw", ["xy", "xz", "xw", "yz", "yw", "zw", "x^2 - y^2", "z^2 - w^2"]))
        h = hilbert(A)
        assert h.h == [1, 4, 2] and h.socle_dim == 2
        assert classify(A).short and classify(A).lescot is None


class TestUnitsAndTensor:
    def test_invert(self, x2y2):
        A = x2y2
        assert np.array_equal(invert_unit(A, A.one()), A.one())
        inv = invert_unit(A, A.element("1 + y"))
        assert np.array_equal(inv, A.element("1 - y"))
        assert np.array_equal(A.mul(inv, A.element("1 + y")), A.one())
        with pytest.raises(NotAUnit):
            invert_unit(A, A.element("x"))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(0, 6), min_size=4, max_size=4).filter(lambda c: c[0] != 0))
    def test_inverse_property(self, coeffs):
        A = monomial_ci([2, 2])
        u = np.array(coeffs)
        assert np.array_equal(A.mul(u, invert_unit(A, u)), A.one())

    def test_tensor_examples(self, x2y2, m2zero):
        k = field_algebra(7)
        S = tensor_algebra(x2y2, k)
        assert S.dim == 4 and hilbert(S).h == [1, 2, 1]
        S = tensor_algebra(x2y2, monomial_ci([3], names=["z"]))
        assert S.dim == 12 and hilbert(S).h == [1, 3, 4, 3, 1]
        S = tensor_algebra(m2zero, monomial_ci([2], names=["z"]))
        assert S.dim == 6 and hilbert(S).h == [1, 3, 2]

    def test_char_mismatch(self, x2y2):
        with pytest.raises(CharMismatch):
            tensor_algebra(x2y2, monomial_ci([2], p=5))
