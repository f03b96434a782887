import pytest
from hypothesis import given, strategies as st

from corrcalc.adjoint import check_triangle_identities, has_right_adjoint_in
from corrcalc.bicat import validate_bicat
from corrcalc.errors import NoLimit, NotClosed
from corrcalc.fixtures import fin_map, finsets, fs4
from corrcalc.marked import certify, has_base_change, maximal_marking
from corrcalc.span import (
    Span, build_corr, compose_spans, corr_product_split, enumerate_spans, identity_span,
    lower_shriek, restrict_corr, shriek_adjunction, span_category, span_to_dot, walking_span,
)


def _span(C, k, x, y, p, q):
    return Span(x, y, k, fin_map(C, k, x, p), fin_map(C, k, y, q))


def test_fs4_composite_kernel():
    # [1 <- 2 -> 1] composed with itself: 2 x_1 2 has four elements
    C = fs4()
    s = _span(C, 2, 1, 1, (0, 0), (0, 0))
    M = certify(maximal_marking(C), [(s.p, s.q)])
    t = compose_spans(M, s, s)
    assert C.ob_data[t.k] == 4


@st.composite
def composable_spans(draw, n=3):
    sizes = [draw(st.integers(1, n)) for _ in range(5)]
    x, k1, y, k2, z = sizes
    vals = lambda k, m: tuple(draw(st.integers(0, m - 1)) for _ in range(k))
    return (k1, x, y, vals(k1, x), vals(k1, y)), (k2, y, z, vals(k2, y), vals(k2, z))


@given(composable_spans())
def test_composite_kernels_are_fibre_products(pair):
    n = 3
    C = finsets(n)
    (k1, x, y, p1, q1), (k2, _, z, p2, q2) = pair
    s1, s2 = _span(C, k1, x, y, p1, q1), _span(C, k2, y, z, p2, q2)
    fibre = [(i, j) for i in range(k1) for j in range(k2) if q1[i] == p2[j]]
    if len(fibre) > n:
        with pytest.raises(NoLimit):
            certify(maximal_marking(C), [(s2.p, s1.q)])
        return
    M = certify(maximal_marking(C), [(s2.p, s1.q)])
    t = compose_spans(M, s1, s2)
    assert C.ob_data[t.k] == len(fibre)
    legs = sorted(zip(C.mor_data[t.p], C.mor_data[t.q]))
    assert legs == sorted((p1[i], q2[j]) for i, j in fibre)


@pytest.mark.parametrize("name", ["ONE", "ARROW{a}", "P2-all"])
def test_corr_is_a_bicategory(name):
    from corrcalc.cli import load_marked
    M = has_base_change(load_marked(name)).payload
    validate_bicat(build_corr(M))


def test_identity_composites_are_isomorphic(MP):
    D = MP.cat
    for x in range(D.n_ob):
        for y in range(D.n_ob):
            H = span_category(MP, x, y)
            for s in enumerate_spans(MP, x, y):
                for t in (compose_spans(MP, identity_span(MP, x), s),
                          compose_spans(MP, s, identity_span(MP, y))):
                    assert H.isomorphic(H.ob_data.index(s), H.ob_data.index(t))


def test_shriek_adjunctions(MP):
    B = build_corr(MP)
    for f in sorted(MP.marking):
        assert check_triangle_identities(shriek_adjunction(B, f)).holds


def test_right_adjointable_cells_are_lower_shrieks(MA):
    B = build_corr(MA)
    D = MA.cat
    for x in range(D.n_ob):
        for y in range(D.n_ob):
            H = B.hom[(x, y)]
            shrieks = [lower_shriek(B, f).i for f in D.hom(x, y)]
            for c in B.ones(x, y):
                adjointable = has_right_adjoint_in(B, c)
                assert adjointable == any(H.isomorphic(c.i, j) for j in shrieks)


def test_restriction_keeps_right_way_class(MP):
    B = build_corr(MP)
    D = MP.cat
    isos = [f for f in range(D.n_mor) if D.is_iso(f)]
    R = restrict_corr(B, isos)
    validate_bicat(R)
    for x in range(R.n_ob):
        for y in range(R.n_ob):
            for c in R.ones(x, y):
                assert D.is_iso(R.span(c).q)


def test_restriction_must_be_stable(MP):
    # pulling {1} <= {1,2} back along {2} <= {1,2} gives {} <= {2}
    with pytest.raises(NotClosed):
        restrict_corr(build_corr(MP), ["{1}<={1,2}"])


@pytest.mark.parametrize("pair", [("ARROW{a}", "ARROW-trivial"), ("P2-all", "ONE")])
def test_product_split(pair):
    from corrcalc.cli import load_marked
    assert corr_product_split(load_marked(pair[0]), load_marked(pair[1])).holds


def test_span_dot_is_a_roof(MA):
    D = MA.cat
    s = Span(1, 1, 0, D.mor("a"), D.mor("a"))
    dot = span_to_dot(D, s)
    assert dot.count("->") == 2
    assert "style=dashed" in dot


def test_walking_span_marking():
    L = walking_span()
    assert L.is_marked(L.cat.mor("p"))
    assert not L.is_marked(L.cat.mor("q"))
