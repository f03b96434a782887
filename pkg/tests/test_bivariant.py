from functools import reduce

import pytest

from corrcalc.bicat import cat_universe, validate_pseudofunctor
from corrcalc.bivariant import (
    BivariantTransformation, base_inclusion, cartesian_monoidal, check_bivariant,
    check_bivariant_transformation, check_composition_intertwine, check_spex, constant_functor,
    corr_representable, power_category, require_bivariant, self_duality_check, slice_functor,
    spex, universality_check, yoneda_check,
)
from corrcalc.errors import NoProducts, PreconditionFailed
from corrcalc.fib import check_bicartesian_base_change, grothendieck
from corrcalc.fincat import check_category, identity_functor, identity_nat
from corrcalc.fixtures import arrow, one, p2
from corrcalc.span import build_corr


# bivariance and the fibration dictionary -------------------------------------------
def test_bottom_inclusion_is_bivariant(MA, H_bottom):
    rep = check_bivariant(H_bottom, MA)
    assert rep.holds
    assert rep.witness == {"adjoints": 3, "squares": 5}


def test_terminal_map_fails_base_change(MA, H_bang):
    rep = check_bivariant(H_bang, MA)
    assert not rep.holds
    assert (rep.counterexample["f"], rep.counterexample["g"]) == ("a", "a")


def test_top_inclusion_has_no_adjoint(MA, H_top):
    rep = check_bivariant(H_top, MA)
    assert not rep.holds
    assert rep.counterexample["reason"] == "no right adjoint"
    with pytest.raises(PreconditionFailed):
        require_bivariant(H_top, MA)


def _dictionary(H, M):
    return check_bicartesian_base_change(grothendieck(H), M).holds


def test_dictionary_on_arrow(MA, H_bottom, H_bang, H_top, A):
    for H in (H_bottom, H_bang, H_top, constant_functor(A, A), slice_functor(A)):
        assert check_bivariant(H, MA).holds == _dictionary(H, MA)


def test_dictionary_on_p2(MP):
    for H in (slice_functor(MP.cat), constant_functor(MP.cat, arrow())):
        assert check_bivariant(H, MP).holds
        assert _dictionary(H, MP)


def test_identity_transformation_is_bivariant(MA, H_bottom):
    rep = check_bivariant(H_bottom, MA).payload
    D = MA.cat
    comps = {x: identity_functor(H_bottom.ob(x)) for x in range(D.n_ob)}
    cells = {f: identity_nat(rep.cell(f)) for f in range(D.n_mor)}
    phi = BivariantTransformation(comps, cells)
    assert check_bivariant_transformation(phi, rep, rep).holds


# span extension ------------------------------------------------------------------------
@pytest.mark.parametrize("make", [lambda M: slice_functor(M.cat),
                                  lambda M: constant_functor(M.cat, arrow())],
                         ids=["slice", "const"])
def test_spex_on_arrow(MA, make):
    rep = check_bivariant(make(MA), MA).payload
    r = check_spex(rep)
    assert r.holds, r.counterexample


def test_spex_of_bottom_inclusion(MA, H_bottom):
    rep = check_bivariant(H_bottom, MA).payload
    assert check_spex(rep).holds


def test_spex_of_base_inclusion(MA):
    B = build_corr(MA)
    rep = check_bivariant(base_inclusion(B), MA).payload
    assert check_spex(rep, B).holds


def test_perturbed_spex_compositor_is_rejected(MA):
    from corrcalc.bicat import Pseudofunctor
    from corrcalc.errors import CoherenceFailure
    from corrcalc.fincat import NatTransData, vcomp
    from test_bicat import z2
    G = z2()
    rep = check_bivariant(constant_functor(MA.cat, G), MA).payload
    P = spex(rep)
    validate_pseudofunctor(P)
    n = P.source.n_ob
    assert all(check_composition_intertwine(P, x, y, z).holds
               for x in range(n) for y in range(n) for z in range(n))

    def twisted(t, s):
        c = P.comp_cell(t, s)
        twist = NatTransData(c.target, c.target, [G.mor("s")] * G.n_ob)
        return vcomp(twist, c)

    bad = Pseudofunctor(P.source, P.target, P.ob, P.map1, P.map2, twisted, P.unit_cell)
    with pytest.raises(CoherenceFailure):
        validate_pseudofunctor(bad)


# Yoneda and universality ------------------------------------------------------------------
def test_yoneda_on_corepresentable(MA):
    F = require_bivariant(corr_representable(MA, 1), MA)
    r = yoneda_check(MA, F, 1)
    assert r.holds
    assert r.witness["transformations"] == 2


def test_yoneda_on_constants(MA):
    for C in (one(), arrow()):
        F = require_bivariant(constant_functor(MA.cat, C), MA)
        assert yoneda_check(MA, F, 1).holds


def test_universality_small():
    from corrcalc.marked import has_base_change, trivial_marking
    M = has_base_change(trivial_marking(arrow())).payload
    r = universality_check(M, cat_universe([one()]))
    assert r.holds
    assert r.witness["corr_classes"] == r.witness["bivariant_classes"]


# monoidal examples ----------------------------------------------------------------------
def _meet(C, xs):
    """Oracle for products in a powerset poset: intersections."""
    top = frozenset({1, 2})
    return reduce(lambda a, b: a & b, (C.ob_data[x] for x in xs), top)


def test_power_category():
    C = power_category(arrow(), 2)
    check_category(C)
    assert (C.n_ob, C.n_mor) == (4, 9)


def test_cartesian_monoidal_product_formula():
    C = p2()
    r = cartesian_monoidal(C, 2)
    assert r.holds
    brep = r.payload
    from corrcalc.fixtures import finsets
    Fin = finsets(2)
    for m, adj in sorted(brep.adjoints.items()):
        k, l, vals = Fin.src[m], Fin.tgt[m], Fin.mor_data[m]
        R = adj.right
        Q, P = power_category(C, k), power_category(C, l)
        for i, xs in enumerate(Q.ob_data):
            got = P.ob_data[R.ob_map[i]]
            want = [_meet(C, [xs[a] for a in range(k) if vals[a] == j]) for j in range(l)]
            assert [C.ob_data[g] for g in got] == want


def test_cartesian_monoidal_collar_squares():
    r = cartesian_monoidal(arrow(), 2)
    assert r.holds
    assert r.witness["collar_squares"] > 0


def test_cartesian_monoidal_needs_products():
    from corrcalc.fincat import discrete_category
    with pytest.raises(NoProducts):
        cartesian_monoidal(discrete_category(["x", "y"]), 2)


def test_self_duality(MP):
    for X in ("{1}", "{1,2}"):
        assert self_duality_check(MP, MP.cat.ob(X)).holds
