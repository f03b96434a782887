import json
from itertools import product

import pytest
from hypothesis import given, strategies as st

from corrcalc.errors import (
    CompositionGap, DuplicateName, IdentityLawFailure, MalformedInput, MissingIdentity,
    NoLimit, NonAssociative,
)
from corrcalc.fincat import (
    binary_product, category_to_json, check_category, comma, enumerate_functors,
    enumerate_nats, find_isomorphism, identity_functor, is_equivalence, limit, make_category,
    opposite, poset_category, product_category, pullback, terminal_object, validate_category,
)
from corrcalc.fixtures import arrow, chain3, fin_map, finsets, one, p2, powerset_poset


# strategies -----------------------------------------------------------------
@st.composite
def preorders(draw, max_n=4):
    """A random preorder as its reflexive transitive closure."""
    n = draw(st.integers(1, max_n))
    rel = {(i, i) for i in range(n)}
    rel |= {(i, j) for i in range(n) for j in range(n)
            if draw(st.booleans()) and i != j}
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return poset_category(list(range(n)), lambda a, b: (a, b) in rel, name="R")


@st.composite
def cospans(draw, n=3):
    k, l, m = draw(st.integers(0, n)), draw(st.integers(0, n)), draw(st.integers(1, n))
    f = tuple(draw(st.integers(0, m - 1)) for _ in range(k))
    g = tuple(draw(st.integers(0, m - 1)) for _ in range(l))
    return (k, m, f), (l, m, g)


# laws -----------------------------------------------------------------------
def test_fixtures_are_categories():
    for C in (one(), arrow(), chain3(), p2(), finsets(3)):
        assert check_category(C) is C


def test_one_has_one_morphism():
    C = one()
    assert (C.n_ob, C.n_mor) == (1, 1)


def test_finsets_counts():
    # sum over k, l of l^k maps
    C = finsets(3)
    assert C.n_mor == sum(l ** k for k in range(4) for l in range(4))


@given(preorders())
def test_preorder_categories_satisfy_laws(C):
    check_category(C)
    check_category(opposite(C))


@given(preorders(3), preorders(2))
def test_products_satisfy_laws(C, D):
    P, p1, p2_ = product_category(C, D)
    check_category(P)
    assert P.n_mor == C.n_mor * D.n_mor


@given(preorders())
def test_opposite_is_involutive(C):
    Cop = opposite(opposite(C))
    assert (Cop.src, Cop.tgt, Cop.ids) == (C.src, C.tgt, C.ids)
    assert Cop.comp_table == C.comp_table


def _arrow_raw():
    return category_to_json(arrow())


def test_json_round_trip():
    C = validate_category(json.loads(json.dumps(_arrow_raw())))
    assert C.morphisms == arrow().morphisms


def test_unknown_key_rejected():
    raw = _arrow_raw()
    raw["colour"] = "red"
    with pytest.raises(MalformedInput):
        validate_category(raw)


def test_missing_identity():
    raw = _arrow_raw()
    del raw["identities"]["1"]
    with pytest.raises(MissingIdentity):
        validate_category(raw)


def test_duplicate_names():
    with pytest.raises(DuplicateName):
        make_category(["x", "x"], [], {}, [])


def test_composition_gap():
    raw = _arrow_raw()
    raw["compose"] = [e for e in raw["compose"] if e != ["a", "id_0", "a"]]
    with pytest.raises(CompositionGap):
        validate_category(raw)


def test_identity_law_failure():
    # two parallel arrows with id o a = b
    C = make_category(["0", "1"], [("i0", "0", "0"), ("i1", "1", "1"), ("a", "0", "1"),
                                   ("b", "0", "1")],
                      {"0": "i0", "1": "i1"},
                      [("i0", "i0", "i0"), ("i1", "i1", "i1"), ("a", "i0", "a"), ("b", "i0", "b"),
                       ("i1", "a", "b"), ("i1", "b", "b")])
    with pytest.raises(IdentityLawFailure):
        check_category(C)


def test_non_associative():
    # endomorphisms e, t of one object with a non-associative table
    names = ["i", "e", "t"]
    table = {("e", "e"): "i", ("t", "t"): "t", ("e", "t"): "t", ("t", "e"): "e"}
    comp = [("i", x, x) for x in names] + [(x, "i", x) for x in names[1:]]
    comp += [(g, f, h) for (g, f), h in table.items()]
    C = make_category(["*"], [(n, "*", "*") for n in names], {"*": "i"}, comp)
    with pytest.raises(NonAssociative):
        check_category(C)


# functor enumeration against a brute-force oracle ---------------------------
def _monotone_maps(C, D):
    leq = {(C.src[m], C.tgt[m]) for m in range(C.n_mor)}
    leqD = {(D.src[m], D.tgt[m]) for m in range(D.n_mor)}
    return [ob for ob in product(range(D.n_ob), repeat=C.n_ob)
            if all((ob[a], ob[b]) in leqD for a, b in leq)]


@given(preorders(3), preorders(3))
def test_functors_between_preorders_are_monotone_maps(C, D):
    got = sorted(F.ob_map for F in enumerate_functors(C, D))
    assert got == sorted(_monotone_maps(C, D))


@given(preorders(3), preorders(3))
def test_compiled_and_python_enumeration_agree(C, D):
    a = [(F.ob_map, F.mor_map) for F in enumerate_functors(C, D)]
    b = [(F.ob_map, F.mor_map) for F in enumerate_functors(C, D, use_py=True)]
    assert a == b


def test_functors_into_finsets_count():
    # functors from the walking arrow are morphisms of the target
    D = finsets(2)
    assert len(list(enumerate_functors(arrow(), D))) == D.n_mor


def test_nats_between_constant_functors():
    C = arrow()
    F = identity_functor(C)
    nats = list(enumerate_nats(F, F))
    assert len(nats) == 1


# limits ---------------------------------------------------------------------
@given(cospans())
def test_pullbacks_in_finsets_match_fibre_products(cs):
    (k, m, f), (l, _, g) = cs
    n = 3
    C = finsets(n)
    fi, gi = fin_map(C, k, m, f), fin_map(C, l, m, g)
    size = sum(1 for i in range(k) for j in range(l) if f[i] == g[j])
    if size > n:
        with pytest.raises(NoLimit):
            pullback(C, fi, gi)
        return
    cone = pullback(C, fi, gi)
    assert C.ob_data[cone.apex] == size
    l1, l2 = cone.legs
    pairs = {(C.mor_data[l1][t], C.mor_data[l2][t]) for t in range(size)}
    assert pairs == {(i, j) for i in range(k) for j in range(l) if f[i] == g[j]}


def test_products_in_powerset_are_meets():
    C = powerset_poset(2)
    for x in range(C.n_ob):
        for y in range(C.n_ob):
            cone = binary_product(C, x, y)
            assert C.ob_data[cone.apex] == C.ob_data[x] & C.ob_data[y]


def test_terminal_objects():
    assert arrow().objects[terminal_object(arrow())] == "1"
    C = powerset_poset(2)
    assert C.ob_data[terminal_object(C)] == frozenset({1, 2})


def test_arrow_has_no_product_with_two_parallel_maps():
    # the parallel pair has no terminal object
    C = make_category(["0", "1"], [("i0", "0", "0"), ("i1", "1", "1"), ("a", "0", "1"),
                                   ("b", "0", "1")], {"0": "i0", "1": "i1"},
                      [("i0", "i0", "i0"), ("i1", "i1", "i1"), ("a", "i0", "a"),
                       ("b", "i0", "b"), ("i1", "a", "a"), ("i1", "b", "b")])
    check_category(C)
    with pytest.raises(NoLimit):
        limit(C, [], [])


@given(preorders(3), preorders(3))
def test_comma_object_count(C, D):
    for F in list(enumerate_functors(C, D))[:3]:
        Id = identity_functor(D)
        K, p1, p2_ = comma(F, Id)
        check_category(K)
        expected = sum(len(D.hom(F.ob_map[c], d)) for c in range(C.n_ob) for d in range(D.n_ob))
        assert K.n_ob == expected


# equivalences ---------------------------------------------------------------
def test_chaotic_pair_is_equivalent_to_point():
    C = poset_category([0, 1], lambda a, b: True, name="I")
    F = list(enumerate_functors(C, one()))[0]
    assert is_equivalence(F).holds
    assert not is_equivalence(list(enumerate_functors(arrow(), one()))[0]).holds


def test_find_isomorphism():
    assert find_isomorphism(arrow(), opposite(arrow())) is not None
    assert find_isomorphism(arrow(), one()) is None
