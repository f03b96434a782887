import json

import pytest

from corrcalc.bicat import (
    CAT, ChainBuilder, bicat_equal, bicat_to_json, cat_universe, compose_pseudofunctors, core1,
    identity_pseudofunctor, locally_discrete, op1, op2, validate_bicat, validate_bicat_json,
    validate_pseudofunctor,
)
from corrcalc.errors import CoherenceFailure
from corrcalc.fib import cat_pseudofunctor
from corrcalc.fincat import (
    NatTransData, check_natural, from_generators, identity_functor, identity_nat,
)
from corrcalc.fixtures import arrow, chain3, one, p2


def z2():
    """The group of order two as a one-object category."""
    return from_generators(["*"], [("s", "*", "*")],
                           [("s", "s", "id_*")], name="Z2")


def test_z2_is_a_category():
    from corrcalc.fincat import check_category
    check_category(z2())


def test_locally_discrete_validates():
    for C in (one(), arrow(), chain3(), p2()):
        B = validate_bicat(locally_discrete(C))
        assert B.n_ob == C.n_ob
        assert sum(H.n_ob for H in B.hom.values()) == C.n_mor


def test_cat_universe_validates():
    K = validate_bicat(cat_universe([one(), arrow()]))
    # functors ARROW -> ARROW are the three monotone maps
    assert K.hom[(1, 1)].n_ob == 3


def test_op_involutions():
    B = locally_discrete(chain3())
    assert bicat_equal(op1(op1(B)), B)
    K = cat_universe([one(), arrow()])
    assert bicat_equal(op2(op2(K)), K)
    validate_bicat(op1(K))
    validate_bicat(op2(K))


def test_json_round_trip():
    K = cat_universe([one(), arrow()])
    raw = json.loads(json.dumps(bicat_to_json(K)))
    K2 = validate_bicat_json(raw)
    assert bicat_to_json(K2) == bicat_to_json(K)


def test_core_of_locally_discrete_is_base():
    C = chain3()
    assert core1(locally_discrete(C)).n_mor == C.n_mor


def test_identity_pseudofunctor_is_valid():
    validate_pseudofunctor(identity_pseudofunctor(cat_universe([one(), arrow()])))


def test_composite_of_valid_pseudofunctors():
    A = arrow()
    mor = [identity_functor(A)] * A.n_mor
    F = cat_pseudofunctor(A, [A, A], mor)
    G = identity_pseudofunctor(CAT)
    validate_pseudofunctor(compose_pseudofunctors(G, F))


def test_perturbed_compositor_is_rejected():
    G = z2()
    A = arrow()
    s = check_natural(NatTransData(identity_functor(G), identity_functor(G), [G.mor("s")]))
    mor = [identity_functor(G)] * A.n_mor
    good = cat_pseudofunctor(A, [G, G], mor)
    validate_pseudofunctor(good)
    bad = cat_pseudofunctor(A, [G, G], mor, comp={(A.mor("a"), A.mor("id_0")): s})
    with pytest.raises(CoherenceFailure):
        validate_pseudofunctor(bad)


def test_chain_builder_triangle_in_cat():
    # unit then counit of the identity adjunction pastes to the identity
    A = arrow()
    I = identity_functor(A)
    b = ChainBuilder(CAT, [I]).insert(1, A).apply(1, 2, identity_nat(I), [I, I])
    b.apply(0, 2, identity_nat(I), [I]).drop(0)
    assert b.cell == identity_nat(I)
