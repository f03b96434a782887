import pytest
from hypothesis import given

from corrcalc.errors import NotClosed, PreconditionFailed
from corrcalc.fincat import identity_functor, identity_nat
from corrcalc.fixtures import chain3, fs4, p2
from corrcalc.marked import (
    certify, has_base_change, is_base_change_exact, marked_comma, marked_pairs, maximal_marking,
    require_base_change, trivial_marking, validate_marking,
)

from test_fincat import preorders


def test_identities_are_added():
    C = chain3()
    M = validate_marking(C, [])
    assert M.marking == frozenset(C.ids)


def test_marking_must_be_closed():
    C = chain3()
    with pytest.raises(NotClosed):
        validate_marking(C, ["u", "v"])
    assert validate_marking(C, ["u", "v", "vu"]).is_marked(C.mor("vu"))


def test_unknown_marked_name():
    from corrcalc.errors import MalformedInput
    with pytest.raises(MalformedInput):
        validate_marking(chain3(), ["w"])


def test_p2_all_has_base_change():
    rep = has_base_change(maximal_marking(p2()))
    assert rep.holds
    assert rep.payload.complete


def test_fs4_fails_with_fibre_product_too_large():
    rep = has_base_change(maximal_marking(fs4()))
    assert not rep.holds
    ce = rep.counterexample
    assert (ce["f_src"], ce["target"], ce["g_src"]) == ("2", "1", "3")
    assert ce["reason"] == "no pullback"


def test_certify_only_needed_squares():
    C = fs4()
    M = maximal_marking(C)
    f = C.mor("2->1:00")
    M2 = certify(M, [(f, f)])
    assert C.ob_data[M2.cone(f, f).apex] == 4
    with pytest.raises(PreconditionFailed):
        require_base_change(M)


@given(preorders())
def test_trivial_marking_has_base_change(C):
    # isomorphisms pull back along anything
    assert has_base_change(trivial_marking(C)).holds


@given(preorders())
def test_certificate_cones_are_pullbacks(C):
    from corrcalc.fincat import is_pullback
    rep = has_base_change(trivial_marking(C))
    for (f, g), cone in rep.payload.certificate.items():
        assert is_pullback(C, f, g, cone)
        assert cone.legs[1] in rep.payload.marking


def test_marked_pairs_share_targets():
    M = maximal_marking(p2())
    C = M.cat
    pairs = list(marked_pairs(M))
    assert all(C.tgt[f] == C.tgt[g] for f, g in pairs)
    assert len(pairs) == sum(len(C.in_mors[C.tgt[f]]) for f in M.marking)


def test_marked_comma_objects():
    # roofs x <- p e with marked leg; for the identity these are marked maps
    M = validate_marking(chain3(), ["u"])
    S, proj, inc, to_e = marked_comma(M, identity_functor(M.cat))
    assert S.n_ob == len(M.marking)


def test_identity_transformation_is_base_change_exact():
    M = has_base_change(maximal_marking(p2())).payload
    alpha = identity_nat(identity_functor(M.cat))
    assert is_base_change_exact(alpha, M, M)


def test_exactness_refuses_unmarked_functors():
    C = chain3()
    M0 = has_base_change(maximal_marking(C)).payload
    M1 = validate_marking(C, [])
    F = identity_functor(C)
    with pytest.raises(PreconditionFailed):
        is_base_change_exact(identity_nat(F), M0, M1)
