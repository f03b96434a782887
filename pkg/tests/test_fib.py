import pytest
from hypothesis import given

from corrcalc.bivariant import constant_functor, slice_functor
from corrcalc.fib import (
    Fibration, certify_grothendieck, check_bicartesian_base_change, check_fibration,
    check_twisted_bicartesian, free_bicartesian, free_cartesian, freeness_report, grothendieck,
    integral_marking, integration_roundtrip, is_cartesian_lift, is_cocartesian_lift,
    representable, slice_comparison, target_projection, transport_roundtrip, universal_span,
)
from corrcalc.fincat import FunctorData, check_category, identity_functor
from corrcalc.fixtures import arrow, chain3, one, p2
from corrcalc.marked import has_base_change, maximal_marking, trivial_marking

from conftest import arrow_functor
from test_fincat import preorders


# oracles ----------------------------------------------------------------------
def cartesian_oracle(p, phi):
    """Universal property of a Cartesian arrow, by enumeration."""
    E, D = p.source, p.target
    f = p.mor_map[phi]
    e1, e = E.src[phi], E.tgt[phi]
    for e2 in range(E.n_ob):
        for psi in E.hom(e2, e):
            for g in D.hom(p.ob_map[e2], p.ob_map[e1]):
                if D.comp(f, g) != p.mor_map[psi]:
                    continue
                sols = [chi for chi in E.hom(e2, e1)
                        if E.comp(phi, chi) == psi and p.mor_map[chi] == g]
                if len(sols) != 1:
                    return False
    return True


def cocartesian_oracle(p, phi):
    E, D = p.source, p.target
    f = p.mor_map[phi]
    e, e1 = E.src[phi], E.tgt[phi]
    for e2 in range(E.n_ob):
        for psi in E.hom(e, e2):
            for g in D.hom(p.ob_map[e1], p.ob_map[e2]):
                if D.comp(g, f) != p.mor_map[psi]:
                    continue
                sols = [chi for chi in E.hom(e1, e2)
                        if E.comp(chi, phi) == psi and p.mor_map[chi] == g]
                if len(sols) != 1:
                    return False
    return True


def grothendieck_size(F):
    """Objects and morphisms of the covariant integral, counted directly."""
    D = F.base
    obs = sum(F.ob(d).n_ob for d in range(D.n_ob))
    mors = 0
    for f in range(D.n_mor):
        Ff = F.mor_functor(f)
        T = F.ob(D.tgt[f])
        for x in range(F.ob(D.src[f]).n_ob):
            mors += sum(len(T.hom(Ff.ob_map[x], y)) for y in range(T.n_ob))
    return obs, mors


def _fixture_functors():
    A, O = arrow(), one()
    out = [
        ("slice(ARROW)", slice_functor(A)),
        ("slice(P2)", slice_functor(p2())),
        ("const(ARROW) on CHAIN3", constant_functor(chain3(), A)),
        ("ARROW->ONE", arrow_functor(A, A, O, FunctorData(A, O, [0, 0], [0, 0, 0]))),
        ("y(1) on ARROW", representable(A, 1)),
        ("y({1,2}) on P2", representable(p2(), 3)),
        ("y(2) on CHAIN3", representable(chain3(), 2)),
    ]
    return out


FUNCTORS = _fixture_functors()


# lifts --------------------------------------------------------------------------
@pytest.mark.parametrize("name,F", FUNCTORS, ids=[n for n, _ in FUNCTORS])
def test_lift_tests_match_oracle(name, F):
    fib = grothendieck(F)
    p = fib.proj
    for m in range(fib.total.n_mor):
        f = p.mor_map[m]
        assert is_cartesian_lift(p, m, f) == cartesian_oracle(p, m)
        assert is_cocartesian_lift(p, m, f) == cocartesian_oracle(p, m)


@pytest.mark.parametrize("name,F", FUNCTORS, ids=[n for n, _ in FUNCTORS])
def test_grothendieck_round_trips(name, F):
    fib = grothendieck(F)
    check_category(fib.total)
    assert certify_grothendieck(fib).holds
    assert transport_roundtrip(F).holds
    assert integration_roundtrip(fib).holds


def test_both_variances_covered():
    kinds = {grothendieck(F).variance for _, F in FUNCTORS}
    assert kinds == {"covariant", "contravariant"}


@pytest.mark.parametrize("name,F", FUNCTORS[:4], ids=[n for n, _ in FUNCTORS[:4]])
def test_integral_size(name, F):
    E = grothendieck(F).total
    assert (E.n_ob, E.n_mor) == grothendieck_size(F)


@given(preorders(3))
def test_slice_functor_round_trip(D):
    F = slice_functor(D)
    assert transport_roundtrip(F).holds


@given(preorders(3))
def test_representable_integrals_are_slices(D):
    for x in range(D.n_ob):
        assert slice_comparison(D, x).holds


def test_fixture_representables_are_slices():
    for D in (arrow(), chain3(), p2()):
        for x in range(D.n_ob):
            assert slice_comparison(D, x).holds


def test_target_projection_is_bicartesian():
    for D in (arrow(), p2()):
        fib = target_projection(D)
        assert check_fibration(fib, None, "both").holds
        M = has_base_change(maximal_marking(D)).payload
        assert check_bicartesian_base_change(fib, M).holds
        assert integration_roundtrip(fib, "covariant").holds
        assert integration_roundtrip(fib, "contravariant").holds


def test_non_fibration_reported():
    # the inclusion of the bottom of ARROW is not a Cartesian fibration over ARROW
    A = arrow()
    p = FunctorData(one(), A, [1], [A.ids[1]])
    rep = check_fibration(Fibration(p), None, "cartesian")
    assert not rep.holds


# free fibrations ----------------------------------------------------------------
def test_free_cartesian_is_free_against_target_projection(MA):
    fib, inc, to_e = free_cartesian(MA, identity_functor(MA.cat))
    assert fib.total.n_ob == 3
    rep = freeness_report(fib, inc, [target_projection(MA.cat)])
    assert rep.holds


def test_free_cartesian_on_trivial_marking_is_identity():
    A = arrow()
    M = trivial_marking(A)
    fib, inc, _ = free_cartesian(M, identity_functor(A))
    assert fib.total.n_ob == A.n_ob


def test_free_bicartesian_has_base_change(MA):
    A = MA.cat
    point = FunctorData(one(), A, [0], [A.ids[0]])
    fib, _ = free_bicartesian(MA, point)
    assert check_bicartesian_base_change(fib, MA).holds


# twisted fibrations ----------------------------------------------------------------
@pytest.mark.parametrize("which", ["ARROW{a}", "P2-all", "CHAIN3"])
def test_universal_span_is_twisted(which):
    from corrcalc.cli import load_marked
    M = has_base_change(load_marked(which)).payload
    p = universal_span(M)
    assert check_twisted_bicartesian(p, M, M).holds


@pytest.mark.parametrize("cond", ["iii", "iv"])
def test_twisted_detects_broken_transport(MA, cond):
    p = universal_span(MA)

    def corrupt(c, f, Phi):
        if c != cond or MA.cat.is_identity(f):
            return None
        # send everything to the first object of the target fibre
        T = Phi.target
        return FunctorData(Phi.source, T, [0] * Phi.source.n_ob, [T.ids[0]] * Phi.source.n_mor)

    rep = check_twisted_bicartesian(p, MA, MA, corrupt=corrupt)
    assert not rep.holds
    assert rep.counterexample["condition"] == cond


def test_integral_marking_has_base_change():
    I = arrow()
    fibres = [has_base_change(maximal_marking(p2())).payload] * 2
    T = identity_functor(p2())
    transitions = [T, T, T]
    M, rep = integral_marking(I, fibres, transitions)
    assert rep.holds
