"""The twelve acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line to the terminal,
whatever pytest's capture setting is. Comparisons are exact.
"""
import json
import time

import pytest

from corrcalc.adjoint import check_triangle_identities, has_right_adjoint_in
from corrcalc.bicat import cat_universe, validate_bicat
from corrcalc.bivariant import (
    cartesian_monoidal, check_bivariant, check_spex, constant_functor, corr_representable,
    require_bivariant, self_duality_check, slice_functor, universality_check, yoneda_check,
)
from corrcalc.cli import SUITE, load_marked, run
from corrcalc.fib import (
    check_bicartesian_base_change, check_twisted_bicartesian, grothendieck,
    integration_roundtrip, representable, slice_comparison, transport_roundtrip, universal_span,
)
from corrcalc.fincat import FunctorData
from corrcalc.fixtures import arrow, chain3, fin_map, fs4, one, p2
from corrcalc.marked import certify, has_base_change, maximal_marking
from corrcalc.span import (
    Span, build_corr, compose_spans, corr_product_split, enumerate_spans, identity_span,
    lower_shriek, shriek_adjunction, span_category,
)

from conftest import arrow_functor


@pytest.fixture
def verdict(capsys):
    def emit(n, title, ok, detail=""):
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        with capsys.disabled():
            print("\n" + line + (f"  ({detail})" if detail else ""))
        assert ok, line
    return emit


def certified(name):
    return has_base_change(load_marked(name)).payload


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def test_criterion_01_corr_coherence(verdict):
    times = {}
    for name in ("ONE", "ARROW{a}", "P2-all"):
        M = certified(name)
        _, times[name] = timed(lambda: validate_bicat(build_corr(M)))
    ok = all(t < 10 for t in times.values())
    verdict(1, "span bicategory coherence", ok,
            ", ".join(f"{k} {v:.2f}s" for k, v in times.items()))


def test_criterion_02_composition(verdict):
    C = fs4()
    s = Span(1, 1, 2, fin_map(C, 2, 1, (0, 0)), fin_map(C, 2, 1, (0, 0)))
    M = certify(maximal_marking(C), [(s.p, s.q)])
    kernel = C.ob_data[compose_spans(M, s, s).k]
    # oracle: cones over the cospan 2 -> 1 <- 2 with apex the one-point set
    cones = sum(1 for i in range(2) for j in range(2)
                if C.mor_data[s.q][i] == C.mor_data[s.p][j])
    ok = kernel == cones == 4
    spans = 0
    for name in ("ONE", "ARROW{a}", "CHAIN3", "P2-all"):
        M = certified(name)
        D = M.cat
        for x in range(D.n_ob):
            for y in range(D.n_ob):
                H = span_category(M, x, y)
                for t in enumerate_spans(M, x, y):
                    for u in (compose_spans(M, identity_span(M, x), t),
                              compose_spans(M, t, identity_span(M, y))):
                        ok &= H.isomorphic(H.ob_data.index(t), H.ob_data.index(u))
                    spans += 1
    verdict(2, "composition semantics", ok, f"kernel {kernel}, {spans} spans")


def test_criterion_03_adjunctions(verdict):
    ok, cells = True, 0
    for name in ("ARROW{a}", "P2-all"):
        M = certified(name)
        B = build_corr(M)
        D = M.cat
        for f in sorted(M.marking):
            ok &= check_triangle_identities(shriek_adjunction(B, f)).holds
        for x in range(D.n_ob):
            for y in range(D.n_ob):
                H = B.hom[(x, y)]
                shrieks = [lower_shriek(B, f).i for f in D.hom(x, y)]
                for c in B.ones(x, y):
                    cells += 1
                    ok &= has_right_adjoint_in(B, c) == any(H.isomorphic(c.i, j)
                                                            for j in shrieks)
    verdict(3, "adjunction calculus", ok, f"{cells} one-cells")


def test_criterion_04_grothendieck(verdict):
    A, O, P = arrow(), one(), p2()
    functors = [
        slice_functor(A), slice_functor(P), constant_functor(chain3(), A),
        arrow_functor(A, A, O, FunctorData(A, O, [0, 0], [0, 0, 0])),
        representable(A, 1), representable(P, 3), representable(chain3(), 2),
    ]
    variances, slow, ok = set(), [], True
    for F in functors:
        t0 = time.perf_counter()
        fib = grothendieck(F)
        variances.add(fib.variance)
        ok &= transport_roundtrip(F).holds and integration_roundtrip(fib).holds
        if time.perf_counter() - t0 >= 5:
            slow.append(F.name)
    for D in (A, chain3(), P):
        ok &= all(slice_comparison(D, x).holds for x in range(D.n_ob))
    ok &= variances == {"covariant", "contravariant"} and not slow
    verdict(4, "Grothendieck round trip", ok, f"{len(functors)} functors")


def test_criterion_05_dictionary(verdict, MA, MP, H_bottom, H_bang, H_top):
    cases = [(MA, H_bottom), (MA, H_bang), (MA, H_top), (MA, constant_functor(MA.cat, arrow())),
             (MA, slice_functor(MA.cat)), (MP, slice_functor(MP.cat))]
    rows = [(check_bivariant(H, M).holds,
             check_bicartesian_base_change(grothendieck(H), M).holds) for M, H in cases]
    agree = all(a == b for a, b in rows)
    # H_bang fails through base change, H_top through a missing adjoint
    failures = [check_bivariant(H, MA).counterexample["reason"] for H in (H_bang, H_top)]
    ok = agree and failures == ["base change fails", "no right adjoint"] \
        and [a for a, _ in rows] == [True, False, False, True, True, True]
    verdict(5, "bivariant dictionary", ok, f"{len(rows)} functors")


def test_criterion_06_universal_span(verdict):
    ok = all(check_twisted_bicartesian(universal_span(M), M, M).holds
             for M in (certified("ARROW{a}"), certified("P2-all")))
    verdict(6, "universal span is twisted bicartesian", ok)


def test_criterion_07_yoneda(verdict, MA):
    t0 = time.perf_counter()
    Fs = [corr_representable(MA, 1), constant_functor(MA.cat, one()),
          constant_functor(MA.cat, arrow())]
    reps = [yoneda_check(MA, require_bivariant(F, MA), 1) for F in Fs]
    dt = time.perf_counter() - t0
    ok = all(r.holds for r in reps) and dt < 60
    verdict(7, "bivariant Yoneda", ok, f"{dt:.2f}s")


def test_criterion_08_spex(verdict):
    ok, triples = True, 0
    for name in ("ARROW{a}", "P2-all"):
        M = certified(name)
        for H in (slice_functor(M.cat), constant_functor(M.cat, arrow())):
            r = check_spex(check_bivariant(H, M).payload)
            ok &= r.holds
            triples += r.witness["triples"] if r.holds else 0
    verdict(8, "span extension", ok, f"{triples} triples")


def test_criterion_09_universality(verdict, MA):
    r, dt = timed(universality_check, MA, cat_universe([one(), arrow()]))
    ok = r.holds and r.witness["corr_classes"] == r.witness["bivariant_classes"]
    verdict(9, "universality at desk scale", ok and dt < 600,
            f"{r.witness['corr_classes']} classes, {dt:.1f}s")


def test_criterion_10_monoidal(verdict, MP):
    r = cartesian_monoidal(p2(), 3)
    s = self_duality_check(MP, MP.cat.ob("{1}"))
    ok = r.holds and r.witness["product_formula"] is True and s.holds
    verdict(10, "monoidal examples", ok, f"{r.witness['collar_squares']} collar squares")


def test_criterion_11_product_split(verdict):
    ok = all(corr_product_split(load_marked(a), load_marked(b)).holds
             for a, b in (("ARROW{a}", "ARROW-trivial"), ("P2-all", "ONE")))
    verdict(11, "product decomposition", ok)


def test_criterion_12_determinism(verdict):
    code1, serial = run(["suite", "--jobs", "1"])
    code4, parallel = run(["suite", "--jobs", "4"])
    doc = json.loads(serial)
    ok = serial == parallel and code1 == code4 == 0 and len(doc["entries"]) == len(SUITE)
    verdict(12, "determinism across parallelism", ok, f"{len(serial)} bytes")
