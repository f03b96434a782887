"""Spans, span categories and the bicategory of correspondences."""
from dataclasses import dataclass

from corrcalc.adjoint import Adjunction
from corrcalc.bicat import Bicat, Cell1, Cell2, Specification2, sub_bicat_by_spec
from corrcalc.errors import MissingCertificate, NonUniqueMediator, NotClosed, SizeCap
from corrcalc.fincat import (
    DEFAULT_CAP, FinCat, FunctorData, from_generators, is_isomorphism, mediator,
    product_category,
)
from corrcalc.marked import require_base_change, validate_marking
from corrcalc.report import Report


@dataclass(frozen=True)
class Span:
    """A roof ``x <-p- k -q-> y`` with ``p`` marked."""
    x: int
    y: int
    k: int
    p: int
    q: int

    def legs(self):
        return (self.p, self.q)


@dataclass(frozen=True)
class SpanMorphism:
    """A kernel map ``h`` with ``p' h = p`` and ``q' h = q``."""
    source: Span
    target: Span
    h: int


def walking_span():
    """The shape ``s0 <-p- s01 -q-> s1`` with ``p`` marked."""
    L = from_generators(["s0", "s01", "s1"], [("p", "s01", "s0"), ("q", "s01", "s1")],
                        name="LAMBDA")
    return validate_marking(L, ["p"], name="LAMBDA")


def span_name(D, s):
    return f"<{D.morphisms[s.p]}|{D.morphisms[s.q]}>"


def enumerate_spans(M, x, y):
    D = M.cat
    out = []
    for k in range(D.n_ob):
        for p in D.hom(k, x):
            if p not in M.marking:
                continue
            for q in D.hom(k, y):
                out.append(Span(x, y, k, p, q))
    return out


def span_category(M, x, y, cap=DEFAULT_CAP):
    """``Corr_D(x, y)``: spans in canonical order and their morphisms."""
    D = M.cat
    spans = enumerate_spans(M, x, y)
    if len(spans) > cap:
        raise SizeCap("too many spans", cap=cap)
    mors, mdata, src, tgt, index = [], [], [], [], {}
    for i, s in enumerate(spans):
        for j, t in enumerate(spans):
            for h in D.hom(s.k, t.k):
                if D.comp(t.p, h) == s.p and D.comp(t.q, h) == s.q:
                    index[(i, j, h)] = len(mors)
                    mdata.append(SpanMorphism(s, t, h))
                    mors.append(f"{D.morphisms[h]}:{span_name(D, s)}=>{span_name(D, t)}")
                    src.append(i)
                    tgt.append(j)
                    if len(mors) > cap:
                        raise SizeCap("too many span morphisms", cap=cap)
    ids = [index[(i, i, D.ids[s.k])] for i, s in enumerate(spans)]
    outs = {}
    for k, (i, j) in enumerate(zip(src, tgt)):
        outs.setdefault(i, []).append(k)
    comp = {}
    for a, m in enumerate(mdata):
        for b in outs.get(tgt[a], ()):
            comp[(b, a)] = index[(src[a], tgt[b], D.comp(mdata[b].h, m.h))]
    names = [span_name(D, s) for s in spans]
    return FinCat(names, mors, src, tgt, ids, comp, ob_data=spans, mor_data=mdata,
                  name=f"Corr({D.objects[x]},{D.objects[y]})")


def composition_cone(M, s1, s2):
    """Certified pullback of ``s2.p`` against ``s1.q``; legs to ``k2``, ``k1``."""
    cone = M.cone(s2.p, s1.q)
    if cone is None:
        D = M.cat
        raise MissingCertificate("no certified pullback for this composite",
                                 f=D.morphisms[s2.p], g=D.morphisms[s1.q])
    return cone


def compose_spans(M, s1, s2):
    """``s2 o s1`` for ``s1 : x -> y`` and ``s2 : y -> z``."""
    D = M.cat
    cone = composition_cone(M, s1, s2)
    l2, l1 = cone.legs
    return Span(s1.x, s2.y, cone.apex, D.comp(s1.p, l1), D.comp(s2.q, l2))


def identity_span(M, x):
    i = M.cat.ids[x]
    return Span(x, x, x, i, i)


def compose_span_morphisms(M, b, a):
    """Horizontal composite of span morphisms via the pullback property."""
    D = M.cat
    s1, s2 = a.source, b.source
    t1, t2 = a.target, b.target
    src_cone = composition_cone(M, s1, s2)
    tgt_cone = composition_cone(M, t1, t2)
    legs = (D.comp(b.h, src_cone.legs[0]), D.comp(a.h, src_cone.legs[1]))
    m = mediator(D, tgt_cone, legs)
    if m is None:
        raise NonUniqueMediator("induced kernel map not unique", f=D.morphisms[t2.p],
                                g=D.morphisms[t1.q])
    return SpanMorphism(compose_spans(M, s1, s2), compose_spans(M, t1, t2), m)


def build_corr(M, cap=DEFAULT_CAP, name=None):
    """The bicategory ``Corr_D`` of spans with marked wrong-way legs."""
    M = require_base_change(M)
    D = M.cat
    n = D.n_ob
    homs, sidx, midx = {}, {}, {}
    for x in range(n):
        for y in range(n):
            H = span_category(M, x, y, cap=cap)
            homs[(x, y)] = H
            sidx[(x, y)] = {s: i for i, s in enumerate(H.ob_data)}
            midx[(x, y)] = {(H.src[k], H.tgt[k], m.h): k for k, m in enumerate(H.mor_data)}

    def span(x, y, i):
        return homs[(x, y)].ob_data[i]

    def cell_of(s):
        return sidx[(s.x, s.y)][s]

    def mor_of(m):
        return midx[(m.source.x, m.source.y)][(cell_of(m.source), cell_of(m.target), m.h)]

    def hc1(x, y, z, g, f):
        return cell_of(compose_spans(M, span(x, y, f), span(y, z, g)))

    def hc2(x, y, z, b, a):
        return mor_of(compose_span_morphisms(M, homs[(y, z)].mor_data[b], homs[(x, y)].mor_data[a]))

    def assoc(w, x, y, z, h, g, f):
        sf, sg, sh = span(w, x, f), span(x, y, g), span(y, z, h)
        hg = compose_spans(M, sg, sh)
        gf = compose_spans(M, sf, sg)
        left = compose_spans(M, sf, hg)
        right = compose_spans(M, gf, sh)
        c_hg = composition_cone(M, sg, sh)      # legs to k_h, k_g
        c_left = composition_cone(M, sf, hg)    # legs to kernel of hg, k_f
        c_gf = composition_cone(M, sf, sg)      # legs to k_g, k_f
        c_right = composition_cone(M, gf, sh)   # legs to k_h, kernel of gf
        to_g = D.comp(c_hg.legs[1], c_left.legs[0])
        to_h = D.comp(c_hg.legs[0], c_left.legs[0])
        to_gf = mediator(D, c_gf, (to_g, c_left.legs[1]))
        m = None if to_gf is None else mediator(D, c_right, (to_h, to_gf))
        if m is None or not D.is_iso(m):
            raise NonUniqueMediator("associator mediator not unique or not invertible",
                                    h=D.morphisms[sh.q], g=D.morphisms[sg.q], f=D.morphisms[sf.q])
        return mor_of(SpanMorphism(left, right, m))

    def lunit(x, y, f):
        s = span(x, y, f)
        comp = compose_spans(M, s, identity_span(M, y))
        cone = composition_cone(M, s, identity_span(M, y))
        return mor_of(SpanMorphism(comp, s, cone.legs[1]))

    def runit(x, y, f):
        s = span(x, y, f)
        comp = compose_spans(M, identity_span(M, x), s)
        cone = composition_cone(M, identity_span(M, x), s)
        return mor_of(SpanMorphism(comp, s, cone.legs[0]))

    unit = [cell_of(identity_span(M, x)) for x in range(n)]
    B = Bicat(D.objects, homs, unit, hc1, hc2, assoc, lunit, runit,
              name=name or f"Corr({M.label})")
    B.marked = M
    B.span = lambda c: span(c.x, c.y, c.i)
    B.cell_of_span = lambda s: Cell1(s.x, s.y, cell_of(s))
    B.cell_of_mor = lambda m: Cell2(m.source.x, m.source.y, mor_of(m))
    return B


def lower_shriek(B, f):
    """``f_! = (id, f)``."""
    D = B.marked.cat
    x = D.src[f]
    return B.cell_of_span(Span(x, D.tgt[f], x, D.ids[x], f))


def upper_shriek(B, f):
    """``f^! = (f, id)`` for marked ``f``."""
    D = B.marked.cat
    x = D.src[f]
    if f not in B.marked.marking:
        raise NotClosed("wrong-way leg must be marked", morphism=D.morphisms[f])
    return B.cell_of_span(Span(D.tgt[f], x, x, f, D.ids[x]))


def shriek_adjunction(B, f):
    """``f_! -| f^!`` with the diagonal as unit and ``f`` as counit."""
    M, D = B.marked, B.marked.cat
    x = D.src[f]
    low, up = lower_shriek(B, f), upper_shriek(B, f)
    rf = B.span(B.comp1(up, low))
    cone = composition_cone(M, B.span(low), B.span(up))
    diag = mediator(D, cone, (D.ids[x], D.ids[x]))
    e = B.cell_of_mor(SpanMorphism(identity_span(M, x), rf, diag))
    fr = B.span(B.comp1(low, up))
    eps = B.cell_of_mor(SpanMorphism(fr, identity_span(M, D.tgt[f]), f))
    return Adjunction(low, up, e, eps, B)


def restrict_corr(B, Splus, name=None):
    """Keep the spans whose right-way leg lies in ``Splus``."""
    M = B.marked
    D = M.cat
    P = validate_marking(D, Splus)
    for (f, g), cone in sorted((M.certificate or {}).items()):
        if g in P.marking and cone.legs[0] not in P.marking:
            raise NotClosed("right-way class not stable under base change", f=D.morphisms[f],
                            g=D.morphisms[g], leg=D.morphisms[cone.legs[0]])
    S1, S2 = set(), set()
    n = B.n_ob
    for x in range(n):
        for y in range(n):
            for c in B.ones(x, y):
                if B.span(c).q in P.marking:
                    S1.add(c)
    for x in range(n):
        for y in range(n):
            for a in B.twos(x, y):
                if B.src2(a) in S1 and B.tgt2(a) in S1:
                    S2.add(a)
    R = sub_bicat_by_spec(B, Specification2(range(n), S1, S2), name=name or f"{B.name}|+")
    R.marked = M
    R.span = lambda c: B.span(R.old1(c.x, c.y, c.i))
    return R


def product_marking(M1, M2):
    P, p1, p2 = product_category(M1.cat, M2.cat)
    mD = M2.cat.n_mor
    S = [f * mD + g for f in M1.marking for g in M2.marking]
    return validate_marking(P, S, name=f"{M1.label}x{M2.label}"), p1, p2


def corr_product_split(M1, M2, cap=DEFAULT_CAP):
    """Check that spans over a product split as pairs of spans."""
    M1, M2 = require_base_change(M1), require_base_change(M2)
    M, p1, p2 = product_marking(M1, M2)
    M = require_base_change(M)
    D, D1, D2 = M.cat, M1.cat, M2.cat
    checked = 0
    for x in range(D.n_ob):
        for y in range(D.n_ob):
            (x1, x2), (y1, y2) = D.ob_data[x], D.ob_data[y]
            H = span_category(M, x, y, cap=cap)
            H1, H2 = span_category(M1, x1, y1, cap=cap), span_category(M2, x2, y2, cap=cap)
            Hp, _, _ = product_category(H1, H2)
            i1 = {s: i for i, s in enumerate(H1.ob_data)}
            i2 = {s: i for i, s in enumerate(H2.ob_data)}
            m1 = {(H1.src[k], H1.tgt[k], m.h): k for k, m in enumerate(H1.mor_data)}
            m2 = {(H2.src[k], H2.tgt[k], m.h): k for k, m in enumerate(H2.mor_data)}

            def split(s):
                return (Span(x1, y1, p1.ob_map[s.k], p1.mor_map[s.p], p1.mor_map[s.q]),
                        Span(x2, y2, p2.ob_map[s.k], p2.mor_map[s.p], p2.mor_map[s.q]))

            ob_map, mor_map = [], []
            for s in H.ob_data:
                a, b = split(s)
                ob_map.append(i1[a] * H2.n_ob + i2[b])
            for m in H.mor_data:
                (a, b), (c, d) = split(m.source), split(m.target)
                k1 = m1[(i1[a], i1[c], p1.mor_map[m.h])]
                k2 = m2[(i2[b], i2[d], p2.mor_map[m.h])]
                mor_map.append(k1 * H2.n_mor + k2)
            F = FunctorData(H, Hp, ob_map, mor_map)
            checked += 1
            if not is_isomorphism(F):
                return Report("corr_product_split", "UNIV_EXT_PROJ", False, {"checked": checked},
                              {"source": D.objects[x], "target": D.objects[y],
                               "spans": H.n_ob, "pairs": Hp.n_ob})
    return Report("corr_product_split", "UNIV_EXT_PROJ", True,
                  {"objects": [D.n_ob, D1.n_ob * D2.n_ob], "hom_pairs_checked": checked})


def span_to_dot(D, s, marked=True):
    """Render a span as a roof."""
    lines = ["digraph span {", "  rankdir=BT;",
             f'  x [label="{D.objects[s.x]}"];', f'  k [label="{D.objects[s.k]}"];',
             f'  y [label="{D.objects[s.y]}"];',
             f'  k -> x [label="{D.morphisms[s.p]}"' + (", style=dashed" if marked else "") + "];",
             f'  k -> y [label="{D.morphisms[s.q]}"];', "}"]
    return "\n".join(lines) + "\n"


def span_morphism_to_dot(D, m):
    s, t = m.source, m.target
    lines = ["digraph span_morphism {", "  rankdir=BT;",
             f'  x [label="{D.objects[s.x]}"];', f'  y [label="{D.objects[s.y]}"];',
             f'  k [label="{D.objects[s.k]}"];', f'  k2 [label="{D.objects[t.k]}"];',
             f'  k -> x [label="{D.morphisms[s.p]}", style=dashed];',
             f'  k -> y [label="{D.morphisms[s.q]}"];',
             f'  k2 -> x [label="{D.morphisms[t.p]}", style=dashed];',
             f'  k2 -> y [label="{D.morphisms[t.q]}"];',
             f'  k -> k2 [label="{D.morphisms[m.h]}"];', "}"]
    return "\n".join(lines) + "\n"
