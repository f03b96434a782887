"""Adjunctions, mates and the Beck-Chevalley condition.

Adjunctions live in any 2-cell calculus (see :mod:`corrcalc.bicat`); in the
strict 2-category of finite categories right adjoints are found by
terminal-object search in comma categories.
"""
from dataclasses import dataclass

from corrcalc.bicat import CAT, ChainBuilder
from corrcalc.errors import BoundaryMismatch, NoAdjoint, PreconditionFailed
from corrcalc.fincat import (
    FunctorData, NatTransData, check_functor, check_natural, compose_functors, identity_functor,
    opposite, opposite_functor,
)
from corrcalc.report import Report


@dataclass
class Adjunction:
    """``left -| right`` with ``unit : id => right left`` and
    ``counit : left right => id``."""
    left: object
    right: object
    unit: object
    counit: object
    calculus: object = CAT


# the strict case ------------------------------------------------------------
def _universal_arrow(F, d, C, D):
    """Least ``(c, e : F c -> d)`` terminal in ``F | d``, or None."""
    for c0 in range(C.n_ob):
        cands = D.hom(F.ob_map[c0], d)
        if not cands:
            continue
        if any(len(C.hom(c, c0)) != len(D.hom(F.ob_map[c], d)) for c in range(C.n_ob)):
            continue
        for e0 in cands:
            if all(len({D.comp(e0, F.mor_map[u]) for u in C.hom(c, c0)}) == len(C.hom(c, c0))
                   for c in range(C.n_ob)):
                return c0, e0
    return None


def _factor(F, C, D, c, c0, e0, a):
    """The unique ``u : c -> c0`` with ``e0 F(u) = a``."""
    for u in C.hom(c, c0):
        if D.comp(e0, F.mor_map[u]) == a:
            return u
    raise NoAdjoint("universal arrow does not factor", object=D.objects[D.tgt[a]])


def find_right_adjoint(F):
    """Assemble a right adjoint of ``F : C -> D`` from universal arrows."""
    C, D = F.source, F.target
    R_ob, eps = [], []
    for d in range(D.n_ob):
        found = _universal_arrow(F, d, C, D)
        if found is None:
            raise NoAdjoint("comma category has no terminal object", object=D.objects[d])
        R_ob.append(found[0])
        eps.append(found[1])
    R_mor = []
    for h in range(D.n_mor):
        d, d2 = D.src[h], D.tgt[h]
        R_mor.append(_factor(F, C, D, R_ob[d], R_ob[d2], eps[d2], D.comp(h, eps[d])))
    R = check_functor(FunctorData(D, C, R_ob, R_mor))
    unit = []
    for c in range(C.n_ob):
        Fc = F.ob_map[c]
        unit.append(_factor(F, C, D, c, R_ob[Fc], eps[Fc], D.ids[Fc]))
    RF, FR = compose_functors(R, F), compose_functors(F, R)
    adj = Adjunction(F, R, check_natural(NatTransData(identity_functor(C), RF, unit)),
                     check_natural(NatTransData(FR, identity_functor(D), eps)))
    rep = check_triangle_identities(adj)
    if not rep.holds:
        raise NoAdjoint("assembled data fails a triangle identity", **rep.counterexample)
    return adj


def find_left_adjoint(F):
    """Left adjoint of ``F`` as the opposite of a right adjoint of ``F^op``."""
    C, D = F.source, F.target
    Cop, Dop = opposite(C), opposite(D)
    adj = find_right_adjoint(opposite_functor(F, Cop, Dop))
    G = FunctorData(D, C, adj.right.ob_map, adj.right.mor_map)
    FG, GF = compose_functors(F, G), compose_functors(G, F)
    unit = NatTransData(identity_functor(D), FG, adj.counit.components)
    counit = NatTransData(GF, identity_functor(C), adj.unit.components)
    return Adjunction(G, F, check_natural(unit), check_natural(counit))


def check_triangle_identities(adj):
    """Evaluate both triangle identities; report the first failing cell."""
    K = adj.calculus
    if K is CAT:
        L, R = adj.left, adj.right
        C, D = L.source, L.target
        e, eps = adj.unit.components, adj.counit.components
        for c in range(C.n_ob):
            Lc = L.ob_map[c]
            if D.comp(eps[Lc], L.mor_map[e[c]]) != D.ids[Lc]:
                return Report("triangle_identities", "CAT_ADJ_UNIT", False,
                              counterexample={"identity": "left", "object": C.objects[c]})
        for d in range(D.n_ob):
            Rd = R.ob_map[d]
            if C.comp(R.mor_map[eps[d]], e[Rd]) != C.ids[Rd]:
                return Report("triangle_identities", "CAT_ADJ_UNIT", False,
                              counterexample={"identity": "right", "object": D.objects[d]})
        return Report("triangle_identities", "CAT_ADJ_UNIT", True)
    first, second = triangle_cells(K, adj)
    if not K.eq2(first, K.id2(adj.left)):
        return Report("triangle_identities", "CAT_ADJ_UNIT", False,
                      counterexample={"identity": "left", "cell": K.describe1(adj.left)})
    if not K.eq2(second, K.id2(adj.right)):
        return Report("triangle_identities", "CAT_ADJ_UNIT", False,
                      counterexample={"identity": "right", "cell": K.describe1(adj.right)})
    return Report("triangle_identities", "CAT_ADJ_UNIT", True)


def triangle_cells(K, adj):
    """The two zigzag composites ``f => f`` and ``r => r`` in a calculus."""
    f, r = adj.left, adj.right
    x, y = K.src1(f), K.tgt1(f)
    b = ChainBuilder(K, [f]).insert(1, x).apply(1, 2, adj.unit, [r, f])
    b.apply(0, 2, adj.counit, [K.id1(y)]).drop(0)
    c = ChainBuilder(K, [r]).insert(0, x).apply(0, 1, adj.unit, [r, f])
    c.apply(1, 3, adj.counit, [K.id1(y)]).drop(1)
    return b.cell, c.cell


# adjunctions inside a finite bicategory --------------------------------------
def adjunctions_in(B, f):
    """Every adjunction ``f -| r`` in a tabulated bicategory, canonical order."""
    x, y = f.x, f.y
    out = []
    for r in B.ones(y, x):
        units = B.twos_between(B.id1(x), B.comp1(r, f))
        counits = B.twos_between(B.comp1(f, r), B.id1(y))
        for e in units:
            for eps in counits:
                adj = Adjunction(f, r, e, eps, B)
                if check_triangle_identities(adj).holds:
                    out.append(adj)
    return out


def find_right_adjoint_in(B, f):
    """Least right adjoint of a 1-cell of a tabulated bicategory."""
    x, y = f.x, f.y
    for r in B.ones(y, x):
        for e in B.twos_between(B.id1(x), B.comp1(r, f)):
            for eps in B.twos_between(B.comp1(f, r), B.id1(y)):
                adj = Adjunction(f, r, e, eps, B)
                if check_triangle_identities(adj).holds:
                    return adj
    raise NoAdjoint("no right adjoint", cell=B.describe1(f))


def has_right_adjoint_in(B, f):
    try:
        find_right_adjoint_in(B, f)
    except NoAdjoint:
        return False
    return True


# mates ----------------------------------------------------------------------
@dataclass
class LaxSquare:
    """A square ``x00 -fbar-> x01 -g-> x11``, ``x00 -gbar-> x10 -f-> x11``
    with filler ``phi : g fbar => f gbar`` and adjunctions ``g -| g^!`` and
    ``gbar -| gbar^!``."""
    fbar: object
    gbar: object
    f: object
    g: object
    phi: object
    adj_g: Adjunction
    adj_gbar: Adjunction
    calculus: object = CAT


def _check_square(sq):
    K = sq.calculus
    if not K.eq1(sq.adj_g.left, sq.g) or not K.eq1(sq.adj_gbar.left, sq.gbar):
        raise BoundaryMismatch("adjunctions do not match the vertical edges")
    if not (K.eq1(K.src2(sq.phi), K.comp1(sq.g, sq.fbar))
            and K.eq1(K.tgt2(sq.phi), K.comp1(sq.f, sq.gbar))):
        raise BoundaryMismatch("filler does not have boundary g fbar => f gbar")


def mate(sq):
    """The conjugate 2-cell ``fbar gbar^! => g^! f``.

    Pasting order: unit of ``g``, the filler, counit of ``gbar``, with the
    associators and unitors needed in a weak bicategory.
    """
    _check_square(sq)
    K = sq.calculus
    g_r, gbar_r = sq.adj_g.right, sq.adj_gbar.right
    x01, x10 = K.tgt1(sq.fbar), K.tgt1(sq.gbar)
    b = ChainBuilder(K, [sq.fbar, gbar_r])
    b.insert(0, x01)
    b.apply(0, 1, sq.adj_g.unit, [g_r, sq.g])
    b.apply(1, 3, sq.phi, [sq.f, sq.gbar])
    b.apply(2, 4, sq.adj_gbar.counit, [K.id1(x10)])
    b.drop(2)
    return b.cell


def mate_second_route(sq):
    """The same mate through the adjunct ``fbar => g^!(f gbar)`` first.

    Written out with explicit brackets; it agrees with :func:`mate` by
    coherence, which the test suite checks rather than assumes.
    """
    _check_square(sq)
    K = sq.calculus
    g, f, fbar, gbar = sq.g, sq.f, sq.fbar, sq.gbar
    g_r, gbar_r = sq.adj_g.right, sq.adj_gbar.right
    psi = K.lunit_inv(fbar)
    psi = K.vcomp(K.hcomp2(sq.adj_g.unit, K.id2(fbar)), psi)
    psi = K.vcomp(K.assoc(g_r, g, fbar), psi)
    psi = K.vcomp(K.hcomp2(K.id2(g_r), sq.phi), psi)
    cell = K.hcomp2(psi, K.id2(gbar_r))
    cell = K.vcomp(K.assoc(g_r, K.comp1(f, gbar), gbar_r), cell)
    cell = K.vcomp(K.hcomp2(K.id2(g_r), K.assoc(f, gbar, gbar_r)), cell)
    cell = K.vcomp(K.hcomp2(K.id2(g_r), K.hcomp2(K.id2(f), sq.adj_gbar.counit)), cell)
    cell = K.vcomp(K.hcomp2(K.id2(g_r), K.runit(f)), cell)
    return cell


def is_beck_chevalley(sq):
    return sq.calculus.is_invertible(mate(sq))


def beck_chevalley_report(sq, label=None):
    m = mate(sq)
    K = sq.calculus
    ok = K.is_invertible(m)
    return Report("beck_chevalley", "BIV_BC_CONDITION", ok,
                  witness={"mate": K.describe2(m)} if ok else {},
                  counterexample=None if ok else {"square": label, "mate": K.describe2(m)},
                  payload=m)


def cat_adjunction(F):
    """``F -| R`` in the strict calculus, or raise NoAdjoint."""
    return find_right_adjoint(F)


def require_adjunction(K, f):
    if K is CAT:
        return find_right_adjoint(f)
    if hasattr(K, "ones"):
        return find_right_adjoint_in(K, f)
    raise PreconditionFailed("no adjoint search available for this target")
