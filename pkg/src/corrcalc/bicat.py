"""Finite bicategories, pseudofunctors and a small 2-cell calculus.

Two kinds of 2-dimensional targets share one interface:

* :class:`Bicat` - a finite bicategory whose hom-categories are
  :class:`~corrcalc.fincat.FinCat` values. 1-cells are ``Cell1(x, y, i)``
  (object ``i`` of ``hom(x, y)``) and 2-cells ``Cell2(x, y, m)``.
* :data:`CAT` - the strict 2-category of finite categories, functors and
  natural transformations, used without enumerating any hom-category.

The chain helpers at the end compute pastings in either kind, inserting
associators and unitors so that weak bicategories are handled exactly.
"""
from collections import namedtuple
from functools import lru_cache
from itertools import product as iproduct

from corrcalc.errors import (
    CoherenceFailure, MalformedInput, NonInvertibleCoherence, NotClosed, PentagonFailure,
    TriangleFailure,
)
from corrcalc.fincat import (
    DEFAULT_CAP, FinCat, category_to_json, check_category,
    compose_functors, discrete_category, functor_category, hcomp_nat, identity_functor,
    identity_nat, inverse_nat, opposite, product_category, subcategory, validate_category, vcomp,
)

Cell1 = namedtuple("Cell1", "x y i")
Cell2 = namedtuple("Cell2", "x y m")


class CatCalculus:
    """The strict 2-category of finite categories."""

    strict = True

    def src1(self, F):
        return F.source

    def tgt1(self, F):
        return F.target

    def id1(self, C):
        return identity_functor(C)

    def comp1(self, G, F):
        return compose_functors(G, F)

    def id2(self, F):
        return identity_nat(F)

    def src2(self, a):
        return a.source

    def tgt2(self, a):
        return a.target

    def vcomp(self, b, a):
        return vcomp(b, a)

    def hcomp2(self, b, a):
        return hcomp_nat(b, a)

    def assoc(self, h, g, f):
        return identity_nat(compose_functors(h, compose_functors(g, f)))

    def assoc_inv(self, h, g, f):
        return self.assoc(h, g, f)

    def lunit(self, f):
        return identity_nat(f)

    lunit_inv = runit = runit_inv = lunit

    def inverse2(self, a):
        return inverse_nat(a)

    def is_invertible(self, a):
        return inverse_nat(a) is not None

    def eq1(self, f, g):
        return f == g

    def eq2(self, a, b):
        return a == b

    def describe1(self, F):
        return {"ob_map": [F.target.objects[y] for y in F.ob_map]}

    def describe2(self, a):
        D = a.source.target
        return [D.morphisms[c] for c in a.components]


CAT = CatCalculus()


class Bicat:
    """A finite bicategory with explicit coherence data.

    ``hom`` maps ``(x, y)`` (object indices) to a FinCat. ``unit[x]`` is the
    identity 1-cell index in ``hom(x, x)``. ``hc1(x, y, z, g, f)`` and
    ``hc2(x, y, z, b, a)`` give horizontal composites (``g`` in ``hom(y, z)``
    after ``f`` in ``hom(x, y)``); ``assoc(w, x, y, z, h, g, f)`` is the
    component ``(h g) f => h (g f)`` and ``lunit``/``runit`` the components
    ``id f => f`` and ``f id => f``. Callables are memoised.
    """

    strict = False

    def __init__(self, objects, hom, unit, hc1, hc2, assoc, lunit, runit, name=None,
                 ob_data=None):
        self.objects = tuple(objects)
        self.hom = hom
        self.unit = unit
        self._hc1 = lru_cache(maxsize=None)(hc1)
        self._hc2 = lru_cache(maxsize=None)(hc2)
        self._assoc = lru_cache(maxsize=None)(assoc)
        self._lunit = lru_cache(maxsize=None)(lunit)
        self._runit = lru_cache(maxsize=None)(runit)
        self.name = name
        self.ob_data = ob_data

    def __repr__(self):
        return f"<Bicat {self.name or ''}: {len(self.objects)} objects>"

    @property
    def n_ob(self):
        return len(self.objects)

    def ob(self, name):
        return self.objects.index(name)

    # enumeration
    def ones(self, x, y):
        return [Cell1(x, y, i) for i in range(self.hom[(x, y)].n_ob)]

    def twos(self, x, y):
        H = self.hom[(x, y)]
        return [Cell2(x, y, m) for m in range(H.n_mor)]

    def twos_between(self, f, g):
        H = self.hom[(f.x, f.y)]
        return [Cell2(f.x, f.y, m) for m in H.hom(f.i, g.i)]

    # calculus
    def src1(self, f):
        return f.x

    def tgt1(self, f):
        return f.y

    def id1(self, x):
        return Cell1(x, x, self.unit[x])

    def comp1(self, g, f):
        if g.x != f.y:
            raise MalformedInput("1-cells are not composable")
        return Cell1(f.x, g.y, self._hc1(f.x, f.y, g.y, g.i, f.i))

    def id2(self, f):
        return Cell2(f.x, f.y, self.hom[(f.x, f.y)].ids[f.i])

    def src2(self, a):
        return Cell1(a.x, a.y, self.hom[(a.x, a.y)].src[a.m])

    def tgt2(self, a):
        return Cell1(a.x, a.y, self.hom[(a.x, a.y)].tgt[a.m])

    def vcomp(self, b, a):
        return Cell2(a.x, a.y, self.hom[(a.x, a.y)].comp(b.m, a.m))

    def hcomp2(self, b, a):
        return Cell2(a.x, b.y, self._hc2(a.x, a.y, b.y, b.m, a.m))

    def assoc(self, h, g, f):
        return Cell2(f.x, h.y, self._assoc(f.x, f.y, g.y, h.y, h.i, g.i, f.i))

    def assoc_inv(self, h, g, f):
        return self.inverse2(self.assoc(h, g, f))

    def lunit(self, f):
        return Cell2(f.x, f.y, self._lunit(f.x, f.y, f.i))

    def lunit_inv(self, f):
        return self.inverse2(self.lunit(f))

    def runit(self, f):
        return Cell2(f.x, f.y, self._runit(f.x, f.y, f.i))

    def runit_inv(self, f):
        return self.inverse2(self.runit(f))

    def inverse2(self, a):
        inv = self.hom[(a.x, a.y)].inverse(a.m)
        return None if inv is None else Cell2(a.x, a.y, inv)

    def is_invertible(self, a):
        return self.hom[(a.x, a.y)].inverse(a.m) is not None

    def eq1(self, f, g):
        return f == g

    def eq2(self, a, b):
        return a == b

    def describe1(self, f):
        return {"hom": [self.objects[f.x], self.objects[f.y]],
                "cell": self.hom[(f.x, f.y)].objects[f.i]}

    def describe2(self, a):
        return {"hom": [self.objects[a.x], self.objects[a.y]],
                "cell": self.hom[(a.x, a.y)].morphisms[a.m]}

    def cell1(self, x, y, name):
        return Cell1(x, y, self.hom[(x, y)].ob(name))

    def composable_triples(self):
        n = self.n_ob
        return iproduct(range(n), repeat=3)


# validation ---------------------------------------------------------------
def validate_bicat(B, check_homs=True, naturality=True):
    """Check every bicategory axiom exhaustively; return ``B``."""
    n = B.n_ob
    if check_homs:
        for (x, y), H in sorted(B.hom.items()):
            check_category(H)
    for x in range(n):
        for y in range(n):
            for f in B.ones(x, y):
                for cell, label in ((B.lunit(f), "left unitor"), (B.runit(f), "right unitor")):
                    if not B.is_invertible(cell):
                        raise NonInvertibleCoherence(f"{label} not invertible", cell=B.describe1(f))
                if B.src2(B.lunit(f)) != B.comp1(B.id1(y), f) or B.tgt2(B.lunit(f)) != f:
                    raise CoherenceFailure("left unitor has the wrong boundary", cell=B.describe1(f))
                if B.src2(B.runit(f)) != B.comp1(f, B.id1(x)) or B.tgt2(B.runit(f)) != f:
                    raise CoherenceFailure("right unitor has the wrong boundary", cell=B.describe1(f))
    for x, y, z in B.composable_triples():
        Hxy, Hyz = B.hom[(x, y)], B.hom[(y, z)]
        for g in B.ones(y, z):
            for f in B.ones(x, y):
                if B.hcomp2(B.id2(g), B.id2(f)) != B.id2(B.comp1(g, f)):
                    raise CoherenceFailure("horizontal composition does not preserve identities",
                                           g=B.describe1(g), f=B.describe1(f))
        for b in B.twos(y, z):
            for a in B.twos(x, y):
                c = B.hcomp2(b, a)
                if B.src2(c) != B.comp1(B.src2(b), B.src2(a)) or B.tgt2(c) != B.comp1(B.tgt2(b), B.tgt2(a)):
                    raise CoherenceFailure("horizontal composite has the wrong boundary",
                                           b=B.describe2(b), a=B.describe2(a))
        for b in B.twos(y, z):
            for b2 in (Cell2(y, z, m) for m in Hyz.out_mors[Hyz.tgt[b.m]]):
                for a in B.twos(x, y):
                    for a2 in (Cell2(x, y, m) for m in Hxy.out_mors[Hxy.tgt[a.m]]):
                        lhs = B.hcomp2(B.vcomp(b2, b), B.vcomp(a2, a))
                        rhs = B.vcomp(B.hcomp2(b2, a2), B.hcomp2(b, a))
                        if lhs != rhs:
                            raise CoherenceFailure("interchange law fails",
                                                   b=B.describe2(b), a=B.describe2(a))
    for w, x, y, z in iproduct(range(n), repeat=4):
        for h in B.ones(y, z):
            for g in B.ones(x, y):
                for f in B.ones(w, x):
                    a = B.assoc(h, g, f)
                    if not B.is_invertible(a):
                        raise NonInvertibleCoherence("associator not invertible",
                                                     h=B.describe1(h), g=B.describe1(g),
                                                     f=B.describe1(f))
                    if B.src2(a) != B.comp1(B.comp1(h, g), f) or B.tgt2(a) != B.comp1(h, B.comp1(g, f)):
                        raise CoherenceFailure("associator has the wrong boundary",
                                               h=B.describe1(h), g=B.describe1(g), f=B.describe1(f))
    if naturality:
        _check_coherence_naturality(B)
    for v, w, x, y, z in iproduct(range(n), repeat=5):
        for k in B.ones(y, z):
            for h in B.ones(x, y):
                for g in B.ones(w, x):
                    for f in B.ones(v, w):
                        if not _pentagon(B, k, h, g, f):
                            raise PentagonFailure("pentagon fails", k=B.describe1(k),
                                                  h=B.describe1(h), g=B.describe1(g),
                                                  f=B.describe1(f))
    for x, y, z in B.composable_triples():
        for g in B.ones(y, z):
            for f in B.ones(x, y):
                lhs = B.vcomp(B.hcomp2(B.id2(g), B.lunit(f)), B.assoc(g, B.id1(y), f))
                rhs = B.hcomp2(B.runit(g), B.id2(f))
                if lhs != rhs:
                    raise TriangleFailure("triangle fails", g=B.describe1(g), f=B.describe1(f))
    return B


def _pentagon(B, k, h, g, f):
    # ((k h) g) f => (k h)(g f) => k (h (g f))
    top = B.vcomp(B.assoc(k, h, B.comp1(g, f)), B.assoc(B.comp1(k, h), g, f))
    # ((k h) g) f => (k (h g)) f => k ((h g) f) => k (h (g f))
    s1 = B.hcomp2(B.assoc(k, h, g), B.id2(f))
    s2 = B.assoc(k, B.comp1(h, g), f)
    s3 = B.hcomp2(B.id2(k), B.assoc(h, g, f))
    return top == B.vcomp(s3, B.vcomp(s2, s1))


def _check_coherence_naturality(B):
    n = B.n_ob
    for x in range(n):
        for y in range(n):
            for a in B.twos(x, y):
                lhs = B.vcomp(a, B.lunit(B.src2(a)))
                rhs = B.vcomp(B.lunit(B.tgt2(a)), B.hcomp2(B.id2(B.id1(y)), a))
                if lhs != rhs:
                    raise CoherenceFailure("left unitor not natural", cell=B.describe2(a))
                lhs = B.vcomp(a, B.runit(B.src2(a)))
                rhs = B.vcomp(B.runit(B.tgt2(a)), B.hcomp2(a, B.id2(B.id1(x))))
                if lhs != rhs:
                    raise CoherenceFailure("right unitor not natural", cell=B.describe2(a))
    for w, x, y, z in iproduct(range(n), repeat=4):
        for c in B.twos(y, z):
            for b in B.twos(x, y):
                for a in B.twos(w, x):
                    h, g, f = B.src2(c), B.src2(b), B.src2(a)
                    h2, g2, f2 = B.tgt2(c), B.tgt2(b), B.tgt2(a)
                    lhs = B.vcomp(B.assoc(h2, g2, f2), B.hcomp2(B.hcomp2(c, b), a))
                    rhs = B.vcomp(B.hcomp2(c, B.hcomp2(b, a)), B.assoc(h, g, f))
                    if lhs != rhs:
                        raise CoherenceFailure("associator not natural", c=B.describe2(c),
                                               b=B.describe2(b), a=B.describe2(a))


# constructions --------------------------------------------------------------
def locally_discrete(C, name=None):
    """View a category as a bicategory with only identity 2-cells."""
    homs = {}
    for x in range(C.n_ob):
        for y in range(C.n_ob):
            hs = C.hom(x, y)
            homs[(x, y)] = discrete_category([C.morphisms[m] for m in hs],
                                             name=f"{C.objects[x]}->{C.objects[y]}")
            homs[(x, y)].ob_data = list(hs)
    pos = {}
    for (x, y), H in homs.items():
        for i, m in enumerate(H.ob_data):
            pos[m] = i
    unit = [pos[C.ids[x]] for x in range(C.n_ob)]

    def hc1(x, y, z, g, f):
        return pos[C.comp(homs[(y, z)].ob_data[g], homs[(x, y)].ob_data[f])]

    def hc2(x, y, z, b, a):
        return hc1(x, y, z, b, a)

    def assoc(w, x, y, z, h, g, f):
        return hc1(w, x, z, hc1(x, y, z, h, g), f)

    def lunit(x, y, f):
        return f

    B = Bicat(C.objects, homs, unit, hc1, hc2, assoc, lunit, lunit, name=name or C.name)
    B.base = C
    B.mor_cell = lambda m: Cell1(C.src[m], C.tgt[m], pos[m])
    B.cell_mor = lambda f: homs[(f.x, f.y)].ob_data[f.i]
    return B


def cat_universe(cats, cap=DEFAULT_CAP, name=None):
    """The strict bicategory on a list of categories with all functors.

    ``hom(C, D)`` is the functor category; composition is composition of
    functors and whiskering, and all coherence cells are identities.
    """
    if not cats:
        raise MalformedInput("cat_universe needs at least one category")
    n = len(cats)
    homs, findex, nindex = {}, {}, {}
    for x in range(n):
        for y in range(n):
            H = functor_category(cats[x], cats[y], cap=cap)
            homs[(x, y)] = H
            findex[(x, y)] = {(F.ob_map, F.mor_map): i for i, F in enumerate(H.ob_data)}
            nindex[(x, y)] = {(H.src[k], H.tgt[k], a.components): k
                              for k, a in enumerate(H.mor_data)}
    unit = []
    for x in range(n):
        I = identity_functor(cats[x])
        unit.append(findex[(x, x)][(I.ob_map, I.mor_map)])

    def hc1(x, y, z, g, f):
        G, F = homs[(y, z)].ob_data[g], homs[(x, y)].ob_data[f]
        GF = compose_functors(G, F)
        return findex[(x, z)][(GF.ob_map, GF.mor_map)]

    def hc2(x, y, z, b, a):
        Hb, Ha = homs[(y, z)], homs[(x, y)]
        c = hcomp_nat(Hb.mor_data[b], Ha.mor_data[a])
        s = hc1(x, y, z, Hb.src[b], Ha.src[a])
        t = hc1(x, y, z, Hb.tgt[b], Ha.tgt[a])
        return nindex[(x, z)][(s, t, c.components)]

    def assoc(w, x, y, z, h, g, f):
        i = hc1(w, x, z, hc1(x, y, z, h, g), f)
        return homs[(w, z)].ids[i]

    def lunit(x, y, f):
        return homs[(x, y)].ids[f]

    B = Bicat([c.name or f"C{i}" for i, c in enumerate(cats)], homs, unit, hc1, hc2, assoc,
              lunit, lunit, name=name or "Cat[" + ",".join(c.name or "?" for c in cats) + "]",
              ob_data=list(cats))
    B.functor_cell = lambda x, y, F: Cell1(x, y, findex[(x, y)][(F.ob_map, F.mor_map)])
    B.nat_cell = lambda x, y, s, t, a: Cell2(x, y, nindex[(x, y)][(s, t, a.components)])
    return B


def op1(B):
    """Reverse the 1-cells of ``B``."""
    homs = {(x, y): B.hom[(y, x)] for x in range(B.n_ob) for y in range(B.n_ob)}

    def hc1(x, y, z, g, f):
        return B._hc1(z, y, x, f, g)

    def hc2(x, y, z, b, a):
        return B._hc2(z, y, x, a, b)

    def assoc(w, x, y, z, h, g, f):
        a = B.assoc(Cell1(x, w, f), Cell1(y, x, g), Cell1(z, y, h))
        return B.inverse2(a).m

    def lunit(x, y, f):
        return B._runit(y, x, f)

    def runit(x, y, f):
        return B._lunit(y, x, f)

    R = Bicat(B.objects, homs, B.unit, hc1, hc2, assoc, lunit, runit,
              name=_flip(B.name, "op1"), ob_data=B.ob_data)
    return R


def op2(B):
    """Reverse the 2-cells of ``B``."""
    homs = {k: opposite(H) for k, H in B.hom.items()}

    def assoc(w, x, y, z, h, g, f):
        a = B.assoc(Cell1(y, z, h), Cell1(x, y, g), Cell1(w, x, f))
        return B.inverse2(a).m

    def lunit(x, y, f):
        return B.inverse2(B.lunit(Cell1(x, y, f))).m

    def runit(x, y, f):
        return B.inverse2(B.runit(Cell1(x, y, f))).m

    return Bicat(B.objects, homs, B.unit, B._hc1, B._hc2, assoc, lunit, runit,
                 name=_flip(B.name, "op2"), ob_data=B.ob_data)


def _flip(name, tag):
    name = name or "B"
    suffix = "^" + tag
    return name[:-len(suffix)] if name.endswith(suffix) else name + suffix


def tabulate(B):
    """Every structure cell of ``B`` as plain data, for equality tests."""
    n = B.n_ob
    out = {"objects": B.objects, "unit": tuple(B.unit),
           "hom": tuple((k, B.hom[k].key()) for k in sorted(B.hom))}
    hc1, hc2, assoc, lu, ru = [], [], [], [], []
    for x, y, z in iproduct(range(n), repeat=3):
        for g in B.ones(y, z):
            for f in B.ones(x, y):
                hc1.append((x, y, z, g.i, f.i, B.comp1(g, f).i))
        for b in B.twos(y, z):
            for a in B.twos(x, y):
                hc2.append((x, y, z, b.m, a.m, B.hcomp2(b, a).m))
    for w, x, y, z in iproduct(range(n), repeat=4):
        for h in B.ones(y, z):
            for g in B.ones(x, y):
                for f in B.ones(w, x):
                    assoc.append((w, x, y, z, h.i, g.i, f.i, B.assoc(h, g, f).m))
    for x in range(n):
        for y in range(n):
            for f in B.ones(x, y):
                lu.append((x, y, f.i, B.lunit(f).m))
                ru.append((x, y, f.i, B.runit(f).m))
    out.update(hc1=tuple(hc1), hc2=tuple(hc2), assoc=tuple(assoc), lunit=tuple(lu),
               runit=tuple(ru))
    return out


def bicat_equal(A, B):
    return tabulate(A) == tabulate(B)


def is_locally_discrete(B):
    return all(H.n_mor == H.n_ob for H in B.hom.values())


# specifications ------------------------------------------------------------
class Specification2:
    """Objects, 1-cells and 2-cells cutting out a sub-bicategory."""

    def __init__(self, S0, S1, S2):
        self.S0 = frozenset(S0)
        self.S1 = frozenset(S1)
        self.S2 = frozenset(S2)


def everything(B):
    S1 = {f for x in range(B.n_ob) for y in range(B.n_ob) for f in B.ones(x, y)}
    S2 = {a for x in range(B.n_ob) for y in range(B.n_ob) for a in B.twos(x, y)}
    return Specification2(range(B.n_ob), S1, S2)


def invertible_twos(B, S1=None):
    """The specification keeping all 1-cells and only invertible 2-cells."""
    spec = everything(B)
    S1 = spec.S1 if S1 is None else S1
    S2 = {a for a in spec.S2 if B.is_invertible(a) and B.src2(a) in S1 and B.tgt2(a) in S1}
    return Specification2(spec.S0, S1, S2)


def check_specification(B, S):
    for f in sorted(S.S1):
        if f.x not in S.S0 or f.y not in S.S0:
            raise NotClosed("1-cell with endpoint outside S0", cell=B.describe1(f))
    for x in sorted(S.S0):
        if B.id1(x) not in S.S1:
            raise NotClosed("identity 1-cell missing", object=B.objects[x])
    for g in sorted(S.S1):
        for f in sorted(S.S1):
            if f.y == g.x and B.comp1(g, f) not in S.S1:
                raise NotClosed("1-cells not closed under composition", g=B.describe1(g),
                                f=B.describe1(f))
    for a in sorted(S.S2):
        if B.src2(a) not in S.S1 or B.tgt2(a) not in S.S1:
            raise NotClosed("2-cell between cells outside S1", cell=B.describe2(a))
    for f in sorted(S.S1):
        if B.id2(f) not in S.S2:
            raise NotClosed("identity 2-cell missing", cell=B.describe1(f))
        for cell in (B.lunit(f), B.runit(f), B.inverse2(B.lunit(f)), B.inverse2(B.runit(f))):
            if cell not in S.S2:
                raise NotClosed("unitor outside S2", cell=B.describe1(f))
    S2 = sorted(S.S2)
    for b in S2:
        for a in S2:
            if (a.x, a.y) == (b.x, b.y) and B.tgt2(a) == B.src2(b) and B.vcomp(b, a) not in S.S2:
                raise NotClosed("2-cells not closed under vertical composition", b=B.describe2(b),
                                a=B.describe2(a))
            if a.y == b.x and B.hcomp2(b, a) not in S.S2:
                raise NotClosed("2-cells not closed under horizontal composition",
                                b=B.describe2(b), a=B.describe2(a))
    S1 = sorted(S.S1)
    for h in S1:
        for g in S1:
            if g.y != h.x:
                continue
            for f in S1:
                if f.y != g.x:
                    continue
                a = B.assoc(h, g, f)
                if a not in S.S2 or B.inverse2(a) not in S.S2:
                    raise NotClosed("associator outside S2", h=B.describe1(h), g=B.describe1(g),
                                    f=B.describe1(f))


def sub_bicat_by_spec(B, S, name=None):
    """The sub-bicategory exactly fitting the specification ``S``."""
    check_specification(B, S)
    obs = sorted(S.S0)
    onew = {x: i for i, x in enumerate(obs)}
    homs, maps1, maps2, inv1 = {}, {}, {}, {}
    for x in obs:
        for y in obs:
            H = B.hom[(x, y)]
            keep1 = [f.i for f in sorted(S.S1) if (f.x, f.y) == (x, y)]
            keep2 = [a.m for a in sorted(S.S2) if (a.x, a.y) == (x, y)]
            sub, inc = subcategory(H, keep1, keep2, name=H.name)
            homs[(onew[x], onew[y])] = sub
            maps1[(x, y)] = {old: i for i, old in enumerate(inc.ob_map)}
            maps2[(x, y)] = {old: i for i, old in enumerate(inc.mor_map)}
            inv1[(x, y)] = inc

    def old1(x, y, i):
        return Cell1(obs[x], obs[y], inv1[(obs[x], obs[y])].ob_map[i])

    def old2(x, y, m):
        return Cell2(obs[x], obs[y], inv1[(obs[x], obs[y])].mor_map[m])

    def hc1(x, y, z, g, f):
        r = B.comp1(old1(y, z, g), old1(x, y, f))
        return maps1[(r.x, r.y)][r.i]

    def hc2(x, y, z, b, a):
        r = B.hcomp2(old2(y, z, b), old2(x, y, a))
        return maps2[(r.x, r.y)][r.m]

    def assoc(w, x, y, z, h, g, f):
        r = B.assoc(old1(y, z, h), old1(x, y, g), old1(w, x, f))
        return maps2[(r.x, r.y)][r.m]

    def lunit(x, y, f):
        r = B.lunit(old1(x, y, f))
        return maps2[(r.x, r.y)][r.m]

    def runit(x, y, f):
        r = B.runit(old1(x, y, f))
        return maps2[(r.x, r.y)][r.m]

    unit = [maps1[(x, x)][B.unit[x]] for x in obs]
    R = Bicat([B.objects[x] for x in obs], homs, unit, hc1, hc2, assoc, lunit, runit,
              name=name or f"{B.name}|spec")
    R.old1, R.old2 = old1, old2
    return R


def core1(B, name=None):
    """The underlying 1-category of ``B``.

    When composition of 1-cells is strictly associative and unital the
    1-cells themselves are the morphisms; otherwise 1-cells are identified up
    to invertible 2-cells with the least index as representative.
    """
    n = B.n_ob
    strict = True
    for x, y, z in B.composable_triples():
        for f in B.ones(x, y):
            if B.comp1(B.id1(y), f) != f or B.comp1(f, B.id1(x)) != f:
                strict = False
    if strict:
        for w, x, y, z in iproduct(range(n), repeat=4):
            for h in B.ones(y, z):
                for g in B.ones(x, y):
                    for f in B.ones(w, x):
                        if B.comp1(B.comp1(h, g), f) != B.comp1(h, B.comp1(g, f)):
                            strict = False
    rep = {}
    for x in range(n):
        for y in range(n):
            H = B.hom[(x, y)]
            for i in range(H.n_ob):
                if strict:
                    rep[(x, y, i)] = i
                else:
                    rep[(x, y, i)] = min(j for j in range(H.n_ob) if H.isomorphic(j, i))
    cells = sorted({(x, y, r) for (x, y, i), r in rep.items()})
    if hasattr(B, "cell_mor"):
        # a locally discrete bicategory keeps the order of its base
        cells.sort(key=lambda c: B.cell_mor(Cell1(*c)))
    plain = [B.hom[(x, y)].objects[r] for x, y, r in cells]
    unique = len(set(plain)) == len(plain)
    names, src, tgt, index = [], [], [], {}
    for (x, y, r), nm in zip(cells, plain):
        index[(x, y, r)] = len(names)
        names.append(nm if unique else f"{B.objects[x]}>{nm}>{B.objects[y]}")
        src.append(x)
        tgt.append(y)
    comp = {}
    for (y, z, g) in cells:
        for (x, y2, f) in cells:
            if y2 != y:
                continue
            h = B.comp1(Cell1(y, z, g), Cell1(x, y, f))
            comp[(index[(y, z, g)], index[(x, y, f)])] = index[(x, z, rep[(x, z, h.i)])]
    ids = [index[(x, x, rep[(x, x, B.unit[x])])] for x in range(n)]
    C = FinCat(B.objects, names, src, tgt, ids, comp, mor_data=cells, name=name or f"core({B.name})")
    return check_category(C)


def product_bicat(A, B, name=None):
    """Product bicategory with objects and hom-categories formed pairwise."""
    nA, nB = A.n_ob, B.n_ob
    objs = [f"({a},{b})" for a in A.objects for b in B.objects]
    homs = {}
    for x in range(nA * nB):
        for y in range(nA * nB):
            (x1, x2), (y1, y2) = divmod(x, nB), divmod(y, nB)
            homs[(x, y)] = product_category(A.hom[(x1, y1)], B.hom[(x2, y2)])[0]

    def split(x):
        return divmod(x, nB)

    def pair1(x, y, i):
        nb = B.hom[(split(x)[1], split(y)[1])].n_ob
        return divmod(i, nb)

    def pair2(x, y, m):
        nb = B.hom[(split(x)[1], split(y)[1])].n_mor
        return divmod(m, nb)

    def join1(x, y, i, j):
        return i * B.hom[(split(x)[1], split(y)[1])].n_ob + j

    def join2(x, y, m, k):
        return m * B.hom[(split(x)[1], split(y)[1])].n_mor + k

    def hc1(x, y, z, g, f):
        (x1, x2), (y1, y2), (z1, z2) = split(x), split(y), split(z)
        g1, g2 = pair1(y, z, g)
        f1, f2 = pair1(x, y, f)
        return join1(x, z, A._hc1(x1, y1, z1, g1, f1), B._hc1(x2, y2, z2, g2, f2))

    def hc2(x, y, z, b, a):
        (x1, x2), (y1, y2), (z1, z2) = split(x), split(y), split(z)
        b1, b2 = pair2(y, z, b)
        a1, a2 = pair2(x, y, a)
        return join2(x, z, A._hc2(x1, y1, z1, b1, a1), B._hc2(x2, y2, z2, b2, a2))

    def assoc(w, x, y, z, h, g, f):
        ws, xs, ys, zs = split(w), split(x), split(y), split(z)
        h1, h2 = pair1(y, z, h)
        g1, g2 = pair1(x, y, g)
        f1, f2 = pair1(w, x, f)
        return join2(w, z, A._assoc(ws[0], xs[0], ys[0], zs[0], h1, g1, f1),
                     B._assoc(ws[1], xs[1], ys[1], zs[1], h2, g2, f2))

    def lunit(x, y, f):
        f1, f2 = pair1(x, y, f)
        return join2(x, y, A._lunit(split(x)[0], split(y)[0], f1), B._lunit(split(x)[1], split(y)[1], f2))

    def runit(x, y, f):
        f1, f2 = pair1(x, y, f)
        return join2(x, y, A._runit(split(x)[0], split(y)[0], f1), B._runit(split(x)[1], split(y)[1], f2))

    unit = [join1(x, x, A.unit[split(x)[0]], B.unit[split(x)[1]]) for x in range(nA * nB)]
    return Bicat(objs, homs, unit, hc1, hc2, assoc, lunit, runit,
                 name=name or f"{A.name}x{B.name}")


# pseudofunctors -------------------------------------------------------------
class Pseudofunctor:
    """A weak functor ``source -> target`` between 2-dimensional calculi.

    ``ob`` maps source objects, ``map1``/``map2`` map cells, ``comp_cell(g,
    f)`` is the invertible ``F(g) F(f) => F(g f)`` and ``unit_cell(x)`` the
    invertible ``id => F(id_x)``. The source must be an enumerable
    :class:`Bicat`.
    """

    def __init__(self, source, target, ob, map1, map2, comp_cell, unit_cell, name=None):
        self.source = source
        self.target = target
        self.ob = ob
        self.map1 = map1
        self.map2 = map2
        self.comp_cell = comp_cell
        self.unit_cell = unit_cell
        self.name = name

    def __repr__(self):
        return f"<Pseudofunctor {self.name or ''}>"


def validate_pseudofunctor(P, check_naturality=True):
    """Check functoriality on 2-cells and the coherence conditions."""
    S, K = P.source, P.target
    n = S.n_ob
    for x in range(n):
        for y in range(n):
            for f in S.ones(x, y):
                Ff = P.map1(f)
                if not (_same(K.src1(Ff), P.ob(x)) and _same(K.tgt1(Ff), P.ob(y))):
                    raise CoherenceFailure("1-cell image has wrong endpoints", cell=S.describe1(f))
                if not K.eq2(P.map2(S.id2(f)), K.id2(Ff)):
                    raise CoherenceFailure("identity 2-cell not preserved", cell=S.describe1(f))
            H = S.hom[(x, y)]
            for a in S.twos(x, y):
                Fa = P.map2(a)
                if not (K.eq1(K.src2(Fa), P.map1(S.src2(a))) and K.eq1(K.tgt2(Fa), P.map1(S.tgt2(a)))):
                    raise CoherenceFailure("2-cell image has wrong boundary", cell=S.describe2(a))
                for m in H.out_mors[H.tgt[a.m]]:
                    b = Cell2(x, y, m)
                    if not K.eq2(P.map2(S.vcomp(b, a)), K.vcomp(P.map2(b), Fa)):
                        raise CoherenceFailure("vertical composition not preserved",
                                               b=S.describe2(b), a=S.describe2(a))
        u = P.unit_cell(x)
        if not K.is_invertible(u):
            raise CoherenceFailure("unit cell not invertible", object=S.objects[x])
        if not (K.eq1(K.src2(u), K.id1(P.ob(x))) and K.eq1(K.tgt2(u), P.map1(S.id1(x)))):
            raise CoherenceFailure("unit cell has wrong boundary", object=S.objects[x])
    for x, y, z in S.composable_triples():
        for g in S.ones(y, z):
            for f in S.ones(x, y):
                c = P.comp_cell(g, f)
                if not K.is_invertible(c):
                    raise CoherenceFailure("compositor not invertible", g=S.describe1(g),
                                           f=S.describe1(f))
                if not (K.eq1(K.src2(c), K.comp1(P.map1(g), P.map1(f)))
                        and K.eq1(K.tgt2(c), P.map1(S.comp1(g, f)))):
                    raise CoherenceFailure("compositor has wrong boundary", g=S.describe1(g),
                                           f=S.describe1(f))
        if check_naturality:
            for b in S.twos(y, z):
                for a in S.twos(x, y):
                    g, f, g2, f2 = S.src2(b), S.src2(a), S.tgt2(b), S.tgt2(a)
                    lhs = K.vcomp(P.comp_cell(g2, f2), K.hcomp2(P.map2(b), P.map2(a)))
                    rhs = K.vcomp(P.map2(S.hcomp2(b, a)), P.comp_cell(g, f))
                    if not K.eq2(lhs, rhs):
                        raise CoherenceFailure("compositor not natural", b=S.describe2(b),
                                               a=S.describe2(a))
    for w, x, y, z in iproduct(range(n), repeat=4):
        for h in S.ones(y, z):
            for g in S.ones(x, y):
                for f in S.ones(w, x):
                    if not _hexagon(P, h, g, f):
                        raise CoherenceFailure("associativity hexagon fails", h=S.describe1(h),
                                               g=S.describe1(g), f=S.describe1(f))
    for x in range(n):
        for y in range(n):
            for f in S.ones(x, y):
                Ff = P.map1(f)
                lhs = K.vcomp(P.map2(S.lunit(f)),
                              K.vcomp(P.comp_cell(S.id1(y), f), K.hcomp2(P.unit_cell(y), K.id2(Ff))))
                if not K.eq2(lhs, K.lunit(Ff)):
                    raise CoherenceFailure("left unit square fails", cell=S.describe1(f))
                rhs = K.vcomp(P.map2(S.runit(f)),
                              K.vcomp(P.comp_cell(f, S.id1(x)), K.hcomp2(K.id2(Ff), P.unit_cell(x))))
                if not K.eq2(rhs, K.runit(Ff)):
                    raise CoherenceFailure("right unit square fails", cell=S.describe1(f))
    return P


def _same(a, b):
    return a == b


def _hexagon(P, h, g, f):
    S, K = P.source, P.target
    Fh, Fg, Ff = P.map1(h), P.map1(g), P.map1(f)
    lhs = K.vcomp(P.map2(S.assoc(h, g, f)),
                  K.vcomp(P.comp_cell(S.comp1(h, g), f), K.hcomp2(P.comp_cell(h, g), K.id2(Ff))))
    rhs = K.vcomp(P.comp_cell(h, S.comp1(g, f)),
                  K.vcomp(K.hcomp2(K.id2(Fh), P.comp_cell(g, f)), K.assoc(Fh, Fg, Ff)))
    return K.eq2(lhs, rhs)


def identity_pseudofunctor(B):
    return Pseudofunctor(B, B, lambda x: x, lambda f: f, lambda a: a,
                         lambda g, f: B.id2(B.comp1(g, f)), lambda x: B.id2(B.id1(x)),
                         name="id")


def compose_pseudofunctors(G, F):
    """``G o F``."""
    K = G.target

    def comp_cell(g, f):
        return K.vcomp(G.map2(F.comp_cell(g, f)), G.comp_cell(F.map1(g), F.map1(f)))

    def unit_cell(x):
        return K.vcomp(G.map2(F.unit_cell(x)), G.unit_cell(F.ob(x)))

    return Pseudofunctor(F.source, K, lambda x: G.ob(F.ob(x)), lambda f: G.map1(F.map1(f)),
                         lambda a: G.map2(F.map2(a)), comp_cell, unit_cell,
                         name=f"{G.name}o{F.name}")


def check_icon(F, G, theta):
    """Check an identity-on-objects invertible transformation ``F => G``.

    ``theta(f)`` is an invertible 2-cell ``F(f) => G(f)``; it must be natural
    in 2-cells and compatible with compositors and unit cells. Returns the
    first failure as a dictionary, or None.
    """
    S, K = F.source, F.target
    n = S.n_ob
    for x in range(n):
        if not _same(F.ob(x), G.ob(x)):
            return {"reason": "object images differ", "object": S.objects[x]}
    for x in range(n):
        for y in range(n):
            for f in S.ones(x, y):
                t = theta(f)
                if not K.is_invertible(t):
                    return {"reason": "component not invertible", "cell": S.describe1(f)}
                if not (K.eq1(K.src2(t), F.map1(f)) and K.eq1(K.tgt2(t), G.map1(f))):
                    return {"reason": "component has wrong boundary", "cell": S.describe1(f)}
            for a in S.twos(x, y):
                lhs = K.vcomp(G.map2(a), theta(S.src2(a)))
                rhs = K.vcomp(theta(S.tgt2(a)), F.map2(a))
                if not K.eq2(lhs, rhs):
                    return {"reason": "not natural in 2-cells", "cell": S.describe2(a)}
        lhs = K.vcomp(theta(S.id1(x)), F.unit_cell(x))
        if not K.eq2(lhs, G.unit_cell(x)):
            return {"reason": "unit cells not matched", "object": S.objects[x]}
    for x, y, z in S.composable_triples():
        for g in S.ones(y, z):
            for f in S.ones(x, y):
                lhs = K.vcomp(theta(S.comp1(g, f)), F.comp_cell(g, f))
                rhs = K.vcomp(G.comp_cell(g, f), K.hcomp2(theta(g), theta(f)))
                if not K.eq2(lhs, rhs):
                    return {"reason": "compositors not matched", "g": S.describe1(g),
                            "f": S.describe1(f)}
    return None


# 2-cell pasting along chains of 1-cells ---------------------------------------
def rcomp(K, cells):
    """Right-nested composite ``c0 (c1 (... c_{n-1}))`` of a nonempty chain."""
    r = cells[-1]
    for c in reversed(cells[:-1]):
        r = K.comp1(c, r)
    return r


def _merge(K, left, right):
    """2-cell ``rcomp(left) rcomp(right) => rcomp(left + right)``."""
    if len(left) == 1:
        return K.id2(K.comp1(left[0], rcomp(K, right)))
    head, rest = left[0], left[1:]
    a = K.assoc(head, rcomp(K, rest), rcomp(K, right))
    return K.vcomp(K.hcomp2(K.id2(head), _merge(K, rest, right)), a)


def paste(K, chain, i, j, alpha, new):
    """Apply ``alpha : rcomp(chain[i:j]) => rcomp(new)`` inside a chain.

    Returns the 2-cell ``rcomp(chain) => rcomp(chain[:i] + new + chain[j:])``.
    """
    pre, seg, post = chain[:i], chain[i:j], chain[j:]
    if post:
        to_tree = K.inverse2(_merge(K, seg, post))
        step = K.hcomp2(alpha, K.id2(rcomp(K, post)))
        from_tree = _merge(K, new, post)
        inner = K.vcomp(from_tree, K.vcomp(step, to_tree))
    else:
        inner = alpha
    for c in reversed(pre):
        inner = K.hcomp2(K.id2(c), inner)
    return inner


def drop_identity(K, chain, i):
    """Remove the identity 1-cell at position ``i`` using a unitor."""
    if len(chain) == 1:
        raise MalformedInput("cannot drop the only cell of a chain")
    if i + 1 < len(chain):
        nxt = chain[i + 1]
        return paste(K, chain, i, i + 2, K.lunit(nxt), [nxt]), chain[:i] + chain[i + 1:]
    prev = chain[i - 1]
    return paste(K, chain, i - 1, i + 1, K.runit(prev), [prev]), chain[:i]


def insert_identity(K, chain, i, obj):
    """Insert ``id_obj`` at position ``i`` (the inverse of dropping it)."""
    new_chain = chain[:i] + [K.id1(obj)] + chain[i:]
    cell, _ = drop_identity(K, new_chain, i)
    return K.inverse2(cell), new_chain


class ChainBuilder:
    """Accumulate a vertical composite of pastings along a chain."""

    def __init__(self, K, chain):
        self.K = K
        self.chain = list(chain)
        self.cell = K.id2(rcomp(K, self.chain))

    def _push(self, step, chain):
        self.cell = self.K.vcomp(step, self.cell)
        self.chain = chain

    def apply(self, i, j, alpha, new):
        step = paste(self.K, self.chain, i, j, alpha, list(new))
        self._push(step, self.chain[:i] + list(new) + self.chain[j:])
        return self

    def drop(self, i):
        step, chain = drop_identity(self.K, self.chain, i)
        self._push(step, chain)
        return self

    def insert(self, i, obj):
        step, chain = insert_identity(self.K, self.chain, i, obj)
        self._push(step, chain)
        return self


# serialisation --------------------------------------------------------------
def bicat_to_json(B):
    """bicat-v1: every structure cell by name."""
    n = B.n_ob
    out = {"format": "bicat-v1", "objects": list(B.objects), "homs": [], "units": {},
           "hcomp1": [], "hcomp2": [], "associators": [], "left_unitors": [],
           "right_unitors": []}
    for x in range(n):
        for y in range(n):
            out["homs"].append({"src": B.objects[x], "tgt": B.objects[y],
                                "category": category_to_json(B.hom[(x, y)])})
        out["units"][B.objects[x]] = B.hom[(x, x)].objects[B.unit[x]]
    for x, y, z in iproduct(range(n), repeat=3):
        X, Y, Z = B.objects[x], B.objects[y], B.objects[z]
        Hxy, Hyz, Hxz = B.hom[(x, y)], B.hom[(y, z)], B.hom[(x, z)]
        for g in B.ones(y, z):
            for f in B.ones(x, y):
                out["hcomp1"].append([X, Y, Z, Hyz.objects[g.i], Hxy.objects[f.i],
                                      Hxz.objects[B.comp1(g, f).i]])
        for b in B.twos(y, z):
            for a in B.twos(x, y):
                out["hcomp2"].append([X, Y, Z, Hyz.morphisms[b.m], Hxy.morphisms[a.m],
                                      Hxz.morphisms[B.hcomp2(b, a).m]])
    for w, x, y, z in iproduct(range(n), repeat=4):
        Hwz = B.hom[(w, z)]
        for h in B.ones(y, z):
            for g in B.ones(x, y):
                for f in B.ones(w, x):
                    out["associators"].append(
                        [B.objects[w], B.objects[x], B.objects[y], B.objects[z],
                         B.hom[(y, z)].objects[h.i], B.hom[(x, y)].objects[g.i],
                         B.hom[(w, x)].objects[f.i], Hwz.morphisms[B.assoc(h, g, f).m]])
    for x in range(n):
        for y in range(n):
            H = B.hom[(x, y)]
            for f in B.ones(x, y):
                out["left_unitors"].append([B.objects[x], B.objects[y], H.objects[f.i],
                                            H.morphisms[B.lunit(f).m]])
                out["right_unitors"].append([B.objects[x], B.objects[y], H.objects[f.i],
                                             H.morphisms[B.runit(f).m]])
    return out


BICAT_KEYS = {"format", "objects", "homs", "units", "hcomp1", "hcomp2", "associators",
              "left_unitors", "right_unitors", "name"}


def validate_bicat_json(raw):
    """Parse bicat-v1 and run :func:`validate_bicat`."""
    if not isinstance(raw, dict):
        raise MalformedInput("bicategory description must be a JSON object")
    unknown = sorted(set(raw) - BICAT_KEYS)
    if unknown:
        raise MalformedInput("unknown keys", keys=unknown)
    try:
        objects = list(raw["objects"])
        oi = {o: i for i, o in enumerate(objects)}
        homs = {}
        for h in raw["homs"]:
            homs[(oi[h["src"]], oi[h["tgt"]])] = validate_category(h["category"])
        n = len(objects)
        for x in range(n):
            for y in range(n):
                if (x, y) not in homs:
                    raise MalformedInput("missing hom-category", src=objects[x], tgt=objects[y])
        unit = [homs[(x, x)].ob(raw["units"][objects[x]]) for x in range(n)]
        t1, t2, ta, tl, tr = {}, {}, {}, {}, {}
        for X, Y, Z, g, f, gf in raw["hcomp1"]:
            x, y, z = oi[X], oi[Y], oi[Z]
            t1[(x, y, z, homs[(y, z)].ob(g), homs[(x, y)].ob(f))] = homs[(x, z)].ob(gf)
        for X, Y, Z, b, a, ba in raw["hcomp2"]:
            x, y, z = oi[X], oi[Y], oi[Z]
            t2[(x, y, z, homs[(y, z)].mor(b), homs[(x, y)].mor(a))] = homs[(x, z)].mor(ba)
        for W, X, Y, Z, h, g, f, c in raw["associators"]:
            w, x, y, z = oi[W], oi[X], oi[Y], oi[Z]
            ta[(w, x, y, z, homs[(y, z)].ob(h), homs[(x, y)].ob(g), homs[(w, x)].ob(f))] = \
                homs[(w, z)].mor(c)
        for X, Y, f, c in raw["left_unitors"]:
            x, y = oi[X], oi[Y]
            tl[(x, y, homs[(x, y)].ob(f))] = homs[(x, y)].mor(c)
        for X, Y, f, c in raw["right_unitors"]:
            x, y = oi[X], oi[Y]
            tr[(x, y, homs[(x, y)].ob(f))] = homs[(x, y)].mor(c)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput("malformed bicategory description", detail=str(exc))

    def lookup(table, label):
        def fn(*args):
            if args not in table:
                raise MalformedInput(f"{label} table incomplete", entry=list(args))
            return table[args]
        return fn

    B = Bicat(objects, homs, unit, lookup(t1, "hcomp1"), lookup(t2, "hcomp2"),
              lookup(ta, "associator"), lookup(tl, "left unitor"), lookup(tr, "right unitor"),
              name=raw.get("name"))
    return validate_bicat(B)


def bicat_to_dot(B):
    lines = ["digraph bicat {", "  rankdir=LR;"]
    for x, o in enumerate(B.objects):
        lines.append(f'  n{x} [label="{o}"];')
    for x in range(B.n_ob):
        for y in range(B.n_ob):
            H = B.hom[(x, y)]
            for i in range(H.n_ob):
                if x == y and i == B.unit[x]:
                    continue
                lines.append(f'  n{x} -> n{y} [label="{H.objects[i]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
