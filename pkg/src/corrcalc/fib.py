"""Cartesian lifts, Grothendieck integration and free fibrations."""
from dataclasses import dataclass, field

from corrcalc.bicat import CAT, Cell1, Pseudofunctor, locally_discrete
from corrcalc.errors import LiftFailure, NotAFunctor, NotOverF
from corrcalc.fincat import (
    DEFAULT_CAP, FinCat, FunctorData, NatTransData, check_functor, check_natural, comma,
    compose_functors, discrete_category, enumerate_functors, enumerate_nats,
    identity_functor, identity_nat, inverse_nat, is_equivalence, is_isomorphism, opposite,
    subcategory, vcomp, whisker_left, whisker_right,
)
from corrcalc.marked import MarkedCat, marked_comma, require_base_change, validate_marking
from corrcalc.report import Report


# lifts -----------------------------------------------------------------------
def is_cartesian_lift(p, phi, f):
    """Does every map into ``tgt phi`` over a factorisation through ``f``
    factor uniquely through ``phi``?"""
    E, D = p.source, p.target
    if p.mor_map[phi] != f:
        raise NotOverF("morphism does not lie over f", morphism=E.morphisms[phi],
                       f=D.morphisms[f])
    a, b = E.src[phi], E.tgt[phi]
    pa = p.ob_map[a]
    for e in range(E.n_ob):
        pe = p.ob_map[e]
        counts = {}
        for g in D.hom(pe, pa):
            k = D.comp(f, g)
            counts[k] = counts.get(k, 0) + 1
        want = sum(counts.get(p.mor_map[psi], 0) for psi in E.hom(e, b))
        have = E.hom(e, a)
        if len(have) != want:
            return False
        seen = set()
        for chi in have:
            key = (E.comp(phi, chi), p.mor_map[chi])
            if key in seen:
                return False
            seen.add(key)
    return True


def is_cocartesian_lift(p, phi, f):
    """The dual of :func:`is_cartesian_lift`."""
    E, D = p.source, p.target
    if p.mor_map[phi] != f:
        raise NotOverF("morphism does not lie over f", morphism=E.morphisms[phi],
                       f=D.morphisms[f])
    a, b = E.src[phi], E.tgt[phi]
    pb = p.ob_map[b]
    for e in range(E.n_ob):
        pe = p.ob_map[e]
        counts = {}
        for g in D.hom(pb, pe):
            k = D.comp(g, f)
            counts[k] = counts.get(k, 0) + 1
        want = sum(counts.get(p.mor_map[psi], 0) for psi in E.hom(a, e))
        have = E.hom(b, e)
        if len(have) != want:
            return False
        seen = set()
        for chi in have:
            key = (E.comp(chi, phi), p.mor_map[chi])
            if key in seen:
                return False
            seen.add(key)
    return True


def _over(p, f):
    out = {}
    for m in range(p.source.n_mor):
        out.setdefault(p.mor_map[m], []).append(m)
    return out.get(f, [])


@dataclass
class Fibration:
    """A functor with certified (co)Cartesian lifts.

    ``cart[(f, e)]`` is the chosen Cartesian lift of ``f`` ending at ``e``
    and ``cocart[(f, e)]`` the chosen co-Cartesian lift starting at ``e``.
    Missing entries are searched for on demand and cached; the least
    qualifying morphism is always chosen.
    """
    proj: FunctorData
    cart: dict = field(default_factory=dict)
    cocart: dict = field(default_factory=dict)
    name: str = None

    def __post_init__(self):
        self._by_base = {}
        for m in range(self.total.n_mor):
            self._by_base.setdefault(self.proj.mor_map[m], []).append(m)

    @property
    def total(self):
        return self.proj.source

    @property
    def base(self):
        return self.proj.target

    def over(self, f):
        return self._by_base.get(f, [])

    def objects_over(self, d):
        return [e for e in range(self.total.n_ob) if self.proj.ob_map[e] == d]

    def cart_lift(self, f, e):
        key = (f, e)
        if key not in self.cart:
            E = self.total
            found = None
            for m in self.over(f):
                if E.tgt[m] == e and is_cartesian_lift(self.proj, m, f):
                    found = m
                    break
            self.cart[key] = found
        return self.cart[key]

    def cocart_lift(self, f, e):
        key = (f, e)
        if key not in self.cocart:
            E = self.total
            found = None
            for m in self.over(f):
                if E.src[m] == e and is_cocartesian_lift(self.proj, m, f):
                    found = m
                    break
            self.cocart[key] = found
        return self.cocart[key]

    def factor_cart(self, phi, psi, over):
        """The unique ``chi`` over ``over`` with ``phi chi = psi``."""
        E = self.total
        for chi in E.hom(E.src[psi], E.src[phi]):
            if self.proj.mor_map[chi] == over and E.comp(phi, chi) == psi:
                return chi
        raise LiftFailure("no factorisation through a Cartesian arrow",
                          phi=E.morphisms[phi], psi=E.morphisms[psi])

    def factor_cocart(self, phi, psi, over):
        """The unique ``chi`` over ``over`` with ``chi phi = psi``."""
        E = self.total
        for chi in E.hom(E.tgt[phi], E.tgt[psi]):
            if self.proj.mor_map[chi] == over and E.comp(chi, phi) == psi:
                return chi
        raise LiftFailure("no factorisation through a co-Cartesian arrow",
                          phi=E.morphisms[phi], psi=E.morphisms[psi])


def _marking_set(D, S):
    if S is None:
        return list(range(D.n_mor))
    if isinstance(S, MarkedCat):
        return sorted(S.marking)
    return sorted(S)


def check_fibration(p, S=None, variance="cartesian", name=None):
    """Search lifts of every ``f`` in ``S`` at every object.

    ``variance`` is ``"cartesian"``, ``"cocartesian"`` or ``"both"``; for
    ``"both"`` the co-Cartesian lifts are required for every morphism and
    the Cartesian ones for ``S``. The payload is the certified fibration.
    """
    fib = p if isinstance(p, Fibration) else Fibration(p, name=name)
    E, D = fib.total, fib.base
    marked = _marking_set(D, S)
    jobs = []
    if variance in ("cocartesian", "both"):
        cocart_set = range(D.n_mor) if variance == "both" else marked
        jobs += [("cocartesian", f) for f in cocart_set]
    if variance in ("cartesian", "both"):
        jobs += [("cartesian", f) for f in marked]
    n = 0
    for kind, f in jobs:
        anchor_obs = fib.objects_over(D.tgt[f] if kind == "cartesian" else D.src[f])
        for e in anchor_obs:
            n += 1
            lift = fib.cart_lift(f, e) if kind == "cartesian" else fib.cocart_lift(f, e)
            if lift is None:
                return Report("check_fibration", "CAT_FIB_CART_DEF", False, {"lifts_checked": n},
                              {"kind": kind, "f": D.morphisms[f], "object": E.objects[e]},
                              payload=fib)
    return Report("check_fibration", "CAT_FIB_CART_DEF", True, {"lifts_checked": n}, payload=fib)


def require_fibration(p, S=None, variance="cartesian"):
    rep = check_fibration(p, S, variance)
    if not rep.holds:
        raise LiftFailure("missing lift", **rep.counterexample)
    return rep.payload


# category-valued pseudofunctors ------------------------------------------------
def cat_pseudofunctor(D, ob, mor, comp=None, unit=None, contravariant=False, name=None):
    """A pseudofunctor from (the opposite of) ``D`` into finite categories.

    ``ob[d]`` is a FinCat and ``mor[m]`` a functor ``ob[src m] -> ob[tgt m]``
    (reversed when ``contravariant``). Compositor and unit cells default to
    identities, in which case strict functoriality is verified.
    ``comp[(g, f)]`` is keyed by composable base morphisms in the order of
    the source bicategory.
    """
    base = opposite(D) if contravariant else D
    S = locally_discrete(base, name=name)
    for m in range(D.n_mor):
        F = mor[m]
        s, t = (D.tgt[m], D.src[m]) if contravariant else (D.src[m], D.tgt[m])
        if F.source != ob[s] or F.target != ob[t]:
            raise NotAFunctor("functor has the wrong endpoints", morphism=D.morphisms[m])
        check_functor(F)
    if comp is None:
        for (g, f), h in base.comp_table.items():
            if compose_functors(mor[g], mor[f]) != mor[h]:
                raise NotAFunctor("assignment is not strictly functorial",
                                  g=base.morphisms[g], f=base.morphisms[f])
    if unit is None:
        for x in range(base.n_ob):
            if mor[base.ids[x]] != identity_functor(ob[x]):
                raise NotAFunctor("identity not preserved strictly", object=base.objects[x])

    def map1(c):
        return mor[S.cell_mor(c)]

    def map2(a):
        return identity_nat(mor[S.cell_mor(Cell1(a.x, a.y, a.m))])

    def comp_cell(g, f):
        gm, fm = S.cell_mor(g), S.cell_mor(f)
        if comp is not None and (gm, fm) in comp:
            return comp[(gm, fm)]
        return identity_nat(compose_functors(mor[gm], mor[fm]))

    def unit_cell(x):
        if unit is not None and x in unit:
            return unit[x]
        return identity_nat(identity_functor(ob[x]))

    P = Pseudofunctor(S, CAT, lambda x: ob[x], map1, map2, comp_cell, unit_cell, name=name)
    P.base = D
    P.contravariant = contravariant
    P.mor_functor = lambda m: mor[m]
    return P


def universe_to_cat(P, D, contravariant=False):
    """Re-express a pseudofunctor into a ``cat_universe`` in plain functors."""
    U = P.target
    S = P.source

    def map1(c):
        f = P.map1(c)
        return U.hom[(f.x, f.y)].ob_data[f.i]

    def map2(a):
        b = P.map2(a)
        return U.hom[(b.x, b.y)].mor_data[b.m]

    def comp_cell(g, f):
        c = P.comp_cell(g, f)
        return U.hom[(c.x, c.y)].mor_data[c.m]

    def unit_cell(x):
        c = P.unit_cell(x)
        return U.hom[(c.x, c.y)].mor_data[c.m]

    Q = Pseudofunctor(S, CAT, lambda x: U.ob_data[P.ob(x)], map1, map2, comp_cell, unit_cell,
                      name=P.name)
    Q.base = D
    Q.contravariant = contravariant
    Q.mor_functor = lambda m: map1(S.mor_cell(m))
    return Q


def _mor_functor(F, m):
    return F.map1(F.source.mor_cell(m))


def _comp(F, g, f):
    S = F.source
    return F.comp_cell(S.mor_cell(g), S.mor_cell(f))


# Grothendieck construction ------------------------------------------------------
def grothendieck(F, variance=None, cap=DEFAULT_CAP):
    """Integrate a category-valued pseudofunctor.

    Covariant: morphisms ``(f, xi : F(f) x -> x')``. Contravariant (``F`` on
    the opposite base): morphisms ``(f, xi : x -> F(f) x')``. Composition
    inserts the compositor and unit cells of ``F``.
    """
    contravariant = getattr(F, "contravariant", False) if variance is None \
        else variance == "contravariant"
    D = F.base
    obs, odata, oidx = [], [], {}
    for d in range(D.n_ob):
        C = F.ob(d)
        for x in range(C.n_ob):
            oidx[(d, x)] = len(obs)
            odata.append((d, x))
            obs.append(f"({D.objects[d]},{C.objects[x]})")
    mors, mdata, src, tgt, midx = [], [], [], [], {}
    for m in range(D.n_mor):
        d, d2 = D.src[m], D.tgt[m]
        Fm = _mor_functor(F, m)
        Cd, Cd2 = F.ob(d), F.ob(d2)
        for x in range(Cd.n_ob):
            for x2 in range(Cd2.n_ob):
                if contravariant:
                    hom, Ct = Cd.hom(x, Fm.ob_map[x2]), Cd
                else:
                    hom, Ct = Cd2.hom(Fm.ob_map[x], x2), Cd2
                for xi in hom:
                    midx[(m, oidx[(d, x)], oidx[(d2, x2)], xi)] = len(mors)
                    mdata.append((m, xi))
                    src.append(oidx[(d, x)])
                    tgt.append(oidx[(d2, x2)])
                    mors.append(f"({D.morphisms[m]},{Ct.morphisms[xi]})")
                    if len(mors) > cap:
                        from corrcalc.errors import SizeCap
                        raise SizeCap("Grothendieck total too large", cap=cap)
    ids = []
    for d in range(D.n_ob):
        C = F.ob(d)
        u = F.unit_cell(d)
        for x in range(C.n_ob):
            if contravariant:
                xi = u.components[x]
            else:
                xi = C.inverse(u.components[x])
            ids.append(midx[(D.ids[d], oidx[(d, x)], oidx[(d, x)], xi)])
    outs = {}
    for k, s in enumerate(src):
        outs.setdefault(s, []).append(k)
    comp = {}
    for k1 in range(len(mors)):
        f, xi = mdata[k1]
        for k2 in outs.get(tgt[k1], ()):
            g, eta = mdata[k2]
            d, d2, d3 = D.src[f], D.tgt[f], D.tgt[g]
            gf = D.comp(g, f)
            x = odata[src[k1]][1]
            x2 = odata[tgt[k1]][1]
            x3 = odata[tgt[k2]][1]
            if contravariant:
                Cd = F.ob(d)
                Ff = _mor_functor(F, f)
                c = _comp(F, f, g).components[x3]
                val = Cd.chain(c, Ff.mor_map[eta], xi)
            else:
                Cd3 = F.ob(d3)
                Fg = _mor_functor(F, g)
                cinv = Cd3.inverse(_comp(F, g, f).components[x])
                val = Cd3.chain(eta, Fg.mor_map[xi], cinv)
            comp[(k2, k1)] = midx[(gf, src[k1], tgt[k2], val)]
    if len(set(mors)) != len(mors):
        mors = [f"{n}:{obs[s]}->{obs[t]}" for n, s, t in zip(mors, src, tgt)]
    E = FinCat(obs, mors, src, tgt, ids, comp, ob_data=odata, mor_data=mdata,
               name=f"Int({F.name or 'F'})")
    p = FunctorData(E, D, [d for d, _ in odata], [m for m, _ in mdata])
    fib = Fibration(p, name=E.name)
    fib.variance = "contravariant" if contravariant else "covariant"
    for m in range(D.n_mor):
        Fm = _mor_functor(F, m)
        d, d2 = D.src[m], D.tgt[m]
        if contravariant:
            Cd = F.ob(d)
            for x2 in range(F.ob(d2).n_ob):
                y = Fm.ob_map[x2]
                fib.cart[(m, oidx[(d2, x2)])] = midx[(m, oidx[(d, y)], oidx[(d2, x2)], Cd.ids[y])]
        else:
            Cd2 = F.ob(d2)
            for x in range(F.ob(d).n_ob):
                y = Fm.ob_map[x]
                fib.cocart[(m, oidx[(d, x)])] = midx[(m, oidx[(d, x)], oidx[(d2, y)], Cd2.ids[y])]
    fib.index = oidx
    return fib


def certify_grothendieck(fib):
    """Verify every stored lift of a Grothendieck total."""
    for (f, e), m in sorted(fib.cart.items()):
        if m is None or not is_cartesian_lift(fib.proj, m, f):
            return Report("grothendieck_lifts", "CAT_GROT_INT", False,
                          counterexample={"kind": "cartesian", "f": fib.base.morphisms[f],
                                          "object": fib.total.objects[e]})
    for (f, e), m in sorted(fib.cocart.items()):
        if m is None or not is_cocartesian_lift(fib.proj, m, f):
            return Report("grothendieck_lifts", "CAT_GROT_INT", False,
                          counterexample={"kind": "cocartesian", "f": fib.base.morphisms[f],
                                          "object": fib.total.objects[e]})
    return Report("grothendieck_lifts", "CAT_GROT_INT", True,
                  {"cartesian": len(fib.cart), "cocartesian": len(fib.cocart)})


# fibres and transport -------------------------------------------------------------
def fibre(fib, d):
    """The fibre over ``d``: objects over ``d`` and morphisms over ``id_d``."""
    E, D = fib.total, fib.base
    obs = fib.objects_over(d)
    mors = fib.over(D.ids[d])
    Ed, inc = subcategory(E, obs, mors, name=f"{E.name}[{D.objects[d]}]")
    return Ed, inc


class _Fibres:
    def __init__(self, fib):
        self.fib = fib
        self.cache = {}

    def __call__(self, d):
        if d not in self.cache:
            Ed, inc = fibre(self.fib, d)
            self.cache[d] = (Ed, inc, {e: i for i, e in enumerate(inc.ob_map)},
                             {m: i for i, m in enumerate(inc.mor_map)})
        return self.cache[d]


def transport_functor(fib, f, variance, fibres=None):
    """``f_! : E_d -> E_d'`` (covariant) or ``f^! : E_d' -> E_d``."""
    fibres = fibres or _Fibres(fib)
    E, D = fib.total, fib.base
    d, d2 = D.src[f], D.tgt[f]
    if variance == "covariant":
        (Es, inc_s, _, _), (Et, inc_t, oi_t, mi_t) = fibres(d), fibres(d2)
        lift = {e: fib.cocart_lift(f, e) for e in inc_s.ob_map}
        for e, m in lift.items():
            if m is None:
                raise LiftFailure("missing co-Cartesian lift", f=D.morphisms[f], object=E.objects[e])
        ob_map = [oi_t[E.tgt[lift[e]]] for e in inc_s.ob_map]
        mor_map = []
        for m in inc_s.mor_map:
            a, b = E.src[m], E.tgt[m]
            chi = fib.factor_cocart(lift[a], E.comp(lift[b], m), D.ids[d2])
            mor_map.append(mi_t[chi])
        return FunctorData(Es, Et, ob_map, mor_map)
    (Es, inc_s, oi_s, mi_s), (Et, inc_t, _, _) = fibres(d), fibres(d2)
    lift = {e: fib.cart_lift(f, e) for e in inc_t.ob_map}
    for e, m in lift.items():
        if m is None:
            raise LiftFailure("missing Cartesian lift", f=D.morphisms[f], object=E.objects[e])
    ob_map = [oi_s[E.src[lift[e]]] for e in inc_t.ob_map]
    mor_map = []
    for m in inc_t.mor_map:
        a, b = E.src[m], E.tgt[m]
        chi = fib.factor_cart(lift[b], E.comp(m, lift[a]), D.ids[d])
        mor_map.append(mi_s[chi])
    return FunctorData(Et, Es, ob_map, mor_map)


def fibre_transport(fib, variance=None):
    """The pseudofunctor classified by a fibration, built from its lifts."""
    variance = variance or getattr(fib, "variance", "covariant")
    D = fib.base
    contravariant = variance == "contravariant"
    fibres = _Fibres(fib)
    E = fib.total
    functors = [transport_functor(fib, m, variance, fibres) for m in range(D.n_mor)]
    ob = [fibres(d)[0] for d in range(D.n_ob)]
    comp, unit = {}, {}
    base = opposite(D) if contravariant else D
    for (g, f), h in sorted(base.comp_table.items()):
        G, Fm, Hm = functors[g], functors[f], functors[h]
        GF = compose_functors(G, Fm)
        src_cat = Fm.source
        _, inc_src, _, _ = fibres(base.src[f])
        _, inc_tgt, oi_t, mi_t = fibres(base.tgt[g])
        comps = []
        for x in range(src_cat.n_ob):
            e = inc_src.ob_map[x]
            if contravariant:
                outer = fib.cart_lift(h, e)
                l1 = fib.cart_lift(f, e)
                l2 = fib.cart_lift(g, E.src[l1])
                chi = fib.factor_cart(outer, E.comp(l1, l2), D.ids[base.tgt[g]])
            else:
                l1 = fib.cocart_lift(f, e)
                l2 = fib.cocart_lift(g, E.tgt[l1])
                chi = fib.factor_cocart(E.comp(l2, l1), fib.cocart_lift(h, e), D.ids[base.tgt[g]])
            comps.append(mi_t[chi])
        comp[(g, f)] = check_natural(NatTransData(GF, Hm, comps))
    for d in range(D.n_ob):
        Ed, inc, oi, mi = fibres(d)
        I = functors[D.ids[d]]
        comps = []
        for x in range(Ed.n_ob):
            e = inc.ob_map[x]
            if contravariant:
                chi = fib.factor_cart(fib.cart_lift(D.ids[d], e), E.ids[e], D.ids[d])
            else:
                chi = fib.cocart_lift(D.ids[d], e)
            comps.append(mi[chi])
        unit[d] = check_natural(NatTransData(identity_functor(Ed), I, comps))
    return cat_pseudofunctor(D, ob, functors, comp=comp, unit=unit, contravariant=contravariant,
                             name=f"Tr({fib.name})")


# pseudonatural comparison -------------------------------------------------------
def check_pseudonatural_iso(F, G, sigma, sigma_f, iso=True):
    """Check a pseudonatural transformation between category-valued
    pseudofunctors on the same locally discrete base.

    ``sigma[d] : F d -> G d`` are functors, isomorphisms of categories when
    ``iso``, and ``sigma_f(m) : G(m) sigma_d => sigma_d' F(m)`` invertible
    transformations satisfying the composition and unit axioms. Returns the
    first failure as a dictionary, or None.
    """
    S = F.source
    base = S.base
    for d in range(base.n_ob):
        if iso and not is_isomorphism(sigma[d]):
            return {"reason": "component is not an isomorphism", "object": base.objects[d]}
        check_functor(sigma[d])
    cells = {}
    for m in range(base.n_mor):
        cell = sigma_f(m)
        check_natural(cell)
        if inverse_nat(cell) is None:
            return {"reason": "2-cell component not invertible", "morphism": base.morphisms[m]}
        cells[m] = cell
    for (g, f), h in sorted(base.comp_table.items()):
        d, d3 = base.src[f], base.tgt[g]
        Ff = F.map1(S.mor_cell(f))
        Gg = G.map1(S.mor_cell(g))
        lhs = vcomp(whisker_left(sigma[d3], F.comp_cell(S.mor_cell(g), S.mor_cell(f))),
                    vcomp(whisker_right(cells[g], Ff), whisker_left(Gg, cells[f])))
        rhs = vcomp(cells[h], whisker_right(G.comp_cell(S.mor_cell(g), S.mor_cell(f)), sigma[d]))
        if lhs.components != rhs.components:
            return {"reason": "composition axiom fails", "g": base.morphisms[g],
                    "f": base.morphisms[f]}
    for d in range(base.n_ob):
        lhs = vcomp(cells[base.ids[d]], whisker_right(G.unit_cell(d), sigma[d]))
        rhs = whisker_left(sigma[d], F.unit_cell(d))
        if lhs.components != rhs.components:
            return {"reason": "unit axiom fails", "object": base.objects[d]}
    return None


def transport_roundtrip(F):
    """``fibre_transport(grothendieck(F))`` compared with ``F``."""
    fib = grothendieck(F)
    variance = fib.variance
    T = fibre_transport(fib, variance)
    D = F.base
    E = fib.total
    fibres = _Fibres(fib)
    sigma = []
    for d in range(D.n_ob):
        C = F.ob(d)
        Ed, inc, oi, mi = fibres(d)
        u = F.unit_cell(d)
        ob_map = [oi[fib.index[(d, x)]] for x in range(C.n_ob)]
        mor_map = []
        for a in range(C.n_mor):
            x, y = C.src[a], C.tgt[a]
            if variance == "contravariant":
                xi = C.comp(u.components[y], a)
            else:
                xi = C.comp(a, C.inverse(u.components[x]))
            mor_map.append(mi[_find_mor(E, fib.index[(d, x)], fib.index[(d, y)], (D.ids[d], xi))])
        sigma.append(FunctorData(C, Ed, ob_map, mor_map))

    def sigma_f(m):
        s, t = (D.tgt[m], D.src[m]) if variance == "contravariant" else (D.src[m], D.tgt[m])
        Gm, Fm = T.mor_functor(m), F.mor_functor(m)
        left = compose_functors(Gm, sigma[s])
        right = compose_functors(sigma[t], Fm)
        Et = fibres(t)[0]
        comps = []
        for x in range(F.ob(s).n_ob):
            a, b = left.ob_map[x], right.ob_map[x]
            cands = [k for k in Et.hom(a, b) if Et.is_iso(k)]
            comps.append(cands[0] if len(cands) == 1 else (Et.ids[a] if a == b else None))
        if any(c is None for c in comps):
            raise LiftFailure("no canonical comparison", morphism=D.morphisms[m])
        return NatTransData(left, right, comps)

    bad = check_pseudonatural_iso(F, T, sigma, sigma_f)
    return Report("transport_roundtrip", "CAT_GROT_INT", bad is None,
                  {"base": D.name, "variance": variance, "total_objects": E.n_ob},
                  bad)


def _find_mor(E, a, b, data):
    for k in E.hom(a, b):
        if E.mor_data[k] == data:
            return k
    raise LiftFailure("morphism not found")


def integration_roundtrip(fib, variance=None):
    """``grothendieck(fibre_transport(fib))`` compared with ``fib`` over the base."""
    variance = variance or getattr(fib, "variance", "covariant")
    T = fibre_transport(fib, variance)
    G = grothendieck(T, variance)
    E, D = fib.total, fib.base
    fibres = _Fibres(fib)
    GE = G.total
    ob_map = []
    for (d, x) in GE.ob_data:
        ob_map.append(fibres(d)[1].ob_map[x])
    mor_map = []
    for k, (m, xi) in enumerate(GE.mor_data):
        d, d2 = D.src[m], D.tgt[m]
        if variance == "contravariant":
            e2 = ob_map[GE.tgt[k]]
            v = fibres(d)[1].mor_map[xi]
            mor_map.append(E.comp(fib.cart_lift(m, e2), v))
        else:
            e = ob_map[GE.src[k]]
            v = fibres(d2)[1].mor_map[xi]
            mor_map.append(E.comp(v, fib.cocart_lift(m, e)))
    Phi = FunctorData(GE, E, ob_map, mor_map)
    try:
        check_functor(Phi)
    except NotAFunctor as exc:
        return Report("integration_roundtrip", "CAT_GROT_INT", False,
                      counterexample={"reason": exc.message, **exc.witness})
    if compose_functors(fib.proj, Phi) != G.proj:
        return Report("integration_roundtrip", "CAT_GROT_INT", False,
                      counterexample={"reason": "comparison not over the base"})
    eq = is_equivalence(Phi)
    lifts = G.cart if variance == "contravariant" else G.cocart
    for (f, e), m in sorted(lifts.items()):
        test = is_cartesian_lift if variance == "contravariant" else is_cocartesian_lift
        if not test(fib.proj, Phi.mor_map[m], f):
            return Report("integration_roundtrip", "CAT_GROT_INT", False,
                          counterexample={"reason": "lift not preserved", "f": D.morphisms[f]})
    return Report("integration_roundtrip", "CAT_GROT_INT", eq.holds,
                  {"isomorphism": is_isomorphism(Phi), "objects": GE.n_ob},
                  None if eq.holds else {"reason": "comparison is not an equivalence", **eq.witness})


def representable(D, x, name=None):
    """``d -> D(d, x)`` as a contravariant functor into discrete categories."""
    ob = [discrete_category([D.morphisms[m] for m in D.hom(d, x)], name=f"{D.objects[d]}->{D.objects[x]}")
          for d in range(D.n_ob)]
    pos = [{m: i for i, m in enumerate(D.hom(d, x))} for d in range(D.n_ob)]
    mor = []
    for m in range(D.n_mor):
        d, d2 = D.src[m], D.tgt[m]
        ob_map = [pos[d][D.comp(u, m)] for u in D.hom(d2, x)]
        mor.append(FunctorData(ob[d2], ob[d], ob_map, ob_map))
    return cat_pseudofunctor(D, ob, mor, contravariant=True, name=name or f"y({D.objects[x]})")


def slice_comparison(D, x):
    """Is the integral of the representable at ``x`` the slice ``D | x``?"""
    fib = grothendieck(representable(D, x))
    C, p1, _ = comma(identity_functor(D), FunctorData(_one(), D, [x], [D.ids[x]]))
    E = fib.total
    oi = {(e, a): i for i, (e, _, a) in enumerate(C.ob_data)}
    ob_map = []
    for d, i in E.ob_data:
        ob_map.append(oi[(d, D.hom(d, x)[i])])
    mi = {(C.src[k], C.tgt[k], u): k for k, (_, _, u, _) in enumerate(C.mor_data)}
    mor_map = [mi[(ob_map[E.src[k]], ob_map[E.tgt[k]], m)] for k, (m, _) in enumerate(E.mor_data)]
    F = check_functor(FunctorData(E, C, ob_map, mor_map))
    ok = is_isomorphism(F) and compose_functors(p1, F) == fib.proj
    return Report("representable_integral", "CAT_GROT_PROPS", ok,
                  {"objects": E.n_ob, "morphisms": E.n_mor, "at": D.objects[x]})


def _one():
    from corrcalc.fixtures import one
    return one()


# free fibrations ------------------------------------------------------------------
def free_cartesian(M, p, cap=DEFAULT_CAP):
    """``D |# E`` with its source projection and certified marked lifts.

    Returns ``(fibration, inclusion of E, projection to E)``.
    """
    S, proj, inc, to_e = marked_comma(M, p, cap=cap)
    fib = Fibration(proj, name=S.name)
    fib.variance = "contravariant"
    D = M.cat
    where = {(x, e, a): i for i, (x, e, a) in enumerate(S.ob_data)}
    for f in sorted(M.marking):
        for i in fib.objects_over(D.tgt[f]):
            x, e, a = S.ob_data[i]
            j = where[(D.src[f], e, D.comp(a, f))]
            cands = [k for k in S.hom(j, i) if proj.mor_map[k] == f
                     and to_e.mor_map[k] == p.source.ids[e]]
            if len(cands) != 1 or not is_cartesian_lift(proj, cands[0], f):
                raise LiftFailure("composite roof is not a Cartesian lift", f=D.morphisms[f],
                                  object=S.objects[i])
            fib.cart[(f, i)] = cands[0]
    fib.marking = M
    return fib, inc, to_e


def cartesian_morphisms(fib, marking):
    """Morphisms of the total category that are Cartesian over marked maps."""
    return [m for m in range(fib.total.n_mor)
            if fib.proj.mor_map[m] in marking and is_cartesian_lift(fib.proj, m, fib.proj.mor_map[m])]


def functors_over(C, pC, G, cap=DEFAULT_CAP, preserve=None):
    """Functors ``C -> G.total`` lying strictly over the base.

    ``preserve`` optionally lists morphisms of ``C`` that must land on
    Cartesian arrows of ``G``.
    """
    q = G.proj
    E = G.total
    cands = [[e for e in range(E.n_ob) if q.ob_map[e] == pC.ob_map[c]] for c in range(C.n_ob)]
    cart_ok = None
    if preserve:
        cart_ok = {m for m in range(E.n_mor) if is_cartesian_lift(q, m, q.mor_map[m])}
    pres = set(preserve or ())

    def allowed(m, n):
        if q.mor_map[n] != pC.mor_map[m]:
            return False
        return m not in pres or n in cart_ok

    return enumerate_functors(C, E, cap=cap, ob_cands=cands, mor_allowed=allowed)


def vertical_nats(F, G, fib):
    return [a for a in enumerate_nats(F, G)
            if all(fib.base.is_identity(fib.proj.mor_map[c]) for c in a.components)]


def freeness_report(free, inc, family, cap=DEFAULT_CAP, two_free=True):
    """Restriction along ``inc`` against each fibration of ``family``.

    Checks bijectivity on functors preserving marked Cartesian arrows and,
    when ``two_free``, on vertical transformations between them.
    """
    M = free.marking
    S = free.total
    pres = cartesian_morphisms(free, M.marking)
    pE = compose_functors(free.proj, inc)
    rows = []
    for G in family:
        big = functors_over(S, free.proj, G, cap=cap, preserve=pres)
        small = functors_over(inc.source, pE, G, cap=cap)
        restricted = [compose_functors(Phi, inc) for Phi in big]
        ok = len(set(restricted)) == len(restricted) and set(restricted) == set(small)
        hom_ok = True
        if ok and two_free:
            for Phi in big:
                for Psi in big:
                    a = vertical_nats(Phi, Psi, G)
                    b = vertical_nats(compose_functors(Phi, inc), compose_functors(Psi, inc), G)
                    ra = {tuple(x.components[i] for i in inc.ob_map) for x in a}
                    if len(ra) != len(a) or ra != {x.components for x in b}:
                        hom_ok = False
        rows.append({"family_member": G.name, "functors": len(big), "restricted": len(small),
                     "objects_bijective": ok, "homs_bijective": hom_ok})
        if not (ok and hom_ok):
            return Report("freeness", "CAT_FIB_FREE", False, {"checked": rows}, rows[-1])
    return Report("freeness", "CAT_FIB_FREE", True, {"checked": rows})


def target_projection(D):
    """``D^{Delta^1} -> D`` sending an arrow to its target."""
    from corrcalc.fixtures import arrow
    A = arrow()
    from corrcalc.fincat import functor_category
    FC = functor_category(A, D)
    one_ = A.ob("1")
    proj = FunctorData(FC, D, [F.ob_map[one_] for F in FC.ob_data],
                       [a.components[one_] for a in FC.mor_data])
    return Fibration(proj, name=f"{D.name}^arrow")


def free_bicartesian(M, p, cap=DEFAULT_CAP):
    """``(D |# E) | D`` with its target projection."""
    M = require_base_change(M)
    D = M.cat
    S, proj, inc, to_e = marked_comma(M, p, cap=cap)
    T, p1, p2 = comma(proj, identity_functor(D), cap=cap)
    fib = Fibration(p2, name=f"({S.name})|{D.name}")
    fib.inner = (S, proj, to_e)
    fib.marking = M
    E = p.source
    where = {(s, d, a): i for i, (s, d, a) in enumerate(T.ob_data)}
    sw = {(x, e, a): i for i, (x, e, a) in enumerate(S.ob_data)}
    ob_map = [where[(sw[(p.ob_map[e], e, D.ids[p.ob_map[e]])], p.ob_map[e], D.ids[p.ob_map[e]])]
              for e in range(E.n_ob)]
    mi = {(T.src[k], T.tgt[k], u, u2): k for k, (_, _, u, u2) in enumerate(T.mor_data)}
    mor_map = [mi[(ob_map[E.src[u]], ob_map[E.tgt[u]], inc.mor_map[u], p.mor_map[u])]
               for u in range(E.n_mor)]
    return fib, FunctorData(E, T, ob_map, mor_map)


# base change for fibrations ----------------------------------------------------------
def nu(fib, cone, f, g, u):
    """The comparison ``gt_! ft^! u -> f^! g_! u`` for one square and ``u``.

    ``f`` is marked, ``g`` arbitrary with common target, ``cone`` their
    certified pullback with legs ``(gt, ft)``; ``u`` lies over ``src g``.
    """
    E, D = fib.total, fib.base
    gt, ft = cone.legs
    c1 = fib.cart_lift(ft, u)
    c2 = fib.cocart_lift(g, u)
    if c1 is None or c2 is None:
        return None
    c3 = fib.cocart_lift(gt, E.src[c1])
    c4 = fib.cart_lift(f, E.tgt[c2])
    if c3 is None or c4 is None:
        return None
    m = fib.factor_cocart(c3, E.comp(c2, c1), f)
    return fib.factor_cart(c4, m, D.ids[D.src[f]])


def check_bicartesian_base_change(fib, M, plus=None):
    """Lifts for ``plus`` (co-Cartesian) and the marking (Cartesian), and
    invertibility of every comparison ``nu_u`` over certified squares."""
    M = require_base_change(M)
    D, E = fib.base, fib.total
    plus_set = set(range(D.n_mor)) if plus is None else set(plus)
    rep = check_fibration(fib, M.marking, "cartesian")
    if not rep.holds:
        return Report("bicartesian_base_change", "BIV_BICART_BASECHANGE", False,
                      rep.witness, {"reason": "missing Cartesian lift", **rep.counterexample})
    rep = check_fibration(fib, sorted(plus_set), "cocartesian")
    if not rep.holds:
        return Report("bicartesian_base_change", "BIV_BICART_BASECHANGE", False,
                      rep.witness, {"reason": "missing co-Cartesian lift", **rep.counterexample})
    n = 0
    for (f, g), cone in sorted(M.certificate.items()):
        if g not in plus_set or cone.legs[0] not in plus_set:
            continue
        for u in fib.objects_over(D.src[g]):
            n += 1
            v = nu(fib, cone, f, g, u)
            if v is None or not E.is_iso(v):
                return Report("bicartesian_base_change", "BIV_BICART_BASECHANGE", False,
                              {"checked": n},
                              {"reason": "comparison not invertible", "f": D.morphisms[f],
                               "g": D.morphisms[g], "object": E.objects[u],
                               "nu": None if v is None else E.morphisms[v]})
    return Report("bicartesian_base_change", "BIV_BICART_BASECHANGE", True, {"checked": n},
                  payload=fib)


# twisted fibrations -------------------------------------------------------------------
def _slice_lift(fib, kind, f, e, second):
    """Least (co)Cartesian lift whose image under ``second`` is an identity."""
    E = fib.total
    B2 = second.target
    test = is_cartesian_lift if kind == "cartesian" else is_cocartesian_lift
    for m in fib.over(f):
        end = E.tgt[m] if kind == "cartesian" else E.src[m]
        if end == e and B2.is_identity(second.mor_map[m]) and test(fib.proj, m, f):
            return m
    return None


def _is_bicartesian_transformation(Phi, src_fib, tgt_fib, MD):
    """Does ``Phi`` commute with the projections and preserve lifts?"""
    if compose_functors(tgt_fib.proj, Phi) != src_fib.proj:
        return "functor does not commute with the projections"
    for m in range(src_fib.total.n_mor):
        f = src_fib.proj.mor_map[m]
        if is_cocartesian_lift(src_fib.proj, m, f) and \
                not is_cocartesian_lift(tgt_fib.proj, Phi.mor_map[m], f):
            return f"co-Cartesian arrow {src_fib.total.morphisms[m]} not preserved"
        if f in MD.marking and is_cartesian_lift(src_fib.proj, m, f) and \
                not is_cartesian_lift(tgt_fib.proj, Phi.mor_map[m], f):
            return f"Cartesian arrow {src_fib.total.morphisms[m]} not preserved"
    return None


def check_twisted_bicartesian(p, MC, MD, base_change=True, corrupt=None):
    """Conditions i) to iv) for ``p : E -> C x D``.

    ``p`` must land in the product category built by
    :func:`~corrcalc.fincat.product_category` of ``MC.cat`` and ``MD.cat``.
    ``corrupt`` is a test hook replacing a fibre functor before checking.
    """
    E = p.source
    P = p.target
    C, D = MC.cat, MD.cat
    pc = FunctorData(E, C, [P.ob_data[x][0] for x in p.ob_map], [P.mor_data[m][0] for m in p.mor_map])
    pd = FunctorData(E, D, [P.ob_data[x][1] for x in p.ob_map], [P.mor_data[m][1] for m in p.mor_map])
    fibC = Fibration(pc, name=f"{E.name}->C")
    # i)
    for kind, fs in (("cartesian", range(C.n_mor)), ("cocartesian", sorted(MC.marking))):
        for f in fs:
            anchor = C.tgt[f] if kind == "cartesian" else C.src[f]
            for e in fibC.objects_over(anchor):
                m = _slice_lift(fibC, kind, f, e, pd)
                if m is None:
                    return Report("twisted_bicartesian", "BIV_TWIST_DEF", False,
                                  counterexample={"condition": "i", "kind": kind,
                                                  "f": C.morphisms[f], "object": E.objects[e]})
                (fibC.cart if kind == "cartesian" else fibC.cocart)[(f, e)] = m
    # ii)
    fibres = _Fibres(fibC)
    fibre_fibs = {}
    for c in range(C.n_ob):
        Ec, inc, _, _ = fibres(c)
        pcd = FunctorData(Ec, D, [pd.ob_map[e] for e in inc.ob_map], [pd.mor_map[m] for m in inc.mor_map])
        ff = Fibration(pcd, name=f"{E.name}[{C.objects[c]}]")
        rep = check_fibration(ff, MD.marking, "both")
        if not rep.holds:
            return Report("twisted_bicartesian", "BIV_TWIST_DEF", False,
                          counterexample={"condition": "ii", "fibre": C.objects[c],
                                          **rep.counterexample})
        if base_change:
            rep = check_bicartesian_base_change(ff, MD)
            if not rep.holds:
                return Report("twisted_bicartesian", "BIV_TWIST_DEF", False,
                              counterexample={"condition": "ii", "fibre": C.objects[c],
                                              **rep.counterexample})
        fibre_fibs[c] = ff
    # iii) and iv)
    for cond, kind, fs in (("iii", "contravariant", range(C.n_mor)),
                           ("iv", "covariant", sorted(MC.marking))):
        for f in fs:
            Phi = transport_functor(fibC, f, kind, fibres)
            if corrupt is not None:
                Phi = corrupt(cond, f, Phi) or Phi
            s, t = (C.tgt[f], C.src[f]) if kind == "contravariant" else (C.src[f], C.tgt[f])
            try:
                check_functor(Phi)
            except NotAFunctor as exc:
                return Report("twisted_bicartesian", "BIV_TWIST_DEF", False,
                              counterexample={"condition": cond, "f": C.morphisms[f],
                                              "reason": exc.message})
            why = _is_bicartesian_transformation(Phi, fibre_fibs[s], fibre_fibs[t], MD)
            if why:
                return Report("twisted_bicartesian", "BIV_TWIST_DEF", False,
                              counterexample={"condition": cond, "f": C.morphisms[f],
                                              "reason": why})
    return Report("twisted_bicartesian", "BIV_TWIST_DEF", True,
                  {"objects": E.n_ob, "morphisms": E.n_mor,
                   "conditions": ["i", "ii", "iii", "iv"]})


def universal_span(M, cap=DEFAULT_CAP):
    """``D^Lambda`` with ``(pr0, pr1) : D^Lambda -> D x D``.

    Objects are spans ``x <- w -> y`` in the order of
    :func:`~corrcalc.span.span_category` per pair of feet.
    """
    from corrcalc.fincat import product_category
    D = M.cat
    P, _, _ = product_category(D, D)
    S, proj, inc, to_e = marked_comma(M, identity_functor(D), cap=cap)
    T, p1, p2 = comma(proj, identity_functor(D), cap=cap)
    # object of T: (s, y, b) with s = (w, x, a : w -> x marked), b : w -> y
    ob_map = []
    for s, y, b in T.ob_data:
        w, x, a = S.ob_data[s]
        ob_map.append(x * D.n_ob + y)
    mor_map = []
    for k, (i, j, u, u2) in enumerate(T.mor_data):
        si, sj, v, v2 = S.mor_data[u]
        # S morphism data indexes the unrestricted comma; its second entry is the map of feet
        mor_map.append(v2 * D.n_mor + u2)
    pr = FunctorData(T, P, ob_map, mor_map)
    check_functor(pr)
    return pr


def integral_marking(I, fibres_, transitions, name=None):
    """Contravariant integral of a family of marked categories.

    ``fibres_[i]`` is a MarkedCat and ``transitions[u]`` a functor
    ``fibres_[j].cat -> fibres_[i].cat`` for ``u : i -> j``. The total is
    marked by the union of the fibre markings over identities.
    """
    F = cat_pseudofunctor(I, [M.cat for M in fibres_], transitions, contravariant=True,
                          name=name or "family")
    fib = grothendieck(F)
    E = fib.total
    S = []
    for k, (u, xi) in enumerate(E.mor_data):
        if I.is_identity(u):
            i = I.src[u]
            if xi in fibres_[i].marking:
                S.append(k)
    M = validate_marking(E, S, name=name or f"{E.name}-marked")
    from corrcalc.marked import has_base_change
    rep = has_base_change(M)
    return rep.payload if rep.holds else M, rep
