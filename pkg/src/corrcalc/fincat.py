"""Finite strictly presented categories, functors and natural transformations.

A :class:`FinCat` stores its objects and morphisms in a fixed order and keeps
the whole composition table. Everything downstream refers to objects and
morphisms by their integer position in that order, which is also the
canonical order used to break ties in limit and lift searches.
"""
from array import array
from dataclasses import dataclass
import json

from corrcalc._kernels_select import kernels, py_kernels
from corrcalc.errors import (
    CompositionGap, DuplicateName, IdentityLawFailure, IncoherentComposite,
    MalformedInput, MissingIdentity, NoLimit, NonAssociative, NotAFunctor,
    NotNatural, SizeCap,
)

DEFAULT_CAP = 10_000
DENSE_LIMIT = 4096


class FinCat:
    """A finite category given by its full composition table.

    ``objects`` and ``morphisms`` are name lists; ``src``, ``tgt`` and
    ``ids`` are integer lists and ``comp`` maps ``(g, f)`` to ``g o f`` for
    every composable pair. ``ob_data``/``mor_data`` optionally hold the
    structured values a constructed category was built from.
    """

    def __init__(self, objects, morphisms, src, tgt, ids, comp,
                 ob_data=None, mor_data=None, name=None):
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        self.src = tuple(src)
        self.tgt = tuple(tgt)
        self.ids = tuple(ids)
        self.comp_table = comp
        self.ob_data = ob_data
        self.mor_data = mor_data
        self.name = name
        self.ob_index = {o: i for i, o in enumerate(self.objects)}
        self.mor_index = {m: i for i, m in enumerate(self.morphisms)}
        if len(self.ob_index) != len(self.objects):
            raise DuplicateName("duplicate object name", name=_first_dup(self.objects))
        if len(self.mor_index) != len(self.morphisms):
            raise DuplicateName("duplicate morphism name", name=_first_dup(self.morphisms))
        homs = {}
        outs = [[] for _ in self.objects]
        ins = [[] for _ in self.objects]
        for m, (x, y) in enumerate(zip(self.src, self.tgt)):
            homs.setdefault((x, y), []).append(m)
            outs[x].append(m)
            ins[y].append(m)
        self._hom = {k: tuple(v) for k, v in homs.items()}
        self.out_mors = tuple(tuple(v) for v in outs)
        self.in_mors = tuple(tuple(v) for v in ins)
        self._inverse = None
        self._key = None
        self._dense = None

    # basic access -------------------------------------------------------
    @property
    def n_ob(self):
        return len(self.objects)

    @property
    def n_mor(self):
        return len(self.morphisms)

    def ob(self, name):
        return self.ob_index[name]

    def mor(self, name):
        return self.mor_index[name]

    def hom(self, x, y):
        return self._hom.get((x, y), ())

    def comp(self, g, f):
        return self.comp_table[(g, f)]

    def chain(self, *ms):
        """Compose ``ms[0] o ms[1] o ... o ms[-1]``."""
        r = ms[-1]
        for m in reversed(ms[:-1]):
            r = self.comp_table[(m, r)]
        return r

    def is_identity(self, f):
        return self.ids[self.src[f]] == f

    def inverse(self, f):
        """The inverse of ``f`` or None."""
        if self._inverse is None:
            inv = [None] * self.n_mor
            for f2 in range(self.n_mor):
                x, y = self.src[f2], self.tgt[f2]
                for g in self.hom(y, x):
                    if self.comp_table[(g, f2)] == self.ids[x] and self.comp_table[(f2, g)] == self.ids[y]:
                        inv[f2] = g
                        break
            self._inverse = inv
        return self._inverse[f]

    def is_iso(self, f):
        return self.inverse(f) is not None

    def isomorphic(self, x, y):
        return any(self.is_iso(f) for f in self.hom(x, y))

    def composable_pairs(self):
        for g in range(self.n_mor):
            for f in self.in_mors[self.src[g]]:
                yield g, f

    # equality -----------------------------------------------------------
    def key(self):
        if self._key is None:
            self._key = (self.objects, self.morphisms, self.src, self.tgt, self.ids,
                         tuple(sorted(self.comp_table.items())))
        return self._key

    def __eq__(self, other):
        return isinstance(other, FinCat) and (self is other or self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        label = self.name or "FinCat"
        return f"<{label}: {self.n_ob} objects, {self.n_mor} morphisms>"

    # kernels ------------------------------------------------------------
    def dense(self):
        """Flat ``array('i')`` composition table, -1 where undefined."""
        if self._dense is None:
            n = self.n_mor
            if n > DENSE_LIMIT:
                raise SizeCap("category too large for a dense table", morphisms=n)
            t = array('i', [-1]) * (n * n)
            for (g, f), h in self.comp_table.items():
                t[g * n + f] = h
            self._dense = t
        return self._dense

    def csr_in(self):
        ptr, idx = array('i', [0]), array('i')
        for y in range(self.n_ob):
            idx.extend(self.in_mors[y])
            ptr.append(len(idx))
        return ptr, idx

    def csr_hom(self):
        ptr, idx = array('i', [0]), array('i')
        for x in range(self.n_ob):
            for y in range(self.n_ob):
                idx.extend(self.hom(x, y))
                ptr.append(len(idx))
        return ptr, idx

    def name_of(self, f):
        return self.morphisms[f]


def _first_dup(names):
    seen = set()
    for n in names:
        if n in seen:
            return n
        seen.add(n)
    return None


# construction and validation -------------------------------------------
def make_category(objects, morphisms, identities, compose, name=None):
    """Build a FinCat from names without checking the laws.

    ``morphisms`` is a list of ``(name, src, tgt)``; ``identities`` maps an
    object name to a morphism name; ``compose`` lists ``(g, f, gf)`` names.
    """
    objects = list(objects)
    ob_index = {}
    for o in objects:
        if o in ob_index:
            raise DuplicateName("duplicate object name", name=o)
        ob_index[o] = len(ob_index)
    mnames, src, tgt = [], [], []
    mor_index = {}
    for m, s, t in morphisms:
        if m in mor_index:
            raise DuplicateName("duplicate morphism name", name=m)
        if s not in ob_index or t not in ob_index:
            raise MalformedInput("morphism endpoint is not an object", morphism=m)
        mor_index[m] = len(mnames)
        mnames.append(m)
        src.append(ob_index[s])
        tgt.append(ob_index[t])
    ids = []
    for o in objects:
        if o not in identities:
            raise MissingIdentity("object has no identity", object=o)
        i = identities[o]
        if i not in mor_index:
            raise MalformedInput("identity is not a morphism", object=o, morphism=i)
        i = mor_index[i]
        if src[i] != ob_index[o] or tgt[i] != ob_index[o]:
            raise MissingIdentity("identity is not an endomorphism of its object", object=o)
        ids.append(i)
    for o in identities:
        if o not in ob_index:
            raise MalformedInput("identity for unknown object", object=o)
    comp = {}
    for entry in compose:
        if len(entry) != 3:
            raise MalformedInput("compose entries are [g, f, gf] triples", entry=list(entry))
        g, f, gf = entry
        for m in (g, f, gf):
            if m not in mor_index:
                raise MalformedInput("unknown morphism in compose", morphism=m)
        gi, fi, hi = mor_index[g], mor_index[f], mor_index[gf]
        if tgt[fi] != src[gi]:
            raise MalformedInput("compose entry for a non-composable pair", g=g, f=f)
        if (gi, fi) in comp and comp[(gi, fi)] != hi:
            raise MalformedInput("conflicting compose entries", g=g, f=f)
        comp[(gi, fi)] = hi
    return FinCat(objects, mnames, src, tgt, ids, comp, name=name)


def check_category(C):
    """Raise the first law violation of ``C`` in canonical order."""
    for g in range(C.n_mor):
        for f in C.in_mors[C.src[g]]:
            if (g, f) not in C.comp_table:
                raise CompositionGap("composable pair has no composite",
                                     g=C.morphisms[g], f=C.morphisms[f])
    if C.n_mor <= DENSE_LIMIT:
        ptr, idx = C.csr_in()
        code, a, b, c = kernels.check_laws(
            C.n_mor, array('i', C.src), array('i', C.tgt), array('i', C.ids),
            C.dense(), ptr, idx)
    else:
        code, a, b, c = _check_laws_sparse(C)
    names = C.morphisms
    if code == 1:
        raise IdentityLawFailure("identity law fails", g=names[a], f=names[b],
                                 composite=names[c] if c >= 0 else None)
    if code == 2:
        raise IncoherentComposite("composite has wrong endpoints", g=names[a], f=names[b],
                                  composite=names[c])
    if code == 3:
        raise NonAssociative("associativity fails", h=names[a], g=names[b], f=names[c])
    return C


def _check_laws_sparse(C):
    comp = C.comp_table
    for f in range(C.n_mor):
        it, is_ = C.ids[C.tgt[f]], C.ids[C.src[f]]
        if comp[(it, f)] != f:
            return (1, it, f, comp[(it, f)])
        if comp[(f, is_)] != f:
            return (1, f, is_, comp[(f, is_)])
    for g in range(C.n_mor):
        for f in C.in_mors[C.src[g]]:
            h = comp[(g, f)]
            if C.src[h] != C.src[f] or C.tgt[h] != C.tgt[g]:
                return (2, g, f, h)
    for h in range(C.n_mor):
        for g in C.in_mors[C.src[h]]:
            hg = comp[(h, g)]
            for f in C.in_mors[C.src[g]]:
                if comp[(hg, f)] != comp[(h, comp[(g, f)])]:
                    return (3, h, g, f)
    return (0, -1, -1, -1)


FINCAT_KEYS = {"objects", "morphisms", "identities", "compose", "marked", "name", "format"}


def validate_category(raw):
    """Parse a fincat-v1 dictionary and check every law exhaustively."""
    if not isinstance(raw, dict):
        raise MalformedInput("category description must be a JSON object")
    unknown = sorted(set(raw) - FINCAT_KEYS)
    if unknown:
        raise MalformedInput("unknown keys", keys=unknown)
    for k in ("objects", "morphisms", "identities", "compose"):
        if k not in raw:
            raise MalformedInput("missing key", key=k)
    if raw.get("format", "fincat-v1") != "fincat-v1":
        raise MalformedInput("unsupported format", format=raw.get("format"))
    try:
        objects = [str(o) for o in raw["objects"]]
        morphisms = []
        for m in raw["morphisms"]:
            if set(m) - {"name", "src", "tgt"}:
                raise MalformedInput("unknown morphism keys", keys=sorted(set(m) - {"name", "src", "tgt"}))
            morphisms.append((str(m["name"]), str(m["src"]), str(m["tgt"])))
        identities = {str(k): str(v) for k, v in raw["identities"].items()}
        compose = [tuple(str(x) for x in e) for e in raw["compose"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise MalformedInput("malformed category description", detail=str(exc))
    C = make_category(objects, morphisms, identities, compose, name=raw.get("name"))
    return check_category(C)


def category_to_json(C, marking=None):
    out = {
        "objects": list(C.objects),
        "morphisms": [{"name": C.morphisms[m], "src": C.objects[C.src[m]],
                       "tgt": C.objects[C.tgt[m]]} for m in range(C.n_mor)],
        "identities": {C.objects[x]: C.morphisms[C.ids[x]] for x in range(C.n_ob)},
        "compose": [[C.morphisms[g], C.morphisms[f], C.morphisms[h]]
                    for (g, f), h in sorted(C.comp_table.items())],
    }
    if marking is not None:
        out["marked"] = [C.morphisms[m] for m in sorted(marking)]
    return out


def load_category(path):
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInput("not valid JSON", detail=str(exc))
    return validate_category(raw), raw


def from_generators(objects, arrows, relations=(), name=None):
    """Category from objects, named arrows and the full composite list.

    Small helper for fixtures: ``arrows`` lists non-identity morphisms as
    ``(name, src, tgt)``; ``relations`` lists every non-trivial composite
    ``(g, f, gf)``. Identities are ``id_<object>``.
    """
    morphisms = [(f"id_{o}", o, o) for o in objects] + list(arrows)
    identities = {o: f"id_{o}" for o in objects}
    compose = []
    for name_, s, t in morphisms:
        compose.append((f"id_{t}", name_, name_))
        if s != t or not name_.startswith("id_"):
            compose.append((name_, f"id_{s}", name_))
    compose.extend(relations)
    seen = {}
    for g, f, gf in compose:
        seen[(g, f)] = gf
    return check_category(make_category(objects, morphisms, identities,
                                        [(g, f, gf) for (g, f), gf in seen.items()], name=name))


def poset_category(elements, leq, name=None, fmt=None):
    """The category of a finite preorder; ``leq(a, b)`` decides ``a <= b``."""
    fmt = fmt or str
    objs = [fmt(e) for e in elements]
    mors, src, tgt, index = [], [], [], {}
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            if leq(a, b):
                index[(i, j)] = len(mors)
                mors.append(f"{objs[i]}<={objs[j]}")
                src.append(i)
                tgt.append(j)
    ids = [index[(i, i)] for i in range(len(elements))]
    comp = {}
    for (i, j), f in index.items():
        for (j2, k), g in index.items():
            if j2 == j:
                comp[(g, f)] = index[(i, k)]
    return FinCat(objs, mors, src, tgt, ids, comp, ob_data=list(elements), name=name)


# functors ---------------------------------------------------------------
class FunctorData:
    """A functor between finite categories, stored as index maps."""

    __slots__ = ("source", "target", "ob_map", "mor_map", "_key")

    def __init__(self, source, target, ob_map, mor_map):
        self.source = source
        self.target = target
        self.ob_map = tuple(ob_map)
        self.mor_map = tuple(mor_map)
        self._key = None

    def ob(self, x):
        return self.ob_map[x]

    def __call__(self, f):
        return self.mor_map[f]

    def key(self):
        if self._key is None:
            self._key = (self.source.key(), self.target.key(), self.ob_map, self.mor_map)
        return self._key

    def __eq__(self, other):
        return isinstance(other, FunctorData) and (
            self is other or (self.ob_map == other.ob_map and self.mor_map == other.mor_map
                              and self.source == other.source and self.target == other.target))

    def __hash__(self):
        return hash((self.ob_map, self.mor_map))

    def __repr__(self):
        S, T = self.source, self.target
        return "Functor(" + ", ".join(f"{S.objects[x]}->{T.objects[y]}"
                                      for x, y in enumerate(self.ob_map)) + ")"

    def then(self, G):
        """``G o self``."""
        return compose_functors(G, self)


def check_functor(F):
    C, D = F.source, F.target
    if len(F.ob_map) != C.n_ob or len(F.mor_map) != C.n_mor:
        raise NotAFunctor("maps are not total")
    for x in range(C.n_ob):
        if F.mor_map[C.ids[x]] != D.ids[F.ob_map[x]]:
            raise NotAFunctor("identity not preserved", object=C.objects[x])
    for m in range(C.n_mor):
        fm = F.mor_map[m]
        if D.src[fm] != F.ob_map[C.src[m]] or D.tgt[fm] != F.ob_map[C.tgt[m]]:
            raise NotAFunctor("endpoints not preserved", morphism=C.morphisms[m])
    for (g, f), h in C.comp_table.items():
        if D.comp(F.mor_map[g], F.mor_map[f]) != F.mor_map[h]:
            raise NotAFunctor("composition not preserved", g=C.morphisms[g], f=C.morphisms[f])
    return F


def identity_functor(C):
    return FunctorData(C, C, range(C.n_ob), range(C.n_mor))


def const_functor(C, D, d):
    return FunctorData(C, D, [d] * C.n_ob, [D.ids[d]] * C.n_mor)


def compose_functors(G, F):
    """``G o F``."""
    return FunctorData(F.source, G.target, [G.ob_map[y] for y in F.ob_map],
                       [G.mor_map[m] for m in F.mor_map])


def functor_from_json(raw, source, target):
    unknown = sorted(set(raw) - {"source", "target", "ob_map", "mor_map"})
    if unknown:
        raise MalformedInput("unknown keys", keys=unknown)
    try:
        ob_map = [target.ob(str(raw["ob_map"][o])) for o in source.objects]
        mor_map = [target.mor(str(raw["mor_map"][m])) for m in source.morphisms]
    except KeyError as exc:
        raise MalformedInput("functor maps are not total or name unknown cells", detail=str(exc))
    return check_functor(FunctorData(source, target, ob_map, mor_map))


def functor_to_json(F):
    S, T = F.source, F.target
    return {
        "ob_map": {S.objects[x]: T.objects[y] for x, y in enumerate(F.ob_map)},
        "mor_map": {S.morphisms[m]: T.morphisms[n] for m, n in enumerate(F.mor_map)},
    }


# natural transformations ------------------------------------------------
class NatTransData:
    """A natural transformation ``source => target`` given by components."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.components = tuple(components)

    def __getitem__(self, x):
        return self.components[x]

    def __eq__(self, other):
        return (isinstance(other, NatTransData) and self.components == other.components
                and self.source == other.source and self.target == other.target)

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"Nat{self.components}"


def check_natural(alpha):
    F, G = alpha.source, alpha.target
    C, D = F.source, F.target
    for x in range(C.n_ob):
        a = alpha.components[x]
        if D.src[a] != F.ob_map[x] or D.tgt[a] != G.ob_map[x]:
            raise NotNatural("component has wrong endpoints", object=C.objects[x])
    for m in range(C.n_mor):
        x, y = C.src[m], C.tgt[m]
        if D.comp(G.mor_map[m], alpha.components[x]) != D.comp(alpha.components[y], F.mor_map[m]):
            raise NotNatural("naturality square fails", morphism=C.morphisms[m])
    return alpha


def identity_nat(F):
    D = F.target
    return NatTransData(F, F, [D.ids[y] for y in F.ob_map])


def vcomp(beta, alpha):
    """Vertical composite ``beta . alpha``."""
    D = alpha.source.target
    return NatTransData(alpha.source, beta.target,
                        [D.comp(b, a) for b, a in zip(beta.components, alpha.components)])


def whisker_left(H, alpha):
    """``H alpha``: postcompose a transformation with a functor."""
    return NatTransData(compose_functors(H, alpha.source), compose_functors(H, alpha.target),
                        [H.mor_map[a] for a in alpha.components])


def whisker_right(alpha, K):
    """``alpha K``: precompose a transformation with a functor."""
    return NatTransData(compose_functors(alpha.source, K), compose_functors(alpha.target, K),
                        [alpha.components[K.ob_map[x]] for x in range(K.source.n_ob)])


def hcomp_nat(beta, alpha):
    """Horizontal composite ``beta * alpha : G F => G' F'``."""
    G2 = beta.target
    return vcomp(whisker_left(G2, alpha), whisker_right(beta, alpha.source))


def inverse_nat(alpha):
    D = alpha.source.target
    inv = []
    for a in alpha.components:
        b = D.inverse(a)
        if b is None:
            return None
        inv.append(b)
    return NatTransData(alpha.target, alpha.source, inv)


def is_invertible_nat(alpha):
    D = alpha.source.target
    return all(D.is_iso(a) for a in alpha.components)


# derived categories -----------------------------------------------------
def opposite(C):
    comp = {(f, g): h for (g, f), h in C.comp_table.items()}
    name = None
    if C.name:
        name = C.name[:-3] if C.name.endswith("^op") else C.name + "^op"
    return FinCat(C.objects, C.morphisms, C.tgt, C.src, C.ids, comp,
                  ob_data=C.ob_data, mor_data=C.mor_data, name=name)


def opposite_functor(F, source_op=None, target_op=None):
    return FunctorData(source_op or opposite(F.source), target_op or opposite(F.target),
                       F.ob_map, F.mor_map)


def product_category(C, D, name=None):
    """``C x D`` with names ``(x,y)`` and the two projections."""
    objs = [f"({a},{b})" for a in C.objects for b in D.objects]
    nD, mD = D.n_ob, D.n_mor
    mors = [f"({f},{g})" for f in C.morphisms for g in D.morphisms]
    src = [C.src[f] * nD + D.src[g] for f in range(C.n_mor) for g in range(mD)]
    tgt = [C.tgt[f] * nD + D.tgt[g] for f in range(C.n_mor) for g in range(mD)]
    ids = [C.ids[x] * mD + D.ids[y] for x in range(C.n_ob) for y in range(nD)]
    comp = {}
    for (f2, f1), f in C.comp_table.items():
        for (g2, g1), g in D.comp_table.items():
            comp[(f2 * mD + g2, f1 * mD + g1)] = f * mD + g
    ob_data = [(x, y) for x in range(C.n_ob) for y in range(nD)]
    mor_data = [(f, g) for f in range(C.n_mor) for g in range(mD)]
    P = FinCat(objs, mors, src, tgt, ids, comp, ob_data=ob_data, mor_data=mor_data,
               name=name or f"{C.name or 'C'}x{D.name or 'D'}")
    p1 = FunctorData(P, C, [x for x, _ in ob_data], [f for f, _ in mor_data])
    p2 = FunctorData(P, D, [y for _, y in ob_data], [g for _, g in mor_data])
    return P, p1, p2


def subcategory(C, obs, mors, name=None):
    """The subcategory on the given object and morphism indices.

    Returns the subcategory and its inclusion functor; closure is assumed.
    """
    obs = sorted(obs)
    mors = sorted(set(mors) | {C.ids[x] for x in obs})
    oi = {x: i for i, x in enumerate(obs)}
    mi = {m: i for i, m in enumerate(mors)}
    comp = {}
    for g in mors:
        for f in mors:
            if C.src[g] == C.tgt[f]:
                comp[(mi[g], mi[f])] = mi[C.comp(g, f)]
    S = FinCat([C.objects[x] for x in obs], [C.morphisms[m] for m in mors],
               [oi[C.src[m]] for m in mors], [oi[C.tgt[m]] for m in mors],
               [mi[C.ids[x]] for x in obs], comp,
               ob_data=[C.ob_data[x] for x in obs] if C.ob_data else None,
               mor_data=[C.mor_data[m] for m in mors] if C.mor_data else None,
               name=name)
    return S, FunctorData(S, C, obs, mors)


def full_subcategory(C, obs, name=None):
    obs = set(obs)
    mors = [m for m in range(C.n_mor) if C.src[m] in obs and C.tgt[m] in obs]
    return subcategory(C, obs, mors, name=name)


def discrete_category(names, name=None):
    names = list(names)
    return FinCat(names, [f"id_{n}" for n in names], range(len(names)), range(len(names)),
                  range(len(names)), {(i, i): i for i in range(len(names))},
                  ob_data=list(names), name=name)


def comma(F, G, cap=DEFAULT_CAP, name=None):
    """The comma category ``F | G`` with its two projections.

    Objects are ``(e, e', a : F e -> G e')``; a morphism ``(u, u')`` is
    admissible when ``G(u') a1 = a2 F(u)``.
    """
    E, E2, D = F.source, G.source, F.target
    obs = []
    for e in range(E.n_ob):
        for e2 in range(E2.n_ob):
            for a in D.hom(F.ob_map[e], G.ob_map[e2]):
                obs.append((e, e2, a))
                if len(obs) > cap:
                    raise SizeCap("comma category has too many objects", cap=cap)
    by_pair = {}
    for i, (e, e2, a) in enumerate(obs):
        by_pair.setdefault((e, e2), []).append(i)
    mors, mdata, src, tgt = [], [], [], []
    index = {}
    for i, (e, e2, a) in enumerate(obs):
        for j, (f_, f2, b) in enumerate(obs):
            for u in E.hom(e, f_):
                Fu = F.mor_map[u]
                rhs = D.comp(b, Fu)
                for u2 in E2.hom(e2, f2):
                    if D.comp(G.mor_map[u2], a) == rhs:
                        index[(i, u, u2)] = len(mors)
                        mdata.append((i, j, u, u2))
                        mors.append(f"({E.morphisms[u]},{E2.morphisms[u2]}):{D.morphisms[a]}->{D.morphisms[b]}")
                        src.append(i)
                        tgt.append(j)
                        if len(mors) > cap:
                            raise SizeCap("comma category has too many morphisms", cap=cap)
    ids = [index[(i, E.ids[e], E2.ids[e2])] for i, (e, e2, _) in enumerate(obs)]
    comp = {}
    outs = {}
    for k, (i, j, u, u2) in enumerate(mdata):
        outs.setdefault(i, []).append(k)
    for k, (i, j, u, u2) in enumerate(mdata):
        for l in outs.get(j, ()):
            _, j2, v, v2 = mdata[l]
            comp[(l, k)] = index[(i, E.comp(v, u), E2.comp(v2, u2))]
    onames = [f"({E.objects[e]},{E2.objects[e2]},{D.morphisms[a]})" for e, e2, a in obs]
    C = FinCat(onames, mors, src, tgt, ids, comp, ob_data=obs, mor_data=mdata, name=name)
    p1 = FunctorData(C, E, [e for e, _, _ in obs], [u for _, _, u, _ in mdata])
    p2 = FunctorData(C, E2, [e2 for _, e2, _ in obs], [u2 for _, _, _, u2 in mdata])
    return C, p1, p2


# functor enumeration ------------------------------------------------------
def enumerate_functors(C, D, cap=DEFAULT_CAP, ob_cands=None, mor_allowed=None, use_py=False):
    """All functors ``C -> D`` in canonical order.

    ``ob_cands`` optionally restricts the image of each object (list of
    candidate lists) and ``mor_allowed(m, n)`` filters images of morphisms.
    Canonical order is lexicographic in ``(ob_map, mor_map)``.
    """
    k = py_kernels if use_py else kernels
    steps_kind, steps_item, pos_of = array('i'), array('i'), {}
    placed_obs = set()
    nonid = [m for m in range(C.n_mor) if not C.is_identity(m)]
    for x in range(C.n_ob):
        steps_kind.append(0)
        steps_item.append(x)
        pos_of[("o", x)] = len(steps_kind) - 1
        placed_obs.add(x)
        for m in nonid:
            if ("m", m) not in pos_of and C.src[m] in placed_obs and C.tgt[m] in placed_obs:
                steps_kind.append(1)
                steps_item.append(m)
                pos_of[("m", m)] = len(steps_kind) - 1

    def pos(m):
        if C.is_identity(m):
            return pos_of[("o", C.src[m])]
        return pos_of[("m", m)]

    cons = [[] for _ in range(len(steps_kind))]
    for (g, f), h in sorted(C.comp_table.items()):
        if C.is_identity(g) or C.is_identity(f):
            continue
        cons[max(pos(g), pos(f), pos(h))].append((g, f, h))
    cons_ptr, cg, cf, cgf = array('i', [0]), array('i'), array('i'), array('i')
    for lst in cons:
        for g, f, h in lst:
            cg.append(g)
            cf.append(f)
            cgf.append(h)
        cons_ptr.append(len(cg))
    ob_ptr, ob_c = array('i', [0]), array('i')
    for x in range(C.n_ob):
        cands = range(D.n_ob) if ob_cands is None else sorted(ob_cands[x])
        ob_c.extend(cands)
        ob_ptr.append(len(ob_c))
    if mor_allowed is None:
        mask = array('b')
    else:
        mask = array('b', [0]) * (C.n_mor * D.n_mor)
        for m in range(C.n_mor):
            for n in range(D.n_mor):
                if mor_allowed(m, n):
                    mask[m * D.n_mor + n] = 1
    hptr, hidx = D.csr_hom()
    res = k.enumerate_functors(
        len(steps_kind), steps_kind, steps_item, cons_ptr, cg, cf, cgf,
        array('i', C.src), array('i', C.tgt), array('i', C.ids), C.n_ob, C.n_mor,
        ob_ptr, ob_c, mask, D.n_ob, D.n_mor, D.dense() if D.n_mor else array('i'),
        array('i', D.ids), hptr, hidx, cap)
    if res is None:
        raise SizeCap("too many functors", cap=cap, source=C.name, target=D.name)
    out = []
    for mm in res:
        ob_map = [D.src[mm[C.ids[x]]] for x in range(C.n_ob)]
        out.append(FunctorData(C, D, ob_map, mm))
    out.sort(key=lambda F: (F.ob_map, F.mor_map))
    return out


def enumerate_nats(F, G, cap=DEFAULT_CAP):
    """All natural transformations ``F => G``, lexicographic in components."""
    C, D = F.source, F.target
    n = C.n_ob
    if n == 0:
        return [NatTransData(F, G, [])]
    checks = [[] for _ in range(n)]
    for m in range(C.n_mor):
        checks[max(C.src[m], C.tgt[m])].append(m)
    out = []
    comps = [None] * n

    def rec(x):
        for a in D.hom(F.ob_map[x], G.ob_map[x]):
            comps[x] = a
            ok = True
            for m in checks[x]:
                if D.comp(G.mor_map[m], comps[C.src[m]]) != D.comp(comps[C.tgt[m]], F.mor_map[m]):
                    ok = False
                    break
            if not ok:
                continue
            if x == n - 1:
                out.append(NatTransData(F, G, comps))
                if len(out) > cap:
                    raise SizeCap("too many natural transformations", cap=cap)
            else:
                rec(x + 1)

    rec(0)
    return out


def functor_category(C, D, cap=DEFAULT_CAP, name=None):
    """``Fun(C, D)``: functors in canonical order and all transformations."""
    functors = enumerate_functors(C, D, cap=cap)
    mors, mdata, src, tgt = [], [], [], []
    ids = [None] * len(functors)
    by_pair = {}
    for i, F in enumerate(functors):
        for j, G in enumerate(functors):
            for a in enumerate_nats(F, G, cap=cap):
                k = len(mors)
                by_pair[(i, j, a.components)] = k
                mdata.append(a)
                src.append(i)
                tgt.append(j)
                mors.append(f"F{i}=>F{j}[" + ",".join(D.morphisms[c] for c in a.components) + "]")
                if i == j and all(D.is_identity(c) for c in a.components):
                    ids[i] = k
                if len(mors) > cap:
                    raise SizeCap("functor category exceeds the cap", cap=cap)
    comp = {}
    outs = {}
    for k, s in enumerate(src):
        outs.setdefault(s, []).append(k)
    for k in range(len(mors)):
        for l in outs.get(tgt[k], ()):
            b = vcomp(mdata[l], mdata[k])
            comp[(l, k)] = by_pair[(src[k], tgt[l], b.components)]
    return FinCat([f"F{i}" for i in range(len(functors))], mors, src, tgt, ids, comp,
                  ob_data=functors, mor_data=mdata,
                  name=name or f"Fun({C.name or 'C'},{D.name or 'D'})")


def evaluation_functor(FC, x):
    """Evaluation at object ``x`` from a functor category built above."""
    D = FC.ob_data[0].target if FC.ob_data else None
    return FunctorData(FC, D, [F.ob_map[x] for F in FC.ob_data],
                       [a.components[x] for a in FC.mor_data])


# equivalences -------------------------------------------------------------
@dataclass
class EquivalenceReport:
    fully_faithful: bool
    essentially_surjective: bool
    quasi_inverse: object = None
    witness: dict = None

    @property
    def holds(self):
        return self.fully_faithful and self.essentially_surjective

    def __bool__(self):
        return self.holds


def is_equivalence(F):
    C, D = F.source, F.target
    witness = {}
    ff = True
    for x in range(C.n_ob):
        for y in range(C.n_ob):
            images = [F.mor_map[m] for m in C.hom(x, y)]
            target = D.hom(F.ob_map[x], F.ob_map[y])
            if len(set(images)) != len(images) or len(images) != len(target):
                ff = False
                witness.setdefault("hom_mismatch", [C.objects[x], C.objects[y],
                                                    len(set(images)), len(target)])
                break
        if not ff:
            break
    choice = []
    es = True
    for d in range(D.n_ob):
        found = None
        for c in range(C.n_ob):
            for f in D.hom(F.ob_map[c], d):
                if D.is_iso(f):
                    found = (c, f)
                    break
            if found:
                break
        if found is None:
            es = False
            witness.setdefault("missed_object", D.objects[d])
        choice.append(found)
    q = None
    if ff and es:
        lookup = {}
        for m in range(C.n_mor):
            lookup[F.mor_map[m], C.src[m], C.tgt[m]] = m
        mor_map = []
        for k in range(D.n_mor):
            d, d2 = D.src[k], D.tgt[k]
            c, t = choice[d]
            c2, t2 = choice[d2]
            want = D.chain(D.inverse(t2), k, t)
            mor_map.append(lookup[want, c, c2])
        q = FunctorData(D, C, [c for c, _ in choice], mor_map)
    return EquivalenceReport(ff, es, q, witness)


def is_isomorphism(F):
    """Bijective on objects and morphisms."""
    return (len(set(F.ob_map)) == F.target.n_ob == F.source.n_ob
            and len(set(F.mor_map)) == F.target.n_mor == F.source.n_mor)


def find_isomorphism(C, D, cap=DEFAULT_CAP):
    """Some isomorphism of categories ``C -> D`` or None."""
    if (C.n_ob, C.n_mor) != (D.n_ob, D.n_mor):
        return None
    for F in enumerate_functors(C, D, cap=cap):
        if is_isomorphism(F):
            return F
    return None


# limits -------------------------------------------------------------------
@dataclass(frozen=True)
class Cone:
    apex: int
    legs: tuple

    def to_json(self, C):
        return {"apex": C.objects[self.apex], "legs": [C.morphisms[m] for m in self.legs]}


def _cospan_cones_count(C, f, g, w):
    by = {}
    for v in C.hom(w, C.src[g]):
        k = C.comp(g, v)
        by[k] = by.get(k, 0) + 1
    return sum(by.get(C.comp(f, u), 0) for u in C.hom(w, C.src[f]))


def is_pullback(C, f, g, cone):
    """Is ``cone`` (legs to src f, src g) a pullback of the cospan?"""
    P, (p1, p2) = cone.apex, cone.legs
    if C.comp(f, p1) != C.comp(g, p2):
        return False
    for w in range(C.n_ob):
        hom = C.hom(w, P)
        if len(hom) != _cospan_cones_count(C, f, g, w):
            return False
        seen = set()
        for m in hom:
            key = (C.comp(p1, m), C.comp(p2, m))
            if key in seen:
                return False
            seen.add(key)
    return True


def pullback(C, f, g):
    """Canonical pullback cone of ``x -f-> z <-g- y``.

    Terminal cones are recognised by checking that ``m -> (p1 m, p2 m)`` is a
    bijection from ``hom(w, P)`` onto the cones with apex ``w`` for every
    ``w``; among them the least ``(apex, p1, p2)`` is returned.
    """
    if C.tgt[f] != C.tgt[g]:
        raise MalformedInput("pullback needs a cospan", f=C.morphisms[f], g=C.morphisms[g])
    x, y = C.src[f], C.src[g]
    counts = [_cospan_cones_count(C, f, g, w) for w in range(C.n_ob)]
    for P in range(C.n_ob):
        if any(len(C.hom(w, P)) != counts[w] for w in range(C.n_ob)):
            continue
        by = {}
        for v in C.hom(P, y):
            by.setdefault(C.comp(g, v), []).append(v)
        for p1 in C.hom(P, x):
            for p2 in by.get(C.comp(f, p1), ()):
                if _jointly_bijective(C, P, p1, p2):
                    return Cone(P, (p1, p2))
    raise NoLimit("cospan has no pullback", f=C.morphisms[f], g=C.morphisms[g])


def _jointly_bijective(C, P, p1, p2):
    for w in range(C.n_ob):
        seen = set()
        for m in C.hom(w, P):
            key = (C.comp(p1, m), C.comp(p2, m))
            if key in seen:
                return False
            seen.add(key)
    return True


def mediator(C, cone, legs):
    """The unique ``m`` with ``cone.legs[i] o m = legs[i]``, else None."""
    w = C.src[legs[0]]
    found = [m for m in C.hom(w, cone.apex)
             if all(C.comp(l, m) == t for l, t in zip(cone.legs, legs))]
    return found[0] if len(found) == 1 else None


def limit(C, diagram_obs, arrows):
    """Canonical limit of a finite diagram.

    ``diagram_obs`` lists objects of ``C``; ``arrows`` lists ``(i, j, m)``
    with ``m : diagram_obs[i] -> diagram_obs[j]``. Returns the least terminal
    cone in ``(apex, legs)`` order.
    """
    n = len(diagram_obs)

    def cones_from(w):
        out = []

        def rec(i, legs):
            if i == n:
                if all(C.comp(m, legs[a]) == legs[b] for a, b, m in arrows):
                    out.append(tuple(legs))
                return
            for u in C.hom(w, diagram_obs[i]):
                rec(i + 1, legs + [u])

        rec(0, [])
        return out

    all_cones = [cones_from(w) for w in range(C.n_ob)]
    for P in range(C.n_ob):
        if any(len(C.hom(w, P)) != len(all_cones[w]) for w in range(C.n_ob)):
            continue
        for legs in all_cones[P]:
            ok = True
            for w in range(C.n_ob):
                seen = set()
                for m in C.hom(w, P):
                    key = tuple(C.comp(l, m) for l in legs)
                    if key in seen:
                        ok = False
                        break
                    seen.add(key)
                if not ok:
                    break
            if ok:
                return Cone(P, legs)
    raise NoLimit("diagram has no limit", objects=[C.objects[o] for o in diagram_obs])


def terminal_object(C):
    return limit(C, [], []).apex


def binary_product(C, x, y):
    return limit(C, [x, y], [])
