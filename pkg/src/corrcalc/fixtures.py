"""Small named categories used throughout the tests and the CLI examples."""
from itertools import combinations, product

from corrcalc.fincat import FinCat, from_generators, poset_category


def one():
    """The terminal category."""
    return from_generators(["*"], [], name="ONE")


def arrow():
    """The walking arrow ``0 -a-> 1``."""
    return from_generators(["0", "1"], [("a", "0", "1")], name="ARROW")


def chain3():
    """The poset ``0 -> 1 -> 2``."""
    return from_generators(["0", "1", "2"], [("u", "0", "1"), ("v", "1", "2"), ("vu", "0", "2")],
                           [("v", "u", "vu")], name="CHAIN3")


def subsets(n):
    """Subsets of ``{1..n}`` in a fixed order: by size, then lexicographically."""
    base = list(range(1, n + 1))
    out = []
    for k in range(n + 1):
        out.extend(frozenset(c) for c in combinations(base, k))
    return out


def set_name(s):
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


def powerset_poset(n):
    """Subsets of ``{1..n}`` ordered by inclusion; ``P2`` is ``n = 2``."""
    return poset_category(subsets(n), lambda a, b: a <= b, name=f"P{n}", fmt=set_name)


def p2():
    return powerset_poset(2)


def finsets(n, name=None):
    """Skeleton of finite sets of size at most ``n`` with all maps.

    Object ``k`` is ``{0..k-1}``; a map ``k -> l`` is named ``k->l:v0v1..``
    by its value list. Morphisms are ordered by source, target, values.
    """
    objs = [str(k) for k in range(n + 1)]
    mors, src, tgt, data, index = [], [], [], [], {}
    for k in range(n + 1):
        for l in range(n + 1):
            for vals in product(range(l), repeat=k):
                index[(k, l, vals)] = len(mors)
                mors.append(f"{k}->{l}:" + "".join(str(v) for v in vals))
                src.append(k)
                tgt.append(l)
                data.append(vals)
    ids = [index[(k, k, tuple(range(k)))] for k in range(n + 1)]
    comp = {}
    by_src = {}
    for m, (k, vals) in enumerate(zip(src, data)):
        by_src.setdefault(k, []).append(m)
    for f in range(len(mors)):
        k, l, fv = src[f], tgt[f], data[f]
        for g in by_src.get(l, ()):
            gv = data[g]
            comp[(g, f)] = index[(k, tgt[g], tuple(gv[v] for v in fv))]
    return FinCat(objs, mors, src, tgt, ids, comp, ob_data=list(range(n + 1)), mor_data=data,
                  name=name or f"FS{n}")


def fs4():
    return finsets(4, name="FS4")


def fin_map(C, k, l, vals):
    """Index of the map ``k -> l`` with the given values in ``finsets``."""
    return C.mor(f"{k}->{l}:" + "".join(str(v) for v in vals))
