"""Command-line front door.

Inputs are either fincat-v1 files or fixture names. A fixture name is one of
``ONE``, ``ARROW``, ``CHAIN3``, ``P<n>`` (subsets of ``{1..n}``) or ``FS<n>``
(finite sets of size at most ``n``), optionally followed by a marking:
``-all`` (every map), ``-trivial`` (isomorphisms) or ``{m1,m2}`` (listed
maps, identities added). Without a suffix every map is marked; a file
without a ``marked`` key is treated the same way.

Exit codes: 0 when the check holds, 1 when it fails (the counterexample is in
the report), 2 on malformed input.
"""
import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor

from corrcalc.adjoint import LaxSquare, find_right_adjoint, mate
from corrcalc.bicat import bicat_to_dot, bicat_to_json, validate_bicat
from corrcalc.errors import (
    CategoryError, CorrcalcError, MalformedInput, NoAdjoint, NotAFunctor, NotClosed, NotNatural,
    PreconditionFailed,
)
from corrcalc.fincat import (
    DEFAULT_CAP, NatTransData, category_to_json, check_natural, compose_functors,
    functor_from_json, functor_to_json, identity_functor, identity_nat, inverse_nat,
    validate_category,
)
from corrcalc import fixtures
from corrcalc.marked import certify, has_base_change, maximal_marking, trivial_marking, validate_marking
from corrcalc.report import Report, dumps

FIXTURE_RE = re.compile(r"^(ONE|ARROW|CHAIN3|P(\d)|FS(\d))(-all|-trivial|\{([^}]*)\})?$")


# inputs -------------------------------------------------------------------------
def fixture_category(name):
    m = FIXTURE_RE.match(name)
    if not m:
        raise MalformedInput("unknown fixture", name=name)
    base = m.group(1)
    if base == "ONE":
        return fixtures.one()
    if base == "ARROW":
        return fixtures.arrow()
    if base == "CHAIN3":
        return fixtures.chain3()
    if m.group(2):
        return fixtures.powerset_poset(int(m.group(2)))
    return fixtures.finsets(int(m.group(3)))


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput("not valid JSON", path=path, detail=str(exc))


def load_category(spec):
    """A FinCat from a path or a fixture name, with the raw marking if any."""
    if isinstance(spec, dict):
        raw = dict(spec)
        return validate_category(raw), raw.get("marked")
    if os.path.exists(spec):
        raw = _read_json(spec)
        return validate_category(raw), raw.get("marked")
    m = FIXTURE_RE.match(spec)
    if not m:
        raise MalformedInput("neither a file nor a fixture name", input=spec)
    C = fixture_category(spec)
    suffix = m.group(4)
    if suffix is None or suffix == "-all":
        return C, None
    if suffix == "-trivial":
        return C, [C.morphisms[f] for f in range(C.n_mor) if C.is_iso(f)]
    return C, [s.strip() for s in m.group(5).split(",") if s.strip()]


def load_marked(spec):
    C, marked = load_category(spec)
    if marked is None:
        return maximal_marking(C)
    label = spec if isinstance(spec, str) and not os.path.exists(spec) else None
    if label is None and set(marked) == {C.morphisms[f] for f in range(C.n_mor) if C.is_iso(f)}:
        return trivial_marking(C)
    return validate_marking(C, marked, name=label)


def with_base_change(M):
    rep = has_base_change(M)
    return rep, (rep.payload if rep.holds else None)


def _category_value(v):
    return load_category(v)[0]


def load_catfun(spec, D, M=None):
    """A category-valued functor on ``D``.

    ``const:<fixture>``, ``slice`` and ``corr:<object>`` name built-in
    functors; anything else is a catfun-v1 file::

        {"format": "catfun-v1", "contravariant": false,
         "values": {"<object>": <fixture name or fincat-v1>},
         "maps": {"<morphism>": {"ob_map": {...}, "mor_map": {...}}}}

    Maps of identities may be omitted.
    """
    from corrcalc.bivariant import constant_functor, corr_representable, slice_functor
    from corrcalc.fib import cat_pseudofunctor
    if spec.startswith("const:"):
        return constant_functor(D, _category_value(spec[6:]))
    if spec == "slice":
        return slice_functor(D)
    if spec.startswith("corr:"):
        x = D.ob(spec[5:])
        return corr_representable(M if M is not None else maximal_marking(D), x)
    raw = _read_json(spec) if os.path.exists(spec) else None
    if not isinstance(raw, dict) or raw.get("format") != "catfun-v1":
        raise MalformedInput("functor is neither built in nor a catfun-v1 file", functor=spec)
    unknown = sorted(set(raw) - {"format", "contravariant", "values", "maps", "name"})
    if unknown:
        raise MalformedInput("unknown keys", keys=unknown)
    contra = bool(raw.get("contravariant", False))
    try:
        ob = [_category_value(raw["values"][o]) for o in D.objects]
    except KeyError as exc:
        raise MalformedInput("values are not total", missing=str(exc))
    mor = []
    for m in range(D.n_mor):
        s, t = (D.tgt[m], D.src[m]) if contra else (D.src[m], D.tgt[m])
        entry = raw.get("maps", {}).get(D.morphisms[m])
        if entry is None:
            if m in D.ids:
                mor.append(identity_functor(ob[s]))
                continue
            raise MalformedInput("missing map", morphism=D.morphisms[m])
        mor.append(functor_from_json(entry, ob[s], ob[t]))
    return cat_pseudofunctor(D, ob, mor, contravariant=contra, name=raw.get("name"))


def _parse_span(M, text):
    from corrcalc.span import Span
    D = M.cat
    try:
        p, q = (s.strip() for s in text.split(","))
        p, q = D.mor(p), D.mor(q)
    except (ValueError, KeyError, CorrcalcError):
        raise MalformedInput("span must be given as 'p,q' with morphism names", span=text)
    if D.src[p] != D.src[q]:
        raise MalformedInput("span legs have different sources", span=text)
    if p not in M.marking:
        raise MalformedInput("wrong-way leg is not marked", span=text)
    return Span(D.tgt[p], D.tgt[q], D.src[p], p, q)


# DOT ----------------------------------------------------------------------------
def _q(s):
    return '"' + str(s).replace('"', '\\"') + '"'


def category_to_dot(C, marking=None):
    """Objects in index order; identities omitted; marked maps dashed."""
    lines = ["digraph category {", "  rankdir=LR;"]
    for x, o in enumerate(C.objects):
        lines.append(f"  n{x} [label={_q(o)}];")
    for m in range(C.n_mor):
        if m in C.ids:
            continue
        style = ", style=dashed" if marking is not None and m in marking else ""
        lines.append(f"  n{C.src[m]} -> n{C.tgt[m]} [label={_q(C.morphisms[m])}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def fibration_to_dot(fib):
    """Total objects clustered by fibre, base objects in a separate rank."""
    E, D = fib.total, fib.base
    lines = ["digraph fibration {", "  rankdir=BT;"]
    for d in range(D.n_ob):
        lines.append(f"  subgraph cluster_{d} {{")
        lines.append(f"    label={_q(D.objects[d])};")
        for e in fib.objects_over(d):
            lines.append(f"    e{e} [label={_q(E.objects[e])}];")
        lines.append("  }")
    for m in range(E.n_mor):
        if m in E.ids:
            continue
        lines.append(f"  e{E.src[m]} -> e{E.tgt[m]} [label={_q(E.morphisms[m])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_dot(obj, D=None):
    """DOT text for a category, a span (needs ``D``) or a fibration."""
    from corrcalc.fib import Fibration
    from corrcalc.marked import MarkedCat
    from corrcalc.span import Span, span_to_dot
    if isinstance(obj, Fibration):
        return fibration_to_dot(obj)
    if isinstance(obj, Span):
        return span_to_dot(D, obj)
    if isinstance(obj, MarkedCat):
        return category_to_dot(obj.cat, obj.marking)
    return category_to_dot(obj)


def fibration_to_json(fib):
    E, D = fib.total, fib.base
    return {"format": "fibration-v1", "total": category_to_json(E),
            "base": category_to_json(D), "proj": functor_to_json(fib.proj),
            "variance": getattr(fib, "variance", None),
            "cartesian": [[D.morphisms[f], E.objects[e], E.morphisms[m]]
                          for (f, e), m in sorted(fib.cart.items()) if m is not None],
            "cocartesian": [[D.morphisms[f], E.objects[e], E.morphisms[m]]
                            for (f, e), m in sorted(fib.cocart.items()) if m is not None]}


def fibration_from_json(raw):
    from corrcalc.fib import Fibration
    unknown = sorted(set(raw) - {"format", "total", "base", "proj", "variance",
                                 "cartesian", "cocartesian"})
    if unknown:
        raise MalformedInput("unknown keys", keys=unknown)
    E, D = validate_category(raw["total"]), validate_category(raw["base"])
    p = functor_from_json(raw["proj"], E, D)
    return Fibration(p, name=raw["total"].get("name"))


# commands ---------------------------------------------------------------------
class Outcome:
    """What a command hands back: a report plus optional artefacts."""

    def __init__(self, report, dot=None, artefact=None):
        self.report = report
        self.dot = dot
        self.artefact = artefact


def cmd_check_category(a):
    C, _ = load_category(a.input)
    rep = Report("check_category", "CAT_MODELS", True,
                 {"objects": C.n_ob, "morphisms": C.n_mor, "composites": len(C.comp_table)})
    return Outcome(rep, category_to_dot(C))


def cmd_check_marking(a):
    M = load_marked(a.input)
    D = M.cat
    rep = Report("check_marking", "CAT_MARK_DEF", True,
                 {"marked": [D.morphisms[f] for f in sorted(M.marking)]})
    return Outcome(rep, emit_dot(M))


def cmd_check_base_change(a):
    M = load_marked(a.input)
    rep, _ = with_base_change(M)
    return Outcome(rep, emit_dot(M))


def cmd_build_corr(a):
    from corrcalc.span import build_corr
    M = load_marked(a.input)
    rep, Mb = with_base_change(M)
    if Mb is None:
        return Outcome(rep)
    B = build_corr(Mb, cap=a.cap)
    validate_bicat(B)
    homs = {f"{B.objects[x]}->{B.objects[y]}": [B.hom[(x, y)].n_ob, B.hom[(x, y)].n_mor]
            for (x, y) in sorted(B.hom)}
    rep = Report("build_corr", "BIV_YON_SPANS", True, {"hom_sizes": homs, "coherence": "validated"})
    return Outcome(rep, bicat_to_dot(B), bicat_to_json(B))


def cmd_compose_spans(a):
    from corrcalc.span import compose_spans, span_name
    M = load_marked(a.input)
    D = M.cat
    s1, s2 = _parse_span(M, a.first), _parse_span(M, a.second)
    if s1.y != s2.x:
        raise MalformedInput("spans are not composable")
    if M.cone(s2.p, s1.q) is None:
        M = certify(M, [(s2.p, s1.q)])
    s = compose_spans(M, s1, s2)
    rep = Report("compose_spans", "BIV_YON_SPANS", True,
                 {"composite": span_name(D, s), "kernel": D.objects[s.k],
                  "source": D.objects[s.x], "target": D.objects[s.y]})
    return Outcome(rep, emit_dot(s, D))


def _functor_file(path, C, D):
    raw = _read_json(path)
    raw = {k: v for k, v in raw.items() if k not in ("source", "target")}
    return functor_from_json(raw, C, D)


def _nat_json(alpha):
    C, D = alpha.source.source, alpha.source.target
    return {C.objects[x]: D.morphisms[m] for x, m in enumerate(alpha.components)}


def cmd_find_adjoint(a):
    C, _ = load_category(a.input)
    D, _ = load_category(a.target)
    F = _functor_file(a.functor, C, D)
    try:
        adj = find_right_adjoint(F)
    except NoAdjoint as exc:
        return Outcome(Report("find_adjoint", "CAT_ADJ_UNIT", False,
                              counterexample={"reason": exc.message, **exc.witness}))
    R = adj.right
    rep = Report("find_adjoint", "CAT_ADJ_UNIT", True,
                 {"right": functor_to_json(R), "unit": _nat_json(adj.unit),
                  "counit": _nat_json(adj.counit)})
    return Outcome(rep)


def load_square(path):
    """square-v1: four functors between named categories and a filler.

    ``{"format": "square-v1", "categories": {"A": <fixture or fincat>, ...},
    "fbar": F, "gbar": F, "f": F, "g": F, "filler": {"<object>": "<map>"}}``
    where each ``F`` is ``{"source", "target", "ob_map", "mor_map"}`` with
    category names as source and target. The filler ``g fbar => f gbar``
    defaults to the identity.
    """
    raw = _read_json(path)
    unknown = sorted(set(raw) - {"format", "categories", "fbar", "gbar", "f", "g", "filler"})
    if unknown or raw.get("format") != "square-v1":
        raise MalformedInput("not a square-v1 description", keys=unknown)
    cats = {k: _category_value(v) for k, v in sorted(raw["categories"].items())}
    fun = {}
    for e in ("fbar", "gbar", "f", "g"):
        d = raw[e]
        fun[e] = functor_from_json({k: d[k] for k in ("ob_map", "mor_map")},
                                   cats[d["source"]], cats[d["target"]])
    top, bot = compose_functors(fun["g"], fun["fbar"]), compose_functors(fun["f"], fun["gbar"])
    if "filler" in raw:
        X0, X1 = top.source, top.target
        comps = [X1.mor(raw["filler"][o]) for o in X0.objects]
        phi = check_natural(NatTransData(top, bot, comps))
    else:
        if top != bot:
            raise MalformedInput("square does not commute and no filler was given")
        phi = identity_nat(top)
    return fun, phi


def _mate_of(path):
    fun, phi = load_square(path)
    try:
        adj_g, adj_gbar = find_right_adjoint(fun["g"]), find_right_adjoint(fun["gbar"])
    except NoAdjoint as exc:
        raise PreconditionFailed("vertical edge has no right adjoint", **exc.witness)
    sq = LaxSquare(fun["fbar"], fun["gbar"], fun["f"], fun["g"], phi, adj_g, adj_gbar)
    return mate(sq)


def cmd_mate(a):
    m = _mate_of(a.input)
    rep = Report("mate", "BIV_BC_MATE", True, {"mate": _nat_json(m)})
    return Outcome(rep)


def cmd_check_bc(a):
    m = _mate_of(a.input)
    ok = inverse_nat(m) is not None
    return Outcome(Report("beck_chevalley", "BIV_BC_CONDITION", ok,
                          {"mate": _nat_json(m)} if ok else {},
                          None if ok else {"mate": _nat_json(m)}))


def _integrate(a):
    from corrcalc.fib import grothendieck
    C, _ = load_category(a.input)
    H = load_catfun(a.functor, C)
    return grothendieck(H, cap=a.cap)


def cmd_grothendieck(a):
    from corrcalc.fib import certify_grothendieck, integration_roundtrip
    fib = _integrate(a)
    rep = certify_grothendieck(fib)
    if rep.holds:
        rep = integration_roundtrip(fib)
    rep.witness = dict(rep.witness, total_objects=fib.total.n_ob,
                       total_morphisms=fib.total.n_mor, variance=fib.variance)
    return Outcome(rep, fibration_to_dot(fib), fibration_to_json(fib))


def cmd_check_fibration(a):
    from corrcalc.fib import check_fibration
    if a.functor:
        fib = _integrate(a)
    else:
        raw = _read_json(a.input) if os.path.exists(a.input) else None
        if not isinstance(raw, dict) or raw.get("format") != "fibration-v1":
            raise MalformedInput("expected a fibration-v1 file or --functor")
        fib = fibration_from_json(raw)
    marked = None
    if a.marking:
        marked = [fib.base.mor(s.strip()) for s in a.marking.split(",") if s.strip()]
    rep = check_fibration(fib, marked, a.variance)
    return Outcome(rep, fibration_to_dot(fib))


def cmd_check_twisted(a):
    from corrcalc.fib import check_twisted_bicartesian, universal_span
    rep, M = with_base_change(load_marked(a.input))
    if M is None:
        return Outcome(rep)
    p = universal_span(M, cap=a.cap)
    return Outcome(check_twisted_bicartesian(p, M, M), category_to_dot(p.source))


def _bivariant(a):
    from corrcalc.bivariant import check_bivariant
    rep, M = with_base_change(load_marked(a.input))
    if M is None:
        return rep, None
    H = load_catfun(a.functor, M.cat, M)
    return check_bivariant(H, M), M


def cmd_check_bivariant(a):
    from corrcalc.fib import check_bicartesian_base_change, grothendieck
    rep, M = _bivariant(a)
    if M is not None and a.dictionary:
        fib = grothendieck(rep.payload.H, cap=a.cap)
        other = check_bicartesian_base_change(fib, M)
        rep.witness = dict(rep.witness, grothendieck_side=other.holds,
                           dictionary_agrees=other.holds == rep.holds)
        if other.holds != rep.holds:
            return Outcome(Report(rep.check, rep.anchor, False, rep.witness,
                                  {"reason": "dictionary disagrees",
                                   "grothendieck": other.to_json()}))
    return Outcome(rep)


def cmd_spex(a):
    from corrcalc.bivariant import check_spex
    rep, M = _bivariant(a)
    if not rep.holds:
        return Outcome(rep)
    return Outcome(check_spex(rep.payload))


def cmd_yoneda(a):
    from corrcalc.bivariant import yoneda_check
    rep, M = _bivariant(a)
    if not rep.holds:
        return Outcome(rep)
    return Outcome(yoneda_check(M, rep.payload, M.cat.ob(a.at), cap=a.cap))


def cmd_universality(a):
    from corrcalc.bicat import cat_universe
    from corrcalc.bivariant import universality_check
    rep, M = with_base_change(load_marked(a.input))
    if M is None:
        return Outcome(rep)
    K = cat_universe([_category_value(s.strip()) for s in a.universe.split(",")])
    return Outcome(universality_check(M, K, cap=a.cap))


def cmd_self_dual(a):
    from corrcalc.bivariant import self_duality_check
    rep, M = with_base_change(load_marked(a.input))
    if M is None:
        return Outcome(rep)
    return Outcome(self_duality_check(M, M.cat.ob(a.object)))


def cmd_cartesian_monoidal(a):
    from corrcalc.bivariant import cartesian_monoidal
    C, _ = load_category(a.input)
    return Outcome(cartesian_monoidal(C, a.n))


# the suite --------------------------------------------------------------------
def _suite_corr(name):
    from corrcalc.span import build_corr
    M = has_base_change(load_marked(name)).payload
    B = build_corr(M)
    validate_bicat(B)
    return Report("corr_coherence", "BIV_YON_SPANS", True, {"fixture": name, "objects": B.n_ob})


def _suite_compose():
    a = argparse.Namespace(input="FS4", first="2->1:00,2->1:00", second="2->1:00,2->1:00")
    return cmd_compose_spans(a).report


def _suite_adjunctions(name):
    from corrcalc.adjoint import check_triangle_identities
    from corrcalc.span import build_corr, shriek_adjunction
    M = has_base_change(load_marked(name)).payload
    B = build_corr(M)
    for f in sorted(M.marking):
        r = check_triangle_identities(shriek_adjunction(B, f))
        if not r.holds:
            return Report("shriek_adjunctions", "CAT_ADJ_UNIT", False,
                          counterexample={"fixture": name, "f": M.cat.morphisms[f]})
    return Report("shriek_adjunctions", "CAT_ADJ_UNIT", True,
                  {"fixture": name, "adjunctions": len(M.marking)})


def _suite_roundtrip(base, functor):
    from corrcalc.fib import transport_roundtrip
    C, _ = load_category(base)
    return transport_roundtrip(load_catfun(functor, C))


def _suite_bivariant(name, functor):
    return cmd_check_bivariant(argparse.Namespace(input=name, functor=functor, dictionary=True,
                                                  cap=DEFAULT_CAP)).report


def _suite_twisted(name):
    return cmd_check_twisted(argparse.Namespace(input=name, cap=DEFAULT_CAP)).report


def _suite_yoneda(name, functor, at):
    return cmd_yoneda(argparse.Namespace(input=name, functor=functor, at=at, cap=DEFAULT_CAP)).report


def _suite_spex(name, functor):
    return cmd_spex(argparse.Namespace(input=name, functor=functor)).report


def _suite_universality():
    return cmd_universality(argparse.Namespace(input="ARROW{a}", universe="ONE,ARROW",
                                               cap=2000)).report


def _suite_monoidal():
    return cmd_cartesian_monoidal(argparse.Namespace(input="P2", n=3)).report


def _suite_self_dual():
    return cmd_self_dual(argparse.Namespace(input="P2-all", object="{1}")).report


def _suite_split(a, b):
    from corrcalc.span import corr_product_split
    return corr_product_split(load_marked(a), load_marked(b))


SUITE = {
    "corr:ONE": (_suite_corr, ("ONE",)),
    "corr:ARROW{a}": (_suite_corr, ("ARROW{a}",)),
    "corr:P2-all": (_suite_corr, ("P2-all",)),
    "compose:FS4": (_suite_compose, ()),
    "adjunctions:ARROW{a}": (_suite_adjunctions, ("ARROW{a}",)),
    "adjunctions:P2-all": (_suite_adjunctions, ("P2-all",)),
    "roundtrip:ARROW/slice": (_suite_roundtrip, ("ARROW", "slice")),
    "roundtrip:P2/slice": (_suite_roundtrip, ("P2", "slice")),
    "bivariant:ARROW{a}/const": (_suite_bivariant, ("ARROW{a}", "const:ARROW")),
    "bivariant:ARROW{a}/slice": (_suite_bivariant, ("ARROW{a}", "slice")),
    "bivariant:P2-all/slice": (_suite_bivariant, ("P2-all", "slice")),
    "twisted:ARROW{a}": (_suite_twisted, ("ARROW{a}",)),
    "twisted:P2-all": (_suite_twisted, ("P2-all",)),
    "yoneda:ARROW{a}/corr": (_suite_yoneda, ("ARROW{a}", "corr:1", "1")),
    "yoneda:ARROW{a}/const": (_suite_yoneda, ("ARROW{a}", "const:ONE", "1")),
    "spex:ARROW{a}/slice": (_suite_spex, ("ARROW{a}", "slice")),
    "spex:P2-all/slice": (_suite_spex, ("P2-all", "slice")),
    "universality:ARROW{a}": (_suite_universality, ()),
    "monoidal:P2": (_suite_monoidal, ()),
    "self-dual:P2-all": (_suite_self_dual, ()),
    "split:ARROW{a}xARROW-trivial": (_suite_split, ("ARROW{a}", "ARROW-trivial")),
    "split:P2-allxONE": (_suite_split, ("P2-all", "ONE")),
}


def _run_suite_entry(key):
    fn, args = SUITE[key]
    try:
        return key, fn(*args).to_json()
    except CorrcalcError as exc:
        return key, {"check": key, "verdict": "fails", "error": exc.to_json()}


def run_suite(keys, jobs=1):
    """Run suite entries; results are gathered in the order of ``keys``."""
    if jobs <= 1:
        results = [_run_suite_entry(k) for k in keys]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_suite_entry, keys))
    entries = [dict(r, entry=k) for k, r in results]
    ok = all(e["verdict"] == "holds" for e in entries)
    return {"check": "suite", "verdict": "holds" if ok else "fails", "entries": entries}


def cmd_suite(a):
    keys = list(SUITE) if not a.only else [k.strip() for k in a.only.split(",")]
    unknown = [k for k in keys if k not in SUITE]
    if unknown:
        raise MalformedInput("unknown suite entries", entries=unknown)
    out = run_suite(keys, a.jobs)
    return out


# driver -----------------------------------------------------------------------
def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="corrcalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_input=True, help=None):
        s = sub.add_parser(name, help=help)
        if needs_input:
            s.add_argument("input", help="fincat-v1 file or fixture name")
        s.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="enumeration cap")
        s.add_argument("--out", help="write the artefact (or the report) here")
        s.add_argument("--format", choices=["json", "dot", "text"], default="json")
        s.set_defaults(fn=fn)
        return s

    add("check-category", cmd_check_category, help="validate a category")
    add("check-marking", cmd_check_marking, help="validate a marking")
    add("check-base-change", cmd_check_base_change, help="pullbacks of marked maps")
    add("build-corr", cmd_build_corr, help="the span bicategory, validated")
    s = add("compose-spans", cmd_compose_spans, help="compose two spans")
    s.add_argument("--first", required=True, help="'p,q' for x <-p- k -q-> y")
    s.add_argument("--second", required=True)
    s = add("find-adjoint", cmd_find_adjoint, help="right adjoint of a functor")
    s.add_argument("--target", required=True)
    s.add_argument("--functor", required=True, help="functor JSON with ob_map and mor_map")
    add("mate", cmd_mate, help="mate of a square-v1 description")
    add("check-bc", cmd_check_bc, help="Beck-Chevalley for a square-v1 description")
    for name, fn, h in (("grothendieck", cmd_grothendieck, "integrate a category-valued functor"),
                        ("check-fibration", cmd_check_fibration, "lifts of a projection")):
        s = add(name, fn, help=h)
        s.add_argument("--functor", required=name == "grothendieck",
                       help="const:<fixture>, slice, corr:<object> or a catfun-v1 file")
        if name == "check-fibration":
            s.add_argument("--variance", choices=["cartesian", "cocartesian", "both"],
                           default="cartesian")
            s.add_argument("--marking", help="comma-separated base maps (default all)")
    add("check-twisted", cmd_check_twisted, help="the universal span is twisted bi-Cartesian")
    s = add("check-bivariant", cmd_check_bivariant, help="adjoints and Beck-Chevalley squares")
    s.add_argument("--functor", required=True)
    s.add_argument("--dictionary", action="store_true",
                   help="also compare with the Grothendieck side")
    s = add("spex", cmd_spex, help="extend a bivariant functor to spans")
    s.add_argument("--functor", required=True)
    s = add("yoneda-check", cmd_yoneda, help="evaluation at the identity span")
    s.add_argument("--functor", default=None)
    s.add_argument("--at", required=True)
    s = add("universality", cmd_universality, help="iso-classes against a finite universe")
    s.add_argument("--universe", default="ONE,ARROW", help="comma-separated fixture names")
    s = add("self-dual", cmd_self_dual, help="zigzags of evaluation and coevaluation spans")
    s.add_argument("--object", required=True)
    s = add("cartesian-monoidal", cmd_cartesian_monoidal, help="powers over finite sets")
    s.add_argument("--n", type=_positive, default=3, help="largest finite set")
    s = add("suite", cmd_suite, needs_input=False, help="run the named checks")
    s.add_argument("--jobs", type=_positive, default=1)
    s.add_argument("--only", help="comma-separated entries")
    return p


def _text(doc):
    if "entries" in doc:
        lines = [f"{e['verdict']:5} {e['entry']}" for e in doc["entries"]]
        return "\n".join(lines + [f"suite: {doc['verdict']}"]) + "\n"
    line = f"{doc['verdict']} {doc['check']} [{doc['anchor']}]"
    if doc.get("counterexample"):
        line += " " + json.dumps(doc["counterexample"], sort_keys=True)
    return line + "\n"


def run(argv=None):
    """Execute one command; return ``(exit code, text written)``."""
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.command == "yoneda-check" and a.functor is None:
        a.functor = f"corr:{a.at}"
    try:
        out = a.fn(a)
    except MalformedInput as exc:
        return 2, dumps(exc.to_json())
    except CorrcalcError as exc:
        if isinstance(exc, (CategoryError, NotAFunctor, NotNatural, NotClosed)):
            return 2, dumps(exc.to_json())
        return 1, dumps({"verdict": "fails", "error": exc.to_json()})
    if isinstance(out, dict):
        doc, dot, artefact = out, None, None
    else:
        doc, dot, artefact = out.report.to_json(), out.dot, out.artefact
    code = 0 if doc["verdict"] == "holds" else 1
    if a.format == "dot":
        text = dot if dot is not None else ""
    elif a.format == "text":
        text = _text(doc)
    else:
        text = dumps(doc)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(dumps(artefact) if artefact is not None else text)
        if artefact is None:
            return code, ""
    return code, text


def main(argv=None):
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
