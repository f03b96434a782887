"""Markings, the base-change property and marked comma categories."""
from dataclasses import dataclass

from corrcalc.errors import MalformedInput, NoLimit, NotClosed, PreconditionFailed
from corrcalc.fincat import (
    Cone, FunctorData, comma, full_subcategory, identity_functor, is_pullback, pullback,
    DEFAULT_CAP,
)
from corrcalc.report import Report


@dataclass
class MarkedCat:
    """A category with a composition-closed class of marked morphisms.

    ``certificate`` maps ``(f, g)`` with ``f`` marked to the canonical
    pullback cone of ``f`` against ``g``; its legs point to ``src f`` and
    ``src g``. ``complete`` records whether every such pair is certified.
    """
    cat: object
    marking: frozenset
    certificate: dict = None
    complete: bool = False
    name: str = None

    def is_marked(self, f):
        return f in self.marking

    def cone(self, f, g):
        if self.certificate is None:
            return None
        return self.certificate.get((f, g))

    def with_certificate(self, certificate, complete):
        return MarkedCat(self.cat, self.marking, certificate, complete, self.name)

    @property
    def label(self):
        return self.name or self.cat.name


def _as_indices(C, S):
    out = set()
    for m in S:
        if isinstance(m, str):
            if m not in C.mor_index:
                raise MalformedInput("marked name is not a morphism", morphism=m)
            out.add(C.mor_index[m])
        else:
            out.add(int(m))
    return out


def validate_marking(C, S, name=None):
    """Add identities to ``S`` and verify closure under composition."""
    marking = _as_indices(C, S) | set(C.ids)
    for g in range(C.n_mor):
        if g not in marking:
            continue
        for f in C.in_mors[C.src[g]]:
            if f in marking and C.comp(g, f) not in marking:
                raise NotClosed("marked composite is unmarked", g=C.morphisms[g],
                                f=C.morphisms[f], composite=C.morphisms[C.comp(g, f)])
    return MarkedCat(C, frozenset(marking), name=name)


def maximal_marking(C):
    return validate_marking(C, range(C.n_mor), name=f"{C.name}-all")


def trivial_marking(C):
    """Mark the isomorphisms only."""
    return validate_marking(C, [f for f in range(C.n_mor) if C.is_iso(f)], name=f"{C.name}-iso")


def marked_pairs(M):
    """Cospans ``(f, g)`` with ``f`` marked, in canonical order."""
    C = M.cat
    for f in sorted(M.marking):
        for g in C.in_mors[C.tgt[f]]:
            yield f, g


def certify_pair(M, f, g):
    C = M.cat
    cone = pullback(C, f, g)
    if cone.legs[1] not in M.marking:
        return None, cone
    return cone, cone


def has_base_change(M):
    """Check that pullbacks of marked maps exist and are marked.

    The returned report carries, as ``payload``, the marked category with the
    certificate attached when the property holds.
    """
    C = M.cat
    cert = {}
    n = 0
    for f, g in marked_pairs(M):
        n += 1
        try:
            cone = pullback(C, f, g)
        except NoLimit:
            return Report("has_base_change", "BIV_BC_DEF", False, {"checked": n},
                          {"reason": "no pullback", "f": C.morphisms[f], "g": C.morphisms[g],
                           "f_src": C.objects[C.src[f]], "g_src": C.objects[C.src[g]],
                           "target": C.objects[C.tgt[f]]})
        if cone.legs[1] not in M.marking:
            return Report("has_base_change", "BIV_BC_DEF", False, {"checked": n},
                          {"reason": "pulled-back leg unmarked", "f": C.morphisms[f],
                           "g": C.morphisms[g], "leg": C.morphisms[cone.legs[1]]})
        cert[(f, g)] = cone
    return Report("has_base_change", "BIV_BC_DEF", True, {"checked": n},
                  payload=M.with_certificate(cert, True))


def certify(M, pairs):
    """Attach certified pullbacks for the given cospans only.

    Used where the full base-change property fails but the needed squares
    exist, as for the finite-set skeleton.
    """
    C = M.cat
    cert = dict(M.certificate or {})
    for f, g in pairs:
        if f not in M.marking:
            raise PreconditionFailed("first leg of a certified cospan must be marked",
                                     f=C.morphisms[f])
        cone = pullback(C, f, g)
        if cone.legs[1] not in M.marking:
            raise PreconditionFailed("pulled-back leg unmarked", f=C.morphisms[f], g=C.morphisms[g])
        cert[(f, g)] = cone
    return M.with_certificate(cert, M.complete)


def require_base_change(M):
    if M.certificate is not None and M.complete:
        return M
    rep = has_base_change(M)
    if not rep.holds:
        raise PreconditionFailed("marking lacks base change", **rep.counterexample)
    return rep.payload


def marked_comma(M, p, cap=DEFAULT_CAP):
    """``D |# E``: pairs ``(e, f : x -> p e)`` with ``f`` marked.

    Returns the category, its projection to ``D`` (sources of the roofs) and
    the inclusion ``e -> (e, id)``.
    """
    D = M.cat
    if p.target is not D and p.target != D:
        raise PreconditionFailed("functor does not land in the marked category")
    C, pr_d, pr_e = comma(identity_functor(D), p, cap=cap)
    keep = [i for i, (x, e, a) in enumerate(C.ob_data) if a in M.marking]
    S, inc = full_subcategory(C, keep, name=f"{D.name}|#{p.source.name}")
    proj = FunctorData(S, D, [pr_d.ob_map[i] for i in inc.ob_map],
                       [pr_d.mor_map[m] for m in inc.mor_map])
    to_e = FunctorData(S, p.source, [pr_e.ob_map[i] for i in inc.ob_map],
                       [pr_e.mor_map[m] for m in inc.mor_map])
    E = p.source
    where = {(x, e, a): i for i, (x, e, a) in enumerate(S.ob_data)}
    ob_map = [where[(p.ob_map[e], e, D.ids[p.ob_map[e]])] for e in range(E.n_ob)]
    # morphism data refers to object indices of the unrestricted comma
    full_index = {C.ob_data[i]: i for i in range(C.n_ob)}
    lookup = {}
    for k, (i, j, u, u2) in enumerate(S.mor_data):
        lookup[(i, j, u, u2)] = k
    mor_map = []
    for u in range(E.n_mor):
        e, e2 = E.src[u], E.tgt[u]
        i = full_index[(p.ob_map[e], e, D.ids[p.ob_map[e]])]
        j = full_index[(p.ob_map[e2], e2, D.ids[p.ob_map[e2]])]
        mor_map.append(lookup[(i, j, p.mor_map[u], u)])
    inc_e = FunctorData(E, S, ob_map, mor_map)
    return S, proj, inc_e, to_e


def is_marked_functor(F, M0, M1):
    return all(F.mor_map[m] in M1.marking for m in M0.marking)


def preserves_base_change(F, M0):
    """Does ``F`` send every certified pullback square of ``M0`` to a pullback?"""
    D1 = F.target
    for (f, g), cone in sorted((M0.certificate or {}).items()):
        img = Cone(F.ob_map[cone.apex], (F.mor_map[cone.legs[0]], F.mor_map[cone.legs[1]]))
        if not is_pullback(D1, F.mor_map[f], F.mor_map[g], img):
            return (f, g)
    return None


def is_base_change_exact(psi, M0, M1):
    """Are all naturality squares of ``psi`` at marked maps pullbacks?

    ``psi : F0 => F1 : D0 -> D1``; both functors must be marked functors that
    preserve the certified pullbacks of ``M0``.
    """
    M0 = require_base_change(M0)
    F0, F1 = psi.source, psi.target
    D0, D1 = M0.cat, M1.cat
    for label, F in (("F0", F0), ("F1", F1)):
        for m in sorted(M0.marking):
            if F.mor_map[m] not in M1.marking:
                raise PreconditionFailed("functor does not preserve the marking",
                                         functor=label, morphism=D0.morphisms[m])
        bad = preserves_base_change(F, M0)
        if bad is not None:
            raise PreconditionFailed("functor does not preserve a base-change square",
                                     functor=label, f=D0.morphisms[bad[0]], g=D0.morphisms[bad[1]])
    for m in sorted(M0.marking):
        x, y = D0.src[m], D0.tgt[m]
        cone = Cone(F0.ob_map[x], (psi.components[x], F0.mor_map[m]))
        if not is_pullback(D1, F1.mor_map[m], psi.components[y], cone):
            return False
    return True
