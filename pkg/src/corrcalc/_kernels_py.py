"""Pure-Python versions of the integer kernels.

Every function here has a twin in ``_kernels.pyx`` with the same signature
and the same results. Inputs are flat integer sequences (``array('i')`` or
lists); ``table`` is the dense composition table of an ``n_mor x n_mor``
category, with -1 marking non-composable pairs.
"""


def check_laws(n_mor, src, tgt, ids, table, in_ptr, in_idx):
    """Return ``(code, a, b, c)`` for the first law violation, code 0 if none.

    code 1: identity law fails at (a, b) where b is an identity, or a is.
    code 2: composite (a, b) = c has the wrong endpoints.
    code 3: associativity fails at (a, b, c) = (h, g, f).
    """
    table = list(table)
    src = list(src)
    tgt = list(tgt)
    ids = list(ids)
    for f in range(n_mor):
        i_t = ids[tgt[f]]
        if table[i_t * n_mor + f] != f:
            return (1, i_t, f, table[i_t * n_mor + f])
        i_s = ids[src[f]]
        if table[f * n_mor + i_s] != f:
            return (1, f, i_s, table[f * n_mor + i_s])
    for g in range(n_mor):
        y = src[g]
        for k in range(in_ptr[y], in_ptr[y + 1]):
            f = in_idx[k]
            h = table[g * n_mor + f]
            if src[h] != src[f] or tgt[h] != tgt[g]:
                return (2, g, f, h)
    for h in range(n_mor):
        y = src[h]
        for k in range(in_ptr[y], in_ptr[y + 1]):
            g = in_idx[k]
            hg = table[h * n_mor + g]
            x = src[g]
            for l in range(in_ptr[x], in_ptr[x + 1]):
                f = in_idx[l]
                if table[hg * n_mor + f] != table[h * n_mor + table[g * n_mor + f]]:
                    return (3, h, g, f)
    return (0, -1, -1, -1)


def enumerate_functors(steps, step_kind, step_item, cons_ptr, cons_g, cons_f,
                       cons_gf, c_src, c_tgt, c_ids, n_ob_c, n_mor_c,
                       ob_cand_ptr, ob_cand, mor_mask, d_n_ob, d_n_mor,
                       d_table, d_ids, d_hom_ptr, d_hom_idx, cap):
    """Backtracking enumeration of functors.

    ``steps`` is the number of assignment steps; step ``s`` assigns an object
    (kind 0) or a non-identity morphism (kind 1) named by ``step_item[s]``.
    Object candidates are CSR encoded. A morphism ranges over the target
    hom-set between the images of its endpoints, filtered by ``mor_mask``
    (flat ``n_mor_c x d_n_mor`` 0/1 table) when that is non-empty.
    Constraints ``(g, f, gf)`` listed for a step are verified right after that
    step is assigned. Returns the list of morphism maps, or None if more than
    ``cap`` functors exist.
    """
    d_table = list(d_table)
    use_mask = len(mor_mask) > 0
    ob_map = [-1] * n_ob_c
    mor_map = [-1] * n_mor_c
    pos = [0] * (steps + 1)
    out = []
    if steps == 0:
        return [[]]
    s = 0
    while s >= 0:
        kind = step_kind[s]
        item = step_item[s]
        if kind == 0:
            lo, hi = ob_cand_ptr[item], ob_cand_ptr[item + 1]
        else:
            cell = ob_map[c_src[item]] * d_n_ob + ob_map[c_tgt[item]]
            lo, hi = d_hom_ptr[cell], d_hom_ptr[cell + 1]
        placed = False
        while pos[s] < hi - lo:
            k = pos[s]
            pos[s] += 1
            if kind == 0:
                y = ob_cand[lo + k]
                ob_map[item] = y
                mor_map[c_ids[item]] = d_ids[y]
            else:
                m = d_hom_idx[lo + k]
                if use_mask and not mor_mask[item * d_n_mor + m]:
                    continue
                mor_map[item] = m
            ok = True
            for c in range(cons_ptr[s], cons_ptr[s + 1]):
                fg = d_table[mor_map[cons_g[c]] * d_n_mor + mor_map[cons_f[c]]]
                if fg != mor_map[cons_gf[c]]:
                    ok = False
                    break
            if ok:
                placed = True
                break
        if not placed:
            pos[s] = 0
            s -= 1
            continue
        if s == steps - 1:
            out.append(list(mor_map))
            if len(out) > cap:
                return None
        else:
            s += 1
            pos[s] = 0
    return out
