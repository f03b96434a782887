# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled integer kernels; see ``_kernels_py`` for the reference versions."""


def check_laws(int n_mor, int[:] src, int[:] tgt, int[:] ids, int[:] table,
               int[:] in_ptr, int[:] in_idx):
    cdef int f, g, h, hg, x, y, k, l, i_t, i_s
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


def enumerate_functors(int steps, int[:] step_kind, int[:] step_item,
                       int[:] cons_ptr, int[:] cons_g, int[:] cons_f,
                       int[:] cons_gf, int[:] c_src, int[:] c_tgt, int[:] c_ids,
                       int n_ob_c, int n_mor_c, int[:] ob_cand_ptr,
                       int[:] ob_cand, signed char[:] mor_mask, int d_n_ob,
                       int d_n_mor, int[:] d_table, int[:] d_ids,
                       int[:] d_hom_ptr, int[:] d_hom_idx, long cap):
    cdef int s, kind, item, lo, hi, k, y, m, c, fg, cell, i
    cdef bint placed, ok
    cdef bint use_mask = mor_mask.shape[0] > 0
    cdef int[:] ob_map
    cdef int[:] mor_map
    cdef int[:] pos
    from array import array
    ob_map = array('i', [-1] * max(n_ob_c, 1))
    mor_map = array('i', [-1] * max(n_mor_c, 1))
    pos = array('i', [0] * (steps + 1))
    out = []
    if steps == 0:
        return [[]]
    s = 0
    while s >= 0:
        kind = step_kind[s]
        item = step_item[s]
        if kind == 0:
            lo = ob_cand_ptr[item]
            hi = ob_cand_ptr[item + 1]
        else:
            cell = ob_map[c_src[item]] * d_n_ob + ob_map[c_tgt[item]]
            lo = d_hom_ptr[cell]
            hi = d_hom_ptr[cell + 1]
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
            out.append([mor_map[i] for i in range(n_mor_c)])
            if len(out) > cap:
                return None
        else:
            s += 1
            pos[s] = 0
    return out
