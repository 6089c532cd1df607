# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_kernels_py``; identical semantics."""

from libc.stdlib cimport malloc, calloc, free


def embed_search(int n_a, int n_c, const int[:] dom_ptr, const int[:] dom_val,
                 const int[:] chk_ptr, const int[:] chk_ar, const int[:] chk_off,
                 const int[:] chk_pos, const int[:] chk_val, int max_ar,
                 const unsigned char[:] ctab, long limit):
    cdef list out = []
    if n_a == 0:
        return [()]
    cdef int *img = <int *> malloc(n_a * sizeof(int))
    cdef int *it = <int *> malloc(n_a * sizeof(int))
    cdef char *used = <char *> calloc(n_c if n_c > 0 else 1, sizeof(char))
    cdef int pos, c, j, t, prev, end, base
    cdef long idx
    cdef bint ok, found
    try:
        for pos in range(n_a):
            img[pos] = -1
        pos = 0
        it[0] = dom_ptr[0]
        while pos >= 0:
            prev = img[pos]
            if prev >= 0:
                used[prev] = 0
                img[pos] = -1
            end = dom_ptr[pos + 1]
            found = False
            while it[pos] < end:
                c = dom_val[it[pos]]
                it[pos] += 1
                if used[c]:
                    continue
                img[pos] = c
                ok = True
                for j in range(chk_ptr[pos], chk_ptr[pos + 1]):
                    base = j * max_ar
                    idx = 0
                    for t in range(chk_ar[j]):
                        idx = idx * n_c + img[chk_pos[base + t]]
                    if ctab[chk_off[j] + idx] != chk_val[j]:
                        ok = False
                        break
                if ok:
                    found = True
                    break
                img[pos] = -1
            if not found:
                pos -= 1
                continue
            used[img[pos]] = 1
            if pos == n_a - 1:
                out.append(tuple([img[t] for t in range(n_a)]))
                if limit and len(out) >= limit:
                    return out
            else:
                pos += 1
                it[pos] = dom_ptr[pos]
        return out
    finally:
        free(img)
        free(it)
        free(used)


def color_search(int nv, int k, const int[:] order, const int[:] edge_ptr,
                 const int[:] inc_ptr, const int[:] inc_edges, prefix,
                 long long budget):
    cdef int ne = edge_ptr.shape[0] - 1
    cdef int depth = len(prefix)
    cdef int *size = <int *> malloc((ne if ne > 0 else 1) * sizeof(int))
    cdef int *cnt = <int *> calloc((ne * k) if ne > 0 else 1, sizeof(int))
    cdef int *color = <int *> malloc((nv if nv > 0 else 1) * sizeof(int))
    cdef int *cur = <int *> malloc((nv if nv > 0 else 1) * sizeof(int))
    cdef int *mx = <int *> malloc((nv + 1) * sizeof(int))
    cdef int e, i, v, c, p, x, lim, top, pos
    cdef long long nodes = 0
    cdef bint ok, placed
    try:
        for e in range(ne):
            size[e] = edge_ptr[e + 1] - edge_ptr[e]
        for i in range(nv):
            color[i] = -1
            cur[i] = -1
        top = -1
        for i in range(depth):
            c = prefix[i]
            v = order[i]
            ok = True
            for p in range(inc_ptr[v], inc_ptr[v + 1]):
                x = inc_edges[p] * k + c
                cnt[x] += 1
                if cnt[x] == size[inc_edges[p]]:
                    ok = False
            color[v] = c
            if not ok:
                return None, 0, False
            if c > top:
                top = c
        if depth == nv:
            return [color[i] for i in range(nv)], 0, False
        mx[depth] = top
        pos = depth
        while pos >= depth:
            v = order[pos]
            c = cur[pos]
            if c >= 0:
                for p in range(inc_ptr[v], inc_ptr[v + 1]):
                    cnt[inc_edges[p] * k + c] -= 1
                color[v] = -1
            c += 1
            lim = mx[pos] + 1
            if lim > k - 1:
                lim = k - 1
            placed = False
            while c <= lim:
                nodes += 1
                if nodes > budget:
                    return None, nodes, True
                ok = True
                for p in range(inc_ptr[v], inc_ptr[v + 1]):
                    x = inc_edges[p] * k + c
                    cnt[x] += 1
                    if cnt[x] == size[inc_edges[p]]:
                        ok = False
                if ok:
                    color[v] = c
                    placed = True
                    break
                for p in range(inc_ptr[v], inc_ptr[v + 1]):
                    cnt[inc_edges[p] * k + c] -= 1
                c += 1
            if placed:
                cur[pos] = c
                mx[pos + 1] = c if c > mx[pos] else mx[pos]
                pos += 1
                if pos == nv:
                    return [color[i] for i in range(nv)], nodes, False
                cur[pos] = -1
            else:
                cur[pos] = -1
                pos -= 1
        return None, nodes, False
    finally:
        free(size)
        free(cnt)
        free(color)
        free(cur)
        free(mx)
