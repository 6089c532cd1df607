"""Pure-Python search kernels.

Same call signatures as the compiled ``_kernels_c`` extension; ``rwb.kernels``
picks one of the two at import time.  All array arguments are flat integer
sequences (``array('i')`` in practice) so that both backends share the plans
built in :mod:`rwb.core` and :mod:`rwb.ramsey`.
"""


def embed_search(n_a, n_c, dom_ptr, dom_val, chk_ptr, chk_ar, chk_off,
                 chk_pos, chk_val, max_ar, ctab, limit):
    """Enumerate injective maps passing every membership check.

    Position ``i`` is assigned after positions ``0..i-1``; its checks are the
    slice ``chk_ptr[i]:chk_ptr[i+1]``.  Each check compares the target table
    byte at ``chk_off[j] + mixed_radix(image of chk_pos[j])`` with
    ``chk_val[j]``.  Images come out in lexicographic order; ``limit == 0``
    means no limit.
    """
    if n_a == 0:
        return [()]
    out = []
    img = [-1] * n_a
    used = [False] * n_c
    it = [0] * n_a
    pos = 0
    it[0] = dom_ptr[0]
    while pos >= 0:
        prev = img[pos]
        if prev >= 0:
            used[prev] = False
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
        used[img[pos]] = True
        if pos == n_a - 1:
            out.append(tuple(img))
            if limit and len(out) >= limit:
                return out
        else:
            pos += 1
            it[pos] = dom_ptr[pos]
    return out


def color_search(nv, k, order, edge_ptr, inc_ptr, inc_edges, prefix, budget):
    """Find a k-coloring with no monochromatic edge, or prove none exists.

    Vertices are colored in ``order``; the first ``len(prefix)`` positions are
    forced to ``prefix``.  Colors are normalized (a position may only use a
    color at most one above the largest used so far), so the first solution
    found is the lexicographically least one along ``order``.

    Returns ``(colors, nodes, exhausted)``; ``colors`` is indexed by vertex or
    ``None``.  ``exhausted`` is true when the node budget ran out first.
    """
    ne = len(edge_ptr) - 1
    size = [edge_ptr[e + 1] - edge_ptr[e] for e in range(ne)]
    cnt = [0] * (ne * k)
    color = [-1] * nv

    def assign(v, c):
        ok = True
        for p in range(inc_ptr[v], inc_ptr[v + 1]):
            e = inc_edges[p]
            x = e * k + c
            cnt[x] += 1
            if cnt[x] == size[e]:
                ok = False
        color[v] = c
        return ok

    def unassign(v, c):
        for p in range(inc_ptr[v], inc_ptr[v + 1]):
            cnt[inc_edges[p] * k + c] -= 1
        color[v] = -1

    depth = len(prefix)
    top = -1
    for i in range(depth):
        c = prefix[i]
        if not assign(order[i], c):
            return None, 0, False
        if c > top:
            top = c
    if depth == nv:
        return list(color), 0, False

    cur = [-1] * nv
    mx = [-1] * (nv + 1)
    mx[depth] = top
    pos = depth
    nodes = 0
    while pos >= depth:
        v = order[pos]
        c = cur[pos]
        if c >= 0:
            unassign(v, c)
        c += 1
        lim = mx[pos] + 1
        if lim > k - 1:
            lim = k - 1
        placed = False
        while c <= lim:
            nodes += 1
            if nodes > budget:
                return None, nodes, True
            if assign(v, c):
                placed = True
                break
            unassign(v, c)
            c += 1
        if placed:
            cur[pos] = c
            mx[pos + 1] = c if c > mx[pos] else mx[pos]
            pos += 1
            if pos == nv:
                return list(color), nodes, False
            cur[pos] = -1
        else:
            cur[pos] = -1
            pos -= 1
    return None, nodes, False
