"""Time the compiled and pure-Python kernels on the same inputs.

    python3 bench/bench_kernels.py [--repeat N]

Prints one row per workload and backend with the best time over N repeats,
and checks that both backends return the same answer.
"""
import argparse
import random
import timeit
from array import array

from rwb import kernels
from rwb.core import Signature, Structure, _domains
from rwb.ramsey import _plan, copy_hypergraph

LO = Signature((("<", 2),))
GR = Signature((("E", 2),))


def chain(n):
    return Structure(LO, n, {"<": [(i, j) for i in range(n) for j in range(i + 1, n)]})


def graph(n, edges):
    return Structure(GR, n, {"E": [e for a, b in edges for e in ((a, b), (b, a))]})


def embed_args(a, c, limit=0):
    chk_ptr, chk_ar, chk_rel, chk_pos, chk_val, max_ar = a.embed_plan
    ctab, offsets = c.packed
    chk_off = array("i", [offsets[r] for r in chk_rel])
    dom_ptr, dom_val = _domains(a, c, None)
    return (a.size, c.size, dom_ptr, dom_val, chk_ptr, chk_ar, chk_off, chk_pos, chk_val,
            max_ar, ctab, limit)


def color_args(a, b, c, k, budget=10**8):
    hg = copy_hypergraph(a, b, c)
    order, edge_ptr, inc_ptr, inc = _plan(hg)
    return (len(hg.vertices), k, array("i", order), array("i", edge_ptr), array("i", inc_ptr),
            array("i", inc), array("i", []), budget)


def workloads():
    rnd = random.Random(1)
    n = 20
    g = graph(n, [(x, y) for x in range(n) for y in range(x + 1, n) if rnd.random() < 0.5])
    k3 = graph(3, [(0, 1), (1, 2), (0, 2)])
    c4 = graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    return [
        ("embed chain5 -> chain22", "embed_search", embed_args(chain(5), chain(22))),
        ("embed K3 -> G(20, 1/2)", "embed_search", embed_args(k3, g)),
        ("embed C4 -> G(20, 1/2)", "embed_search", embed_args(c4, g)),
        ("color chain6 -> (chain3)^chain2_2", "color_search",
         color_args(chain(2), chain(3), chain(6), 2)),
        # R(3,3,3) = 17: the 16-chain search is huge, so a node budget fixes the work
        ("color chain16 -> (chain3)^chain2_3 50k", "color_search",
         color_args(chain(2), chain(3), chain(16), 3, budget=50000)),
        ("color chain8 -> (chain4)^chain2_2 50k", "color_search",
         color_args(chain(2), chain(4), chain(8), 2, budget=50000)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    mods = kernels.backends()
    if "cython" not in mods:
        print("compiled backend not built; timing python only")
    print(f"{'workload':40s} {'backend':8s} {'best ms':>10s} {'speedup':>8s}")
    for label, fn, fargs in workloads():
        times, answers = {}, {}
        for name, mod in sorted(mods.items()):
            f = getattr(mod, fn)
            answers[name] = f(*fargs)
            times[name] = min(timeit.repeat(lambda: f(*fargs), number=1, repeat=args.repeat))
        if len({repr(v) for v in answers.values()}) != 1:
            raise SystemExit(f"backends disagree on {label}")
        base = times["python"]
        for name in sorted(times):
            print(f"{label:40s} {name:8s} {times[name] * 1e3:10.3f} {base / times[name]:7.1f}x")


if __name__ == "__main__":
    main()
