"""``rwb`` command line.

Exit codes: 0 holds / found, 1 refuted / not found, 2 usage or malformed
input, 3 resource limit.  JSON reports are deterministic: keys sorted, no
timings, and nothing that depends on the worker count.
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
from dataclasses import dataclass
from importlib import resources

from rwb.catalog import build_alias, get_class, get_entry, list_classes, run_expected
from rwb.core import Embedding, Structure, is_isomorphic
from rwb.errors import FormatError, ResourceLimit, RwbError
from rwb.fraisse import (
    ClassSpec,
    amalgamate,
    check_ap,
    check_extension_property,
    check_hp,
    check_jep,
    enumerate_models,
    grow_generic,
    hp_witness,
    is_member,
    joint_embedding,
    type_census,
)
from rwb.order import find_order_types
from rwb.ramsey import (
    Coloring,
    Palette,
    check_rigidity,
    copy_hypergraph,
    decide_arrow,
    default_budget,
    extract_indiscernible,
    find_witness,
    verify_coloring,
)

PROPS = ("hp", "jep", "ap", "rigidity", "types", "extension")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    class_name: str
    max_size: int
    k: int
    budget: int
    workers: int
    seed: int
    fmt: str

    def validate(self):
        if self.max_size < 1 or self.k < 1 or self.workers < 1:
            raise UsageError("bounds, k and workers must be positive")
        if self.budget < 1000:
            raise UsageError("node budget must be at least 1000")


# ---------------------------------------------------------------------------
# input helpers


def load_spec(args) -> ClassSpec:
    if args.spec_file:
        try:
            with open(args.spec_file) as fh:
                return ClassSpec.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read spec file: {exc}") from exc
    return get_class(args.class_name)


def load_structure(text: str, spec: ClassSpec) -> Structure:
    if text is None:
        raise UsageError("missing structure argument")
    if not os.path.exists(text):
        try:
            return build_alias(text, spec)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    try:
        with open(text) as fh:
            s = Structure.from_json(fh.read())
    except OSError as exc:
        raise FormatError(str(exc)) from exc
    if s.signature != spec.signature:
        raise FormatError(f"{text}: signature does not match class {spec.name}")
    return s


def _sdict(s):
    return None if s is None else s.to_dict()


def _sload(d):
    return Structure.from_dict(d)


# ---------------------------------------------------------------------------
# certificates to and from json


def _verdict_dict(v):
    cert = v.certificate
    out = {"check": v.check, "passed": v.passed, "bound": v.bound, "stats": v.stats,
           "certificate": None}
    if cert is None:
        return out
    if v.check == "hp":
        out["certificate"] = {"model": _sdict(cert.model), "subset": list(cert.subset)}
    elif v.check == "jep":
        out["certificate"] = {"left": _sdict(cert.left), "right": _sdict(cert.right),
                              "target": v.stats["target"]}
    elif v.check == "ap":
        out["certificate"] = {"base": _sdict(cert.base), "left": _sdict(cert.left),
                              "right": _sdict(cert.right), "left_map": list(cert.left_map),
                              "right_map": list(cert.right_map), "bound": cert.bound}
    elif v.check == "rigidity":
        out["certificate"] = {"model": _sdict(cert.model), "sigma": list(cert.sigma.map)}
    elif v.check == "extension":
        out["certificate"] = {"demand": _sdict(cert.demand), "base_subset": list(cert.base_subset),
                              "embedding": list(cert.embedding)}
    return out


def _replay_check(spec, c, model=None):
    """True iff the recorded verdict is reproduced."""
    cert = c["certificate"]
    name = c["check"]
    if c["passed"] or cert is None:
        if name == "types":
            return [p.to_dict() for p in type_census(spec, c["stats"]["arity"], c["bound"])] \
                == c["types"]
        if name == "extension":
            return check_extension_property(spec, model, c["bound"]).passed == c["passed"]
        if name == "jep":
            return check_jep(spec, c["bound"], c["stats"]["target"]).passed == c["passed"]
        runner = {"hp": check_hp, "ap": check_ap, "rigidity": check_rigidity}
        return runner[name](spec, c["bound"]).passed == c["passed"]
    if name == "hp":
        b = _sload(cert["model"])
        return is_member(spec, b) and hp_witness(spec, b, tuple(cert["subset"])) is None
    if name == "jep":
        a1, a2 = _sload(cert["left"]), _sload(cert["right"])
        return joint_embedding(spec, a1, a2, cert["target"]) is None
    if name == "ap":
        base, left, right = _sload(cert["base"]), _sload(cert["left"]), _sload(cert["right"])
        f1, f2 = tuple(cert["left_map"]), tuple(cert["right_map"])
        if not (Embedding(base, left, f1).is_valid() and Embedding(base, right, f2).is_valid()):
            return False
        return amalgamate(spec, base, left, f1, right, f2, cert["bound"]) is None
    if name == "rigidity":
        m = _sload(cert["model"])
        sigma = Embedding(m, m, tuple(cert["sigma"]))
        return sigma.is_valid() and sigma.map != tuple(range(m.size))
    if name == "extension":
        from rwb.fraisse import _extends

        b = _sload(cert["demand"])
        base = tuple(cert["base_subset"])
        e = tuple(cert["embedding"])
        return not _extends(b, base, e, model)
    return False


# ---------------------------------------------------------------------------
# commands; each returns (status, exit_code, result)


def cmd_enumerate(args, spec, cfg):
    cat = enumerate_models(spec, cfg.max_size, cfg.workers)
    counts = {str(k): v for k, v in cat.counts().items()}
    return "ok", 0, {"counts": counts, "models": [m.to_dict() for m in cat.all()]}


def cmd_check(args, spec, cfg):
    props = [p.strip() for p in args.props.split(",") if p.strip()]
    bad = [p for p in props if p not in PROPS]
    if bad or not props:
        raise UsageError(f"unknown properties {bad}; choose from {', '.join(PROPS)}")
    checks = []
    model = None
    for p in props:
        n = cfg.max_size
        if p == "types":
            ts = type_census(spec, args.arity, n, cfg.workers)
            checks.append({"check": "types", "passed": True, "bound": n,
                           "stats": {"arity": args.arity, "count": len(ts)},
                           "certificate": None, "types": [t.to_dict() for t in ts]})
            continue
        if p == "extension":
            if args.model is None:
                raise UsageError("extension needs --model")
            model = load_structure(args.model, spec)
            v = check_extension_property(spec, model, args.m)
        elif p == "hp":
            v = check_hp(spec, n, cfg.workers)
        elif p == "jep":
            v = check_jep(spec, n, args.target, cfg.workers)
        elif p == "ap":
            v = check_ap(spec, n, cfg.workers)
        else:
            v = check_rigidity(spec, n, cfg.workers)
        checks.append(_verdict_dict(v))
    ok = all(c["passed"] for c in checks)
    result = {"checks": checks, "model": _sdict(model)}
    return ("pass", 0, result) if ok else ("fail", 1, result)


def cmd_arrow(args, spec, cfg):
    A = load_structure(args.A, spec)
    B = load_structure(args.B, spec)
    if args.search:
        return _witness(A, B, spec, cfg)
    if args.C is None:
        raise UsageError("arrow needs --C or --search")
    C = load_structure(args.C, spec)
    v = decide_arrow(C, B, A, cfg.k, cfg.budget, cfg.workers)
    result = {"holds": v.holds, "stats": v.stats, "certificate": None,
              "A": A.to_dict(), "B": B.to_dict(), "C": C.to_dict()}
    if v.holds:
        return "holds", 0, result
    result["certificate"] = {"A": A.to_dict(), "B": B.to_dict(), "C": C.to_dict(),
                             "coloring": v.coloring.to_dict()}
    return "refuted", 1, result


def _witness(A, B, spec, cfg):
    w = find_witness(spec, A, B, cfg.k, cfg.max_size, cfg.budget, cfg.workers)
    result = {"A": A.to_dict(), "B": B.to_dict(), "max_size": cfg.max_size,
              "witness": w.to_dict() if isinstance(w, Structure) else None}
    if isinstance(w, Structure):
        return "found", 0, result
    return "not_found", 1, result


def cmd_witness(args, spec, cfg):
    return _witness(load_structure(args.A, spec), load_structure(args.B, spec), spec, cfg)


def cmd_order(args, spec, cfg):
    cands = find_order_types(spec, cfg.max_size, cfg.workers)
    result = {"bound": cfg.max_size, "count": len(cands),
              "candidates": [[p.to_dict() for p in c.W] for c in cands]}
    return ("found", 0, result) if cands else ("not_found", 1, result)


def cmd_indiscernible(args, spec, cfg):
    A = load_structure(args.A, spec)
    C = load_structure(args.C, spec)
    if args.palette:
        try:
            with open(args.palette) as fh:
                palette = Palette.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read palette: {exc}") from exc
    else:
        # seeded pair palette with k colors over all ordered pairs of C
        rng = random.Random(cfg.seed)
        cmap = {t: rng.randrange(cfg.k) for t in itertools.product(range(C.size), repeat=2)}
        palette = Palette(2, 0, cmap)
    g = extract_indiscernible(C, A, palette, iterated=args.iterated)
    result = {"A": A.to_dict(), "C": C.to_dict(), "palette": palette.to_dict(),
              "embedding": None if g is None else list(g.map)}
    return ("found", 0, result) if g is not None else ("not_found", 1, result)


def cmd_generic(args, spec, cfg):
    m = grow_generic(spec, args.size_budget, cfg.seed, args.cap, workers=cfg.workers)
    v = check_extension_property(spec, m, args.cap)
    result = {"model": m.to_dict(), "size": m.size, "size_budget": args.size_budget,
              "cap": args.cap, "extension": _verdict_dict(v)}
    return "ok", 0, result


def cmd_catalog(args, spec, cfg):
    entries = []
    ok = True
    for e in list_classes():
        d = {"name": e.spec.name, "notes": e.spec.notes, "checker": e.spec.checker,
             "expected": e.expected, "bounds": e.bounds,
             "forbidden": len(e.spec.forbidden)}
        if args.replay:
            observed = run_expected(e, cfg.workers)
            d["observed"] = observed
            ok = ok and observed == e.expected
        entries.append(d)
    return ("ok", 0, {"classes": entries}) if ok else ("mismatch", 1, {"classes": entries})


def _same_status(report, status):
    return status == report["status"]


def cmd_verify(args, spec, cfg):
    try:
        with open(args.report) as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read report: {exc}") from exc
    errors = schema_errors(report)
    if errors:
        raise FormatError("report does not match schema: " + errors[0])
    ok, detail = replay(report)
    result = {"replayed": report["command"], "status": report["status"], "details": detail}
    return ("ok", 0, result) if ok else ("mismatch", 1, result)


def replay(report):
    """Re-run or re-verify the content of a report; (ok, list of notes)."""
    cmd = report["command"]
    res = report["result"]
    spec = ClassSpec.from_dict(report["spec"]) if "spec" in report else None
    conf = report["config"]
    notes = []
    if cmd == "enumerate":
        cat = enumerate_models(spec, conf["max_size"])
        ok = [m.to_dict() for m in cat.all()] == res["models"]
        notes.append("catalog re-enumerated")
    elif cmd == "check":
        model = _sload(res["model"]) if res.get("model") else None
        ok = True
        for c in res["checks"]:
            good = _replay_check(spec, c, model)
            notes.append(f"{c['check']}: {'replayed' if good else 'differs'}")
            ok = ok and good
    elif cmd == "arrow" and "witness" not in res:
        A, B, C = _sload(res["A"]), _sload(res["B"]), _sload(res["C"])
        if res["holds"]:
            ok = decide_arrow(C, B, A, conf["k"], conf["budget"]).holds
            notes.append("arrow re-decided")
        else:
            cert = res["certificate"]
            col = Coloring.from_dict(cert["coloring"])
            ok = verify_coloring(col, copy_hypergraph(A, B, C))
            notes.append("coloring has no monochromatic copy" if ok else "coloring invalid")
    elif cmd in ("arrow", "witness"):
        A, B = _sload(res["A"]), _sload(res["B"])
        w = find_witness(spec, A, B, conf["k"], conf["max_size"], conf["budget"])
        if res["witness"] is None:
            ok = not isinstance(w, Structure)
        else:
            C = _sload(res["witness"])
            ok = (isinstance(w, Structure) and is_isomorphic(w, C)
                  and decide_arrow(C, B, A, conf["k"], conf["budget"]).holds)
        notes.append("witness search replayed")
    elif cmd == "order":
        cands = find_order_types(spec, res["bound"])
        ok = [[p.to_dict() for p in c.W] for c in cands] == res["candidates"]
        notes.append("order types re-derived")
    elif cmd == "indiscernible":
        A, C = _sload(res["A"]), _sload(res["C"])
        pal = Palette.from_dict(res["palette"])
        g = extract_indiscernible(C, A, pal)
        ok = (None if g is None else list(g.map)) == res["embedding"]
        notes.append("extraction replayed")
    elif cmd == "generic":
        m = grow_generic(spec, res["size_budget"], conf["seed"], res["cap"], precheck=False)
        ok = m.to_dict() == res["model"] and is_member(spec, m)
        notes.append("growth replayed")
    elif cmd == "catalog":
        ok = all(get_entry(c["name"]).expected == c["expected"] for c in res["classes"])
        if ok:
            for c in res["classes"]:
                if "observed" in c:
                    ok = ok and run_expected(get_entry(c["name"])) == c["observed"]
        notes.append("catalog expectations compared")
    else:
        ok = False
        notes.append(f"cannot replay {cmd}")
    return ok, notes


# ---------------------------------------------------------------------------
# schema and output


def load_schema():
    return json.loads(resources.files("rwb").joinpath("report.schema.json").read_text())


def schema_errors(report) -> list[str]:
    import jsonschema

    validator = jsonschema.Draft202012Validator(load_schema())
    return [e.message for e in sorted(validator.iter_errors(report), key=str)]


def _human(report):
    lines = [f"{report['command']}: {report['status']} (exit {report['exit_code']})"]
    res = report["result"]
    cmd = report["command"]
    if cmd == "check":
        for c in res["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            lines.append(f"  {c['check']:<10} {mark} up to {c['bound']}  {c['stats']}")
            if c["certificate"]:
                for key, val in c["certificate"].items():
                    lines.append(f"    {key}: {_short(val)}")
    elif cmd == "enumerate":
        lines.append(f"  models per size: {res['counts']}")
    elif cmd in ("arrow", "witness"):
        if "witness" in res:
            w = res["witness"]
            lines.append(f"  witness: {_short(w) if w else 'none up to ' + str(res['max_size'])}")
        else:
            lines.append(f"  stats: {res['stats']}")
            if res["certificate"]:
                for a in res["certificate"]["coloring"]["assignments"]:
                    lines.append(f"    {a['image']} -> {a['color']}")
    elif cmd == "order":
        lines.append(f"  {res['count']} candidate(s) up to {res['bound']}")
        for c in res["candidates"]:
            lines.append("    " + " | ".join(json.dumps(p["relations"], sort_keys=True) for p in c))
    elif cmd == "indiscernible":
        lines.append(f"  embedding: {res['embedding']}")
    elif cmd == "generic":
        lines.append(f"  size {res['size']}: {_short(res['model'])}")
        lines.append(f"  extension property (m={res['cap']}): {res['extension']['passed']}")
    elif cmd == "catalog":
        for c in res["classes"]:
            extra = f" observed={c['observed']}" if "observed" in c else ""
            lines.append(f"  {c['name']:<22} expected={c['expected']}{extra}")
    elif cmd == "verify":
        lines.extend(f"  {d}" for d in res["details"])
    elif "stats" in res:
        lines.append(f"  stats: {res['stats']}")
    return "\n".join(lines)


def _short(val):
    if isinstance(val, dict) and "tables" in val:
        return Structure.from_dict(val).__repr__()
    return json.dumps(val, sort_keys=True)


def dump(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--class", dest="class_name", default="linear-orders")
    common.add_argument("--spec-file")
    common.add_argument("--max-size", type=int, default=5)
    common.add_argument("--k", type=int, default=2)
    common.add_argument("--budget", type=int, default=None,
                        help="search node budget (default: $RWB_BUDGET or 10^7)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="fmt", choices=("human", "json"), default="human")

    p = argparse.ArgumentParser(prog="rwb", description="Structural Ramsey workbench")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("enumerate", parents=[common], help="list models up to isomorphism")
    c = sub.add_parser("check", parents=[common], help="bounded class axiom checks")
    c.add_argument("--props", default="hp,jep,ap")
    c.add_argument("--arity", type=int, default=2, help="tuple length for the type census")
    c.add_argument("--model", help="structure for the extension check (alias or file)")
    c.add_argument("--m", type=int, default=2, help="demand size for the extension check")
    c.add_argument("--target", type=int, default=None, help="joint embedding size cap")
    for name in ("arrow", "witness"):
        a = sub.add_parser(name, parents=[common], help="partition arrow C -> (B)^A_k")
        a.add_argument("--A", required=True)
        a.add_argument("--B", required=True)
        if name == "arrow":
            a.add_argument("--C")
            a.add_argument("--search", action="store_true")
    sub.add_parser("order", parents=[common], help="definable orders from 2-types")
    i = sub.add_parser("indiscernible", parents=[common], help="type-uniform embedding")
    i.add_argument("--A", required=True)
    i.add_argument("--C", required=True)
    i.add_argument("--palette", help="palette json; default is a random pair palette from --seed")
    i.add_argument("--iterated", action="store_true")
    g = sub.add_parser("generic", parents=[common], help="grow an extension-rich model")
    g.add_argument("--size-budget", type=int, default=10)
    g.add_argument("--cap", type=int, default=2)
    cat = sub.add_parser("catalog", parents=[common], help="built-in classes")
    cat.add_argument("--replay", action="store_true", help="run the expected checks")
    v = sub.add_parser("verify", parents=[common], help="replay a json report")
    v.add_argument("report")
    return p


COMMANDS = {
    "enumerate": cmd_enumerate, "check": cmd_check, "arrow": cmd_arrow,
    "witness": cmd_witness, "order": cmd_order, "indiscernible": cmd_indiscernible,
    "generic": cmd_generic, "catalog": cmd_catalog, "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    budget = args.budget if args.budget is not None else default_budget()
    cfg = RunConfig(args.class_name, args.max_size, args.k, budget, args.workers,
                    args.seed, args.fmt)
    report = {"command": args.command,
              "config": {"class": args.class_name, "max_size": cfg.max_size, "k": cfg.k,
                         "budget": cfg.budget, "seed": cfg.seed}}
    try:
        cfg.validate()
        spec = None if args.command in ("catalog", "verify") else load_spec(args)
        if spec is not None:
            report["config"]["class"] = spec.name
            report["spec"] = spec.to_dict()
        status, code, result = COMMANDS[args.command](args, spec, cfg)
    except ResourceLimit as exc:
        status, code, result = "resource_limit", 3, {"error": str(exc), "stats": exc.stats}
    except (UsageError, RwbError, ValueError) as exc:
        print(f"rwb: error: {exc}", file=sys.stderr)
        return 2
    report.update(status=status, exit_code=code, result=result)
    print(dump(report) if cfg.fmt == "json" else _human(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
