"""Command-line interface: ``python -m intriguing <command> ...``.

Exit codes: 0 success, 1 user error, 2 search budget exhausted (partial
results written), 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import catalog, formats, geometry, infinity, intrigue
from .errors import BudgetExhausted, InvariantViolation
from .graphcore import bits_of, srg_params

log = logging.getLogger("intriguing")


class UserError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UserError(f"cannot read {path}: {e.strerror}") from None


def _out(args, name: str) -> Path:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _emit(path: Path, text: str, manifest: formats.RunManifest | None = None) -> None:
    formats.write_text(path, text)
    if manifest is not None:
        manifest.outputs[str(path)] = formats.sha256_file(path)
    print(f"wrote {path}")


def _manifest(args, command: str, inputs=()) -> formats.RunManifest:
    m = formats.RunManifest(command, list(sys.argv[1:]), threads=getattr(args, "threads", 1))
    for p in inputs:
        m.inputs[str(p)] = formats.sha256_file(p)
    return m


def _finish(manifest: formats.RunManifest, path: Path, start: float) -> None:
    manifest.wall_time = round(time.perf_counter() - start, 3)
    formats.write_text(path, manifest.to_json())


def _describe(g) -> str:
    p = srg_params(g)
    eig = f"eigenvalues {p.k} {p.e_plus} {p.e_minus}" if p.rational else f"irrational eigenvalues (disc={p.disc})"
    return f"SRG{p.as_tuple} {eig}"


# build ----------------------------------------------------------------------

def cmd_build(args) -> int:
    what = args.what.replace("_", "-").lower()
    if what in ("q-minus", "q-parabolic", "q"):
        if len(args.params) != 2:
            raise UserError(f"build {what} needs <n> <q>")
        n, q = map(int, args.params)
        if what == "q-minus":
            if n != 5:
                raise UserError("elliptic quadrics are built in PG(5,q)")
            geo = geometry.elliptic_gq(q)
        else:
            if n != 4:
                raise UserError("parabolic quadrics are built in PG(4,q)")
            geo = geometry.parabolic_gq(q)
        stem = f"{what}-{n}-{q}"
        _emit(_out(args, stem + ".geo"), formats.write_geometry(geo))
        g = geometry.collinearity_graph(geo)
        _emit(_out(args, stem + ".graph"), formats.write_graph(g))
        print(_describe(g))
        return 0
    if what in ("coxeter-pq", "hill56-pq"):
        if what == "coxeter-pq":
            cap = geometry.cap_search(4, 3, 11, require_srg=True, budget=args.budget_nodes)
        else:
            cap = formats.bundled_cap("hill56")
        rep = geometry.linear_representation(cap)
        stem = what[:-3]
        _emit(_out(args, stem + ".cap"), formats.write_cap(cap))
        _emit(_out(args, stem + ".geo"), formats.write_geometry(rep.geometry))
        _emit(_out(args, stem + ".graph"), formats.write_graph(rep.graph))
        print(_describe(rep.graph))
        return 0
    key = what.replace("-", "_")
    if key not in catalog.NAMED:
        raise UserError(f"unknown build target {args.what!r}")
    g = catalog.build_named(key)
    _emit(_out(args, key + ".graph"), formats.write_graph(g))
    print(_describe(g))
    return 0


# enumerate / verify / intersect --------------------------------------------

def cmd_enumerate(args) -> int:
    start = time.perf_counter()
    g = formats.read_graph(_read(args.graph), Path(args.graph).stem)
    inputs = [args.graph]
    group = None
    if args.group:
        group = formats.read_group(_read(args.group))
        inputs.append(args.group)
    man = _manifest(args, "enumerate", inputs)
    res = intrigue.enumerate_intriguing(
        g, args.sign, size_cap=args.size_cap, first_only=args.first, group=group,
        budget=args.budget_nodes, threads=args.threads)
    out = Path(args.output)
    text = formats.write_sets(formats.entry(k, c) for k, c in zip(res.sets, res.certificates))
    _emit(out, text, man)
    man.exhaustive = res.exhaustive
    p = res.params
    man.extra = {
        "sign": args.sign,
        "size_cap": args.size_cap,
        "first_only": args.first,
        "budget_nodes": args.budget_nodes,
        "nodes": res.nodes,
        "count": len(res.sets),
        "srg": list(p.as_tuple) if p else None,
        "reason": "irrational eigenvalues: " + res.reason if res.reason else "",
        "rows": [f"{r.sign} h1={r.h1} h2={r.h2} size={r.size} found={res.per_row.get(r, 0)}"
                 for r in res.rows],
    }
    _finish(man, Path(str(out) + ".manifest.json"), start)
    print(f"{len(res.sets)} sets; exhaustive={res.exhaustive}")
    if res.reason:
        print(f"reason: irrational eigenvalues ({res.reason})")
    if not res.exhaustive:
        raise BudgetExhausted("search budget exhausted; results are partial")
    return 0


def cmd_verify(args) -> int:
    g = formats.read_graph(_read(args.graph))
    p = srg_params(g)
    bad = 0
    for e in formats.read_sets(_read(args.sets)):
        c = intrigue.verify(g, e.mask, p)
        if c is None:
            bad += 1
            print(f"{' '.join(map(str, e.members))} | not intriguing")
        else:
            note = ""
            if e.sign is not None and (e.sign, e.h1, e.h2) != (c.sign, c.h1, c.h2):
                note = " (annotation disagrees)"
                bad += 1
            print(f"{' '.join(map(str, e.members))} | sign={c.sign[:3]} h1={c.h1} h2={c.h2} size={c.size}{note}")
    print(f"failed: {bad}")
    return 0


def cmd_intersect(args) -> int:
    g = formats.read_graph(_read(args.graph))
    plus = formats.read_sets(_read(args.plus))
    minus = formats.read_sets(_read(args.minus))
    counts = {}
    for a in plus:
        for b in minus:
            k = intrigue.intersection_check(g, a.mask, b.mask)
            counts[k] = counts.get(k, 0) + 1
    for k in sorted(counts):
        print(f"meet={k} pairs={counts[k]}")
    print(f"checked {len(plus) * len(minus)} pairs")
    return 0


# derive ---------------------------------------------------------------------

def cmd_derive(args) -> int:
    op = args.op
    if op == "minus-perp":
        geo = formats.read_geometry(_read(args.input))
        P = int(args.args[0]) if args.args else 0
        if not 0 <= P < geo.n_points:
            raise UserError(f"point {P} out of range")
        pq = geometry.minus_perp(geo, P)
        stem = Path(args.input).stem + f"-minus-perp-{P}"
    elif op == "restrict":
        geo = formats.read_geometry(_read(args.input))
        if args.args:
            H = formats.read_sets(_read(args.args[0]))[0].mask
        else:
            H = geometry.find_hemisystem(geo).bits
        pq = geometry.restrict_to_set(geo, H)
        stem = Path(args.input).stem + "-hemisystem"
    elif op in ("complement", "union", "difference"):
        g = formats.read_graph(_read(args.input))
        sets = [formats.read_sets(_read(f))[0].mask for f in args.args]
        if len(sets) != (1 if op == "complement" else 2):
            raise UserError(f"{op} needs {'one set file' if op == 'complement' else 'two set files'}")
        try:
            new, cert = intrigue.closure(g, sets[0], sets[1] if len(sets) > 1 else None, op)
        except intrigue.ClosureError as e:
            raise UserError(str(e)) from None
        path = _out(args, f"{op}.set")
        _emit(path, formats.write_sets([formats.entry(bits_of(new), cert)]))
        return 0
    else:
        raise UserError(f"unknown derivation {op!r}")
    _emit(_out(args, stem + ".geo"), formats.write_geometry(pq))
    g = geometry.collinearity_graph(pq)
    _emit(_out(args, stem + ".graph"), formats.write_graph(g))
    _emit(_out(args, stem + ".map"), " ".join(map(str, pq.vertex_map)) + "\n")
    print(f"{pq.n_points} points; {_describe(g)}")
    return 0


# infinity / complete --------------------------------------------------------

def _parse_inf(spec: str, geo) -> int:
    kind, _, val = spec.partition(":")
    if kind == "perp":
        P = int(val)
        if not 0 <= P < geo.n_points:
            raise UserError(f"point {P} out of range")
        return geo.perp(P)
    if kind == "set":
        return formats.read_sets(_read(val))[0].mask
    raise UserError(f"--inf must be perp:<point> or set:<file>, got {spec!r}")


def cmd_infinity(args) -> int:
    geo = formats.read_geometry(_read(args.geometry))
    inf = _parse_inf(args.inf, geo)
    for e in formats.read_sets(_read(args.set)):
        try:
            v = infinity.check_atinfinity(geo, inf, e.mask)
        except infinity.NotIntriguingError as err:
            raise UserError(str(err)) from None
        print(v.describe())
    return 0


def cmd_complete(args) -> int:
    geo = formats.read_geometry(_read(args.geometry))
    entries = formats.read_sets(_read(args.set))
    try:
        comp = infinity.complete_to_hemisystem(geo, args.point, entries[0].mask)
    except (infinity.SizeMismatchError, infinity.NotIntriguingError) as e:
        raise UserError(str(e)) from None
    path = Path(args.output)
    _emit(path, formats.write_sets([formats.entry(comp.hemisystem.members)]))
    print(f"hemisystem of {len(comp.hemisystem)} points; added {len(comp.added)} points of the perp")
    return 0


# search ---------------------------------------------------------------------

def cmd_search(args) -> int:
    if args.what == "hemisystem":
        geo = formats.read_geometry(_read(args.params[0]))
        H = geometry.find_hemisystem(geo)
        _emit(Path(args.output), formats.write_sets([formats.entry(H.members)]))
        return 0
    if args.what == "cap":
        if len(args.params) != 3:
            raise UserError("search cap needs <n> <q> <k>")
        n, q, k = map(int, args.params)
        try:
            cap = geometry.cap_search(n, q, k, require_srg=args.srg, budget=args.budget_nodes)
        except geometry.CapSearchExhausted as e:
            if e.budget_hit:
                raise BudgetExhausted(str(e)) from None
            print(f"exhausted: {e}")
            return 0
        _emit(Path(args.output), formats.write_cap(cap))
        return 0
    raise UserError(f"unknown search target {args.what!r}")


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="intriguing", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_dir=True):
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--budget-nodes", type=int, default=None)
        if out_dir:
            p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("build", help="build a named graph, quadric or linear representation")
    p.add_argument("what")
    p.add_argument("params", nargs="*")
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("enumerate", help="enumerate intriguing sets of a graph")
    p.add_argument("graph")
    p.add_argument("sign", nargs="?", default="any", choices=["any", "positive", "negative"])
    p.add_argument("--size-cap", type=int, default=None)
    p.add_argument("--group", default=None, help="group file with automorphism generators")
    p.add_argument("--first", action="store_true", help="stop at the first set")
    p.add_argument("-o", "--output", default="sets.set")
    common(p, out_dir=False)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="certify the sets of a set file")
    p.add_argument("graph")
    p.add_argument("sets")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("intersect", help="check the intersection lemma over all pairs")
    p.add_argument("graph")
    p.add_argument("plus")
    p.add_argument("minus")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("derive", help="minus-perp, restrict, complement, union, difference")
    p.add_argument("op")
    p.add_argument("input")
    p.add_argument("args", nargs="*")
    common(p)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("infinity", help="profile a set at infinity")
    p.add_argument("geometry")
    p.add_argument("--inf", required=True, help="perp:<point> or set:<file>")
    p.add_argument("--set", required=True)
    p.set_defaults(func=cmd_infinity)

    p = sub.add_parser("complete", help="complete a minus-perp negative set to a hemisystem")
    p.add_argument("geometry")
    p.add_argument("point", type=int)
    p.add_argument("set")
    p.add_argument("-o", "--output", default="hemisystem.set")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("search", help="search for a hemisystem or a cap")
    p.add_argument("what", choices=["hemisystem", "cap"])
    p.add_argument("params", nargs="+")
    p.add_argument("--srg", action="store_true", help="caps: require a strongly regular representation")
    p.add_argument("-o", "--output", default="result.txt")
    common(p, out_dir=False)
    p.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantViolation as e:
        print(f"internal error (invariant violated): {e}", file=sys.stderr)
        return 3
    except BudgetExhausted as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return 2
    except (UserError, ValueError, KeyError, LookupError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
