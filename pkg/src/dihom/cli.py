"""Command line front end: ``dihom <command> [args] [--limit N] [--out FILE]``."""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import io
from .errors import DihomError, ParseError
from .flow import (
    DEFAULT_LIMIT,
    PresentedFlow,
    TableFlow,
    are_isomorphic,
    boundary_states,
    flow_of_poset,
    full_ball_violations,
    glob,
    is_loopless,
    presentation_of_poset,
    saturate,
    state_poset,
    tensor,
)
from .invariants import branch_report, homology
from .poset import Poset, PosetMap, t_morphism_violations
from .rewrite import find_ball_occurrences, refine, subdivide_edge


def _rng(args):
    return random.Random(args.seed) if args.seed is not None else None


def _read(path):
    try:
        return io.parse(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None


def _load(path, kinds):
    value = io.value_from_doc(_read(path))
    if not isinstance(value, kinds):
        names = " or ".join(k.__name__ for k in kinds)
        raise ParseError(f"{path}: expected a {names} document, got {type(value).__name__}")
    return value


def _table(path, args) -> TableFlow:
    value = _load(path, (PresentedFlow, TableFlow, Poset))
    if isinstance(value, PresentedFlow):
        return saturate(value, rng=_rng(args))
    if isinstance(value, Poset):
        return flow_of_poset(value)
    return value


def _set(items, order):
    rank = {s: i for i, s in enumerate(order)}
    return "{" + ", ".join(sorted(items, key=rank.get)) + "}"


def cmd_info(args):
    x = _table(args.flow, args)
    rank = {s: i for i, s in enumerate(x.states)}
    lines = [f"states: {len(x.states)}", "classes:"]
    for (a, b), cs in sorted(x.hom.items(), key=lambda kv: (rank[kv[0][0]], rank[kv[0][1]])):
        lines.append(f"  P_{{{a},{b}}}: {len(cs)}")
    loopless = is_loopless(x)
    lines.append(f"loopless: {'yes' if loopless else 'no'}")
    initial, final = boundary_states(x)
    lines.append(f"initial: {_set(initial, x.states)}")
    lines.append(f"final: {_set(final, x.states)}")
    problems = full_ball_violations(x)
    lines.append("full directed ball: " + ("yes" if not problems else f"no ({'; '.join(problems)})"))
    if loopless:
        p = state_poset(x)
        covers = sorted(p.covers, key=lambda c: (rank[c[0]], rank[c[1]]))
        lines.append("state poset: " + (", ".join(f"{a} < {b}" for a, b in covers) or "discrete"))
    return "\n".join(lines) + "\n"


def cmd_refine(args):
    host = _load(args.flow, (PresentedFlow,))
    step = io.step_from_doc(_read(args.step), host)
    out = refine(step)
    removed_states = [s for s in host.states if s not in set(out.states)]
    added_states = [s for s in out.states if s not in set(host.states)]
    removed_gens = [g.id for g in host.generators if g.id not in out.gen]
    added_gens = [g.id for g in out.generators if g.id not in host.gen]
    summary = [
        f"removed states: {', '.join(removed_states) or '-'}",
        f"added states: {', '.join(added_states) or '-'}",
        f"removed generators: {', '.join(removed_gens) or '-'}",
        f"added generators: {', '.join(added_gens) or '-'}",
    ]
    if args.out:
        _write(args.out, io.dumps(io.to_doc(out)))
        return "\n".join(summary) + "\n"
    print("\n".join(summary), file=sys.stderr)
    return io.dumps(io.to_doc(out))


def cmd_subdivide(args):
    host = _load(args.flow, (PresentedFlow,))
    return io.dumps(io.to_doc(subdivide_edge(host, args.generator, args.k)))


def cmd_invariants(args):
    x = _table(args.flow, args)
    h = homology(x)
    b = branch_report(x)
    return (
        "homology of the nerve:\n"
        + h.report()
        + "\nbranching / merging germ classes (degree-0 proxy):\n"
        + b.report()
        + "\n"
    )


def _q(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def cmd_dot(args):
    value = _load(args.flow, (PresentedFlow, TableFlow))
    lines = ["digraph flow {", "  rankdir=LR;"]
    if isinstance(value, PresentedFlow):
        states = value.states
        edges = [(g.src, g.tgt, g.id) for g in value.generators]
        incoming = {g.tgt for g in value.generators}
        outgoing = {g.src for g in value.generators}
    else:
        states = value.states
        edges = [(value.src(c), value.tgt(c), c) for c in value.indecomposables()]
        incoming = {t for _, t in value.classes.values()}
        outgoing = {s for s, _ in value.classes.values()}
    for s in states:
        style = []
        if s not in incoming:
            style.append("shape=doublecircle")
        elif s not in outgoing:
            style.append("shape=box")
        lines.append(f"  {_q(s)}" + (f" [{', '.join(style)}]" if style else "") + ";")
    for s, t, label in edges:
        lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(label)}];")
    if isinstance(value, PresentedFlow):
        for l, r in value.relations:
            s, t = value.word_ends(l)
            label = "·".join(l) + " ~ " + "·".join(r)
            lines.append(f"  {_q(s)} -> {_q(t)} [style=dashed, arrowhead=none, label={_q(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_tensor(args):
    return io.dumps(io.to_doc(tensor(_table(args.left, args), _table(args.right, args))))


def cmd_glob(args):
    return io.dumps(io.to_doc(glob(args.paths)))


def cmd_poset_flow(args):
    p = _load(args.poset, (Poset,))
    value = presentation_of_poset(p) if args.presentation else flow_of_poset(p)
    return io.dumps(io.to_doc(value))


def cmd_check_tmap(args):
    f = _load(args.map, (PosetMap,))
    problems = t_morphism_violations(f)
    if problems:
        return "T-morphism: no\n" + "".join(f"  {p}\n" for p in problems), 6
    return "T-morphism: yes\n"


def cmd_match_balls(args):
    host = _load(args.flow, (PresentedFlow,))
    p = _load(args.poset, (Poset,))
    occs = find_ball_occurrences(host, p, limit=args.limit, up_to_automorphism=not args.all, rng=_rng(args))
    lines = [f"occurrences: {len(occs)}"]
    for n, occ in enumerate(occs):
        states = ", ".join(f"{x}->{occ.state_embed[x]}" for x in p.linear)
        gens = ", ".join(occ.cover_embed[c] for c in sorted(occ.cover_embed))
        lines.append(f"  [{n}] states {states}; generators {gens}")
    return "\n".join(lines) + "\n"


def cmd_iso(args):
    x, y = _table(args.left, args), _table(args.right, args)
    m = are_isomorphic(x, y, limit=args.limit)
    if m is None:
        return "isomorphic: no\n"
    lines = ["isomorphic: yes"] + [f"  {s} -> {m.state_map[s]}" for s in x.states]
    return "\n".join(lines) + "\n"


def cmd_saturate(args):
    f = _load(args.flow, (PresentedFlow,))
    return io.dumps(io.to_doc(saturate(f, rng=_rng(args))))


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="node bound for backtracking searches")
    common.add_argument("--out", help="write the result to FILE instead of stdout")
    common.add_argument("--seed", type=int, help="shuffle internal enumeration orders (output is unchanged)")

    parser = argparse.ArgumentParser(prog="dihom", description="Flows, full directed balls and T-homotopy refinement.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, *positional):
        p = sub.add_parser(name, parents=[common], help=help)
        for arg in positional:
            p.add_argument(arg)
        p.set_defaults(func=func)
        return p

    add("info", cmd_info, "structural summary of a flow", "flow")
    add("refine", cmd_refine, "replace a full directed ball along a T-map", "flow", "step")
    p = add("subdivide", cmd_subdivide, "cut one generator into a chain", "flow", "generator")
    p.add_argument("-k", type=int, default=2, help="number of pieces (default 2)")
    add("invariants", cmd_invariants, "nerve homology and branching/merging counts", "flow")
    add("dot", cmd_dot, "Graphviz rendering of the generator digraph", "flow")
    add("tensor", cmd_tensor, "tensor product of two flows", "left", "right")
    p = sub.add_parser("glob", parents=[common], help="the globe on a set of path names")
    p.add_argument("paths", nargs="*")
    p.set_defaults(func=cmd_glob)
    p = add("poset-flow", cmd_poset_flow, "the flow F(P) of a poset", "poset")
    p.add_argument("--presentation", action="store_true", help="emit a presentation instead of a table")
    add("check-tmap", cmd_check_tmap, "test a poset map for membership in T", "map")
    p = add("match-balls", cmd_match_balls, "occurrences of F(P) in a presented flow", "flow", "poset")
    p.add_argument("--all", action="store_true", help="list every embedding, not one per image")
    add("iso", cmd_iso, "isomorphism test between two flows", "left", "right")
    add("saturate", cmd_saturate, "explicit path classes of a presentation", "flow")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except DihomError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    code = 0
    if isinstance(result, tuple):
        result, code = result
    if args.out and args.func is not cmd_refine:
        _write(args.out, result)
    else:
        sys.stdout.write(result)
    return code


if __name__ == "__main__":
    sys.exit(main())
