"""Generalized T-homotopy: replace a full directed ball F(P1) inside a presented
flow by a more refined ball F(P2), along a map P1 -> P2 in the class T.

The replacement is a pushout computed on presentations.  The embedded ball is
cut out (its generators and interior states), the cover generators of P2 are
glued in along the images of the bottom and top, and every host relation that
used a removed generator is rewritten through a fixed saturated chain of P2.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Mapping
from dataclasses import dataclass

from .errors import InvalidOccurrenceError, NotTError, SizeLimitError
from .flow import DEFAULT_LIMIT, Generator, PresentedFlow, saturate
from .poset import Poset, PosetMap, chain, is_bounded, t_morphism_violations

__all__ = [
    "BallOccurrence",
    "RefinementStep",
    "occurrence_violations",
    "find_ball_occurrences",
    "edge_occurrence",
    "refine",
    "subdivide_edge",
    "interior_states",
]


@dataclass(frozen=True)
class BallOccurrence:
    """An embedding of F(ball_poset) into ``host``.

    ``state_embed`` sends poset elements to host states and ``cover_embed``
    sends each covering pair of the poset to a host generator.
    """

    host: PresentedFlow
    ball_poset: Poset
    state_embed: Mapping
    cover_embed: Mapping

    def __post_init__(self):
        object.__setattr__(self, "state_embed", {str(k): str(v) for k, v in dict(self.state_embed).items()})
        object.__setattr__(
            self, "cover_embed", {(str(a), str(b)): str(g) for (a, b), g in dict(self.cover_embed).items()}
        )

    def interior(self) -> list:
        p = self.ball_poset
        return [self.state_embed[e] for e in p.linear if e not in (p.minimum, p.maximum)]

    def image_key(self) -> tuple:
        return tuple(sorted(self.state_embed.values())), tuple(sorted(self.cover_embed.values()))


@dataclass(frozen=True)
class RefinementStep:
    occurrence: BallOccurrence
    t_map: PosetMap


def interior_states(occ: BallOccurrence) -> list:
    return occ.interior()


def occurrence_violations(occ: BallOccurrence) -> list:
    """Reasons why ``occ`` is not a replaceable ball occurrence; empty when it is."""
    host, p = occ.host, occ.ball_poset
    e, ce = occ.state_embed, occ.cover_embed
    if not is_bounded(p):
        return ["ball poset is not bounded"]
    if set(e) != set(p.elements):
        return ["state embedding is not defined on exactly the ball poset"]
    out = []
    host_states = set(host.states)
    for x in p.linear:
        if e[x] not in host_states:
            out.append(f"{x} is sent to {e[x]}, not a host state")
    if len(set(e.values())) != len(e):
        out.append("state embedding is not injective")
    if set(ce) != set(p.covers):
        out.append("cover embedding is not defined on exactly the covering pairs")
    if len(set(ce.values())) != len(ce):
        out.append("cover embedding is not injective")
    if out:
        return out
    # generator endpoints matching the covers also make the embedding monotone
    for (a, b) in sorted(p.covers):
        g = host.gen.get(ce[(a, b)])
        if g is None:
            out.append(f"cover {a}<{b} is sent to unknown generator {ce[(a, b)]}")
        elif (g.src, g.tgt) != (e[a], e[b]):
            out.append(f"generator {g.id} does not run from {e[a]} to {e[b]}")
    if out:
        return out
    used = set(ce.values())
    for s in occ.interior():
        for g in host.generators:
            if s in (g.src, g.tgt) and g.id not in used:
                out.append(f"interior state {s} has outside generator {g.id}")
    if out:
        return out
    sub = PresentedFlow(
        [e[x] for x in p.linear],
        [host.gen[ce[c]] for c in sorted(ce)],
        [(l, r) for l, r in host.relations if set(l) <= used and set(r) <= used],
    )
    table = saturate(sub)
    for x in p.linear:
        for y in p.linear:
            want = 1 if p.lt(x, y) else 0
            got = len(table.paths(e[x], e[y]))
            if got != want:
                out.append(f"embedded ball has {got} classes from {e[x]} to {e[y]}, expected {want}")
    return out


def edge_occurrence(host: PresentedFlow, gen_id: str) -> BallOccurrence:
    """The occurrence of the directed segment given by a single generator."""
    g = host.gen.get(gen_id)
    if g is None:
        raise InvalidOccurrenceError(f"unknown generator {gen_id!r}")
    return BallOccurrence(host, chain(1), {"0": g.src, "1": g.tgt}, {("0", "1"): g.id})


def find_ball_occurrences(
    x: PresentedFlow,
    p1: Poset,
    limit: int = DEFAULT_LIMIT,
    up_to_automorphism: bool = True,
    rng: random.Random | None = None,
) -> list:
    """All occurrences of F(p1) in ``x``, by backtracking over state embeddings.

    With ``up_to_automorphism`` (the default), embeddings with the same image
    are reported once, using the embedding whose sorted assignment list is
    least.  Output order is by image and does not depend on ``rng``.
    """
    x.check_acyclic()
    if not is_bounded(p1):
        raise ValueError("ball poset must be bounded")
    order = list(p1.linear)
    lo, hi = p1.minimum, p1.maximum
    between = {}
    for g in x.generators:
        between.setdefault((g.src, g.tgt), []).append(g.id)
    indeg = {s: len(x.in_generators(s)) for s in x.states}
    outdeg = {s: len(x.out_generators(s)) for s in x.states}
    host_states = list(x.states)

    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > limit:
            raise SizeLimitError(f"occurrence search exceeded {limit} nodes")

    found = {}
    emb, used = {}, set()

    def fits(el, s):
        if el not in (lo, hi):
            # interior fullness: every incident generator belongs to the ball
            if indeg[s] != len(p1.lower_covers[el]) or outdeg[s] != len(p1.upper_covers[el]):
                return False
        for d in p1.lower_covers[el]:
            if d in emb and (emb[d], s) not in between:
                return False
        return True

    def covers_choices():
        covs = sorted(p1.covers)
        pools = [between[(emb[a], emb[b])] for a, b in covs]
        for pick in itertools.product(*pools):
            tick()
            if len(set(pick)) == len(pick):
                yield dict(zip(covs, pick))

    def assign(i):
        if i == len(order):
            for ce in covers_choices():
                occ = BallOccurrence(x, p1, dict(emb), ce)
                if occurrence_violations(occ):
                    continue
                key = occ.image_key() if up_to_automorphism else (
                    tuple(sorted(occ.state_embed.items())), tuple(sorted(occ.cover_embed.items())))
                rank = (sorted(occ.state_embed.items()), sorted(occ.cover_embed.items()))
                if key not in found or rank < found[key][0]:
                    found[key] = (rank, occ)
            return
        el = order[i]
        cands = [s for s in host_states if s not in used]
        if rng is not None:
            rng.shuffle(cands)
        for s in cands:
            tick()
            if fits(el, s):
                emb[el] = s
                used.add(s)
                assign(i + 1)
                del emb[el]
                used.discard(s)

    assign(0)
    return [found[k][1] for k in sorted(found)]


def _fresh_prefix(host: PresentedFlow) -> str:
    taken = set(host.states) | set(host.gen)
    n = 0
    while any(t.startswith(f"ball{n}.") for t in taken):
        n += 1
    return f"ball{n}."


def refine(step: RefinementStep) -> PresentedFlow:
    """Replace the occurrence of F(P1) by F(P2) along ``step.t_map``.

    Raises NotTError when the map is not in T and InvalidOccurrenceError when
    the occurrence is not replaceable.
    """
    occ, f = step.occurrence, step.t_map
    problems = t_morphism_violations(f)
    if problems:
        raise NotTError("; ".join(problems))
    if f.source != occ.ball_poset:
        raise InvalidOccurrenceError("t_map source differs from the occurrence's ball poset")
    problems = occurrence_violations(occ)
    if problems:
        raise InvalidOccurrenceError("; ".join(problems))

    host, p1, p2 = occ.host, occ.ball_poset, f.target
    prefix = _fresh_prefix(host)
    place = {}
    for el in p2.linear:
        if el == p2.minimum:
            place[el] = occ.state_embed[p1.minimum]
        elif el == p2.maximum:
            place[el] = occ.state_embed[p1.maximum]
        else:
            place[el] = prefix + el
    new_gen = {(a, b): f"{prefix}{a}<{b}" for a, b in p2.covers}

    def word(a, b):
        ch = p2.least_chain(a, b)
        return tuple(new_gen[c] for c in zip(ch, ch[1:]))

    removed = set(occ.cover_embed.values())
    substitute = {g: word(f(a), f(b)) for (a, b), g in occ.cover_embed.items()}
    interior = set(occ.interior())

    states = [s for s in host.states if s not in interior]
    states += [place[el] for el in p2.linear if el not in (p2.minimum, p2.maximum)]
    gens = [g for g in host.generators if g.id not in removed]
    covs = sorted(p2.covers, key=lambda c: (p2.linear.index(c[0]), p2.linear.index(c[1])))
    gens += [Generator(new_gen[c], place[c[0]], place[c[1]]) for c in covs]

    def rewrite(w):
        return tuple(itertools.chain.from_iterable(substitute.get(g, (g,)) for g in w))

    relations, seen = [], set()
    for l, r in host.relations:
        rel = (rewrite(l), rewrite(r))
        if rel[0] != rel[1] and frozenset(rel) not in seen:
            seen.add(frozenset(rel))
            relations.append(rel)
    for a, b in p2.strict_pairs():
        chains = p2.maximal_chains(a, b)
        canonical = word(a, b)
        for ch in chains:
            w = tuple(new_gen[c] for c in zip(ch, ch[1:]))
            if w != canonical and frozenset((w, canonical)) not in seen:
                seen.add(frozenset((w, canonical)))
                relations.append((w, canonical))
    return PresentedFlow(states, gens, relations)


def subdivide_edge(x: PresentedFlow, gen_id: str, k: int = 2) -> PresentedFlow:
    """Cut one generator into a chain of ``k`` generators."""
    if k < 2:
        raise ValueError("subdivision needs k >= 2")
    occ = edge_occurrence(x, gen_id)
    return refine(RefinementStep(occ, PosetMap(chain(1), chain(k), {"0": "0", "1": "1"})))
