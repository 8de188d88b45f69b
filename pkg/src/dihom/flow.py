"""Flows whose path spaces are finite discrete sets of path classes.

Two representations are used.  A ``PresentedFlow`` lists states, generating
execution paths and relations between parallel words; ``saturate`` turns it
into a ``TableFlow``, which lists every path class of every ``P(a, b)`` and
the full composition table.  Each path class stands for one contractible
component of a path space, so isomorphism of tables plays the role of weak
S-homotopy equivalence.
"""

from __future__ import annotations

import random
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from graphlib import CycleError as _GraphCycle
from graphlib import TopologicalSorter

from scipy.cluster.hierarchy import DisjointSet

from .errors import LoopError, NotLooplessError, SizeLimitError
from .poset import Poset, mk_poset

__all__ = [
    "Generator",
    "PresentedFlow",
    "TableFlow",
    "FlowMorphism",
    "glob",
    "point",
    "flow_of_poset",
    "tensor",
    "presentation_of_poset",
    "saturate",
    "is_loopless",
    "state_poset",
    "boundary_states",
    "full_ball_violations",
    "is_full_directed_ball",
    "are_isomorphic",
    "DEFAULT_LIMIT",
]

DEFAULT_LIMIT = 10**6

BOTTOM, TOP = "0", "1"


@dataclass(frozen=True)
class Generator:
    id: str
    src: str
    tgt: str


@dataclass(frozen=True)
class PresentedFlow:
    """States, generating paths, and relations ``(word, word)`` between parallel words.

    A word is a tuple of generator ids read left to right (first path first).
    Generator ids must differ from state ids and may not contain ``*``, which
    joins words into class names after saturation.
    """

    states: tuple
    generators: tuple
    relations: tuple = ()

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        gens = tuple(
            g if isinstance(g, Generator) else Generator(*map(str, _gen_fields(g)))
            for g in self.generators
        )
        rels = tuple((tuple(map(str, l)), tuple(map(str, r))) for l, r in self.relations)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", rels)

        if len(set(states)) != len(states):
            raise ValueError("duplicate state identifiers")
        ids = [g.id for g in gens]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate generator identifiers")
        known = set(states)
        for g in gens:
            if g.id in known:
                raise ValueError(f"generator id {g.id!r} is also a state id")
            if "*" in g.id or not g.id:
                raise ValueError(f"generator id {g.id!r} is empty or contains '*'")
            if g.src not in known or g.tgt not in known:
                raise ValueError(f"generator {g.id} has an endpoint outside the states")
        for l, r in rels:
            if self.word_ends(l) != self.word_ends(r):
                raise ValueError(f"relation {'·'.join(l)} ~ {'·'.join(r)} relates non-parallel words")

    @cached_property
    def gen(self) -> dict:
        return {g.id: g for g in self.generators}

    def word_ends(self, word) -> tuple:
        """(source, target) of a composable word; ValueError otherwise."""
        if not word:
            raise ValueError("empty word")
        try:
            gs = [self.gen[w] for w in word]
        except KeyError as e:
            raise ValueError(f"unknown generator {e.args[0]!r}") from None
        for a, b in zip(gs, gs[1:]):
            if a.tgt != b.src:
                raise ValueError(f"word {'·'.join(word)} is not composable at {a.id}·{b.id}")
        return gs[0].src, gs[-1].tgt

    def out_generators(self, state) -> list:
        return [g for g in self.generators if g.src == state]

    def in_generators(self, state) -> list:
        return [g for g in self.generators if g.tgt == state]

    def check_acyclic(self):
        ts = TopologicalSorter({s: set() for s in self.states})
        for g in self.generators:
            if g.src == g.tgt:
                raise LoopError(f"generator {g.id} is a loop at {g.src}")
            ts.add(g.tgt, g.src)
        try:
            ts.prepare()
        except _GraphCycle as e:
            cycle = e.args[1]
            raise LoopError("generator digraph has a cycle through " + " -> ".join(cycle)) from None


def _gen_fields(g):
    if isinstance(g, Mapping):
        return g["id"], g["src"], g["tgt"]
    return tuple(g)


@dataclass(frozen=True)
class TableFlow:
    """Explicit path classes and a total composition table.

    ``classes`` maps a class id to its ``(source, target)`` state pair and
    ``compose`` maps a composable pair ``(x, y)`` to ``x*y``.  The
    constructor checks coherence, totality and associativity exhaustively.
    """

    states: tuple
    classes: Mapping
    compose: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "classes", {c: tuple(st) for c, st in dict(self.classes).items()})
        object.__setattr__(self, "compose", {tuple(k): v for k, v in dict(self.compose).items()})
        self._check()

    def _check(self):
        states = set(self.states)
        if len(states) != len(self.states):
            raise ValueError("duplicate state identifiers")
        for c, (s, t) in self.classes.items():
            if c in states:
                raise ValueError(f"class id {c!r} is also a state id")
            if s not in states or t not in states:
                raise ValueError(f"class {c} has an endpoint outside the states")
        for (x, y), z in self.compose.items():
            if x not in self.classes or y not in self.classes or z not in self.classes:
                raise ValueError(f"composition {x}*{y}={z} mentions an unknown class")
            if self.classes[x][1] != self.classes[y][0]:
                raise ValueError(f"composition {x}*{y} is defined on a non-composable pair")
            if self.classes[z] != (self.classes[x][0], self.classes[y][1]):
                raise ValueError(f"composition {x}*{y}={z} breaks source/target coherence")
        for x, y in self.composable_pairs():
            if (x, y) not in self.compose:
                raise ValueError(f"composition is not total: {x}*{y} undefined")
        for x, y in self.composable_pairs():
            xy = self.compose[(x, y)]
            for z in self.out_classes[self.classes[y][1]]:
                if self.compose[(xy, z)] != self.compose[(x, self.compose[(y, z)])]:
                    raise ValueError(f"composition is not associative on ({x}, {y}, {z})")

    @cached_property
    def hom(self) -> dict:
        """Classes of P(a, b), keyed by (a, b); only nonempty pairs appear."""
        out = defaultdict(list)
        for c, st in self.classes.items():
            out[st].append(c)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    @cached_property
    def out_classes(self) -> dict:
        out = {s: [] for s in self.states}
        for c, (s, _) in self.classes.items():
            out[s].append(c)
        return {s: tuple(sorted(v)) for s, v in out.items()}

    @cached_property
    def in_classes(self) -> dict:
        out = {s: [] for s in self.states}
        for c, (_, t) in self.classes.items():
            out[t].append(c)
        return {s: tuple(sorted(v)) for s, v in out.items()}

    def paths(self, a, b) -> tuple:
        return self.hom.get((a, b), ())

    def src(self, c):
        return self.classes[c][0]

    def tgt(self, c):
        return self.classes[c][1]

    def composable_pairs(self):
        for x in sorted(self.classes):
            for y in self.out_classes[self.classes[x][1]]:
                yield x, y

    def indecomposables(self) -> list:
        """Classes that are not a composite of two classes."""
        composites = set(self.compose.values())
        return [c for c in sorted(self.classes) if c not in composites]

    def class_counts(self) -> dict:
        return {k: len(v) for k, v in self.hom.items()}


@dataclass(frozen=True)
class FlowMorphism:
    source: TableFlow
    target: TableFlow
    state_map: Mapping
    class_map: Mapping

    def violations(self) -> list:
        f0, f1 = self.state_map, self.class_map
        out = []
        if set(f0) != set(self.source.states):
            out.append("state map is not defined on every state")
            return out
        if set(f1) != set(self.source.classes):
            out.append("class map is not defined on every class")
            return out
        for c, (s, t) in self.source.classes.items():
            if self.target.classes.get(f1[c]) != (f0[s], f0[t]):
                out.append(f"class {c} is not sent into P({f0[s]}, {f0[t]})")
        for (x, y), z in self.source.compose.items():
            if self.target.compose.get((f1[x], f1[y])) != f1[z]:
                out.append(f"composition {x}*{y}={z} is not preserved")
        return out

    def is_isomorphism(self) -> bool:
        return (
            not self.violations()
            and len(set(self.state_map.values())) == len(self.target.states)
            and len(set(self.class_map.values())) == len(self.target.classes)
            and len(self.source.states) == len(self.target.states)
            and len(self.source.classes) == len(self.target.classes)
        )


# -- constructions -----------------------------------------------------------


def glob(z: Iterable) -> TableFlow:
    """Two states 0, 1 with P(0, 1) = z and nothing to compose."""
    z = sorted(str(c) for c in z)
    return TableFlow((BOTTOM, TOP), {c: (BOTTOM, TOP) for c in z}, {})


def point(name: str = "pt") -> TableFlow:
    """One state and no paths; the unit of the tensor product."""
    return TableFlow((name,), {}, {})


def flow_of_poset(p: Poset) -> TableFlow:
    """One class per strict pair a < b, named "a<b"; composition is forced."""
    classes = {f"{a}<{b}": (a, b) for a, b in p.strict_pairs()}
    compose = {}
    for a, b in p.strict_pairs():
        for c in p.up[b]:
            compose[(f"{a}<{b}", f"{b}<{c}")] = f"{a}<{c}"
    return TableFlow(p.linear, classes, compose)


def presentation_of_poset(p: Poset) -> PresentedFlow:
    """Covering pairs as generators, all parallel saturated chains related.

    Saturates to ``flow_of_poset(p)`` up to renaming of classes.
    """
    gen_id = {c: f"{c[0]}<{c[1]}" for c in p.covers}
    gens = [Generator(gen_id[c], *c) for c in sorted(p.covers, key=lambda c: (p.linear.index(c[0]), c[1]))]
    rels = []
    for a, b in p.strict_pairs():
        chains = p.maximal_chains(a, b)
        words = [tuple(gen_id[(x, y)] for x, y in zip(ch, ch[1:])) for ch in chains]
        rels.extend((words[0], w) for w in words[1:])
    return PresentedFlow(p.linear, gens, rels)


def tensor(x: TableFlow, y: TableFlow) -> TableFlow:
    """Tensor product: states are pairs, a path class pairs classes and/or states.

    A pair of two states is a state, not a class.  Composition is
    componentwise, where composing with a state leaves the other side unchanged.
    """

    def pair(a, b):
        return f"({a},{b})"

    states = tuple(pair(a, b) for a in x.states for b in y.states)
    # parts[c] = ((left, left_is_class), (right, right_is_class))
    parts = {}
    classes = {}

    def add(left, lclass, right, rclass):
        ls, lt = x.classes[left] if lclass else (left, left)
        rs, rt = y.classes[right] if rclass else (right, right)
        cid = pair(left, right)
        classes[cid] = (pair(ls, rs), pair(lt, rt))
        parts[cid] = ((left, lclass), (right, rclass))

    for a in sorted(x.classes):
        for b in y.states:
            add(a, True, b, False)
    for a in x.states:
        for b in sorted(y.classes):
            add(a, False, b, True)
    for a in sorted(x.classes):
        for b in sorted(y.classes):
            add(a, True, b, True)
    if len(set(states)) != len(states) or len(classes) != (
        len(x.classes) * len(y.states) + len(x.states) * len(y.classes) + len(x.classes) * len(y.classes)
    ) or set(states) & set(classes):
        raise ValueError("tensor identifiers collide; rename states or classes first")

    def mul(table, u, v):
        (a, ac), (b, bc) = u, v
        if not ac:
            return b, bc
        if not bc:
            return a, ac
        return table.compose[(a, b)], True

    out_by_state = defaultdict(list)
    for c, (s, _) in classes.items():
        out_by_state[s].append(c)
    compose = {}
    for c1, (_, t) in classes.items():
        for c2 in out_by_state[t]:
            (l1, r1), (l2, r2) = parts[c1], parts[c2]
            l3, r3 = mul(x, l1, l2), mul(y, r1, r2)
            compose[(c1, c2)] = pair(l3[0], r3[0])
    return TableFlow(states, classes, compose)


def _word_key(word):
    return len(word), word


def saturate(f: PresentedFlow, rng: random.Random | None = None) -> TableFlow:
    """Compute all path classes of a presentation and their composition table.

    Words are all nonempty composable generator sequences; two words are in
    the same class iff they are related by the congruence generated by the
    relations.  A class is named after its least word (shortest first, then
    lexicographic) joined with ``*``.  The result is canonical: ``rng`` only
    permutes internal enumeration order and never changes the output.

    Raises LoopError when the generator digraph has a cycle.
    """
    f.check_acyclic()
    gens = list(f.generators)
    rels = list(f.relations)
    if rng is not None:
        rng.shuffle(gens)
        rng.shuffle(rels)
    out = defaultdict(list)
    for g in gens:
        out[g.src].append(g)

    words = []
    stack = [(g.id,) for g in reversed(gens)]
    while stack:
        w = stack.pop()
        words.append(w)
        for g in out[f.gen[w[-1]].tgt]:
            stack.append(w + (g.id,))
    if rng is not None:
        rng.shuffle(words)

    uf = DisjointSet(words)
    # one-step rewrites u·l·v <-> u·r·v generate the congruence
    by_head = defaultdict(list)
    for l, r in rels:
        by_head[l[0]].append((l, r))
    for w in words:
        for i, head in enumerate(w):
            for l, r in by_head.get(head, ()):
                if w[i:i + len(l)] == l:
                    uf.merge(w, w[:i] + r + w[i + len(l):])

    rep = {}
    for subset in uf.subsets():
        least = min(subset, key=_word_key)
        for w in subset:
            rep[w] = least
    reps = sorted(set(rep.values()), key=_word_key)
    name = {w: "*".join(w) for w in reps}
    classes = {}
    for w in reps:
        classes[name[w]] = f.word_ends(w)
    compose = {}
    by_src = defaultdict(list)
    for w in reps:
        by_src[classes[name[w]][0]].append(w)
    for w in reps:
        for v in by_src[classes[name[w]][1]]:
            compose[(name[w], name[v])] = name[rep[w + v]]
    # canonical insertion order
    classes = {c: classes[c] for c in sorted(classes, key=lambda c: _word_key(tuple(c.split("*"))))}
    compose = {k: compose[k] for k in sorted(compose)}
    return TableFlow(f.states, classes, compose)


# -- predicates ---------------------------------------------------------------


def is_loopless(x: TableFlow) -> bool:
    return all(s != t for s, t in x.classes.values())


def state_poset(x: TableFlow) -> Poset:
    """Order the states by reachability; requires a loopless flow."""
    if not is_loopless(x):
        raise NotLooplessError("flow has a path class from a state to itself")
    return mk_poset(x.states, x.hom.keys())


def boundary_states(x: TableFlow) -> tuple:
    """(initial, final): states with no incoming, resp. no outgoing, path class."""
    initial = frozenset(s for s in x.states if not x.in_classes[s])
    final = frozenset(s for s in x.states if not x.out_classes[s])
    return initial, final


def full_ball_violations(x: TableFlow) -> list:
    """Reasons why ``x`` is not a full directed ball; empty when it is."""
    if not x.states:
        return ["no states"]
    if not is_loopless(x):
        return ["not loopless"]
    out = []
    initial, final = boundary_states(x)
    if len(initial) != 1 or len(final) != 1:
        out.append(f"{len(initial)} initial and {len(final)} final states (need exactly one each)")
    elif initial == final:
        out.append("initial and final state coincide")
    else:
        (lo,), (hi,) = initial, final
        for s in x.states:
            if s != lo and not x.paths(lo, s) or s != hi and not x.paths(s, hi):
                out.append(f"state {s} is not between {lo} and {hi}")
    for (a, b), cs in sorted(x.hom.items()):
        if len(cs) > 1:
            out.append(f"P_{{{a},{b}}} has {len(cs)} classes")
    return out


def is_full_directed_ball(x: TableFlow) -> bool:
    return not full_ball_violations(x)


# -- isomorphism search -------------------------------------------------------


def are_isomorphic(
    x: TableFlow, y: TableFlow, limit: int = DEFAULT_LIMIT, rng: random.Random | None = None
) -> FlowMorphism | None:
    """Find an isomorphism x -> y by backtracking, or return None.

    States are matched first, pruned by per-pair class counts; classes are
    then matched inside each P(a, b), with images of composites forced by
    the images of their factors.  Raises SizeLimitError after ``limit``
    search nodes.
    """
    if len(x.states) != len(y.states) or len(x.classes) != len(y.classes):
        return None
    if sorted(x.class_counts().values()) != sorted(y.class_counts().values()):
        return None

    def signature(f, s):
        return (
            len(f.out_classes[s]),
            len(f.in_classes[s]),
            len(f.paths(s, s)),
            tuple(sorted(len(f.paths(s, t)) for t in f.states if f.paths(s, t))),
            tuple(sorted(len(f.paths(t, s)) for t in f.states if f.paths(t, s))),
        )

    sig_x = {s: signature(x, s) for s in x.states}
    sig_y = {s: signature(y, s) for s in y.states}
    if sorted(sig_x.values()) != sorted(sig_y.values()):
        return None
    by_sig = defaultdict(list)
    for s in y.states:
        by_sig[sig_y[s]].append(s)

    nbrs = defaultdict(set)
    for a, b in x.hom:
        nbrs[a].add(b)
        nbrs[b].add(a)
    order = []
    placed = set()
    rank = {s: i for i, s in enumerate(x.states)}
    while len(order) < len(x.states):
        frontier = [s for s in x.states if s not in placed and nbrs[s] & placed]
        pool = frontier or [s for s in x.states if s not in placed]
        # most constrained first: rarest signature, then most placed neighbours
        nxt = min(pool, key=lambda s: (len(by_sig[sig_x[s]]), -len(nbrs[s] & placed), rank[s]))
        order.append(nxt)
        placed.add(nxt)

    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > limit:
            raise SizeLimitError(f"isomorphism search exceeded {limit} nodes")

    smap, used = {}, set()

    def states_ok(s, t):
        if len(x.paths(s, s)) != len(y.paths(t, t)):
            return False
        for s2, t2 in smap.items():
            if len(x.paths(s, s2)) != len(y.paths(t, t2)) or len(x.paths(s2, s)) != len(y.paths(t2, t)):
                return False
        return True

    # class order: indecomposables first so composites are usually forced
    composites = set(x.compose.values())
    x_classes = sorted(x.classes, key=lambda c: (c in composites, c))
    factorisations = defaultdict(list)
    for (a, b), c in x.compose.items():
        factorisations[c].append((a, b))

    def match_classes():
        cmap, cused = {}, set()

        def consistent(c):
            # every triple a*b=ab is checked when its last member gets an image
            for a, b in factorisations[c]:
                if a in cmap and b in cmap and y.compose.get((cmap[a], cmap[b])) != cmap[c]:
                    return False
            for b in x.out_classes[x.tgt(c)]:
                ab = x.compose[(c, b)]
                if b in cmap and ab in cmap and y.compose.get((cmap[c], cmap[b])) != cmap[ab]:
                    return False
            for a in x.in_classes[x.src(c)]:
                ab = x.compose[(a, c)]
                if a in cmap and ab in cmap and y.compose.get((cmap[a], cmap[c])) != cmap[ab]:
                    return False
            return True

        def forced(c):
            for a, b in factorisations[c]:
                if a in cmap and b in cmap:
                    return y.compose.get((cmap[a], cmap[b]))
            return None

        def step(i):
            if i == len(x_classes):
                return True
            c = x_classes[i]
            s, t = x.classes[c]
            f = forced(c)
            cands = [f] if f is not None else list(y.paths(smap[s], smap[t]))
            if rng is not None and f is None:
                rng.shuffle(cands)
            cands.sort(key=lambda d: d != c)
            for d in cands:
                if d is None or d in cused or y.classes.get(d) != (smap[s], smap[t]):
                    continue
                tick()
                cmap[c] = d
                if consistent(c):
                    cused.add(d)
                    if step(i + 1):
                        return True
                    cused.discard(d)
                del cmap[c]
            return False

        return dict(cmap) if step(0) else None

    def assign(i):
        if i == len(order):
            return match_classes()
        s = order[i]
        cands = [t for t in by_sig[sig_x[s]] if t not in used]
        if rng is not None:
            rng.shuffle(cands)
        cands.sort(key=lambda t: t != s)
        for t in cands:
            tick()
            if not states_ok(s, t):
                continue
            smap[s] = t
            used.add(t)
            found = assign(i + 1)
            if found is not None:
                return found
            del smap[s]
            used.discard(t)
        return None

    cmap = assign(0)
    if cmap is None:
        return None
    m = FlowMorphism(x, y, dict(smap), cmap)
    assert m.is_isomorphism(), m.violations()
    return m
