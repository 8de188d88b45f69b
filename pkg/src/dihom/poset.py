"""Finite posets kept in Hasse form, poset maps, and the class T of refinement maps.

Element identifiers are strings.  Iteration over a poset always follows
``Poset.linear``, a deterministic linear extension, so nothing downstream
depends on set iteration order.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property

from .errors import CycleError

__all__ = [
    "Poset",
    "PosetMap",
    "mk_poset",
    "chain",
    "product",
    "cube",
    "identity_map",
    "compose_maps",
    "is_bounded",
    "t_morphism_violations",
    "is_T_morphism",
]


def _strict_upsets(elements, relations):
    succ = {e: set() for e in elements}
    for x, y in relations:
        if x != y:
            succ[x].add(y)
    up = {}
    for e in elements:
        seen = set()
        stack = list(succ[e])
        while stack:
            z = stack.pop()
            if z not in seen:
                seen.add(z)
                stack.extend(succ[z])
        up[e] = frozenset(seen)
    return up


@dataclass(frozen=True)
class Poset:
    """A finite poset given by its elements and covering pairs ``(x, y)``, x covered by y."""

    elements: frozenset
    covers: frozenset

    def __post_init__(self):
        object.__setattr__(self, "elements", frozenset(self.elements))
        object.__setattr__(self, "covers", frozenset(tuple(c) for c in self.covers))
        for x, y in self.covers:
            if x not in self.elements or y not in self.elements:
                raise ValueError(f"cover ({x}, {y}) mentions an unknown element")
        for e in self.elements:
            if e in self.up[e]:
                raise CycleError(f"element {e} lies strictly below itself")
        for x, y in self.covers:
            if any(y in self.up[z] for z in self.up[x]):
                raise ValueError(f"({x}, {y}) is not a covering pair")

    @cached_property
    def up(self) -> dict:
        """Strict upset of every element."""
        return _strict_upsets(self.elements, self.covers)

    @cached_property
    def upper_covers(self) -> dict:
        out = {e: [] for e in self.elements}
        for x, y in self.covers:
            out[x].append(y)
        return {e: tuple(sorted(v)) for e, v in out.items()}

    @cached_property
    def lower_covers(self) -> dict:
        out = {e: [] for e in self.elements}
        for x, y in self.covers:
            out[y].append(x)
        return {e: tuple(sorted(v)) for e, v in out.items()}

    @cached_property
    def linear(self) -> tuple:
        """Linear extension ordered by height, ties broken by identifier."""
        # height = length of the longest chain ending at e
        height = {}
        remaining = set(self.elements)
        level = 0
        while remaining:
            layer = [e for e in remaining if not any(d in remaining for d in self.lower_covers[e])]
            for e in layer:
                height[e] = level
            remaining.difference_update(layer)
            level += 1
        return tuple(sorted(self.elements, key=lambda e: (height[e], e)))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.linear)

    def __contains__(self, x):
        return x in self.elements

    def leq(self, x, y) -> bool:
        return x == y or y in self.up[x]

    def lt(self, x, y) -> bool:
        return y in self.up[x]

    def strict_pairs(self) -> list:
        return [(x, y) for x in self.linear for y in self.linear if y in self.up[x]]

    @property
    def minimum(self):
        """The least element, or None when there is none."""
        mins = [e for e in self.linear if not self.lower_covers[e]]
        return mins[0] if len(mins) == 1 else None

    @property
    def maximum(self):
        maxs = [e for e in self.linear if not self.upper_covers[e]]
        return maxs[0] if len(maxs) == 1 else None

    def interval(self, x, y) -> frozenset:
        return frozenset(z for z in self.elements if self.leq(x, z) and self.leq(z, y))

    def is_locally_finite(self) -> bool:
        # every interval of a finite poset is finite
        return True

    def maximal_chains(self, x, y) -> list:
        """All saturated chains from x to y, in lexicographic order."""
        if not self.leq(x, y):
            return []
        chains = []

        def walk(path):
            last = path[-1]
            if last == y:
                chains.append(tuple(path))
                return
            for z in self.upper_covers[last]:
                if self.leq(z, y):
                    path.append(z)
                    walk(path)
                    path.pop()

        walk([x])
        return sorted(chains)

    def least_chain(self, x, y) -> tuple:
        """Lexicographically least saturated chain from x to y."""
        if not self.leq(x, y):
            raise ValueError(f"{x} is not below {y}")
        path = [x]
        while path[-1] != y:
            path.append(min(z for z in self.upper_covers[path[-1]] if self.leq(z, y)))
        return tuple(path)

    def relabel(self, mapping: Mapping) -> Poset:
        return Poset(
            frozenset(mapping[e] for e in self.elements),
            frozenset((mapping[x], mapping[y]) for x, y in self.covers),
        )


def mk_poset(elements: Iterable, relations: Iterable = ()) -> Poset:
    """Build the poset generated by ``relations`` (pairs x <= y) on ``elements``.

    Redundant pairs are dropped; only covering pairs are stored.  Raises
    CycleError when the closure is not antisymmetric.
    """
    elements = frozenset(str(e) for e in elements)
    relations = [(str(x), str(y)) for x, y in relations]
    for x, y in relations:
        if x not in elements or y not in elements:
            raise ValueError(f"relation ({x}, {y}) mentions an unknown element")
    up = _strict_upsets(elements, relations)
    for e in sorted(elements):
        if e in up[e]:
            raise CycleError(f"relations are not antisymmetric: {e} lies strictly below itself")
    covers = frozenset(
        (x, y)
        for x in elements
        for y in up[x]
        if not any(y in up[z] for z in up[x])
    )
    return Poset(elements, covers)


def chain(length: int) -> Poset:
    """Chain with ``length`` covering steps: 0 < 2 < 3 < ... < length < 1.

    Bottom and top keep the names 0 and 1 so ``chain(1)`` is the two-element
    chain and ``chain(2)`` is the subdivided segment {0 < 2 < 1}.
    """
    if length < 1:
        raise ValueError("a chain needs at least one step")
    names = ["0"] + [str(i) for i in range(2, length + 1)] + ["1"]
    return Poset(frozenset(names), frozenset(zip(names, names[1:])))


def product(p: Poset, q: Poset) -> Poset:
    """Cartesian product with the componentwise order; elements are named "(x,y)"."""

    def pair(a, b):
        return f"({a},{b})"

    elements = frozenset(pair(a, b) for a in p.elements for b in q.elements)
    covers = {(pair(x, b), pair(y, b)) for x, y in p.covers for b in q.elements}
    covers |= {(pair(a, x), pair(a, y)) for a in p.elements for x, y in q.covers}
    if len(elements) != len(p) * len(q):
        raise ValueError("product identifiers collide; rename the elements first")
    return Poset(elements, frozenset(covers))


def cube(n: int) -> Poset:
    """The n-fold power of the two-element chain.  Elements are bit tuples like "(0,1,1)"."""
    if n < 1:
        raise ValueError("cube dimension must be at least 1")
    if n == 1:
        return chain(1)

    def name(bits):
        return "(" + ",".join(map(str, bits)) + ")"

    points = list(itertools.product((0, 1), repeat=n))
    covers = set()
    for bits in points:
        for i, b in enumerate(bits):
            if b == 0:
                covers.add((name(bits), name(bits[:i] + (1,) + bits[i + 1:])))
    return Poset(frozenset(map(name, points)), frozenset(covers))


def is_bounded(p: Poset) -> bool:
    """Distinct least and greatest elements exist."""
    lo, hi = p.minimum, p.maximum
    return lo is not None and hi is not None and lo != hi


@dataclass(frozen=True)
class PosetMap:
    """A monotone map between finite posets."""

    source: Poset
    target: Poset
    mapping: Mapping

    def __post_init__(self):
        mapping = {str(k): str(v) for k, v in dict(self.mapping).items()}
        object.__setattr__(self, "mapping", mapping)
        if set(mapping) != set(self.source.elements):
            missing = sorted(set(self.source.elements) - set(mapping))
            extra = sorted(set(mapping) - set(self.source.elements))
            raise ValueError(f"map domain mismatch (missing {missing}, unknown {extra})")
        for k in sorted(mapping):
            if mapping[k] not in self.target:
                raise ValueError(f"{k} is sent to {mapping[k]}, not an element of the target")
        for x, y in sorted(self.source.covers):
            if not self.target.leq(mapping[x], mapping[y]):
                raise ValueError(f"not monotone: {x} <= {y} but {mapping[x]} is not <= {mapping[y]}")

    def __call__(self, x):
        return self.mapping[x]


def identity_map(p: Poset) -> PosetMap:
    return PosetMap(p, p, {e: e for e in p.elements})


def compose_maps(f: PosetMap, g: PosetMap) -> PosetMap:
    """Return g after f."""
    if f.target != g.source:
        raise ValueError("maps are not composable")
    return PosetMap(f.source, g.target, {x: g(f(x)) for x in f.source.elements})


def t_morphism_violations(f: PosetMap) -> list:
    """Reasons why ``f`` is not in T, one string per failed clause; empty when it is."""
    problems = []
    for role, p in (("source", f.source), ("target", f.target)):
        if not is_bounded(p):
            problems.append(f"clause (1): {role} poset is not finite and bounded")
    images = {}
    for x in f.source.linear:
        images.setdefault(f(x), []).append(x)
    clashes = [xs for xs in images.values() if len(xs) > 1]
    if clashes:
        problems.append(f"clause (2): map is not one-to-one ({', '.join(clashes[0])} share an image)")
    else:
        for x, y in f.source.strict_pairs():
            if not f.target.lt(f(x), f(y)):
                problems.append(f"clause (2): {x} < {y} but {f(x)} is not < {f(y)}")
                break
    if is_bounded(f.source) and is_bounded(f.target):
        if f(f.source.minimum) != f.target.minimum:
            problems.append("clause (3): minimum is not sent to minimum")
        if f(f.source.maximum) != f.target.maximum:
            problems.append("clause (3): maximum is not sent to maximum")
    return problems


def is_T_morphism(f: PosetMap) -> bool:
    return not t_morphism_violations(f)
