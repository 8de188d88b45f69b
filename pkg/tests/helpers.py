"""Shared fixtures data, hypothesis strategies, and independent oracles."""

import itertools
import random
from fractions import Fraction
from math import gcd

from hypothesis import strategies as st

from dihom import (
    Generator,
    PosetMap,
    PresentedFlow,
    are_isomorphic,
    chain,
    cube,
    flow_of_poset,
    mk_poset,
)

SQUARE_GENS = [("U", "0", "1"), ("V", "1", "2"), ("W", "0", "3"), ("X", "3", "2")]


def segment():
    return PresentedFlow(["0", "1"], [("U", "0", "1")])


def c2():
    return PresentedFlow(["0", "1", "2", "3"], SQUARE_GENS, [(("U", "V"), ("W", "X"))])


def hollow_square():
    return PresentedFlow(["0", "1", "2", "3"], SQUARE_GENS)


def hollow_square_with_tails():
    """The hollow square with an edge into its bottom and one out of its top."""
    return PresentedFlow(
        ["s", "0", "1", "2", "3", "e"],
        [("Z", "s", "0")] + SQUARE_GENS + [("Y", "2", "e")],
    )


def fig5_poset():
    """0 < A < B < 1 and 0 < C < 1."""
    return mk_poset(["0", "A", "B", "C", "1"], [("0", "A"), ("A", "B"), ("B", "1"), ("0", "C"), ("C", "1")])


def endpoint_map(target):
    """The map {0 < 1} -> target sending bottom to bottom and top to top."""
    return PosetMap(chain(1), target, {"0": target.minimum, "1": target.maximum})


def g_n(n):
    return endpoint_map(cube(n))


def bounded_from(n_interior, rels):
    els = ["b", "t"] + [f"e{i}" for i in range(n_interior)]
    r = [("b", "t")] + [("b", e) for e in els[2:]] + [(e, "t") for e in els[2:]]
    r += [(f"e{i}", f"e{j}") for i, j in rels]
    return mk_poset(els, r)


def bounded_corpus(max_interior=4):
    """Every bounded poset with at most ``max_interior + 2`` elements, one per isomorphism class."""
    corpus = []
    for k in range(max_interior + 1):
        pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
        for mask in range(1 << len(pairs)):
            p = bounded_from(k, [pairs[i] for i in range(len(pairs)) if mask >> i & 1])
            fp = flow_of_poset(p)
            if not any(len(q) == len(p) and are_isomorphic(flow_of_poset(q), fp) for q in corpus):
                corpus.append(p)
    return corpus


@st.composite
def posets(draw, max_size=5):
    n = draw(st.integers(1, max_size))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return mk_poset([f"p{i}" for i in range(n)], [(f"p{i}", f"p{j}") for i, j in chosen])


@st.composite
def bounded_posets(draw, max_interior=3):
    k = draw(st.integers(0, max_interior))
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return bounded_from(k, chosen)


def random_presentation(rng: random.Random, n_states=5, n_gens=6, n_rels=2):
    """A random loopless presentation: generators only go from lower to higher index."""
    states = [f"s{i}" for i in range(n_states)]
    gens = []
    for k in range(n_gens):
        i = rng.randrange(n_states - 1)
        j = rng.randrange(i + 1, n_states)
        gens.append(Generator(f"g{k}", states[i], states[j]))
    x = PresentedFlow(states, gens)
    words = []
    for g in gens:
        stack = [(g.id,)]
        while stack:
            w = stack.pop()
            words.append(w)
            last = x.gen[w[-1]]
            stack.extend(w + (h.id,) for h in gens if h.src == last.tgt)
    parallel = [(u, v) for u, v in itertools.combinations(words, 2) if x.word_ends(u) == x.word_ends(v)]
    rels = rng.sample(parallel, min(n_rels, len(parallel)))
    return PresentedFlow(states, gens, rels)


@st.composite
def presentations(draw, max_states=4, max_gens=4):
    seed = draw(st.integers(0, 10**6))
    n = draw(st.integers(2, max_states))
    m = draw(st.integers(0, max_gens))
    r = draw(st.integers(0, 2))
    return random_presentation(random.Random(seed), n, m, r)


# -- independent linear algebra ---------------------------------------------------


def bareiss_det(m):
    """Exact integer determinant by fraction-free elimination."""
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def invariant_factors_by_minors(m):
    """d_k / d_{k-1}, with d_k the gcd of all k x k minors."""
    rows, cols = len(m), len(m[0]) if m else 0
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = gcd(g, bareiss_det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def rational_rank(m):
    a = [[Fraction(v) for v in row] for row in m]
    rank, ncols = 0, len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(len(a)):
            if r != rank and a[r][c] != 0:
                f = a[r][c] / a[rank][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def brute_nerve_dims(x):
    """Count composable k-sequences by trying every k-tuple of classes."""
    classes = sorted(x.classes)
    dims = [len(x.states)]
    k = 1
    while True:
        n = sum(
            1
            for seq in itertools.product(classes, repeat=k)
            if all(x.tgt(a) == x.src(b) for a, b in zip(seq, seq[1:]))
        )
        if n == 0:
            return dims
        dims.append(n)
        k += 1


def rational_betti(cx):
    ranks = [0] + [rational_rank(m) if m and m[0] else 0 for m in cx.boundaries] + [0]
    return [n - ranks[k] - ranks[k + 1] for k, n in enumerate(cx.dims)]
