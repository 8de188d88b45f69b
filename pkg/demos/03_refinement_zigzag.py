# Refinement along T-maps
#
# A refinement step finds a full directed ball F(P1) inside a presentation and
# swaps it for F(P2), guided by a T-map P1 -> P2 (bounded, injective, keeping
# the bottom and top).  Refining the whole segment along the map that sends
# its endpoints to the corners of the n-cube produces the cube flow.

from dihom import (
    PosetMap,
    PresentedFlow,
    RefinementStep,
    are_isomorphic,
    chain,
    cube,
    edge_occurrence,
    find_ball_occurrences,
    flow_of_poset,
    mk_poset,
    product,
    refine,
    saturate,
    subdivide_edge,
)

segment = PresentedFlow(["0", "1"], [("U", "0", "1")])

for n in (2, 3, 4):
    g = PosetMap(chain(1), cube(n), {"0": cube(n).minimum, "1": cube(n).maximum})
    r = refine(RefinementStep(edge_occurrence(segment, "U"), g))
    same = are_isomorphic(saturate(r), flow_of_poset(cube(n))) is not None
    print(f"n={n}: {len(r.states)} states, {len(r.generators)} generators, "
          f"{len(r.relations)} relations, cube flow: {same}")

# Subdividing an edge is the special case where P2 is a chain.  Chains stay
# chains, which is why edge subdivision alone can never reach the cube.

x = segment
for _ in range(3):
    x = subdivide_edge(x, x.generators[0].id, 2)
print("after three cuts:", [g.id for g in x.generators])
print("is a chain flow:", are_isomorphic(saturate(x), flow_of_poset(chain(4))) is not None)

# On the filled square, cutting only U leaves a pentagon.  Cutting the
# process from 0 to 1 across the whole square means refining the square.

c2 = PresentedFlow("0123", [("U", "0", "1"), ("V", "1", "2"), ("W", "0", "3"), ("X", "3", "2")],
                   [(("U", "V"), ("W", "X"))])
pentagon = mk_poset("0a123", [("0", "a"), ("a", "1"), ("1", "2"), ("0", "3"), ("3", "2")])
print("cut U only -> pentagon:",
      are_isomorphic(saturate(subdivide_edge(c2, "U")), flow_of_poset(pentagon)) is not None)

sq = find_ball_occurrences(c2, cube(2))[0]
target = product(chain(2), chain(1))
cut = PosetMap(cube(2), target, {e: e for e in cube(2).elements})
print("cut the square -> F(chain2 x chain1):",
      are_isomorphic(saturate(refine(RefinementStep(sq, cut))), flow_of_poset(target)) is not None)
