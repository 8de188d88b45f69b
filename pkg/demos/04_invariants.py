# Invariants that survive refinement
#
# The nerve of a loopless flow is a chain complex; its integral homology is
# computed with a sparse Smith normal form.  Branching and merging are counted
# as germ classes of paths leaving or entering a state.

import random
from pathlib import Path

from dihom import (
    PosetMap,
    RefinementStep,
    branch_report,
    chain,
    cube,
    find_ball_occurrences,
    homology,
    nerve_complex,
    refine,
    saturate,
    smith_normal_form,
)
from dihom.io import load

print(smith_normal_form([[2, 4], [6, 10]]))
print(smith_normal_form([[6, 0], [0, 4]]))

hollow = load(Path(__file__).parent / "data" / "hollow_square.json")
t = saturate(hollow)
print("nerve sizes:", nerve_complex(t).dims)
print(homology(t).report())
print(branch_report(t).report())

# Refine every edge of the hollow square along a random T-map and compare.

rnd = random.Random(0)
x = hollow
for occ in find_ball_occurrences(hollow, chain(1)):
    p = rnd.choice([chain(2), chain(3), cube(2), cube(3)])
    gen = occ.cover_embed[("0", "1")]
    occ = next(o for o in find_ball_occurrences(x, chain(1)) if o.cover_embed[("0", "1")] == gen)
    x = refine(RefinementStep(occ, PosetMap(chain(1), p, {"0": p.minimum, "1": p.maximum})))

after = saturate(x)
print(len(after.states), "states after refining")
print("homology unchanged:", homology(after) == homology(t))
before, now = branch_report(t), branch_report(after)
print("germ counts unchanged at old states:",
      all((before.branch[s], before.merge[s]) == (now.branch[s], now.merge[s]) for s in t.states))
