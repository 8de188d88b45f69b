# Saturating a presentation
#
# A presented flow lists generators and relations between parallel words.
# Saturation enumerates every word and glues the ones the relations identify.

from dihom import PresentedFlow, full_ball_violations, homology, is_full_directed_ball, saturate

gens = [("U", "0", "1"), ("V", "1", "2"), ("W", "0", "3"), ("X", "3", "2")]

filled = PresentedFlow("0123", gens, [(("U", "V"), ("W", "X"))])
hollow = PresentedFlow("0123", gens)

for name, x in [("filled square", filled), ("hollow square", hollow)]:
    t = saturate(x)
    print(name)
    print("  classes from 0 to 2:", t.paths("0", "2"))
    print("  full directed ball:", is_full_directed_ball(t), full_ball_violations(t))
    print("  " + homology(t).report().replace("\n", "\n  "))

# Each class is named after its least word, so the output does not depend on
# the order in which words were discovered.

t = saturate(filled)
print(t.compose[("U", "V")], "==", t.compose[("W", "X")])
