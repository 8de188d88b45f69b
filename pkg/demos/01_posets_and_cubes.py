# Posets, their flows, and the tensor product
#
# A poset P gives a flow F(P): one state per element and exactly one path
# class for each strict pair a < b.  Products of posets line up with tensor
# products of flows, which is how the n-cube shows up as a power of the
# directed segment.

from dihom import are_isomorphic, chain, cube, flow_of_poset, glob, product, tensor

# The directed segment is the glob on one path.

I = glob({"u"})
print("segment:", I.states, I.hom)

# chain(k) is 0 < 2 < 3 < ... < k < 1, so the endpoints keep their names
# however finely the chain is cut.

print("chain(3):", chain(3).linear)

square = flow_of_poset(cube(2))
print("classes of F(square):", sorted(square.classes))

# Tensoring I with itself gives the square again.

II = tensor(I, I)
print("I (x) I has", len(II.classes), "classes")
print("I (x) I ~ F(cube(2)):", are_isomorphic(II, square) is not None)

power = I
for n in range(2, 5):
    power = tensor(power, I)
    print(f"I^{n} ~ F(cube({n})):", are_isomorphic(power, flow_of_poset(cube(n))) is not None)

# The same coherence holds for any pair of posets.

p = product(chain(2), cube(2))
print("F(chain2 x square) ~ F(chain2) (x) F(square):",
      are_isomorphic(flow_of_poset(p), tensor(flow_of_poset(chain(2)), square)) is not None)
