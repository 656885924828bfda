"""
How fragment sizes depend on generator order
============================================

Fragment sizes shrink along the chosen order of the reduced generators.
For the Ising chain they follow 2(l - r). Reordering the generators keeps
the multiset of nonempty sizes, but a general reordering can slide an empty
fragment in front of a nonempty one.
"""

import itertools

from redcard import decompose, fragment_sizes, heisenberg, tfim

print("Ising chain fragment sizes")
for l in range(2, 9):
    print(f"  l = {l}: {decompose(tfim(l)).fragment_sizes}")

st = decompose(tfim(4))
seen = {tuple(fragment_sizes(st.k_basis, list(p))) for p in itertools.permutations(st.b_basis)}
print("\nall orders of the four Ising generators give:", sorted(seen))

# Heisenberg: two empty fragments at the end of the default order
st = decompose(heisenberg(4))
print("\nHeisenberg l = 4 generators:", [p.label for p in st.b_basis], "sizes", st.fragment_sizes)
for perm in itertools.permutations(range(4)):
    sizes = fragment_sizes(st.k_basis, [st.b_basis[i] for i in perm])
    if 0 in sizes and any(sizes[sizes.index(0):]):
        print("  order", [st.b_basis[i].label for i in perm], "->", sizes)

rep = st.ordering_report()
print("\nordering report ok:", rep.ok)
