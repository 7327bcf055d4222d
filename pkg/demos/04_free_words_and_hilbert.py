#!/usr/bin/env python3
"""Free-word combinatorics and free Hilbert transforms.

Reduced words carry an initial-subchain order whose meets realize the Gromov
form; first-letter projections decompose every mean-zero element, and signed
sums of them are involutive Hilbert transforms.
"""

import numpy as np

from xpchaos import GroupAlgebraElement, GroupDescriptor, enumerate_words, words
from xpchaos.operators import (absorbent_derivative, free_hilbert_transform,
                               project_AS, truncate)
from xpchaos.words import ReducedWord

# -- reduction and the order -----------------------------------------------------

raw = [(1, 2), (2, 1), (2, -1), (1, -1)]
print("reduction of g1^2 g2 g2^-1 g1^-1:", words.reduce(raw, 2))

w1 = ReducedWord(((1, 2),))
w2 = ReducedWord(((1, 3),))
print("g1^2 <= g1^3:", words.leq_free(w1, w2))
print("meet(g1^2 g2, g1^3):",
      words.meet(ReducedWord(((1, 2), (2, 1))), ReducedWord(((1, 3),))))

# Predecessor chains walk geodesics back to the identity.
w = ReducedWord(((2, 1), (1, -2)))
print("chain of g2 g1^-2:", [str(v) for v in words.chain(w)])

# In Z_4 * Z_4 the exponent window test replaces the order.
print("g1 hits W(g1) window of g1^2 (m=2):",
      words.derivative_set_member(ReducedWord(((1, 1),)), ReducedWord(((1, 2),)), 2))

# -- first-letter projections --------------------------------------------------------

free = GroupDescriptor.free_group(2)
rng = np.random.default_rng(2)
support = [v for v in enumerate_words(2, 3) if not v.is_identity]
f = GroupAlgebraElement(free, dict(zip(support, rng.standard_normal(len(support)))))

parts = [absorbent_derivative(f, j) for j in (1, 2)]
print("first-letter parts recombine:", (parts[0] + parts[1]) == f)

# Truncation onto the subgroup generated by S factors through the projection
# onto words whose first letter lies in S.
for subset in ((1,), (2,)):
    factored = truncate(project_AS(f, subset), subset) == truncate(f, subset)
    print(f"E_{subset} = E_{subset} P_A:", factored)

# -- free Hilbert transforms ----------------------------------------------------------

signs = (1, -1)
flipped = free_hilbert_transform(f, signs)
print("H_eps is an involution:", free_hilbert_transform(flipped, signs) == f)
print("H_(1,...,1) is the identity:", free_hilbert_transform(f, (1, 1)) == f)

# The same battery runs on free products of cyclic groups.
z4free = GroupDescriptor.free_product(2, 4)
support4 = [v for v in enumerate_words(2, 2, modulus=4) if not v.is_identity]
f4 = GroupAlgebraElement(z4free, dict(zip(support4, rng.standard_normal(len(support4)))))
print("Z_4 * Z_4 mean-zero decomposition:",
      (absorbent_derivative(f4, 1) + absorbent_derivative(f4, 2)) == f4)
