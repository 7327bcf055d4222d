#!/usr/bin/env python3
"""Fourier series on finite abelian groups, tori, and free products.

Walks through the basic group-algebra calculus: building elements as
coefficient maps, evaluating on the dual group, convolving, taking adjoints
and traces.
"""

import numpy as np

from xpchaos import (GroupAlgebraElement, GroupDescriptor, adjoint, convolve,
                     evaluate_on_dual, fourier_coefficients, trace)
from xpchaos.words import ReducedWord

# -- the hypercube ----------------------------------------------------------
# Characters of Z_2^n are Walsh functions; the frequency (1, 0) is the first
# Rademacher coordinate, taking values +-1.

cube = GroupDescriptor.hypercube(2)
rademacher = GroupAlgebraElement.lam(cube, (1, 0))
print("Walsh character values on the dual of Z_2^2:",
      np.round(evaluate_on_dual(rademacher).values.real, 6))

# -- a cyclic group ---------------------------------------------------------
# lambda(1) + lambda(3) on Z_4 is a conjugate pair, so its values are real.

z4 = GroupDescriptor.finite_abelian([4])
pair = GroupAlgebraElement(z4, {(1,): 1, (3,): 1})
values = evaluate_on_dual(pair)
print("conjugate pair on Z_4:", np.round(values.values.real, 6))
print("round trip recovers the coefficients:",
      fourier_coefficients(values).coeffs)

# -- convolution is the operator product -------------------------------------
# On abelian groups it matches the pointwise product of evaluations; on free
# groups the words multiply with reduction.

rng = np.random.default_rng(0)
keys = [(a, b) for a in range(4) for b in range(4)]
z44 = GroupDescriptor.finite_abelian([4, 4])
f = GroupAlgebraElement(z44, dict(zip(keys, rng.standard_normal(16))))
h = GroupAlgebraElement(z44, dict(zip(keys, rng.standard_normal(16))))
lhs = evaluate_on_dual(convolve(f, h)).values
rhs = evaluate_on_dual(f).values * evaluate_on_dual(h).values
print("convolution vs pointwise product, max gap:", np.abs(lhs - rhs).max())

free = GroupDescriptor.free_group(2)
g1 = GroupAlgebraElement.lam(free, ReducedWord(((1, 1),)))
g1_inv_g2 = GroupAlgebraElement.lam(free, ReducedWord(((1, -1), (2, 1))))
print("free product lambda(g1) * lambda(g1^-1 g2):",
      list(convolve(g1, g1_inv_g2).coeffs))

# -- trace and Parseval -------------------------------------------------------
# tau(f f*) recovers the coefficient l2 norm.

parseval = trace(convolve(f, adjoint(f))).real
coefficient_norm = sum(abs(v) ** 2 for v in f.coeffs.values())
print(f"tau(f f*) = {parseval:.12f} vs sum |fhat|^2 = {coefficient_norm:.12f}")
