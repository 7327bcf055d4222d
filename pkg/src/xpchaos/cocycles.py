"""Length functions, Gromov forms, and explicit cocycle orthonormal bases.

Each built-in family packages a conditionally negative length ``psi`` together
with an orthonormal basis of the associated cocycle Hilbert space, split into
coordinate components ``H = H_1 + ... + H_n``.  Pairings ``<beta(g), u>`` are
exact integers for the integer families; the Gromov form is available both
from its defining formula ``(psi(g) + psi(h) - psi(g^{-1}h)) / 2`` and from a
per-family closed form, so the two can be cross-checked exactly.

Families
--------
``euclidean``          squared Euclidean length on Z^n (torus polynomials)
``torus_word``         word length |g_1| + ... + |g_n| on Z^n
``cyclic_word``        word length on Z_{2m}^n (hypercube when 2m = 2)
``odd_cyclic_word``    word length on Z_{2m+1}^n (Gromov form only, no basis)
``free_word``          word length on the free group F_n
``free_product_word``  word length on Z_{2m} * ... * Z_{2m}
``weighted_cube``      weighted two-point masses on the hypercube dual
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import words
from .groups import (FINITE_ABELIAN, FREE_GROUP, FREE_PRODUCT, TORUS,
                     GroupDescriptor, element_inverse, element_product)
from .words import ReducedWord

#: kernel eigenvalues are accepted down to this floor (symmetric eigensolvers
#: on the small matrices used here are accurate to ~1e-13)
PSD_EIG_TOL = -1e-10

FAMILIES = ("euclidean", "torus_word", "cyclic_word", "odd_cyclic_word",
            "free_word", "free_product_word", "weighted_cube")


@dataclass(frozen=True)
class BasisVector:
    """Identifier of one cocycle ONB vector.

    ``family`` is one of ``euclidean`` (coordinate direction), ``zword``
    (edge vector u_j(l), l a nonzero integer), ``z2m`` (edge vector u_j(l),
    l in [1, m]), ``free`` / ``free_prod`` (word-indexed u_w), or ``wcube``
    (weighted hypercube direction).
    """

    family: str
    j: int = 0
    ell: int = 0
    word: ReducedWord | None = None

    @property
    def component(self) -> int:
        """The coordinate slice in [1, n] this vector belongs to."""
        if self.word is not None:
            return self.word.first_generator
        return self.j

    def to_id(self) -> str:
        if self.family == "euclidean":
            return f"Euclidean:{self.j}"
        if self.family == "zword":
            return f"ZWord:{self.j}:{self.ell}"
        if self.family == "z2m":
            return f"Z2mWord:{self.j}:{self.ell}"
        if self.family == "free":
            return "FreeWord:" + ";".join(f"{i},{l}" for i, l in self.word.blocks)
        if self.family == "free_prod":
            return "FreeProdWord:" + ";".join(f"{i},{l}" for i, l in self.word.blocks)
        return f"WeightedCube:{self.j}"

    @classmethod
    def from_id(cls, text: str) -> "BasisVector":
        parts = text.split(":")
        tag = parts[0].lower()
        if tag == "euclidean":
            return cls("euclidean", j=int(parts[1]))
        if tag == "zword":
            return cls("zword", j=int(parts[1]), ell=int(parts[2]))
        if tag == "z2mword":
            return cls("z2m", j=int(parts[1]), ell=int(parts[2]))
        if tag in ("freeword", "freeprodword"):
            blocks = tuple(tuple(int(x) for x in pair.split(",")) for pair in parts[1].split(";"))
            word = ReducedWord(blocks)
            return cls("free" if tag == "freeword" else "free_prod", word=word)
        if tag == "weightedcube":
            return cls("wcube", j=int(parts[1]))
        raise ValueError(f"cannot parse basis vector id {text!r}")


class LengthCocycle:
    """A length function with its Gromov form and component-split ONB.

    Immutable; all methods are pure.  ``weights`` is only set for the
    weighted hypercube family.
    """

    def __init__(self, family: str, group: GroupDescriptor,
                 weights: tuple[float, ...] | None = None):
        if family not in FAMILIES:
            raise ValueError(f"unknown cocycle family {family!r}; valid: {FAMILIES}")
        self.family = family
        self.group = group
        self.weights = weights
        self._validate()

    def _validate(self) -> None:
        f, g = self.family, self.group
        if f in ("euclidean", "torus_word") and g.kind != TORUS:
            raise ValueError(f"{f} cocycle needs a torus group")
        if f == "cyclic_word":
            if g.kind != FINITE_ABELIAN or len(set(g.moduli)) != 1 or g.moduli[0] % 2:
                raise ValueError("cyclic_word needs equal even moduli")
        if f == "odd_cyclic_word":
            if g.kind != FINITE_ABELIAN or len(set(g.moduli)) != 1 or g.moduli[0] % 2 == 0:
                raise ValueError("odd_cyclic_word needs equal odd moduli >= 3")
        if f == "free_word" and g.kind != FREE_GROUP:
            raise ValueError("free_word needs a free group")
        if f == "free_product_word" and g.kind != FREE_PRODUCT:
            raise ValueError("free_product_word needs a free product group")
        if f == "weighted_cube":
            if g.kind != FINITE_ABELIAN or any(m != 2 for m in g.moduli):
                raise ValueError("weighted_cube needs a hypercube group")
            if self.weights is None or len(self.weights) != len(g.moduli):
                raise ValueError("weighted_cube needs one weight per coordinate")
            if any(a <= 0 for a in self.weights):
                raise ValueError("weights must be positive")
        elif self.weights is not None:
            raise ValueError(f"{f} takes no weights")

    # -- length -----------------------------------------------------------

    @property
    def half_modulus(self) -> int:
        """m for the Z_{2m} families."""
        if self.family == "cyclic_word":
            return self.group.moduli[0] // 2
        if self.family == "free_product_word":
            return self.group.modulus // 2
        raise ValueError(f"{self.family} has no half modulus")

    def psi(self, g):
        """The length of a group element (exact integer where integral)."""
        f = self.family
        if f == "euclidean":
            return sum(x * x for x in g)
        if f == "torus_word":
            return sum(abs(x) for x in g)
        if f in ("cyclic_word", "odd_cyclic_word"):
            q = self.group.moduli[0]
            return sum(min(x % q, q - x % q) for x in g)
        if f == "free_word":
            return words.word_length(g)
        if f == "free_product_word":
            return words.word_length(g, self.group.modulus)
        # weighted cube: defining L2(Gamma, mu) expression over the point
        # masses mu = sum_i alpha_i delta_{w_i}, with w_i the sign vector
        # flipped at coordinate i
        total = 0.0
        for i, alpha in enumerate(self.weights):
            character_value = -1 if g[i] else 1
            total += alpha * (1 - character_value) ** 2
        return total

    @property
    def gap(self):
        """Exact group-wide spectral gap min{psi(g) : psi(g) != 0}."""
        if self.family == "weighted_cube":
            return 4 * min(self.weights)
        return 1

    # -- basis ------------------------------------------------------------

    @property
    def has_basis(self) -> bool:
        return self.family != "odd_cyclic_word"

    def _require_basis(self) -> None:
        if not self.has_basis:
            raise ValueError(f"{self.family} exposes no orthonormal basis")

    def pairing(self, g, u: BasisVector):
        """The inner product <beta(g), u> (the derivative symbol over 2*pi*i)."""
        self._require_basis()
        f = self.family
        if f == "euclidean":
            if u.family != "euclidean":
                raise ValueError("basis family mismatch")
            return g[u.j - 1]
        if f == "torus_word":
            if u.family != "zword":
                raise ValueError("basis family mismatch")
            gj, ell = g[u.j - 1], u.ell
            return 1 if gj * ell > 0 and abs(gj) >= abs(ell) else 0
        if f == "cyclic_word":
            if u.family != "z2m":
                raise ValueError("basis family mismatch")
            m = self.half_modulus
            gj = g[u.j - 1] % (2 * m)
            return 1 if u.ell <= gj < u.ell + m else 0
        if f == "free_word":
            if u.family != "free":
                raise ValueError("basis family mismatch")
            return 1 if words.leq_free(u.word, g) else 0
        if f == "free_product_word":
            if u.family != "free_prod":
                raise ValueError("basis family mismatch")
            return 1 if words.derivative_set_member(u.word, g, self.half_modulus) else 0
        if u.family != "wcube":
            raise ValueError("basis family mismatch")
        return 2 * math.sqrt(self.weights[u.j - 1]) if g[u.j - 1] else 0.0

    def basis_slice(self, j: int, support: Iterable) -> list[BasisVector]:
        """Basis vectors of the j-th component with a nonzero pairing against
        some element of ``support`` (finite by the indicator structure)."""
        self._require_basis()
        support = list(support)
        f = self.family
        if f == "euclidean":
            return [BasisVector("euclidean", j=j)]
        if f == "torus_word":
            pos = max((g[j - 1] for g in support if g[j - 1] > 0), default=0)
            neg = min((g[j - 1] for g in support if g[j - 1] < 0), default=0)
            ells = list(range(1, pos + 1)) + list(range(neg, 0))
            return [BasisVector("zword", j=j, ell=ell) for ell in ells]
        if f == "cyclic_word":
            m = self.half_modulus
            return [BasisVector("z2m", j=j, ell=ell) for ell in range(1, m + 1)]
        if f == "free_word":
            seen: dict[ReducedWord, None] = {}
            for g in support:
                for w in words.chain(g):
                    if w.first_generator == j:
                        seen.setdefault(w)
            return [BasisVector("free", word=w) for w in seen]
        if f == "free_product_word":
            m = self.half_modulus
            seen = {}
            for g in support:
                if g.is_identity or g.first_generator != j:
                    continue
                for r in range(1, g.num_blocks + 1):
                    gen_r, exp_r = g.blocks[r - 1]
                    lo, hi = max(1, exp_r - m + 1), min(m, exp_r)
                    for ell in range(lo, hi + 1):
                        w = ReducedWord(g.blocks[: r - 1] + ((gen_r, ell),))
                        seen.setdefault(w)
            return [BasisVector("free_prod", word=w) for w in seen]
        return [BasisVector("wcube", j=j)]

    def basis_for_support(self, support: Iterable) -> list[BasisVector]:
        support = list(support)
        out = []
        for j in range(1, self.group.n_components + 1):
            out.extend(self.basis_slice(j, support))
        return out

    def delta_expansion(self, u: BasisVector) -> list[tuple[object, float]]:
        """Write ``u`` as a combination of deltas in the group algebra.

        Enables Gram computations directly from the Gromov form.
        """
        self._require_basis()
        n = self.group.n_components
        if u.family == "euclidean":
            e_j = tuple(1 if i == u.j - 1 else 0 for i in range(n))
            return [(e_j, 1)]
        if u.family == "zword":
            here = tuple(u.ell if i == u.j - 1 else 0 for i in range(n))
            sign = 1 if u.ell > 0 else -1
            prev = tuple(u.ell - sign if i == u.j - 1 else 0 for i in range(n))
            return [(here, 1), (prev, -1)]
        if u.family == "z2m":
            q = self.group.moduli[0]
            here = tuple(u.ell % q if i == u.j - 1 else 0 for i in range(n))
            prev = tuple((u.ell - 1) % q if i == u.j - 1 else 0 for i in range(n))
            return [(here, 1), (prev, -1)]
        if u.family == "free":
            return [(u.word, 1), (words.predecessor(u.word), -1)]
        if u.family == "free_prod":
            return [(u.word, 1), (words.predecessor(u.word, self.group.modulus), -1)]
        point = tuple(1 if i == u.j - 1 else 0 for i in range(n))
        return [(point, 1 / (2 * math.sqrt(self.weights[u.j - 1])))]


def build_cocycle(family: str, group: GroupDescriptor,
                  weights: Sequence[float] | None = None) -> LengthCocycle:
    """Assemble a built-in cocycle; see the module docstring for families."""
    w = tuple(float(a) for a in weights) if weights is not None else None
    return LengthCocycle(family, group, weights=w)


def weighted_hypercube(alpha: Sequence[float]) -> LengthCocycle:
    """The weighted hypercube cocycle with psi(A) = 4 * sum_{j in A} alpha_j."""
    alpha = list(alpha)
    if not alpha:
        raise ValueError("need at least one weight")
    return build_cocycle("weighted_cube", GroupDescriptor.hypercube(len(alpha)), alpha)


# -- Gromov forms ----------------------------------------------------------


def _halve(value):
    """Exact halving: ints stay ints when even, otherwise Fractions."""
    if isinstance(value, int):
        return value // 2 if value % 2 == 0 else Fraction(value, 2)
    if isinstance(value, Fraction):
        return value / 2
    return value / 2


def gromov_form_defining(cocycle: LengthCocycle, g, h):
    """(psi(g) + psi(h) - psi(g^{-1} h)) / 2, computed exactly."""
    group = cocycle.group
    g = _canonical(group, g)
    h = _canonical(group, h)
    gh = element_product(group, element_inverse(group, g), h)
    return _halve(cocycle.psi(g) + cocycle.psi(h) - cocycle.psi(gh))


def _cyclic_closed(a: int, b: int, q: int):
    """Closed-form Gromov value of two nonzero residues of Z_q.

    For even q = 2m this is min{l, 2m - l', max{0, m - l' + l}} with
    l <= l'; for odd q = 2m + 1 the inner max shifts by one half.
    """
    if a == 0 or b == 0:
        return 0
    lo, hi = min(a, b), max(a, b)
    if q % 2 == 0:
        m = q // 2
        return min(lo, q - hi, max(0, m - hi + lo))
    m = (q - 1) // 2
    return min(lo, q - hi, max(0, Fraction(2 * (m - hi + lo) + 1, 2)))


def gromov_form(cocycle: LengthCocycle, g, h, method: str = "closed"):
    """The Gromov form <delta_g, delta_h> of a built-in length function.

    ``method='closed'`` uses the per-family closed form; ``method='defining'``
    evaluates (psi(g)+psi(h)-psi(g^{-1}h))/2.  Both agree exactly.
    """
    if method == "defining":
        return gromov_form_defining(cocycle, g, h)
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    group = cocycle.group
    g = _canonical(group, g)
    h = _canonical(group, h)
    f = cocycle.family
    if f == "euclidean":
        return sum(x * y for x, y in zip(g, h))
    if f == "torus_word":
        return sum(min(abs(x), abs(y)) for x, y in zip(g, h) if x * y > 0)
    if f in ("cyclic_word", "odd_cyclic_word"):
        q = group.moduli[0]
        total = sum(_cyclic_closed(x, y, q) for x, y in zip(g, h))
        return int(total) if total == int(total) else total
    if f == "free_word":
        return words.word_length(words.meet(g, h))
    if f == "free_product_word":
        q = group.modulus
        acc = 0
        for (gen1, exp1), (gen2, exp2) in zip(g.blocks, h.blocks):
            if (gen1, exp1) == (gen2, exp2):
                acc += min(exp1, q - exp1)
                continue
            if gen1 == gen2:
                acc += _cyclic_closed(exp1, exp2, q)
            break
        return acc
    # weighted cube
    return 4 * sum(a for bit_g, bit_h, a in zip(g, h, cocycle.weights) if bit_g and bit_h)


def _canonical(group: GroupDescriptor, key):
    from .groups import canonical_key
    return canonical_key(group, key)


def gromov_bilinear(cocycle: LengthCocycle, expansion_a, expansion_b,
                    method: str = "defining"):
    """Bilinear extension of the Gromov form to delta combinations."""
    total = 0
    for key_a, coeff_a in expansion_a:
        for key_b, coeff_b in expansion_b:
            total = total + coeff_a * coeff_b * gromov_form(cocycle, key_a, key_b, method=method)
    return total


def gram_matrix(cocycle: LengthCocycle, basis: Sequence[BasisVector],
                method: str = "defining"):
    """Gram matrix of basis vectors via their delta expansions (exact)."""
    expansions = [cocycle.delta_expansion(u) for u in basis]
    size = len(basis)
    return [[gromov_bilinear(cocycle, expansions[a], expansions[b], method=method)
             for b in range(size)] for a in range(size)]


def completeness_defect(cocycle: LengthCocycle, g):
    """sum_u <beta(g), u>^2 - psi(g); zero when the ONB is complete at g."""
    basis = cocycle.basis_for_support([g])
    total = sum(cocycle.pairing(g, u) ** 2 for u in basis)
    return total - cocycle.psi(g)


# -- conditional negativity -------------------------------------------------


def conditional_negativity_check(psi, sample: Sequence, t_grid: Sequence[float],
                                 group: GroupDescriptor | None = None,
                                 seed: int = 0, direct_trials: int = 200) -> dict:
    """Certify conditional negativity of a length function on a sample.

    For each ``t`` the kernel ``K[a, b] = exp(-t psi(a^{-1} b))`` must be
    positive semidefinite (Schoenberg); we report its minimum eigenvalue and
    PASS iff all stay above ``-1e-10``.  The defining inequality is also
    checked directly on random mean-zero real vectors.

    ``psi`` may be a :class:`LengthCocycle` or a callable (then ``group`` is
    required).
    """
    if isinstance(psi, LengthCocycle):
        group = psi.group
        psi_fn: Callable = psi.psi
    else:
        if group is None:
            raise ValueError("a raw psi callable needs an explicit group")
        psi_fn = psi
    sample = list(sample)
    if not sample:
        raise ValueError("sample must be nonempty")
    identity = group.identity()
    if identity not in sample:
        sample = [identity] + sample
    size = len(sample)
    psi_matrix = np.empty((size, size))
    for a in range(size):
        for b in range(size):
            step = element_product(group, element_inverse(group, sample[a]), sample[b])
            psi_matrix[a, b] = float(psi_fn(step))
    min_eigs = {}
    for t in t_grid:
        if t <= 0:
            raise ValueError("t grid must be positive")
        kernel = np.exp(-t * psi_matrix)
        min_eigs[float(t)] = float(np.linalg.eigvalsh(kernel).min())
    rng = np.random.default_rng(seed)
    direct_max = -math.inf
    for _ in range(direct_trials):
        vec = rng.standard_normal(size)
        vec -= vec.mean()
        direct_max = max(direct_max, float(vec @ psi_matrix @ vec))
    passed = all(v >= PSD_EIG_TOL for v in min_eigs.values()) and direct_max <= 1e-10
    return {"kernel_min_eigenvalues": min_eigs, "direct_form_max": direct_max,
            "sample_size": size, "passed": passed}


def spectral_gap(cocycle: LengthCocycle, sample: Sequence | None = None):
    """The spectral gap; for built-ins the exact group-wide formula value.

    When a sample is supplied it must contain at least one element of nonzero
    length, and the sample minimum is checked against the formula value.
    """
    if sample is not None:
        lengths = [cocycle.psi(g) for g in sample]
        nonzero = [v for v in lengths if v != 0]
        if not nonzero:
            raise ValueError("sample has no element of nonzero length")
        if min(nonzero) < cocycle.gap:
            raise ValueError("sample contradicts the formula gap")
    return cocycle.gap
