"""Experiment harness: assemble inequality sides, scan ensembles, report.

Every experiment produces a :class:`RatioReport` whose witness re-evaluates
to the recorded numbers, and every scan is deterministic for a fixed seed:
random inputs are pre-generated sequentially from the seed and only their
evaluation is (optionally) parallelized, capped by ``XPCHAOS_THREADS``.

The inequalities under scan carry implicit constants, so no experiment
asserts a specific bound; the harness records empirical maxima and the test
suite asserts only the analytically exact p = 2 closures.
"""

from __future__ import annotations

import itertools
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import operators
from .cocycles import BasisVector, LengthCocycle, build_cocycle
from .groups import (FINITE_ABELIAN, TORUS, GroupAlgebraElement, GroupDescriptor,
                     adjoint, element_inverse)
from .norms import (lp_norm, schatten_norm, sign_patterns, square_function_norm)

SIGN_ENUMERATION_CAP = 14
MONTE_CARLO_SIGNS = 2 ** 14

DERIVATIVE_CHOICES = ("walsh", "euclidean", "absorbent", "gradient")


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("XPCHAOS_THREADS", "1")))
    except ValueError:
        return 1


def _parallel_map(fn: Callable, items: Sequence) -> list:
    workers = _thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class SigmaModel:
    """The product of the n-sign space with uniform k-subsets of [n]."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")

    def subsets(self) -> list[tuple[int, ...]]:
        return list(itertools.combinations(range(1, self.n + 1), self.k))

    @property
    def num_subsets(self) -> int:
        return math.comb(self.n, self.k)

    def atoms(self):
        """All (eps, S) atoms, each of weight 1 / (2^n * C(n, k))."""
        for eps in itertools.product((1, -1), repeat=self.n):
            for subset in self.subsets():
                yield eps, subset

    def sigma(self, j: int, eps, subset) -> int:
        """sigma_j(eps, S) = eps_j * delta_{j in S}."""
        return eps[j - 1] if j in subset else 0

    def sigma_moment(self, j: int, p: float) -> Fraction:
        """||sigma_j||_p^p by explicit enumeration (|eps_j|^p = 1)."""
        hits = sum(1 for subset in self.subsets() if j in subset)
        return Fraction(hits, self.num_subsets)

    def square_function_moment(self, p: float):
        """||(sum_j sigma_j^2)^(1/2)||_p^p by explicit enumeration."""
        exact = float(p).is_integer() and int(p) % 2 == 0
        total = 0 if exact else 0.0
        for subset in self.subsets():
            size = len(subset)
            total += size ** (int(p) // 2) if exact else float(size) ** (p / 2)
        return Fraction(total, self.num_subsets) if exact else total / self.num_subsets


@dataclass
class RatioReport:
    """One experiment outcome with a reproducible witness."""

    experiment: str
    params: dict
    lhs: float
    rhs: float
    ratio: float
    max_ratio: float
    witness: dict | None
    trials: int
    seed: int | None
    runtime_ms: float
    monte_carlo: bool = False
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "max_ratio": self.max_ratio,
            "witness": self.witness,
            "trials": self.trials,
            "seed": self.seed,
            "runtime_ms": self.runtime_ms,
            "monte_carlo": self.monte_carlo,
            "extra": self.extra,
        }


# -- balanced truncation averages -------------------------------------------


def _coefficient_tensor(f: GroupAlgebraElement) -> np.ndarray:
    tensor = np.zeros(f.group.moduli, dtype=complex)
    for key, value in f.coeffs.items():
        tensor[key] += value
    return tensor


def _subset_power_lattice(values: np.ndarray, moduli: tuple[int, ...], p: float) -> np.ndarray:
    """mean_x |E_S f(x)|^p for ALL subsets S at once.

    The S-truncation is the conditional expectation onto functions of the
    coordinates in S, so its values arise by averaging the value tensor over
    the other axes.  Two lattice passes: first extend each axis with its mean
    (index m_j = "coordinate averaged out"), then reduce each axis to the
    pair (dropped, kept) while averaging |.|^p over kept coordinates.  The
    result is indexed by the 0/1 indicator of S.
    """
    extended = values
    for axis, _ in enumerate(moduli):
        mean = extended.mean(axis=axis, keepdims=True)
        extended = np.concatenate([extended, mean], axis=axis)
    powers = np.abs(extended) ** p
    for axis, m in enumerate(moduli):
        kept = powers.take(range(m), axis=axis).mean(axis=axis, keepdims=True)
        dropped = powers.take([m], axis=axis)
        powers = np.concatenate([dropped, kept], axis=axis)
    return powers


def _parseval_lattice(coeff_sq: np.ndarray, moduli: tuple[int, ...]) -> np.ndarray:
    """sum of kept |coefficients|^2 for all subsets (Parseval at p = 2)."""
    lattice = coeff_sq
    for axis, _ in enumerate(moduli):
        dropped = lattice.take([0], axis=axis)
        kept = lattice.sum(axis=axis, keepdims=True)
        lattice = np.concatenate([dropped, kept], axis=axis)
    return lattice


def _abelian_subset_norm_powers(f: GroupAlgebraElement, subsets: Sequence[tuple[int, ...]],
                                ps: Sequence[float]) -> dict[float, np.ndarray]:
    """||E_S f||_p^p for every subset from a single dual evaluation."""
    moduli = f.group.moduli
    n = len(moduli)
    tensor = _coefficient_tensor(f)
    out = {p: np.empty(len(subsets)) for p in ps}
    others = [p for p in ps if p != 2]
    lattices = {}
    if others:
        values = np.fft.ifftn(tensor) * f.group.dual_size
        for p in others:
            lattices[p] = _subset_power_lattice(values, moduli, p)
    if 2 in ps:
        lattices[2] = _parseval_lattice(np.abs(tensor) ** 2, moduli)
    for idx, subset in enumerate(subsets):
        indicator = tuple(1 if j in subset else 0 for j in range(1, n + 1))
        for p in ps:
            out[p][idx] = float(lattices[p][indicator])
    return out


def _subset_norm_powers(f: GroupAlgebraElement, subsets: Sequence[tuple[int, ...]],
                        ps: Sequence[float]) -> dict[float, np.ndarray]:
    if f.group.kind == FINITE_ABELIAN:
        return _abelian_subset_norm_powers(f, subsets, ps)
    out = {p: np.empty(len(subsets)) for p in ps}
    for idx, subset in enumerate(subsets):
        truncated = operators.truncate(f, subset)
        for p in ps:
            out[p][idx] = lp_norm(truncated, p) ** p
    return out


def _abelian_flip_norm_sum(f: GroupAlgebraElement, p: float, derivative: str) -> float:
    """Fast path for the walsh/absorbent sums on finite abelian groups.

    The absorbent derivative is id minus the single-axis conditional
    expectation, so its values come straight from the value tensor.
    """
    factor = 2.0 if derivative == "walsh" else 1.0
    sides = (f,) if derivative == "walsh" else (f, adjoint(f))
    total = 0.0
    for side in sides:
        values = np.fft.ifftn(_coefficient_tensor(side)) * side.group.dual_size
        for axis in range(side.group.n_components):
            flipped = values - values.mean(axis=axis, keepdims=True)
            total += float(np.mean((factor * np.abs(flipped)) ** p))
    return total


def _derivative_norm_sum(f: GroupAlgebraElement, cocycle: LengthCocycle, p: float,
                         derivative: str) -> float:
    """sum_j of the derivative term of the right-hand side."""
    n = f.group.n_components
    if f.group.kind == FINITE_ABELIAN and derivative in ("walsh", "absorbent"):
        if derivative == "walsh" and any(m != 2 for m in f.group.moduli):
            raise ValueError("the walsh derivative needs a hypercube group")
        return _abelian_flip_norm_sum(f, p, derivative)
    if derivative == "walsh":
        return sum(lp_norm(operators.walsh_derivative(f, j), p) ** p for j in range(1, n + 1))
    if derivative == "euclidean":
        if cocycle.family != "euclidean":
            if f.group.kind != TORUS:
                raise ValueError("the euclidean derivative needs a torus group")
            cocycle = build_cocycle("euclidean", f.group)
        total = 0.0
        for j in range(1, n + 1):
            u = BasisVector("euclidean", j=j)
            total += lp_norm(operators.directional_derivative(f, u, cocycle), p) ** p
        return total
    if derivative == "absorbent":
        f_star = adjoint(f)
        return sum(lp_norm(operators.absorbent_derivative(f, j), p) ** p
                   + lp_norm(operators.absorbent_derivative(f_star, j), p) ** p
                   for j in range(1, n + 1))
    if derivative == "gradient":
        f_star = adjoint(f)
        total = 0.0
        for j in range(1, n + 1):
            for side in (f, f_star):
                grad = operators.gradient(side, j, cocycle)
                if grad.components:
                    total += square_function_norm(grad.elements, p) ** p
        return total
    raise ValueError(f"unknown derivative choice {derivative!r}; valid: {DERIVATIVE_CHOICES}")


def _validate_mean_zero(f: GroupAlgebraElement, cocycle: LengthCocycle) -> None:
    if any(cocycle.psi(key) == 0 for key in f.coeffs):
        raise ValueError("the input must be mean-zero (no coefficients of zero length)")


def naor_profile(f: GroupAlgebraElement, cocycle: LengthCocycle,
                 ps: Sequence[float], ks: Sequence[int],
                 derivative: str) -> dict[float, dict[int, tuple[float, float]]]:
    """(lhs, rhs) of the truncation-average inequality for each (p, k).

    lhs(p, k) averages ||E_S f||_p^p over the k-subsets; rhs(p, k) is
    (k/n) * sum_j (derivative term)_j + (k/n)^(p/2) * ||f||_p^p.
    """
    _validate_mean_zero(f, cocycle)
    n = f.group.n_components
    for k in ks:
        if not 1 <= k <= n:
            raise ValueError(f"k must lie in [1, {n}], got {k}")
    subsets = [s for k in sorted(set(ks))
               for s in itertools.combinations(range(1, n + 1), k)]
    sizes = np.array([len(s) for s in subsets])
    norm_powers = _subset_norm_powers(f, subsets, list(ps))
    out: dict[float, dict[int, tuple[float, float]]] = {}
    for p in ps:
        deriv_sum = _derivative_norm_sum(f, cocycle, p, derivative)
        full_norm = lp_norm(f, p) ** p
        out[p] = {}
        for k in ks:
            lhs = float(np.mean(norm_powers[p][sizes == k]))
            rhs = (k / n) * deriv_sum + (k / n) ** (p / 2) * full_norm
            out[p][k] = (lhs, rhs)
    return out


def naor_ratio(f: GroupAlgebraElement, cocycle: LengthCocycle, p: float, k: int,
               derivative: str = "absorbent") -> RatioReport:
    """One balanced truncation-average experiment at a single (p, k)."""
    start = time.perf_counter()
    profile = naor_profile(f, cocycle, [p], [k], derivative)
    lhs, rhs = profile[p][k]
    params = {"experiment_family": cocycle.family, "n": f.group.n_components,
              "p": p, "k": k, "derivative": derivative}
    witness = {"f": f.to_json(), "k": k, "p": p, "derivative": derivative,
               "family": cocycle.family,
               "weights": list(cocycle.weights) if cocycle.weights else None}
    ratio = lhs / rhs
    return RatioReport("naor_ratio", params, lhs, rhs, ratio, ratio, witness,
                       trials=1, seed=None,
                       runtime_ms=1e3 * (time.perf_counter() - start))


# -- matrix and scalar linear models -----------------------------------------


def _sign_average_norm_power(mats: np.ndarray, p: float, rng: np.random.Generator | None,
                             exhaustive: bool) -> tuple[float, bool]:
    """E_eps ||sum_j eps_j x_j||_p^p over the leading axis of ``mats``."""
    n = mats.shape[0]
    if exhaustive:
        signs = sign_patterns(n)
        monte_carlo = False
    else:
        if rng is None:
            raise ValueError("Monte Carlo sign sampling needs an rng")
        signs = rng.choice((1.0, -1.0), size=(MONTE_CARLO_SIGNS, n))
        monte_carlo = True
    combos = np.tensordot(signs, mats, axes=1)
    if p == 2:
        powers = np.sum(np.abs(combos) ** 2, axis=(1, 2))
    else:
        singular = np.linalg.svd(combos, compute_uv=False)
        powers = np.sum(singular ** p, axis=1)
    return float(np.mean(powers)), monte_carlo


def xp_linear_ratio(xs: Sequence[np.ndarray], p: float, k: int,
                    seed: int | None = None) -> RatioReport:
    """The balanced sign-average inequality for matrix tuples.

    lhs averages E_eps ||sum_{j in S} eps_j x_j||_p^p over k-subsets; rhs is
    (k/n) sum_j ||x_j||_p^p + (k/n)^(p/2) E_eps ||sum_j eps_j x_j||_p^p.
    Sign expectations are exhaustive up to 14 signs, Monte Carlo beyond.
    """
    start = time.perf_counter()
    if p < 2:
        warnings.warn("p < 2 is outside the theorem range; computing anyway")
    mats = np.stack([np.asarray(x, dtype=complex) for x in xs])
    n = mats.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    monte_carlo = False
    lhs_terms = []
    for subset in itertools.combinations(range(n), k):
        value, used_mc = _sign_average_norm_power(
            mats[list(subset)], p, rng, exhaustive=k <= SIGN_ENUMERATION_CAP)
        monte_carlo |= used_mc
        lhs_terms.append(value)
    lhs = float(np.mean(lhs_terms))
    norm_sum = sum(schatten_norm(x, p) ** p for x in mats)
    full_avg, used_mc = _sign_average_norm_power(
        mats, p, rng, exhaustive=n <= SIGN_ENUMERATION_CAP)
    monte_carlo |= used_mc
    rhs = (k / n) * norm_sum + (k / n) ** (p / 2) * full_avg
    ratio = lhs / rhs
    params = {"n": n, "d": mats.shape[1], "p": p, "k": k,
              "trace_convention": "unnormalized"}
    witness = {"matrices": [_matrix_to_json(x) for x in mats], "k": k, "p": p}
    return RatioReport("xp_linear_ratio", params, lhs, rhs, ratio, ratio, witness,
                       trials=1, seed=seed,
                       runtime_ms=1e3 * (time.perf_counter() - start),
                       monte_carlo=monte_carlo)


def _matrix_to_json(x: np.ndarray) -> dict:
    return {"re": np.asarray(x).real.tolist(), "im": np.asarray(x).imag.tolist()}


def _matrix_from_json(data: dict) -> np.ndarray:
    return np.array(data["re"]) + 1j * np.array(data["im"])


def rosenthal_linear_ratio(a: Sequence[complex], p: float, k: int) -> dict:
    """Two-sided scalar model: exact lhs by exhaustive (eps, S) enumeration."""
    coeffs = np.array([complex(x) for x in a])
    n = len(coeffs)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if k > SIGN_ENUMERATION_CAP:
        raise ValueError("exhaustive enumeration is capped at k = 14")
    signs = sign_patterns(k)
    total = 0.0
    count = 0
    for subset in itertools.combinations(range(n), k):
        sums = signs @ coeffs[list(subset)]
        total += float(np.mean(np.abs(sums) ** p))
        count += 1
    lhs = (total / count) ** (1.0 / p)
    kn = k / n
    rhs = (kn * np.sum(np.abs(coeffs) ** p)) ** (1.0 / p) \
        + math.sqrt(kn * float(np.sum(np.abs(coeffs) ** 2)))
    return {"lhs": float(lhs), "rhs": float(rhs),
            "lhs_over_rhs": float(lhs / rhs), "rhs_over_lhs": float(rhs / lhs)}


def moment_checks(n: int, k: int, p: float) -> dict:
    """Exact moments of the sign-subset variables by enumeration."""
    model = SigmaModel(n, k)
    sigma_moments = [model.sigma_moment(j, p) for j in range(1, n + 1)]
    expected_sigma = Fraction(k, n)
    square_moment = model.square_function_moment(p)
    even = float(p).is_integer() and int(p) % 2 == 0
    expected_square = k ** (int(p) // 2) if even else float(k) ** (p / 2)
    passed = all(m == expected_sigma for m in sigma_moments) and square_moment == expected_square
    return {"n": n, "k": k, "p": p,
            "sigma_moment": sigma_moments[0],
            "sigma_expected": expected_sigma,
            "square_moment": square_moment,
            "square_expected": expected_square,
            "passed": passed}


# -- Riesz transform norm equivalence ----------------------------------------


def riesz_equivalence_ratio(f: GroupAlgebraElement, p: float,
                            cocycle: LengthCocycle) -> dict:
    """||f||_p against the Riesz square function, normalized by 2*pi.

    The symbol normalization sum_u |symbol(g)|^2 = 4 pi^2 makes the quotient
    exactly 1 at p = 2.
    """
    _validate_mean_zero(f, cocycle)
    support = list(f.coeffs.keys())
    inverse_support = [element_inverse(f.group, g) for g in support]
    basis = cocycle.basis_for_support(support + inverse_support)
    transforms = []
    transforms_star = []
    f_star = adjoint(f)
    for u in basis:
        rf = operators.riesz_transform(f, u, cocycle)
        if rf.coeffs:
            transforms.append(rf)
        rf_star = operators.riesz_transform(f_star, u, cocycle)
        if rf_star.coeffs:
            transforms_star.append(rf_star)
    column = square_function_norm(transforms, p) if transforms else 0.0
    row = square_function_norm(transforms_star, p) if transforms_star else 0.0
    normalized = max(column, row) / (2 * math.pi)
    lhs = lp_norm(f, p)
    return {"lhs": lhs, "rhs": normalized, "ratio": lhs / normalized,
            "inverse_ratio": normalized / lhs, "num_directions": len(basis)}


# -- random ensembles ---------------------------------------------------------


@dataclass(frozen=True)
class EnsembleSpec:
    """How scan inputs are drawn.

    ``gaussian`` fills the whole (boxed) frequency domain, ``sparse`` picks a
    few sites, ``chaos_degree`` keeps lengths at most ``degree``, and
    ``linear_span`` uses only single-generator frequencies.
    """

    kind: str = "gaussian"
    sparsity: int = 8
    degree: int = 2
    word_length: int = 3

    def to_json(self) -> dict:
        return {"kind": self.kind, "sparsity": self.sparsity,
                "degree": self.degree, "word_length": self.word_length}


def _complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2)


def _abelian_keys(group: GroupDescriptor) -> list[tuple]:
    if group.kind == FINITE_ABELIAN:
        return [key for key in itertools.product(*(range(m) for m in group.moduli))]
    box = range(-group.bound, group.bound + 1)
    return [key for key in itertools.product(box, repeat=group.rank)]


def sample_element(group: GroupDescriptor, cocycle: LengthCocycle,
                   spec: EnsembleSpec, rng: np.random.Generator) -> GroupAlgebraElement:
    """Draw one mean-zero random element according to the ensemble spec."""
    if group.is_abelian:
        keys = [key for key in _abelian_keys(group) if cocycle.psi(key) != 0]
        if spec.kind == "gaussian":
            chosen = keys
        elif spec.kind == "sparse":
            count = min(spec.sparsity, len(keys))
            idx = rng.choice(len(keys), size=count, replace=False)
            chosen = [keys[i] for i in sorted(idx)]
        elif spec.kind == "chaos_degree":
            chosen = [key for key in keys if cocycle.psi(key) <= spec.degree]
        elif spec.kind == "linear_span":
            n = group.n_components
            chosen = []
            for j in range(n):
                if group.kind == FINITE_ABELIAN:
                    m = group.moduli[j]
                    chosen.append(tuple(1 if i == j else 0 for i in range(n)))
                    if m > 2:
                        chosen.append(tuple(m - 1 if i == j else 0 for i in range(n)))
                else:
                    chosen.append(tuple(1 if i == j else 0 for i in range(n)))
                    chosen.append(tuple(-1 if i == j else 0 for i in range(n)))
        else:
            raise ValueError(f"unknown ensemble kind {spec.kind!r}")
        coeffs = dict(zip(chosen, _complex_normal(rng, len(chosen))))
        return GroupAlgebraElement(group, coeffs)
    # free kinds: random reduced walks; the pool may be smaller than the
    # requested sparsity for tiny ranks, so cap the draw attempts
    from .groups import random_group_elements
    sites: dict = {}
    attempts = 0
    while len(sites) < spec.sparsity and attempts < 200 * spec.sparsity:
        (word,) = random_group_elements(group, 1, rng, max_length=spec.word_length)
        attempts += 1
        if not word.is_identity:
            sites[word] = None
    if not sites:
        raise ValueError("could not draw any nonidentity word for the ensemble")
    coeffs = dict(zip(sites.keys(), _complex_normal(rng, len(sites))))
    return GroupAlgebraElement(group, coeffs)


# -- scan driver ---------------------------------------------------------------


def _naor_family(params: dict) -> tuple[GroupDescriptor, LengthCocycle, str]:
    family = params.get("family", "hypercube")
    n = int(params["n"])
    if family == "hypercube":
        group = GroupDescriptor.hypercube(n)
        cocycle = build_cocycle("cyclic_word", group)
    elif family == "cyclic":
        group = GroupDescriptor.finite_abelian([int(params.get("modulus", 4))] * n)
        cocycle = build_cocycle("cyclic_word", group)
    elif family == "torus":
        group = GroupDescriptor.torus(n, int(params.get("bound", 2)))
        cocycle = build_cocycle(params.get("cocycle", "torus_word"), group)
    elif family == "weighted_cube":
        group = GroupDescriptor.hypercube(n)
        cocycle = build_cocycle("weighted_cube", group, params["weights"])
    else:
        raise ValueError(f"unknown truncation family {family!r}")
    derivative = params.get("derivative", "absorbent")
    if derivative not in DERIVATIVE_CHOICES:
        raise ValueError(f"unknown derivative choice {derivative!r}")
    return group, cocycle, derivative


def _run_naor_scan(ensemble: EnsembleSpec, trials: int, seed: int, params: dict) -> dict:
    group, cocycle, derivative = _naor_family(params)
    n = group.n_components
    ps = [float(p) for p in params.get("ps", [params.get("p", 4)])]
    ks = [int(k) for k in params.get("ks", [params.get("k", 1)])]
    rng = np.random.default_rng(seed)
    inputs = [sample_element(group, cocycle, ensemble, rng) for _ in range(trials)]

    def evaluate(f):
        return naor_profile(f, cocycle, ps, ks, derivative)

    profiles = _parallel_map(evaluate, inputs)
    best = None
    max_by_p = {p: 0.0 for p in ps}
    for f, profile in zip(inputs, profiles):
        for p in ps:
            for k in ks:
                lhs, rhs = profile[p][k]
                ratio = lhs / rhs
                max_by_p[p] = max(max_by_p[p], ratio)
                if best is None or ratio > best[0]:
                    best = (ratio, lhs, rhs, f, p, k)
    ratio, lhs, rhs, f, p, k = best
    witness = {"f": f.to_json(), "k": k, "p": p, "derivative": derivative,
               "family": cocycle.family,
               "weights": list(cocycle.weights) if cocycle.weights else None}
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio, "witness": witness,
            "extra": {"max_ratio_by_p": {str(p): v for p, v in max_by_p.items()}}}


def _run_xp_scan(ensemble: EnsembleSpec, trials: int, seed: int, params: dict) -> dict:
    n = int(params["n"])
    d = int(params.get("d", 4))
    p = float(params.get("p", 4))
    ks = [int(k) for k in params.get("ks", [params.get("k", 1)])]
    rng = np.random.default_rng(seed)
    inputs = [[_complex_normal(rng, (d, d)) for _ in range(n)] for _ in range(trials)]
    best = None
    monte_carlo = False
    for mats in inputs:
        for k in ks:
            report = xp_linear_ratio(mats, p, k, seed=seed)
            monte_carlo |= report.monte_carlo
            if best is None or report.ratio > best[0]:
                best = (report.ratio, report.lhs, report.rhs, mats, k)
    ratio, lhs, rhs, mats, k = best
    witness = {"matrices": [_matrix_to_json(x) for x in mats], "k": k, "p": p}
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio, "witness": witness,
            "monte_carlo": monte_carlo}


def _run_rosenthal_scan(ensemble: EnsembleSpec, trials: int, seed: int, params: dict) -> dict:
    n = int(params["n"])
    p = float(params.get("p", 4))
    ks = [int(k) for k in params.get("ks", [params.get("k", 1)])]
    rng = np.random.default_rng(seed)
    inputs = [_complex_normal(rng, n) for _ in range(trials)]
    best = None
    for coeffs in inputs:
        for k in ks:
            result = rosenthal_linear_ratio(coeffs, p, k)
            spread = max(result["lhs_over_rhs"], result["rhs_over_lhs"])
            if best is None or spread > best[0]:
                best = (spread, result, coeffs, k)
    spread, result, coeffs, k = best
    witness = {"coeffs": [{"re": z.real, "im": z.imag} for z in coeffs], "k": k, "p": p}
    return {"lhs": result["lhs"], "rhs": result["rhs"],
            "ratio": result["lhs_over_rhs"], "witness": witness,
            "extra": {"lhs_over_rhs": result["lhs_over_rhs"],
                      "rhs_over_lhs": result["rhs_over_lhs"],
                      "two_sided_spread": spread}}


def _run_riesz_scan(ensemble: EnsembleSpec, trials: int, seed: int, params: dict) -> dict:
    group, cocycle, _ = _naor_family(params)
    p = float(params.get("p", 2))
    rng = np.random.default_rng(seed)
    inputs = [sample_element(group, cocycle, ensemble, rng) for _ in range(trials)]
    best = None
    for f in inputs:
        result = riesz_equivalence_ratio(f, p, cocycle)
        spread = max(result["ratio"], result["inverse_ratio"])
        if best is None or spread > best[0]:
            best = (spread, result, f)
    spread, result, f = best
    witness = {"f": f.to_json(), "p": p, "family": cocycle.family,
               "weights": list(cocycle.weights) if cocycle.weights else None}
    return {"lhs": result["lhs"], "rhs": result["rhs"], "ratio": result["ratio"],
            "witness": witness,
            "extra": {"inverse_ratio": result["inverse_ratio"],
                      "two_sided_spread": spread}}


def free_identity_deviation(f: GroupAlgebraElement) -> float:
    """Max deviation over the free-operator identity battery for one input."""
    group = f.group
    n = group.n_components
    deviation = 0.0
    signs = tuple(1 if i % 2 == 0 else -1 for i in range(n))
    flipped = operators.free_hilbert_transform(f, signs)
    twice = operators.free_hilbert_transform(flipped, signs)
    deviation = max(deviation, _element_distance(twice, f))
    total = None
    for j in range(1, n + 1):
        term = operators.absorbent_derivative(f, j)
        total = term if total is None else total + term
    deviation = max(deviation, _element_distance(total, f))
    for size in range(1, n + 1):
        subset = tuple(range(1, size + 1))
        direct = operators.truncate(f, subset)
        through = operators.truncate(operators.project_AS(f, subset), subset)
        deviation = max(deviation, _element_distance(direct, through))
    return deviation


def _element_distance(a: GroupAlgebraElement, b: GroupAlgebraElement) -> float:
    keys = set(a.coeffs) | set(b.coeffs)
    if not keys:
        return 0.0
    return max(abs(a.coeffs.get(k, 0) - b.coeffs.get(k, 0)) for k in keys)


def _run_free_identities(ensemble: EnsembleSpec, trials: int, seed: int, params: dict) -> dict:
    rank = int(params.get("rank", 2))
    modulus = params.get("modulus")
    if modulus:
        group = GroupDescriptor.free_product(rank, int(modulus))
        cocycle = build_cocycle("free_product_word", group)
    else:
        group = GroupDescriptor.free_group(rank)
        cocycle = build_cocycle("free_word", group)
    rng = np.random.default_rng(seed)
    inputs = [sample_element(group, cocycle, ensemble, rng) for _ in range(trials)]
    tolerance = 1e-12
    best = None
    for f in inputs:
        deviation = free_identity_deviation(f)
        if best is None or deviation > best[0]:
            best = (deviation, f)
    deviation, f = best
    witness = {"f": f.to_json()}
    return {"lhs": deviation, "rhs": tolerance, "ratio": deviation / tolerance,
            "witness": witness}


_EXPERIMENTS: dict[str, Callable] = {
    "naor": _run_naor_scan,
    "xp_linear": _run_xp_scan,
    "rosenthal": _run_rosenthal_scan,
    "riesz_equivalence": _run_riesz_scan,
    "free_identities": _run_free_identities,
}


def scan(experiment: str, ensemble: EnsembleSpec | None = None, trials: int = 100,
         seed: int = 0, **params) -> RatioReport:
    """Run a named experiment over a random ensemble; deterministic per seed."""
    if experiment not in _EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; "
                         f"valid: {sorted(_EXPERIMENTS)}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ensemble = ensemble or EnsembleSpec()
    start = time.perf_counter()
    outcome = _EXPERIMENTS[experiment](ensemble, trials, seed, params)
    runtime_ms = 1e3 * (time.perf_counter() - start)
    report_params = dict(params)
    report_params["ensemble"] = ensemble.to_json()
    return RatioReport(
        experiment=experiment,
        params=report_params,
        lhs=float(outcome["lhs"]),
        rhs=float(outcome["rhs"]),
        ratio=float(outcome["ratio"]),
        max_ratio=float(outcome["ratio"]),
        witness=outcome.get("witness"),
        trials=trials,
        seed=seed,
        runtime_ms=runtime_ms,
        monte_carlo=bool(outcome.get("monte_carlo", False)),
        extra=outcome.get("extra", {}),
    )


def reevaluate_witness(report: RatioReport | dict) -> dict:
    """Recompute (lhs, rhs, ratio) from a report's stored witness."""
    data = report.to_json() if isinstance(report, RatioReport) else report
    experiment = data["experiment"]
    witness = data["witness"]
    if witness is None:
        raise ValueError("report has no witness")
    if experiment in ("naor", "naor_ratio"):
        f = GroupAlgebraElement.from_json(witness["f"])
        cocycle = build_cocycle(witness["family"], f.group, witness.get("weights"))
        rerun = naor_ratio(f, cocycle, witness["p"], witness["k"], witness["derivative"])
        return {"lhs": rerun.lhs, "rhs": rerun.rhs, "ratio": rerun.ratio}
    if experiment in ("xp_linear", "xp_linear_ratio"):
        mats = [_matrix_from_json(x) for x in witness["matrices"]]
        rerun = xp_linear_ratio(mats, witness["p"], witness["k"], seed=data.get("seed"))
        return {"lhs": rerun.lhs, "rhs": rerun.rhs, "ratio": rerun.ratio}
    if experiment == "rosenthal":
        coeffs = [complex(z["re"], z["im"]) for z in witness["coeffs"]]
        result = rosenthal_linear_ratio(coeffs, witness["p"], witness["k"])
        return {"lhs": result["lhs"], "rhs": result["rhs"],
                "ratio": result["lhs_over_rhs"]}
    if experiment == "riesz_equivalence":
        f = GroupAlgebraElement.from_json(witness["f"])
        cocycle = build_cocycle(witness["family"], f.group, witness.get("weights"))
        result = riesz_equivalence_ratio(f, witness["p"], cocycle)
        return {"lhs": result["lhs"], "rhs": result["rhs"],
                "ratio": result["ratio"]}
    if experiment == "free_identities":
        f = GroupAlgebraElement.from_json(witness["f"])
        deviation = free_identity_deviation(f)
        return {"lhs": deviation, "rhs": 1e-12, "ratio": deviation / 1e-12}
    raise ValueError(f"cannot re-evaluate experiment {experiment!r}")
