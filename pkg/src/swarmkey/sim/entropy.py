"""Exact entropy analysis of summed contributor secrets mod q.

The aggregate secret is the sum of the contributors' independently
drawn secrets, so its distribution is the cyclic convolution of theirs.
Convolution is done in exact rational arithmetic: uniformity claims are
then checked with total-variation distance exactly zero, and only the
final entropies pass through floating point.

The headline facts this demonstrates: the entropy of the sum is at
least the largest contributor entropy, and a single uniform contributor
forces the sum to be exactly uniform — one honest party with a good RNG
is enough for an unbiased aggregate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

_NORMALISATION_TOL = Fraction(1, 10**9)


@dataclass(frozen=True)
class EntropyReport:
    q: int
    contributor_entropies: tuple[float, ...]
    sum_entropy: float
    bound_satisfied: bool
    uniform_output: bool
    distribution: tuple[Fraction, ...]


def uniform_distribution(q: int) -> list[Fraction]:
    return [Fraction(1, q)] * q


def point_mass(q: int, at: int) -> list[Fraction]:
    dist = [Fraction(0)] * q
    dist[at % q] = Fraction(1)
    return dist


def shannon_entropy(dist: Sequence[Fraction]) -> float:
    """H(X) in bits; zero-probability outcomes contribute nothing."""
    total = sum(float(p) * math.log2(float(p)) for p in dist if p > 0)
    return -total if total else 0.0


def convolve_mod_q(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    q = len(a)
    out = [Fraction(0)] * q
    for i, pa in enumerate(a):
        if pa == 0:
            continue
        for j, pb in enumerate(b):
            if pb:
                out[(i + j) % q] += pa * pb
    return out


def _as_distribution(dist: Sequence, q: int) -> list[Fraction]:
    if len(dist) != q:
        raise ValueError(f"distribution must have {q} entries, got {len(dist)}")
    exact = [Fraction(p) for p in dist]
    if any(p < 0 for p in exact):
        raise ValueError("distribution has negative probabilities")
    if abs(sum(exact) - 1) > _NORMALISATION_TOL:
        raise ValueError("distribution does not sum to 1")
    return exact


def entropy_demo(q: int, contributor_dists: Sequence[Sequence]) -> EntropyReport:
    """Convolve contributor distributions over Z_q and check the entropy bound.

    Raises ValueError for q out of range or non-normalised inputs.
    """
    if not 2 <= q <= 64:
        raise ValueError("q must be a modulus in 2..64")
    if not contributor_dists:
        raise ValueError("need at least one contributor")
    dists = [_as_distribution(d, q) for d in contributor_dists]

    total = dists[0]
    for dist in dists[1:]:
        total = convolve_mod_q(total, dist)

    entropies = tuple(shannon_entropy(d) for d in dists)
    sum_entropy = shannon_entropy(total)
    bound = sum_entropy >= max(entropies) - 1e-9
    uniform = all(p == Fraction(1, q) for p in total)
    return EntropyReport(q, entropies, sum_entropy, bound, uniform, tuple(total))
