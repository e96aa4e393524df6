"""Polynomial secret sharing over Z_ell.

Implements the classic t-in-n scheme — sample a degree-(t-1) polynomial
whose constant term is the secret, hand out evaluations at nonzero
points, reconstruct by Lagrange interpolation at zero — plus the nested
aggregation used by the swarm: when every party shares its own secret
and each participant sums the share values it received at its own x,
the sums are shares of the never-materialised sum of all secrets.

All functions are pure; values are plain ints mod a prime modulus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class Share:
    """One point (x, y) on a sharing polynomial.  x is never 0."""

    x: int
    y: int


@dataclass(frozen=True)
class SharingPolynomial:
    """Coefficients [a_0=secret, lam_1, ..., lam_{t-1}] over Z_modulus.

    The list always has length t; a zero leading coefficient is allowed
    (lower effective degree does not weaken the threshold).
    """

    coefficients: tuple[int, ...]
    modulus: int

    @property
    def threshold(self) -> int:
        return len(self.coefficients)

    def eval_at(self, x: int) -> int:
        """Horner evaluation of the polynomial at x, mod modulus."""
        acc = 0
        for coeff in reversed(self.coefficients):
            acc = (acc * x + coeff) % self.modulus
        return acc


@dataclass(frozen=True)
class ShareSet:
    """A cohort of shares with the scheme parameters they belong to."""

    shares: tuple[Share, ...]
    threshold: int
    modulus: int

    def __post_init__(self):
        xs = [s.x for s in self.shares]
        if len(set(xs)) != len(xs):
            raise ValueError("duplicate x-coordinates in share set")
        if not self.shares:
            raise ValueError("share set must not be empty")
        if self.threshold < 1:
            raise ValueError("threshold must be at least 1")

    def x_coords(self) -> tuple[int, ...]:
        return tuple(s.x for s in self.shares)

    def subset(self, xs: Sequence[int]) -> "ShareSet":
        by_x = {s.x: s for s in self.shares}
        return ShareSet(tuple(by_x[x] for x in xs), self.threshold, self.modulus)


def sample_polynomial(secret: int, threshold: int, modulus: int, rng) -> SharingPolynomial:
    """Random sharing polynomial with P(0) = secret.

    The t-1 non-constant coefficients are uniform in [0, modulus),
    zero included.
    """
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    if not 0 <= secret < modulus:
        raise ValueError("secret must already be reduced mod the modulus")
    coeffs = (secret,) + tuple(rng.randrange(modulus) for _ in range(threshold - 1))
    return SharingPolynomial(coeffs, modulus)


def eval_share(poly: SharingPolynomial, x: int) -> Share:
    """Evaluate the polynomial at a nonzero coordinate, producing a share."""
    if x % poly.modulus == 0:
        raise ValueError("share coordinate 0 would disclose the secret")
    return Share(x, poly.eval_at(x))


def lagrange_coefficient(x_i: int, cohort: ShareSet) -> int:
    """The weight l_i(C) = prod_{c != i} x_c / (x_c - x_i) mod modulus."""
    xs = cohort.x_coords()
    if x_i not in xs:
        raise ValueError(f"x-coordinate {x_i} is not a member of the cohort")
    m = cohort.modulus
    num, den = 1, 1
    for x_c in xs:
        if x_c == x_i:
            continue
        num = num * x_c % m
        den = den * (x_c - x_i) % m
    return num * pow(den, -1, m) % m


def interpolate_at_zero(cohort: ShareSet) -> int:
    """sum_c y_c * l_c(C) mod modulus — P(0) when the shares share a polynomial."""
    acc = 0
    for share in cohort.shares:
        acc = (acc + share.y * lagrange_coefficient(share.x, cohort)) % cohort.modulus
    return acc


def aggregate_share(incoming: Sequence[Share], modulus: int) -> Share:
    """Sum shares at a common x into one share of the summed polynomial."""
    if not incoming:
        raise ValueError("nothing to aggregate")
    x = incoming[0].x
    if any(s.x != x for s in incoming):
        raise ValueError("aggregation requires a common x-coordinate")
    return Share(x, sum(s.y for s in incoming) % modulus)
