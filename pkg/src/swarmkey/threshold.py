"""Threshold EdDSA signing and threshold Diffie-Hellman over shares.

Signing is the two-round flow: each signer first commits R_i = r_i·G
with a fresh random nonce, then — given the aggregate R, the public key
A and its Lagrange coefficient for the responding cohort — answers with
S_i = r_i + l_i·k·y_i where k = H(R‖A‖M) and y_i is the signer's share
value.  The dealer sums both and verifies the result as an ordinary
EdDSA signature before publishing it.

Nonces are uniform, not hash-derived: a deterministic nonce lets the
dealer recover a signer's share from two responses with different
coefficients (two linear equations in two unknowns).  The handle type
below enforces single use per signing session; deterministic reuse
across sessions is exactly what :mod:`swarmkey.sim.attacks` exploits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .groups import Group
from .shamir import Share, ShareSet, lagrange_coefficient


class NonceReuseError(RuntimeError):
    """A signing nonce handle was consumed twice — catastrophic if real."""


class AggregateInvalidError(Exception):
    """The combined signature failed verification (bad cohort or inputs)."""


@dataclass(frozen=True)
class Signature:
    R: object
    S: int

    def encode(self, group: Group) -> bytes:
        """RFC 8032 layout: point encoding followed by the scalar."""
        return group.encode_point(self.R) + group.encode_scalar(self.S)


class NonceHandle:
    """Pins a secret nonce to one signing session; single use."""

    __slots__ = ("_r",)

    def __init__(self, r: int):
        self._r = r

    def consume(self) -> int:
        if self._r is None:
            raise NonceReuseError("signing nonce already consumed")
        r, self._r = self._r, None
        return r

    def __repr__(self) -> str:
        return "NonceHandle(<secret>)"


def signing_challenge(group: Group, R, A, message: bytes) -> int:
    """k = H(R‖A‖M) reduced mod ell, matching RFC 8032 for ed25519."""
    return group.hash_to_scalar(group.encode_point(R), group.encode_point(A), message)


def sign_round1(group: Group, rng) -> tuple[object, NonceHandle]:
    """Commit a fresh uniform nonce: returns (R_i, handle holding r_i)."""
    r = group.random_scalar(rng)
    return group.point_mul(r, group.generator), NonceHandle(r)


def sign_round2(
    group: Group,
    handle: NonceHandle,
    aggregate_R,
    coeff: int,
    share: Share,
    aggregate_A,
    message: bytes,
) -> int:
    """Produce S_i = r_i + l_i·k·y_i mod ell, consuming the nonce."""
    r = handle.consume()
    k = signing_challenge(group, aggregate_R, aggregate_A, message)
    return (r + coeff * k * share.y) % group.ell


def eddsa_verify(group: Group, A, message: bytes, sig: Signature) -> bool:
    """Standard EdDSA verification.

    The real curve uses the cofactored RFC 8032 equation
    2^c·S·G = 2^c·R + 2^c·k·A; the toy group's generator order is
    exactly ell, so it uses the exact equation.
    """
    if not 0 <= sig.S < group.ell:
        return False
    k = signing_challenge(group, sig.R, A, message)
    scale = (1 << group.cofactor_log2) if group.name == "ed25519" else 1
    lhs = group.point_mul(scale * sig.S, group.generator)
    rhs = group.point_add(
        group.point_mul(scale, sig.R),
        group.point_mul(scale * k, A),
    )
    return group.point_eq(lhs, rhs)


def aggregate_and_verify(
    group: Group,
    R_list: Sequence,
    S_list: Sequence[int],
    A,
    message: bytes,
) -> Signature:
    """Combine cohort contributions and verify before release.

    Raises :class:`AggregateInvalidError` when the combined signature
    does not verify — the symptom of an undersized cohort, wrong
    coefficients, or a malicious contribution.
    """
    R = group.point_sum(R_list)
    S = sum(S_list) % group.ell
    sig = Signature(R, S)
    if not eddsa_verify(group, A, message, sig):
        raise AggregateInvalidError("aggregate signature failed verification")
    return sig


def dh_contribution(group: Group, share: Share, peer_point) -> object:
    """K_c = y_c·P.  Low-order peer points are refused outright."""
    if group.is_low_order(peer_point):
        raise ValueError("refusing Diffie-Hellman with a low-order point")
    return group.point_mul(share.y, peer_point)


def dh_aggregate(
    group: Group,
    contribs: Sequence[tuple[int, object]],
    cohort: ShareSet,
) -> object:
    """K = sum_c l_c(C)·K_c over (x-coordinate, contribution) pairs.

    The cohort must match the contribution indices; undersized cohorts
    are not rejected here — they simply produce a point unrelated to the
    shared secret.
    """
    xs = [x for x, _ in contribs]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate contribution indices")
    if set(xs) != set(cohort.x_coords()):
        raise ValueError("contributions do not match the cohort")
    acc = group.identity
    for x, K in contribs:
        acc = group.point_add(acc, group.point_mul(lagrange_coefficient(x, cohort), K))
    return acc
