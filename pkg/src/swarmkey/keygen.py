"""Actor-side distributed key generation.

Each actor derives a clamped secret scalar from a hashed seed, proves
knowledge of it with a signature of the empty message, shares it among
the swarm with a fresh polynomial, and — once the dealer has fanned out
everyone's encrypted bundles — verifies every peer contribution before
aggregating its own share of the collective key.

The three bundle checks are the rogue-key defence: a contribution is
accepted only if its public point is not low-order, its proof scalar is
canonical, and the proof equation holds.  An attacker who chose its
point to steer the aggregate key cannot know the matching secret, so it
cannot produce a passing proof.

Secret state never crosses actor boundaries; the swarm simulator moves
only :class:`ShareBundle` values (encrypted in transit).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .groups import Group
from .shamir import Share, SharingPolynomial, aggregate_share, eval_share, sample_polynomial

CHECK_LOW_ORDER = 1
CHECK_SCALAR_RANGE = 2
CHECK_PROOF_EQUATION = 3


class PrefixReuseError(RuntimeError):
    """The single-use proof nonce source was consumed twice."""


class KeygenAbort(Exception):
    """A peer bundle failed verification; the ceremony must abort.

    ``sender`` is the 1-based index of the offending actor and
    ``failed_check`` one of the CHECK_* constants.
    """

    def __init__(self, sender: int, failed_check: int, detail: str):
        super().__init__(f"bundle from actor {sender} rejected: {detail}")
        self.sender = sender
        self.failed_check = failed_check


class SecretScalarPair:
    """A clamped secret scalar and its one-shot proof-nonce prefix.

    The scalar is stored unreduced — reducing it mod ell first would
    discard the clamping structure that makes every generated key one
    that standard EdDSA key generation could also produce.  The prefix
    may be taken exactly once (it seeds the knowledge-proof nonce) and
    is destroyed on use.
    """

    __slots__ = ("a", "_prefix")

    def __init__(self, a: int, prefix: int):
        self.a = a
        self._prefix = prefix

    def consume_prefix(self) -> int:
        if self._prefix is None:
            raise PrefixReuseError("secret prefix already consumed")
        prefix, self._prefix = self._prefix, None
        return prefix

    def __repr__(self) -> str:
        return "SecretScalarPair(<secret>)"


class Proof(NamedTuple):
    """Public knowledge proof (A, R, S): S·G = H(A‖R)·A + R."""

    A: object
    R: object
    S: int


@dataclass(frozen=True)
class ShareBundle:
    """What one actor sends another: a share plus the sender's proof."""

    sigma: Share
    R: object
    A: object
    S: int


@dataclass(frozen=True)
class BundleVerdict:
    ok: bool
    failed_check: int | None = None
    detail: str = "accepted"


@dataclass(frozen=True)
class KeygenResult:
    """Per-actor outcome: the aggregate public key and this actor's share."""

    aggregate_public: object
    my_share: Share
    peer_publics: tuple


@dataclass
class ActorKeygenState:
    """Private state retained between Begin and Complete."""

    group: Group
    x_coords: tuple[int, ...]
    threshold: int
    my_index: int  # 1-based position in x_coords
    secret: SecretScalarPair
    polynomial: SharingPolynomial
    proof: Proof

    @property
    def my_x(self) -> int:
        return self.x_coords[self.my_index - 1]


def new_secret_scalar(group: Group, rng) -> SecretScalarPair:
    """Derive (a, prefix) from a fresh b-bit seed, as EdDSA key generation does.

    The seed is hashed to 2b bits; the low half is clamped into the
    secret scalar, the high half becomes the prefix.  The seed itself is
    discarded.
    """
    seed = rng.randbytes(group.b // 8)
    digest = group.wide_hash(seed)
    a = group.clamp_scalar(int.from_bytes(digest[: group.b // 8], "little"))
    prefix = int.from_bytes(digest[group.b // 8 :], "little")
    return SecretScalarPair(a, prefix)


def proof_challenge(group: Group, A, R) -> int:
    """Challenge scalar H(A‖R) binding a proof to its public point."""
    return group.hash_to_scalar(group.encode_point(A), group.encode_point(R))


def proof_from_nonce(group: Group, a: int, r: int) -> Proof:
    """Build the knowledge proof for secret a with an explicit nonce r."""
    A = group.point_mul(a, group.generator)
    R = group.point_mul(r, group.generator)
    S = (proof_challenge(group, A, R) * a + r) % group.ell
    return Proof(A, R, S)


def make_proof(group: Group, secret: SecretScalarPair) -> Proof:
    """Prove knowledge of the secret scalar, spending its prefix on the nonce."""
    prefix = secret.consume_prefix()
    r = group.hash_to_scalar(prefix.to_bytes(group.b // 8, "little"))
    return proof_from_nonce(group, secret.a, r)


def verify_bundle(group: Group, bundle: ShareBundle) -> BundleVerdict:
    """Run the three acceptance checks on a peer's contribution.

    Check 1 rejects low-order (rogue) public points, check 2 rejects
    non-canonical proof scalars, check 3 rejects proofs that do not
    demonstrate knowledge of the contributed secret.
    """
    if group.is_low_order(bundle.A):
        return BundleVerdict(False, CHECK_LOW_ORDER, "public point is low-order")
    if not 0 <= bundle.S < group.ell:
        return BundleVerdict(False, CHECK_SCALAR_RANGE, "proof scalar out of range")
    lhs = group.point_mul(bundle.S, group.generator)
    rhs = group.point_add(
        group.point_mul(proof_challenge(group, bundle.A, bundle.R), bundle.A),
        bundle.R,
    )
    if not group.point_eq(lhs, rhs):
        return BundleVerdict(False, CHECK_PROOF_EQUATION, "proof equation does not hold")
    return BundleVerdict(True)


def begin(
    group: Group,
    my_index: int,
    x_coords: Sequence[int],
    threshold: int,
    rng,
) -> tuple[list[ShareBundle], ActorKeygenState]:
    """Begin: generate the secret, the proof, and one bundle per recipient.

    Returns the n bundles in recipient order (the actor's own included —
    it round-trips through the dealer like any other) and the private
    state needed by :func:`complete`.  The proof is computed once and
    copied into every bundle; it does not depend on the recipient.
    """
    x_coords = tuple(x_coords)
    n = len(x_coords)
    if len(set(x_coords)) != n:
        raise ValueError("duplicate x-coordinates; refusing to share")
    if not 1 <= threshold <= n:
        raise ValueError(f"threshold {threshold} not in 1..{n}")
    if not 1 <= my_index <= n:
        raise ValueError(f"actor index {my_index} not in 1..{n}")

    secret = new_secret_scalar(group, rng)
    proof = make_proof(group, secret)
    poly = sample_polynomial(secret.a % group.ell, threshold, group.ell, rng)
    bundles = [
        ShareBundle(eval_share(poly, x), proof.R, proof.A, proof.S) for x in x_coords
    ]
    state = ActorKeygenState(group, x_coords, threshold, my_index, secret, poly, proof)
    return bundles, state


def complete(state: ActorKeygenState, bundles_in: Sequence[ShareBundle]) -> KeygenResult:
    """Complete: verify all n contributions and aggregate.

    ``bundles_in`` must be in sender order (position j-1 holds actor j's
    bundle).  Any failed check aborts with the offending sender; the
    actor's own slot must round-trip unmodified.
    """
    group = state.group
    n = len(state.x_coords)
    if len(bundles_in) != n:
        raise ValueError(f"expected {n} bundles, got {len(bundles_in)}")
    for sender_pos, bundle in enumerate(bundles_in, start=1):
        if bundle.sigma.x != state.my_x:
            raise ValueError(
                f"bundle from actor {sender_pos} addressed to x={bundle.sigma.x}, "
                f"not mine ({state.my_x})"
            )
        verdict = verify_bundle(group, bundle)
        if not verdict.ok:
            raise KeygenAbort(sender_pos, verdict.failed_check, verdict.detail)

    own = bundles_in[state.my_index - 1]
    if not (
        group.point_eq(own.A, state.proof.A)
        and group.point_eq(own.R, state.proof.R)
        and own.S == state.proof.S
        and own.sigma.y == state.polynomial.eval_at(state.my_x)
    ):
        raise ValueError("own bundle did not round-trip intact")

    my_share = aggregate_share([b.sigma for b in bundles_in], group.ell)
    aggregate_public = group.point_sum(b.A for b in bundles_in)
    return KeygenResult(aggregate_public, my_share, tuple(b.A for b in bundles_in))
