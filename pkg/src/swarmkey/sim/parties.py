"""Simulated parties: actors with pluggable misbehaviour, and the dealer.

Each actor is an isolated state machine.  It touches the outside world
only through envelopes the ceremony engine routes; its secrets stay in
instance attributes that tests may inspect through ``audit_scalars``
(the whole point of the toy backend is that audits can see what the
protocol hides).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .. import keygen, threshold
from ..groups import Group
from ..sealing import SealError, generate_keypair, open_sealed, seal
from ..shamir import Share, aggregate_share, eval_share, sample_polynomial
from . import config as cfg
from .wire import bundle_from_bytes, bundle_to_bytes


@dataclass
class RoundContext:
    """What an actor learns from the dealer's round announcement."""

    round_no: int
    x_coords: tuple[int, ...]
    my_index: int
    roster: tuple[str, ...]
    recipient_keys: dict[str, bytes]


class Actor:
    """One swarm member, with an optional adversarial mode."""

    def __init__(self, actor_id: str, group: Group, threshold: int, rng: random.Random,
                 behavior: str = cfg.HONEST):
        self.id = actor_id
        self.group = group
        self.threshold = threshold
        self.rng = rng
        self.behavior = behavior
        self.enc_private, self.enc_public = generate_keypair(rng)
        # fixed across sessions: this is exactly the mistake the
        # deterministic-nonce attack exploits
        self.fixed_nonce = group.random_scalar(rng) if behavior == cfg.DETERMINISTIC_NONCE else None

        self.round: RoundContext | None = None
        self.keygen_state: keygen.ActorKeygenState | None = None
        self.extra_states: list[keygen.ActorKeygenState] = []  # equivocation variants
        self.result: keygen.KeygenResult | None = None
        self.sent_garbage: dict[int, int] = {}

    # -- keygen ---------------------------------------------------------------

    def start_round(self, ctx: RoundContext) -> None:
        """New round announcement: all per-round state is rebuilt."""
        self.round = ctx
        self.keygen_state = None
        self.extra_states = []
        self.result = None
        self.sent_garbage = {}

    def begin(self) -> dict[str, bytes] | None:
        """Run Begin and seal one bundle per recipient; None = no response."""
        if self.behavior == cfg.WITHHOLD:
            return None
        ctx = self.round
        bundles, state = keygen.begin(
            self.group, ctx.my_index, ctx.x_coords, self.threshold, self.rng
        )
        self.keygen_state = state

        if self.behavior == cfg.EQUIVOCATE_A:
            alt_bundles, alt_state = keygen.begin(
                self.group, ctx.my_index, ctx.x_coords, self.threshold, self.rng
            )
            self.extra_states.append(alt_state)
            # second identity for the back half of the swarm; every proof
            # is individually valid, but recipients aggregate different keys
            half = len(bundles) // 2
            bundles = [
                alt_bundles[j] if j >= half and j != ctx.my_index - 1 else bundles[j]
                for j in range(len(bundles))
            ]
        elif self.behavior == cfg.GARBAGE_SHARE:
            replaced = []
            for j, bundle in enumerate(bundles):
                if j == ctx.my_index - 1:
                    replaced.append(bundle)
                    continue
                noise = self.group.random_scalar(self.rng)
                self.sent_garbage[j + 1] = noise
                replaced.append(
                    keygen.ShareBundle(
                        Share(bundle.sigma.x, noise), bundle.R, bundle.A, bundle.S
                    )
                )
            bundles = replaced

        return self._seal_bundles(bundles)

    def begin_rogue(self, peer_publics: list, target_secret: int, low_order: bool) -> dict[str, bytes]:
        """Rogue-key move: pick A so the aggregate lands on a chosen point.

        The attacker knows the discrete log of its *target*, not of the
        contribution it must publish, so its proof is a forgery attempt:
        random-nonce (R, S=r) in the generic case, or trial-and-error on
        r when hiding behind a low-order point.
        """
        group, ctx = self.group, self.round
        if low_order:
            A_rogue = group.small_order_element()
            # with h·A = O the equation collapses to S·G = R, so S = r
            # passes the proof check; only the low-order check stops it
            while True:
                r = group.random_scalar(self.rng)
                R = group.point_mul(r, group.generator)
                h = keygen.proof_challenge(group, A_rogue, R)
                if group.point_eq(group.point_mul(h, A_rogue), group.identity):
                    S = r
                    break
        else:
            target = group.point_mul(target_secret, group.generator)
            A_rogue = group.point_sub(target, group.point_sum(peer_publics))
            r = group.random_scalar(self.rng)
            R = group.point_mul(r, group.generator)
            S = r

        # shares of an unrelated polynomial: the rogue has no secret
        # consistent with A_rogue to share
        poly = sample_polynomial(0, self.threshold, group.ell, self.rng)
        bundles = [
            keygen.ShareBundle(eval_share(poly, x), R, A_rogue, S) for x in ctx.x_coords
        ]
        # minimal state so the engine can fan a bundle back to the rogue
        self.keygen_state = keygen.ActorKeygenState(
            group, ctx.x_coords, self.threshold, ctx.my_index,
            keygen.SecretScalarPair(0, 0), poly, keygen.Proof(A_rogue, R, S),
        )
        return self._seal_bundles(bundles)

    def _seal_bundles(self, bundles) -> dict[str, bytes]:
        ctx = self.round
        sealed = {}
        for recipient_id, bundle in zip(ctx.roster, bundles):
            plaintext = bundle_to_bytes(self.group, bundle)
            sealed[recipient_id] = seal(ctx.recipient_keys[recipient_id], plaintext, self.rng)
        return sealed

    def peek_public(self, sealed_blob: bytes):
        """Open a blob addressed to this actor and return the sender's public point."""
        return bundle_from_bytes(self.group, open_sealed(self.enc_private, sealed_blob)).A

    def complete(self, sealed_bundles: list[bytes], skip_checks: bool = False):
        """Decrypt, verify, and aggregate the fan-out.

        Returns (result, checks, failure): ``checks`` is a list of
        (sender_pos, bundle, verdict); ``failure`` is None on success,
        ("auth", pos) when a blob fails authenticated decryption, or
        ("check", pos, failed_check) when a bundle check rejects.
        """
        group = self.group
        bundles = []
        for pos, blob in enumerate(sealed_bundles, start=1):
            try:
                plaintext = open_sealed(self.enc_private, blob)
            except SealError:
                return None, [], ("auth", pos)
            bundles.append(bundle_from_bytes(group, plaintext))

        checks = []
        failure = None
        for pos, bundle in enumerate(bundles, start=1):
            if skip_checks:
                verdict = keygen.BundleVerdict(True, None, "checks disabled")
            else:
                verdict = keygen.verify_bundle(group, bundle)
            checks.append((pos, bundle, verdict))
            if not verdict.ok and failure is None:
                failure = ("check", pos, verdict.failed_check)
        if failure is not None:
            return None, checks, failure

        if skip_checks:
            # control-run aggregation without the protocol's defences
            my_share = aggregate_share([b.sigma for b in bundles], group.ell)
            result = keygen.KeygenResult(
                group.point_sum(b.A for b in bundles), my_share, tuple(b.A for b in bundles)
            )
        else:
            result = keygen.complete(self.keygen_state, bundles)
        self.result = result
        return result, checks, None

    # -- threshold operations ---------------------------------------------------

    def sign_round1(self):
        if self.behavior == cfg.DETERMINISTIC_NONCE:
            R = self.group.point_mul(self.fixed_nonce, self.group.generator)
            return R, threshold.NonceHandle(self.fixed_nonce)
        return threshold.sign_round1(self.group, self.rng)

    def sign_round2(self, handle, aggregate_R, coeff, aggregate_A, message):
        return threshold.sign_round2(
            self.group, handle, aggregate_R, coeff, self.result.my_share, aggregate_A, message
        )

    def dh_contribution(self, peer_point, coeff=None):
        K = threshold.dh_contribution(self.group, self.result.my_share, peer_point)
        if coeff is not None:
            K = self.group.point_mul(coeff, K)
        return K

    # -- audit ----------------------------------------------------------------

    def audit_scalars(self) -> set[int]:
        """Every scalar-valued secret this party currently holds."""
        values: set[int] = set()
        for state in [self.keygen_state, *self.extra_states]:
            if state is None:
                continue
            values.add(state.secret.a)
            values.add(state.secret.a % self.group.ell)
            values.update(state.polynomial.coefficients)
        if self.result is not None:
            values.add(self.result.my_share.y)
        if self.fixed_nonce is not None:
            values.add(self.fixed_nonce)
        return values


class LoadedSigner:
    """A signer rebuilt from stored share material (no live ceremony)."""

    def __init__(self, signer_id: str, group: Group, share: Share, rng: random.Random):
        self.id = signer_id
        self.group = group
        self.rng = rng
        self.behavior = cfg.HONEST
        self.result = keygen.KeygenResult(None, share, ())

    sign_round1 = Actor.sign_round1
    sign_round2 = Actor.sign_round2
    dh_contribution = Actor.dh_contribution


class Dealer:
    """Orchestrates rounds; sees only ciphertext and public values."""

    def __init__(self, group: Group, rng: random.Random):
        self.group = group
        self.rng = rng
        self.known_x_coords: list[int] = []
        self.reports: dict[str, bytes] = {}

    def audit_scalars(self) -> set[int]:
        return set(self.known_x_coords)
