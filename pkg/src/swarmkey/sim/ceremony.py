"""The simulated ceremony engine: dealer, transport, rounds, sessions.

Time is a tick counter and every byte of traffic flows through
:meth:`SwarmSimulation._send`, which applies the configured message-loss
probability and records the envelope.  The engine enforces the dealer's
gating rule — encrypted bundles fan out only once all n actors have
responded — except in the explicit rogue-collusion scenario where the
dealer leaks the rogue's inbox early, recorded as a distinct ``leak``
envelope so transcripts show the betrayal.

Everything is single-threaded and reproducible: one seed fixes actor
keys, secrets, transport drops, and therefore the whole transcript.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..groups import Group
from ..sealing import generate_keypair
from ..shamir import Share, ShareSet, lagrange_coefficient
from ..threshold import AggregateInvalidError, Signature, aggregate_and_verify, dh_aggregate
from . import config as cfg
from .config import SwarmConfig
from .parties import Actor, Dealer, RoundContext
from .transcript import CeremonyTranscript, Ledger, LedgerPost
from .wire import json_payload


def run_ceremony(config: SwarmConfig, embed_shares: bool = False) -> CeremonyTranscript:
    """One-shot ceremony: build a swarm from the config and run it."""
    return SwarmSimulation(config).run_ceremony(embed_shares)


@dataclass
class CeremonyOutcome:
    status: str  # success | aborted | failed | key-disagreement
    aggregate_public: object | None
    cause: str | None
    rounds: int
    swarm: tuple[str, ...]
    xs: tuple[int, ...]


class SwarmSimulation:
    """Owns the parties of one swarm and runs ceremonies and sessions."""

    def __init__(self, config: SwarmConfig, *, rogue_target_secret: int | None = None,
                 rogue_low_order: bool = False):
        self.config = config
        self.group: Group = config.make_group()
        self.transcript = CeremonyTranscript()
        self.transport_rng = config.rng_for("transport")
        self.dealer = Dealer(self.group, config.rng_for("dealer"))
        self.actors: dict[str, Actor] = {}
        for idx in range(1, config.population + 1):
            actor_id = f"actor-{idx}"
            self.actors[actor_id] = Actor(
                actor_id,
                self.group,
                config.t,
                config.rng_for(actor_id),
                config.behaviors.get(idx, cfg.HONEST),
            )
        self.ledger = Ledger(self.group, config.n, config.t)
        self.tick = 0
        self.outcome: CeremonyOutcome | None = None
        self.rogue_target_secret = rogue_target_secret
        self.rogue_low_order = rogue_low_order

    # -- transport -------------------------------------------------------------

    def _send(self, sender: str, to: str, kind: str, payload: bytes, round_no: int | None = None) -> bool:
        dropped = self.transport_rng.random() < self.config.drop_prob
        self.transcript.envelope(
            self.tick, sender, to, kind, payload,
            verdict="dropped" if dropped else "delivered", round_no=round_no,
        )
        return not dropped

    # -- key generation ---------------------------------------------------------

    def run_ceremony(self, embed_shares: bool = False) -> CeremonyTranscript:
        config = self.config
        self.transcript.event(self.tick, "config", **config.header())
        excluded: set[str] = set()
        rounds = 0

        while rounds <= config.max_retries:
            rounds += 1
            candidates = [a for a in self.actors if a not in excluded]
            if len(candidates) < config.n:
                self._finish("failed", None, "responsive population exhausted", rounds, (), ())
                return self.transcript
            swarm = tuple(candidates[: config.n])
            xs = self._assign_x(swarm)
            self.dealer.known_x_coords = list(xs)

            verdict, unresponsive = self._attempt_round(rounds, swarm, xs, embed_shares)
            if verdict == "retry":
                excluded |= unresponsive
                continue
            return self.transcript

        self._finish("failed", None, "retry budget exhausted", rounds, (), ())
        return self.transcript

    def _assign_x(self, swarm: tuple[str, ...]) -> tuple[int, ...]:
        mode, group = self.config.x_mode, self.group
        if mode == "sequential":
            return tuple(range(1, len(swarm) + 1))
        if mode == "dealer-random":
            xs: list[int] = []
            while len(xs) < len(swarm):
                x = self.dealer.rng.randrange(1, group.ell)
                if x not in xs:
                    xs.append(x)
            return tuple(xs)
        # identity-derived: hash the actor id into Z_ell, probing past
        # collisions so the map stays injective at toy scale
        xs = []
        for actor_id in swarm:
            x = group.hash_to_scalar(actor_id.encode())
            while x == 0 or x in xs:
                x = (x + 1) % group.ell or 1
            xs.append(x)
        return tuple(xs)

    def _attempt_round(self, round_no: int, swarm: tuple[str, ...], xs: tuple[int, ...],
                       embed_shares: bool) -> tuple[str, set[str]]:
        config, group = self.config, self.group
        self.transcript.event(self.tick, "round-start", round=round_no, swarm=list(swarm),
                              xs=list(xs))

        recipient_keys = self._establish_keys(round_no, swarm)

        # x distribution
        self.tick += 1
        broadcast_ok: dict[str, bool] = {}
        for pos, actor_id in enumerate(swarm, start=1):
            payload = {"xs": list(xs), "index": pos, "roster": list(swarm), "round": round_no}
            if config.enc_policy != "preprovisioned":
                payload["keys"] = {aid: recipient_keys[aid].hex() for aid in swarm}
            delivered = self._send("dealer", actor_id, "x-broadcast", json_payload(payload),
                                   round_no)
            broadcast_ok[actor_id] = delivered
            if delivered:
                self.actors[actor_id].start_round(
                    RoundContext(round_no, xs, pos, swarm, recipient_keys)
                )

        # Begin, in parallel across actors; rogues hold back
        self.tick += 1
        responses: dict[str, dict[str, bytes]] = {}
        rogues = [a for a in swarm if self.actors[a].behavior == cfg.ROGUE_KEY and broadcast_ok[a]]
        for actor_id in swarm:
            actor = self.actors[actor_id]
            if not broadcast_ok[actor_id] or actor.behavior == cfg.ROGUE_KEY:
                continue
            sealed = actor.begin()
            if sealed is None:
                continue  # withholding
            payload = json_payload({aid: blob.hex() for aid, blob in sealed.items()})
            if self._send(actor_id, "dealer", "encrypted-bundle", payload, round_no):
                responses[actor_id] = sealed

        # dealer collusion: leak the rogue's inbox before the gate so the
        # rogue can aim the aggregate, then let it respond
        for rogue_id in rogues:
            if len(responses) != len(swarm) - len(rogues):
                break
            inbox = {sender: sealed[rogue_id] for sender, sealed in responses.items()}
            self.tick += 1
            if not self._send("dealer", rogue_id, "leak", json_payload(
                    {s: b.hex() for s, b in inbox.items()}), round_no):
                continue
            rogue = self.actors[rogue_id]
            peer_publics = [
                rogue.peek_public(blob) for blob in inbox.values()
            ]
            target_secret = (
                self.rogue_target_secret
                if self.rogue_target_secret is not None
                else group.random_scalar(rogue.rng)
            )
            self.rogue_target_secret = target_secret
            sealed = rogue.begin_rogue(peer_publics, target_secret, self.rogue_low_order)
            self.tick += 1
            payload = json_payload({aid: blob.hex() for aid, blob in sealed.items()})
            if self._send(rogue_id, "dealer", "encrypted-bundle", payload, round_no):
                responses[rogue_id] = sealed

        # the gate: dealer waits up to tau ticks for all n responses
        complete = len(responses) == len(swarm)
        waited = 1 if complete else config.tau
        self.tick += waited - 1
        self.transcript.event(self.tick, "gate", round=round_no,
                              responses=len(responses), waited_ticks=waited)
        if not complete:
            unresponsive = {a for a in swarm if a not in responses}
            self.transcript.event(self.tick, "retry", round=round_no,
                                  unresponsive=sorted(unresponsive))
            return "retry", unresponsive

        # fan-out: to each actor, the n blobs addressed to it, sender order
        self.tick += 1
        fanout: dict[str, list[bytes]] = {}
        for actor_id in swarm:
            blobs = [responses[sender][actor_id] for sender in swarm]
            delivered = self._send(
                "dealer", actor_id, "encrypted-bundle",
                json_payload({"blobs": [b.hex() for b in blobs]}), round_no,
            )
            if delivered:
                fanout[actor_id] = blobs

        # Complete, in parallel; collect reports and ledger posts
        self.tick += 1
        reports: dict[str, bytes] = {}
        abort_cause: str | None = None
        for actor_id in swarm:
            if actor_id not in fanout:
                continue
            actor = self.actors[actor_id]
            result, checks, failure = actor.complete(fanout[actor_id],
                                                     config.disable_bundle_checks)
            for sender_pos, bundle, verdict in checks:
                if config.disable_bundle_checks:
                    recorded = "skipped"
                else:
                    recorded = "accept" if verdict.ok else "reject"
                self.transcript.event(
                    self.tick, "check", **{"from": actor_id},
                    sender=swarm[sender_pos - 1], round=round_no,
                    verdict=recorded,
                    failed_check=verdict.failed_check,
                    A=group.encode_point(bundle.A).hex(),
                    R=group.encode_point(bundle.R).hex(),
                    S=format(bundle.S, "x"),
                )
            if failure is not None:
                if failure[0] == "auth":
                    sender = swarm[failure[1] - 1]
                    self.transcript.event(self.tick, "check", **{"from": actor_id},
                                          sender=sender, round=round_no, check="auth",
                                          verdict="reject")
                    abort_cause = abort_cause or (
                        f"{actor_id}: bundle from {sender} failed authenticated decryption"
                    )
                else:
                    sender = swarm[failure[1] - 1]
                    abort_cause = abort_cause or (
                        f"{actor_id}: bundle from {sender} rejected at check {failure[2]}"
                    )
                continue
            report = group.encode_point(result.aggregate_public)
            if self._send(actor_id, "dealer", "aggregate-report",
                          json_payload({"A": report.hex()}), round_no):
                reports[actor_id] = report
            share_public = group.point_mul(result.my_share.y, group.generator)
            self.ledger.append(LedgerPost(actor_id, result.my_share.x, report,
                                          group.encode_point(share_public)))
            self.transcript.event(self.tick, "ledger-post", **{"from": actor_id},
                                  to="ledger", x=result.my_share.x, A=report.hex(),
                                  share_public=group.encode_point(share_public).hex())

        if abort_cause is not None:
            self._finish("aborted", None, abort_cause, round_no, swarm, xs)
            return "done", set()
        if len(reports) < len(swarm):
            unresponsive = {a for a in swarm if a not in reports}
            self.transcript.event(self.tick, "retry", round=round_no,
                                  unresponsive=sorted(unresponsive),
                                  cause="incomplete completion")
            return "retry", unresponsive
        if len(set(reports.values())) != 1:
            self._finish("key-disagreement", None,
                         "actors reported different aggregate keys", round_no, swarm, xs)
            return "done", set()

        aggregate = group.decode_point(next(iter(reports.values())))
        self._finish("success", aggregate, None, round_no, swarm, xs)
        if embed_shares:
            for actor_id in swarm:
                share = self.actors[actor_id].result.my_share
                self.transcript.event(self.tick, "share-material", party=actor_id,
                                      x=share.x, y=format(share.y, "x"))
        return "done", set()

    def _establish_keys(self, round_no: int, swarm: tuple[str, ...]) -> dict[str, bytes]:
        """Recipient public keys per the configured policy."""
        config = self.config
        directory = {aid: self.actors[aid].enc_public for aid in swarm}
        if config.enc_policy == "preprovisioned":
            return directory
        if config.enc_policy == "dealer-distributed":
            self.transcript.event(
                self.tick, "warning", round=round_no,
                note="dealer-distributed encryption keys: a malicious dealer "
                     "could substitute its own (man-in-the-middle)",
            )
            return directory
        # ephemeral: one extra round trip before the x-broadcast
        keys: dict[str, bytes] = {}
        self.tick += 1
        asked = {aid: self._send("dealer", aid, "key-request", json_payload({"round": round_no}),
                                 round_no) for aid in swarm}
        self.tick += 1
        for aid in swarm:
            if not asked[aid]:
                continue
            actor = self.actors[aid]
            actor.enc_private, actor.enc_public = generate_keypair(actor.rng)
            if self._send(aid, "dealer", "key-distribution",
                          json_payload({"public": actor.enc_public.hex()}), round_no):
                keys[aid] = actor.enc_public
        return keys

    def _finish(self, status: str, aggregate, cause: str | None, rounds: int,
                swarm: tuple[str, ...], xs: tuple[int, ...]) -> None:
        group = self.group
        self.outcome = CeremonyOutcome(status, aggregate, cause, rounds, swarm, xs)
        self.transcript.event(
            self.tick, "outcome", status=status,
            aggregate_public=group.encode_point(aggregate).hex() if aggregate is not None else None,
            cause=cause, rounds=rounds, retries=rounds - 1,
            swarm=list(swarm), xs=list(xs),
        )

    # -- threshold sessions ------------------------------------------------------

    def _session_signers(self, cohort_ids):
        outcome = self.outcome
        if outcome is None or outcome.status != "success":
            raise RuntimeError("no successful ceremony to operate on")
        if cohort_ids is None:
            cohort_ids = outcome.swarm[: self.config.t]
        return tuple(cohort_ids)

    def run_signing(self, message: bytes, cohort_ids=None) -> Signature:
        cohort_ids = self._session_signers(cohort_ids)
        signers = {aid: self.actors[aid] for aid in cohort_ids}
        A = self.outcome.aggregate_public
        sig, self.tick = signing_session(
            self.group, signers, A, message, self.transcript, self.tick
        )
        return sig

    def run_exchange(self, peer_point, cohort_ids=None):
        cohort_ids = self._session_signers(cohort_ids)
        signers = {aid: self.actors[aid] for aid in cohort_ids}
        K, self.tick = exchange_session(
            self.group, signers, peer_point, self.transcript, self.tick,
            coeff_side=self.config.coeff_side, threshold_t=self.config.t,
        )
        return K


# ---------------------------------------------------------------------------
# sessions shared by the live simulation and material loaded from disk


def signing_session(group: Group, signers: dict, aggregate_A, message: bytes,
                    transcript: CeremonyTranscript, tick: int) -> tuple[Signature, int]:
    """Two-round threshold signing across the given signers.

    The cohort is whoever responded; Lagrange coefficients are computed
    after round 1 for exactly that cohort, as the responders may be any
    subset of the swarm.
    """
    tick += 1
    commitments = {}
    handles = {}
    for sid, signer in signers.items():
        transcript.envelope(tick, "dealer", sid, "round1",
                            json_payload({"message": message.hex()}))
        R_i, handle = signer.sign_round1()
        handles[sid] = handle
        commitments[sid] = R_i
        transcript.envelope(tick, sid, "dealer", "round1",
                            json_payload({"R": group.encode_point(R_i).hex()}))

    aggregate_R = group.point_sum(commitments.values())
    cohort = ShareSet(
        tuple(Share(s.result.my_share.x, 0) for s in signers.values()),
        len(signers), group.ell,
    )

    tick += 1
    S_parts = []
    for sid, signer in signers.items():
        coeff = lagrange_coefficient(signer.result.my_share.x, cohort)
        transcript.envelope(tick, "dealer", sid, "round2", json_payload({
            "R": group.encode_point(aggregate_R).hex(),
            "A": group.encode_point(aggregate_A).hex(),
            "coeff": format(coeff, "x"),
            "message": message.hex(),
        }))
        S_i = signer.sign_round2(handles[sid], aggregate_R, coeff, aggregate_A, message)
        S_parts.append(S_i)
        transcript.envelope(tick, sid, "dealer", "round2",
                            json_payload({"S": format(S_i, "x")}))

    tick += 1
    try:
        sig = aggregate_and_verify(group, list(commitments.values()), S_parts,
                                   aggregate_A, message)
    except AggregateInvalidError:
        transcript.event(tick, "signature", A=group.encode_point(aggregate_A).hex(),
                         R=group.encode_point(aggregate_R).hex(),
                         S=format(sum(S_parts) % group.ell, "x"),
                         message=message.hex(), verified=False)
        raise
    transcript.event(tick, "signature", A=group.encode_point(aggregate_A).hex(),
                     R=group.encode_point(sig.R).hex(), S=format(sig.S, "x"),
                     message=message.hex(), verified=True)
    return sig, tick


def exchange_session(group: Group, signers: dict, peer_point, transcript: CeremonyTranscript,
                     tick: int, coeff_side: str = "dealer", threshold_t: int | None = None):
    """Threshold Diffie-Hellman: K = sum_c l_c · y_c · P.

    With dealer-side coefficients the actors return y_c·P and the dealer
    weighs them; with signer-side the dealer sends each actor its
    coefficient and just sums the replies.
    """
    cohort = ShareSet(
        tuple(Share(s.result.my_share.x, 0) for s in signers.values()),
        threshold_t if threshold_t is not None else len(signers),
        group.ell,
    )
    tick += 1
    contribs = []
    peer_hex = group.encode_point(peer_point).hex()
    for sid, signer in signers.items():
        x = signer.result.my_share.x
        coeff = lagrange_coefficient(x, cohort) if coeff_side == "signer" else None
        request = {"P": peer_hex}
        if coeff is not None:
            request["coeff"] = format(coeff, "x")
        transcript.envelope(tick, "dealer", sid, "dh-request", json_payload(request))
        K_c = signer.dh_contribution(peer_point, coeff)
        contribs.append((x, K_c))
        transcript.envelope(tick, sid, "dealer", "dh-response",
                            json_payload({"K": group.encode_point(K_c).hex()}))

    tick += 1
    if coeff_side == "signer":
        K = group.point_sum(K for _, K in contribs)
    else:
        K = dh_aggregate(group, contribs, cohort)
    transcript.event(tick, "shared-point", K=group.encode_point(K).hex(),
                     coeff_side=coeff_side)
    return K, tick
