"""Executable attack scenarios against the swarm.

Each scenario runs the protocol with a scripted adversary and reports
what the adversary achieved and what the defences caught.  Reports are
plain data so the CLI can print them and tests can assert on them.

``attack_rogue_key``
    A colluding dealer leaks the rogue's inbox before the gate; the
    rogue aims the aggregate key at a point only it controls.  With the
    bundle checks on, every honest actor rejects the rogue's proof; a
    control run with checks disabled shows the forced key landing.

``attack_deterministic_nonce``
    A signer that fixes its signing nonce answers two round-2 probes for
    the same message under different coefficients; the dealer solves the
    two linear equations and recovers the signer's share exactly.

``attack_collusion_search``
    Actors corrupted at keygen retain the x-coordinate roster; actors
    corrupted later know only their share values.  Together they search
    the binomial(n-d, t-d) coordinate subsets (trying the pairings
    within each) and test candidates against the public key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import comb

from ..shamir import Share, ShareSet, interpolate_at_zero
from ..threshold import signing_challenge
from . import config as cfg
from .config import SwarmConfig
from .ceremony import SwarmSimulation
from .transcript import CeremonyTranscript


@dataclass
class AttackReport:
    name: str
    detected: bool
    details: dict = field(default_factory=dict)
    transcript: CeremonyTranscript | None = None

    def summary_lines(self) -> list[str]:
        lines = [f"attack: {self.name}", f"detected: {self.detected}"]
        lines.extend(f"{key}: {value}" for key, value in self.details.items())
        return lines


def _with_behavior(config: SwarmConfig, index: int, mode: str) -> SwarmConfig:
    behaviors = dict(config.behaviors)
    behaviors[index] = mode
    header = {k: getattr(config, k) for k in (
        "n", "t", "tau", "backend", "x_mode", "drop_prob", "seed", "population",
        "max_retries", "enc_policy", "coeff_side", "disable_bundle_checks", "toy_q",
    )}
    return SwarmConfig(behaviors=behaviors, **header)


def attack_rogue_key(config: SwarmConfig, *, rogue_index: int = 1,
                     low_order: bool = False, disable_checks: bool = False) -> AttackReport:
    """Run the rogue-key scenario; detection means ceremony abort at a check."""
    config = _with_behavior(config, rogue_index, cfg.ROGUE_KEY)
    if disable_checks:
        header = {k: getattr(config, k) for k in (
            "n", "t", "tau", "backend", "x_mode", "drop_prob", "seed", "population",
            "max_retries", "enc_policy", "coeff_side", "toy_q", "behaviors",
        )}
        config = SwarmConfig(disable_bundle_checks=True, **header)

    sim = SwarmSimulation(config, rogue_low_order=low_order)
    transcript = sim.run_ceremony()
    outcome = sim.outcome
    group = sim.group
    rogue_id = f"actor-{rogue_index}"

    rejections = [
        rec for rec in transcript.of_kind("check")
        if rec["verdict"] == "reject" and rec["sender"] == rogue_id
    ]
    rejecting_actors = sorted({rec["from"] for rec in rejections})
    failed_checks = sorted({rec["failed_check"] for rec in rejections if rec.get("failed_check")})

    details = {
        "rogue": rogue_id,
        "low_order_variant": low_order,
        "status": outcome.status,
        "rejecting_actors": rejecting_actors,
        "failed_checks": failed_checks,
        "key_published": outcome.status == "success",
    }
    if sim.rogue_target_secret is not None and not low_order:
        target_point = group.point_mul(sim.rogue_target_secret, group.generator)
        details["target_public"] = group.encode_point(target_point).hex()
        if outcome.status == "success":
            details["aggregate_equals_target"] = group.point_eq(
                outcome.aggregate_public, target_point
            )
            details["shares_interpolate_to_target"] = _shares_match_key(sim)
    detected = outcome.status == "aborted" and bool(rejections)
    return AttackReport("rogue-key", detected, details, transcript)


def _shares_match_key(sim: SwarmSimulation) -> bool:
    """Do the swarm's aggregate shares interpolate to DLOG(published key)?"""
    group = sim.group
    outcome = sim.outcome
    shares = tuple(sim.actors[a].result.my_share for a in outcome.swarm)
    cohort = ShareSet(shares[: sim.config.t], sim.config.t, group.ell)
    candidate = interpolate_at_zero(cohort)
    return group.point_eq(
        group.point_mul(candidate, group.generator), outcome.aggregate_public
    )


def recover_share_from_responses(S1: int, S2: int, mu1: int, mu2: int, ell: int) -> int:
    """Solve S_i = r + mu_i·s for s given two responses with mu1 != mu2."""
    if (mu1 - mu2) % ell == 0:
        raise ValueError("coefficients coincide; system is underdetermined")
    return (S1 - S2) * pow(mu1 - mu2, -1, ell) % ell


def attack_deterministic_nonce(config: SwarmConfig, *, victim_index: int = 1,
                               message: bytes = b"pay me twice",
                               coeffs: tuple[int, int] | None = None) -> AttackReport:
    """Probe a deterministic-nonce signer twice and recover its share.

    The dealer controls the coefficient mu = l_i(C)·k it hands the
    signer, so it simply claims two different Lagrange coefficients for
    the same message.  A random-nonce signer defeats the algebra.
    """
    config = _with_behavior(config, victim_index, cfg.DETERMINISTIC_NONCE)
    sim = SwarmSimulation(config)
    transcript = sim.run_ceremony()
    if sim.outcome.status != "success":
        return AttackReport("deterministic-nonce", False,
                            {"error": f"ceremony {sim.outcome.status}"}, transcript)

    group = sim.group
    victim_id = f"actor-{victim_index}"
    victim = sim.actors[victim_id]
    A = sim.outcome.aggregate_public

    # two probes, same message, different claimed coefficients
    l1, l2 = coeffs if coeffs is not None else (2, 5)
    probes = []
    for claimed in (l1, l2):
        sim.tick += 1
        R_i, handle = victim.sign_round1()
        k = signing_challenge(group, R_i, A, message)
        S_i = victim.sign_round2(handle, R_i, claimed, A, message)
        mu = claimed * k % group.ell
        probes.append((mu, S_i))
        transcript.event(sim.tick, "probe", victim=victim_id,
                         claimed_coeff=format(claimed, "x"), S=format(S_i, "x"))

    (mu1, S1), (mu2, S2) = probes
    if (mu1 - mu2) % group.ell == 0:
        return AttackReport("deterministic-nonce", False,
                            {"inconclusive": "coefficients coincided"}, transcript)

    recovered = recover_share_from_responses(S1, S2, mu1, mu2, group.ell)
    recovered_nonce = (S1 - mu1 * recovered) % group.ell
    true_share = victim.result.my_share.y
    match = recovered == true_share

    # third probe: predict the victim's next response before asking
    sim.tick += 1
    R_i, handle = victim.sign_round1()
    k3 = signing_challenge(group, R_i, A, message)
    l3 = (l1 + l2 + 1) % group.ell or 1
    predicted = (recovered_nonce + l3 * k3 % group.ell * recovered) % group.ell
    actual = victim.sign_round2(handle, R_i, l3, A, message)
    transcript.event(sim.tick, "probe", victim=victim_id, claimed_coeff=format(l3, "x"),
                     S=format(actual, "x"), predicted=format(predicted, "x"))

    details = {
        "victim": victim_id,
        "recovered_share": recovered,
        "true_share": true_share,
        "share_recovered": match,
        "replay_confirmed": predicted == actual,
    }
    return AttackReport("deterministic-nonce", match, details, transcript)


def attack_collusion_search(config: SwarmConfig, d: int, extra: int | None = None) -> AttackReport:
    """Reconstruct the aggregate secret from a keygen-time coordinate leak.

    ``d`` actors were corrupt during key generation (they kept the
    roster of x-coordinates and know their own); ``extra`` actors are
    corrupted afterwards, knowing their share values but not which
    coordinate was theirs.  Candidates are tested against the public key
    by scalar multiplication, so a hit is always the true secret.
    """
    sim = SwarmSimulation(config)
    transcript = sim.run_ceremony()
    if sim.outcome.status != "success":
        return AttackReport("collusion-search", False,
                            {"error": f"ceremony {sim.outcome.status}"}, transcript)

    group, outcome = sim.group, sim.outcome
    n, t = config.n, config.t
    if not 0 <= d <= n:
        raise ValueError("d must be between 0 and n")
    shares = {aid: sim.actors[aid].result.my_share for aid in outcome.swarm}
    swarm = list(outcome.swarm)
    A = outcome.aggregate_public

    if d == 0:
        return AttackReport("collusion-search", False, {
            "available": False,
            "reason": "no actor retained the coordinate roster at keygen",
            "search_space": 0,
        }, transcript)

    keygen_corrupt = swarm[:d]
    known = [shares[aid] for aid in keygen_corrupt]

    if d >= t:
        cohort = ShareSet(tuple(known[:t]), t, group.ell)
        secret = interpolate_at_zero(cohort)
        return AttackReport("collusion-search", True, {
            "direct_reconstruction": True,
            "search_space": comb(n - d, 0),
            "combinations_tried": 1,
            "recovered_secret": secret,
            "matches_public_key": group.point_eq(
                group.point_mul(secret, group.generator), A),
        }, transcript)

    need = t - d
    if extra is None:
        extra = need
    if extra < need:
        return AttackReport("collusion-search", False, {
            "available": False,
            "reason": f"need {need} later-corrupted actors, have {extra}",
            "search_space": comb(n - d, need),
        }, transcript)

    later_corrupt = swarm[d : d + need]
    unknown_ys = [shares[aid].y for aid in later_corrupt]
    # coordinates not claimed by the keygen-time colluders
    known_xs = {s.x for s in known}
    free_xs = [x for x in outcome.xs if x not in known_xs]

    search_space = comb(len(free_xs), need)
    combinations_tried = 0
    assignments_tested = 0
    recovered = None
    for subset in combinations(free_xs, need):
        combinations_tried += 1
        for ordering in permutations(subset):
            assignments_tested += 1
            candidate_shares = tuple(known) + tuple(
                Share(x, y) for x, y in zip(ordering, unknown_ys)
            )
            try:
                cohort = ShareSet(candidate_shares, t, group.ell)
            except ValueError:
                continue
            candidate = interpolate_at_zero(cohort)
            if group.point_eq(group.point_mul(candidate, group.generator), A):
                recovered = candidate
                break
        # keep iterating: the report counts the full exploration

    details = {
        "available": True,
        "d": d,
        "search_space": search_space,
        "combinations_tried": combinations_tried,
        "assignments_tested": assignments_tested,
        "recovered_secret": recovered,
        "matches_public_key": recovered is not None,
    }
    return AttackReport("collusion-search", recovered is not None, details, transcript)
