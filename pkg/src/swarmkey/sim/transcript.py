"""Ceremony transcripts, the public ledger, and offline replay.

A transcript is an ordered list of flat records, one JSON object per
line on disk.  Envelope records use the stable field names
``tick, from, to, kind, payload_hex, verdict``; event records (checks,
retries, outcomes, ledger posts) carry whatever that event needs, always
with hex-encoded points and scalars.  Identical configuration and seed
produce byte-identical transcripts.

Replay re-derives every verifiable claim a transcript makes — bundle
check verdicts, signature validity, ledger consistency, and the gating
rule that no bundle fan-out precedes a complete set of responses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..groups import Group, GroupError, get_group
from ..keygen import ShareBundle, verify_bundle
from ..shamir import Share, ShareSet, lagrange_coefficient
from ..threshold import Signature, eddsa_verify

LEDGER_ACCEPT = "accept"
LEDGER_REJECT = "reject"
LEDGER_INCONCLUSIVE = "inconclusive"


class CeremonyTranscript:
    """Append-only record of everything observable in one simulation."""

    def __init__(self):
        self.records: list[dict] = []

    def append(self, record: dict) -> None:
        self.records.append(record)

    def envelope(
        self, tick: int, sender: str, to: str, kind: str, payload: bytes,
        verdict: str = "delivered", round_no: int | None = None,
    ) -> None:
        record = {
            "tick": tick,
            "from": sender,
            "to": to,
            "kind": kind,
            "payload_hex": payload.hex(),
            "verdict": verdict,
        }
        if round_no is not None:
            record["round"] = round_no
        self.append(record)

    def event(self, tick: int, kind: str, **fields) -> None:
        self.append({"tick": tick, "kind": kind, **fields})

    # -- queries --------------------------------------------------------------

    def of_kind(self, kind: str) -> list[dict]:
        return [r for r in self.records if r.get("kind") == kind]

    def envelopes(self) -> list[dict]:
        return [r for r in self.records if "payload_hex" in r]

    def received_by(self, party: str) -> list[dict]:
        return [r for r in self.envelopes() if r.get("to") == party and r.get("verdict") == "delivered"]

    def outcome(self) -> dict | None:
        outcomes = self.of_kind("outcome")
        return outcomes[-1] if outcomes else None

    # -- persistence ----------------------------------------------------------

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in self.records)

    @classmethod
    def from_jsonl(cls, text: str) -> "CeremonyTranscript":
        transcript = cls()
        for line in text.splitlines():
            if line.strip():
                transcript.append(json.loads(line))
        return transcript


# ---------------------------------------------------------------------------
# ledger


@dataclass(frozen=True)
class LedgerPost:
    """One actor's independent publication: its view of the key and share point."""

    party: str
    x: int
    aggregate_public: bytes
    share_public: bytes


@dataclass
class Ledger:
    """Append-only system log the actors post to, independent of the dealer."""

    group: Group
    n: int
    t: int
    posts: list[LedgerPost] = field(default_factory=list)

    def append(self, post: LedgerPost) -> None:
        self.posts.append(post)


def ledger_check(ledger: Ledger, cohort_xs) -> str:
    """Validate the published key against a cohort of posted share points.

    Accepts only when every actor posted, all posted keys agree, and the
    Lagrange combination of the cohort's share points reproduces the
    key.  Disagreement or a mismatch rejects; missing posts are
    inconclusive.
    """
    group = ledger.group
    if len({p.party for p in ledger.posts}) < ledger.n:
        return LEDGER_INCONCLUSIVE
    keys = {p.aggregate_public for p in ledger.posts}
    if len(keys) != 1:
        return LEDGER_REJECT
    aggregate = group.decode_point(next(iter(keys)))

    by_x = {p.x: p for p in ledger.posts}
    cohort_xs = tuple(cohort_xs)
    if len(cohort_xs) < ledger.t or any(x not in by_x for x in cohort_xs):
        return LEDGER_INCONCLUSIVE
    cohort = ShareSet(tuple(Share(x, 0) for x in cohort_xs), ledger.t, group.ell)
    acc = group.identity
    for x in cohort_xs:
        point = group.decode_point(by_x[x].share_public)
        acc = group.point_add(acc, group.point_mul(lagrange_coefficient(x, cohort), point))
    return LEDGER_ACCEPT if group.point_eq(acc, aggregate) else LEDGER_REJECT


# ---------------------------------------------------------------------------
# offline replay


@dataclass
class ReplayReport:
    ok: bool
    checks_replayed: int
    issues: list[str]


def _group_from_header(header: dict) -> Group:
    return get_group(header["backend"], toy_q=header.get("toy_q", 1019))


def replay_verify(transcript: CeremonyTranscript) -> ReplayReport:
    """Re-run every check a transcript records and flag inconsistencies."""
    issues: list[str] = []
    replayed = 0
    headers = transcript.of_kind("config")
    if not headers:
        return ReplayReport(False, 0, ["transcript has no config header"])
    header = headers[0]
    try:
        group = _group_from_header(header)
    except GroupError as exc:
        return ReplayReport(False, 0, [f"bad config header: {exc}"])

    # bundle checks: recompute the verdict from the recorded proof values
    for rec in transcript.of_kind("check"):
        if rec.get("check") == "auth" or rec.get("verdict") == "skipped" or "A" not in rec:
            continue
        try:
            bundle = ShareBundle(
                Share(1, 0),  # the share itself is secret and never recorded
                group.decode_point(bytes.fromhex(rec["R"])),
                group.decode_point(bytes.fromhex(rec["A"])),
                int(rec["S"], 16),
            )
        except (GroupError, ValueError) as exc:
            issues.append(f"tick {rec['tick']}: unreadable check record ({exc})")
            continue
        verdict = verify_bundle(group, bundle)
        expected = "accept" if verdict.ok else "reject"
        replayed += 1
        if rec.get("verdict") != expected:
            issues.append(
                f"tick {rec['tick']}: recorded verdict {rec.get('verdict')} but replay says {expected}"
            )
        elif not verdict.ok and rec.get("failed_check") != verdict.failed_check:
            issues.append(
                f"tick {rec['tick']}: recorded failed_check {rec.get('failed_check')} "
                f"but replay says {verdict.failed_check}"
            )

    # signatures
    for rec in transcript.of_kind("signature"):
        try:
            A = group.decode_point(bytes.fromhex(rec["A"]))
            sig = Signature(group.decode_point(bytes.fromhex(rec["R"])), int(rec["S"], 16))
            message = bytes.fromhex(rec["message"])
        except (GroupError, ValueError) as exc:
            issues.append(f"tick {rec['tick']}: unreadable signature record ({exc})")
            continue
        replayed += 1
        if eddsa_verify(group, A, message, sig) != rec.get("verified", True):
            issues.append(f"tick {rec['tick']}: signature record does not re-verify")

    # ledger posts: rebuild the ledger, then re-check any recorded verdicts
    posts = transcript.of_kind("ledger-post")
    if posts:
        ledger = Ledger(group, header["n"], header["t"])
        for rec in posts:
            ledger.append(
                LedgerPost(
                    rec["from"],
                    rec["x"],
                    bytes.fromhex(rec["A"]),
                    bytes.fromhex(rec["share_public"]),
                )
            )
        for rec in transcript.of_kind("ledger-verdict"):
            replayed += 1
            verdict = ledger_check(ledger, tuple(rec["cohort"]))
            if verdict != rec["verdict"]:
                issues.append(
                    f"ledger cohort {rec['cohort']}: replay says {verdict}, "
                    f"recorded {rec['verdict']}"
                )

    # gating: within a round, the dealer fans out bundles only after
    # receiving begin responses from all n selected actors
    per_round: dict[int, list[dict]] = {}
    for rec in transcript.envelopes():
        if rec.get("kind") == "encrypted-bundle" and "round" in rec:
            per_round.setdefault(rec["round"], []).append(rec)
    for round_no, recs in per_round.items():
        responses = 0
        for rec in recs:
            if rec["to"] == "dealer" and rec["verdict"] == "delivered":
                responses += 1
            if rec["from"] == "dealer":
                replayed += 1
                if responses < header["n"]:
                    issues.append(
                        f"round {round_no}: fan-out at tick {rec['tick']} before all "
                        f"{header['n']} responses arrived"
                    )
                break

    # an aborted outcome must be backed by a recorded rejection
    outcome = transcript.outcome()
    if outcome and outcome.get("status") == "aborted":
        rejects = [
            r for r in transcript.of_kind("check") if r.get("verdict") == "reject"
        ]
        if not rejects:
            issues.append("aborted outcome with no recorded check rejection")

    return ReplayReport(not issues, replayed, issues)
