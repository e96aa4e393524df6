"""Command-line front end for ceremonies, sessions, and attack demos.

Exit codes: 0 for success or an expected detection, 1 for protocol
failures (aborted ceremonies, bad signatures, replay mismatches), 2 for
usage and configuration errors.  Config precedence is flags over config
file over defaults; every command is reproducible from (config, seed).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from .groups import GroupError, get_group
from .sim import (
    BEHAVIORS,
    ConfigError,
    LoadedSigner,
    SwarmConfig,
    SwarmSimulation,
    attack_collusion_search,
    attack_deterministic_nonce,
    attack_rogue_key,
    entropy_demo,
    exchange_session,
    point_mass,
    replay_verify,
    signing_session,
    uniform_distribution,
)
from .sim.transcript import CeremonyTranscript
from .shamir import Share
from .threshold import eddsa_verify

USAGE_ERROR = 2
PROTOCOL_FAILURE = 1

_CONFIG_KEYS = {
    "backend": str, "n": int, "t": int, "tau": int, "seed": int,
    "x_mode": str, "drop_prob": float, "population": int, "max_retries": int,
    "enc_policy": str, "coeff_side": str, "toy_q": int,
    "behavior": str, "message": str, "out": str,
}


class CliError(Exception):
    def __init__(self, message: str, code: int = USAGE_ERROR):
        super().__init__(message)
        self.code = code


def _parse_behaviors(specs: list[str]) -> dict[int, str]:
    behaviors: dict[int, str] = {}
    for spec in specs:
        for item in spec.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                idx, mode = item.split(":", 1)
                idx = int(idx)
            except ValueError:
                raise CliError(f"bad --behavior {item!r}; expected IDX:MODE")
            if mode not in BEHAVIORS:
                raise CliError(f"unknown behavior {mode!r}; choose from {', '.join(BEHAVIORS)}")
            behaviors[idx] = mode
    return behaviors


def _load_config_file(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment."""
    values: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](value)
        except ValueError:
            raise CliError(f"{path}:{lineno}: bad value for {key}")
    return values


def _merge_config(args) -> tuple[SwarmConfig, dict]:
    file_values = _load_config_file(args.config) if getattr(args, "config", None) else {}
    merged = dict(file_values)
    for key in ("backend", "n", "t", "tau", "seed", "x_mode", "drop_prob",
                "population", "max_retries", "enc_policy", "coeff_side", "toy_q"):
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag

    behavior_specs = list(getattr(args, "behavior", None) or [])
    if "behavior" in merged:
        behavior_specs.insert(0, merged.pop("behavior"))
    behaviors = _parse_behaviors(behavior_specs)

    extras = {
        "message": merged.pop("message", None),
        "out": merged.pop("out", None),
    }
    try:
        config = SwarmConfig(behaviors=behaviors, **merged)
    except (ConfigError, TypeError) as exc:
        raise CliError(f"invalid configuration: {exc}")
    return config, extras


def _write_transcript(transcript: CeremonyTranscript, out: str | None, default: str) -> Path:
    path = Path(out) if out else Path(default)
    path.write_text(transcript.to_jsonl())
    return path


def _share_fingerprint(x: int, y: int) -> str:
    return hashlib.sha256(f"{x}:{y}".encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# commands


def cmd_keygen(args) -> int:
    config, extras = _merge_config(args)
    out = args.out or extras["out"]
    sim = SwarmSimulation(config)
    transcript = sim.run_ceremony(embed_shares=(config.backend == "toy"))
    outcome = sim.outcome
    path = _write_transcript(transcript, out, "swarmkey-keygen.jsonl")
    print(f"transcript: {path}")

    if outcome.status != "success":
        print(f"ceremony {outcome.status}: {outcome.cause}", file=sys.stderr)
        return PROTOCOL_FAILURE

    print(f"aggregate public key: {sim.group.encode_point(outcome.aggregate_public).hex()}")
    for actor_id in outcome.swarm:
        share = sim.actors[actor_id].result.my_share
        print(f"  {actor_id}: x={share.x} share fingerprint {_share_fingerprint(share.x, share.y)}")

    if config.backend != "toy":
        # never aggregate share material into one file
        for actor_id in outcome.swarm:
            share = sim.actors[actor_id].result.my_share
            share_path = path.with_suffix(f".{actor_id}.share.json")
            share_path.write_text(json.dumps({
                "backend": config.backend,
                "party": actor_id,
                "x": share.x,
                "y": format(share.y, "x"),
                "A": sim.group.encode_point(outcome.aggregate_public).hex(),
            }, indent=2))
            print(f"  share file: {share_path}")
    return 0


def _load_key_material(transcript_path: str):
    """(header, group, aggregate_A, shares by party) from a keygen transcript."""
    try:
        transcript = CeremonyTranscript.from_jsonl(Path(transcript_path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read transcript: {exc}")
    headers = transcript.of_kind("config")
    outcome = transcript.outcome()
    if not headers or outcome is None:
        raise CliError("not a ceremony transcript", PROTOCOL_FAILURE)
    if outcome.get("status") != "success":
        raise CliError("transcript records no successful ceremony", PROTOCOL_FAILURE)
    header = headers[0]
    group = get_group(header["backend"], toy_q=header.get("toy_q", 1019))
    A = group.decode_point(bytes.fromhex(outcome["aggregate_public"]))

    shares: dict[str, Share] = {}
    if header["backend"] == "toy":
        for rec in transcript.of_kind("share-material"):
            shares[rec["party"]] = Share(rec["x"], int(rec["y"], 16))
    else:
        base = Path(transcript_path)
        for actor_id in outcome["swarm"]:
            share_path = base.with_suffix(f".{actor_id}.share.json")
            if not share_path.exists():
                raise CliError(f"missing share file {share_path}", PROTOCOL_FAILURE)
            data = json.loads(share_path.read_text())
            shares[actor_id] = Share(data["x"], int(data["y"], 16))
    if not shares:
        raise CliError("transcript carries no share material", PROTOCOL_FAILURE)
    return header, group, A, shares


def _session_signers(header, group, shares, seed: int, t: int):
    cohort_ids = list(shares)[:t]
    sim_config = SwarmConfig(n=header["n"], t=header["t"], backend=header["backend"],
                             seed=seed, toy_q=header.get("toy_q", 1019))
    return {
        sid: LoadedSigner(sid, group, shares[sid], sim_config.rng_for(f"session:{sid}"))
        for sid in cohort_ids
    }


def cmd_sign(args) -> int:
    header, group, A, shares = _load_key_material(args.transcript)
    message = args.message.encode() if args.message is not None else b""
    signers = _session_signers(header, group, shares, args.seed or 0, header["t"])

    session = CeremonyTranscript()
    session.event(0, "config", **{k: header[k] for k in
                                  ("backend", "n", "t", "tau", "seed", "x_mode", "drop_prob",
                                   "population", "enc_policy", "coeff_side")
                                  if k in header})
    sig, _ = signing_session(group, signers, A, message, session, 0)
    if args.out:
        _write_transcript(session, args.out, "swarmkey-sign.jsonl")
    if not eddsa_verify(group, A, message, sig):
        print("signature failed verification", file=sys.stderr)
        return PROTOCOL_FAILURE
    print(f"signature: {sig.encode(group).hex()}")
    print(f"signers: {', '.join(signers)}")
    return 0


def cmd_exchange(args) -> int:
    header, group, A, shares = _load_key_material(args.transcript)
    if not args.peer_public:
        raise CliError("--peer-public is required for exchange")
    try:
        peer = group.decode_point(bytes.fromhex(args.peer_public))
    except (ValueError, GroupError) as exc:
        raise CliError(f"bad --peer-public: {exc}")
    signers = _session_signers(header, group, shares, args.seed or 0, header["t"])

    session = CeremonyTranscript()
    try:
        K, _ = exchange_session(group, signers, peer, session, 0,
                                coeff_side=header.get("coeff_side", "dealer"),
                                threshold_t=header["t"])
    except ValueError as exc:
        print(f"exchange refused: {exc}", file=sys.stderr)
        return PROTOCOL_FAILURE
    if args.out:
        _write_transcript(session, args.out, "swarmkey-exchange.jsonl")
    print(f"shared point: {group.encode_point(K).hex()}")
    return 0


def cmd_attack(args) -> int:
    config, extras = _merge_config(args)
    out = args.out or extras["out"]

    if args.scenario == "rogue-key":
        report = attack_rogue_key(config, rogue_index=args.rogue_index,
                                  low_order=args.low_order, disable_checks=args.control)
        expected = (report.details.get("aggregate_equals_target") is True
                    if args.control else report.detected)
    elif args.scenario == "det-nonce":
        report = attack_deterministic_nonce(config, victim_index=args.victim_index)
        expected = report.detected and report.details.get("replay_confirmed", False)
    else:  # collusion
        report = attack_collusion_search(config, args.d, args.extra)
        if args.d == 0:
            expected = report.details.get("available") is False
        else:
            expected = report.detected
    for line in report.summary_lines():
        print(line)
    if out and report.transcript is not None:
        path = _write_transcript(report.transcript, out, f"swarmkey-attack-{args.scenario}.jsonl")
        print(f"transcript: {path}")
    return 0 if expected else PROTOCOL_FAILURE


def cmd_entropy(args) -> int:
    q = args.q
    if args.dist:
        dists = []
        for spec in args.dist:
            try:
                dists.append([float(p) for p in spec.split(",")])
            except ValueError:
                raise CliError(f"bad --dist {spec!r}; expected comma-separated probabilities")
    else:
        dists = [uniform_distribution(q), point_mass(q, 1)]
    try:
        report = entropy_demo(q, dists)
    except ValueError as exc:
        raise CliError(f"entropy demo rejected input: {exc}")
    for i, h in enumerate(report.contributor_entropies, start=1):
        print(f"H(contributor {i}) = {h:.6f} bits")
    print(f"H(sum) = {report.sum_entropy:.6f} bits")
    print(f"bound H(sum) >= max H(contributor): {report.bound_satisfied}")
    print(f"output exactly uniform: {report.uniform_output}")
    return 0 if report.bound_satisfied else PROTOCOL_FAILURE


def cmd_verify_transcript(args) -> int:
    try:
        transcript = CeremonyTranscript.from_jsonl(Path(args.transcript).read_text())
    except OSError as exc:
        raise CliError(f"cannot read transcript: {exc}")
    report = replay_verify(transcript)
    print(f"records: {len(transcript.records)}  checks replayed: {report.checks_replayed}")
    for issue in report.issues:
        print(f"issue: {issue}")
    print("verdict: ok" if report.ok else "verdict: FAILED")
    return 0 if report.ok else PROTOCOL_FAILURE


# ---------------------------------------------------------------------------


def _add_swarm_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", choices=("toy", "ed25519"))
    parser.add_argument("--n", type=int)
    parser.add_argument("--t", type=int)
    parser.add_argument("--tau", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--x-mode", dest="x_mode",
                        choices=("sequential", "dealer-random", "identity-derived"))
    parser.add_argument("--drop-prob", dest="drop_prob", type=float)
    parser.add_argument("--population", type=int)
    parser.add_argument("--max-retries", dest="max_retries", type=int)
    parser.add_argument("--enc-policy", dest="enc_policy",
                        choices=("preprovisioned", "ephemeral", "dealer-distributed"))
    parser.add_argument("--coeff-side", dest="coeff_side", choices=("dealer", "signer"))
    parser.add_argument("--toy-q", dest="toy_q", type=int)
    parser.add_argument("--behavior", action="append", metavar="IDX:MODE",
                        help="per-actor behavior, repeatable")
    parser.add_argument("--config", metavar="FILE", help="flat key = value config file")
    parser.add_argument("--out", metavar="PATH", help="transcript output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmkey",
        description="Threshold key generation, signing, and exchange over a simulated swarm",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="run a distributed key generation ceremony")
    _add_swarm_flags(p)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", help="threshold-sign a message with a prior ceremony's shares")
    p.add_argument("transcript", help="keygen transcript path")
    p.add_argument("--message", default="")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("exchange", help="threshold Diffie-Hellman with a peer public point")
    p.add_argument("transcript", help="keygen transcript path")
    p.add_argument("--peer-public", dest="peer_public", metavar="HEX")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_exchange)

    p = sub.add_parser("attack", help="run an attack scenario")
    p.add_argument("scenario", choices=("rogue-key", "det-nonce", "collusion"))
    _add_swarm_flags(p)
    p.add_argument("--rogue-index", dest="rogue_index", type=int, default=1)
    p.add_argument("--victim-index", dest="victim_index", type=int, default=1)
    p.add_argument("--low-order", dest="low_order", action="store_true")
    p.add_argument("--control", action="store_true",
                   help="disable the bundle checks to show what they prevent")
    p.add_argument("--d", type=int, default=1, help="actors corrupt at keygen (collusion)")
    p.add_argument("--extra", type=int, help="actors corrupted later (collusion)")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("entropy", help="exact entropy analysis of summed contributions")
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--dist", action="append", metavar="P0,P1,...",
                   help="contributor distribution, repeatable")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("verify-transcript", help="replay and re-verify a transcript")
    p.add_argument("transcript")
    p.set_defaults(func=cmd_verify_transcript)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
