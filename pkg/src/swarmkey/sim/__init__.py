"""In-process swarm simulation: parties, transport, ceremonies, attacks."""

from .attacks import (
    AttackReport,
    attack_collusion_search,
    attack_deterministic_nonce,
    attack_rogue_key,
    recover_share_from_responses,
)
from .ceremony import (
    CeremonyOutcome,
    SwarmSimulation,
    exchange_session,
    run_ceremony,
    signing_session,
)
from .config import (
    BEHAVIORS,
    DETERMINISTIC_NONCE,
    EQUIVOCATE_A,
    GARBAGE_SHARE,
    HONEST,
    ROGUE_KEY,
    WITHHOLD,
    ConfigError,
    SwarmConfig,
)
from .entropy import EntropyReport, entropy_demo, point_mass, shannon_entropy, uniform_distribution
from .parties import Actor, Dealer, LoadedSigner
from .transcript import (
    LEDGER_ACCEPT,
    LEDGER_INCONCLUSIVE,
    LEDGER_REJECT,
    CeremonyTranscript,
    Ledger,
    LedgerPost,
    ReplayReport,
    ledger_check,
    replay_verify,
)

__all__ = [
    "Actor",
    "AttackReport",
    "BEHAVIORS",
    "CeremonyOutcome",
    "CeremonyTranscript",
    "ConfigError",
    "Dealer",
    "DETERMINISTIC_NONCE",
    "EQUIVOCATE_A",
    "EntropyReport",
    "GARBAGE_SHARE",
    "HONEST",
    "LEDGER_ACCEPT",
    "LEDGER_INCONCLUSIVE",
    "LEDGER_REJECT",
    "Ledger",
    "LedgerPost",
    "LoadedSigner",
    "ROGUE_KEY",
    "ReplayReport",
    "SwarmConfig",
    "SwarmSimulation",
    "WITHHOLD",
    "attack_collusion_search",
    "attack_deterministic_nonce",
    "attack_rogue_key",
    "entropy_demo",
    "exchange_session",
    "ledger_check",
    "point_mass",
    "recover_share_from_responses",
    "replay_verify",
    "run_ceremony",
    "shannon_entropy",
    "signing_session",
    "uniform_distribution",
]
