"""Configuration for swarm simulations."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from ..groups import Group, get_group

HONEST = "honest"
WITHHOLD = "withhold"
ROGUE_KEY = "rogue_key"
EQUIVOCATE_A = "equivocate_A"
GARBAGE_SHARE = "garbage_share"
DETERMINISTIC_NONCE = "deterministic_nonce"

BEHAVIORS = (HONEST, WITHHOLD, ROGUE_KEY, EQUIVOCATE_A, GARBAGE_SHARE, DETERMINISTIC_NONCE)

X_MODES = ("sequential", "dealer-random", "identity-derived")
ENC_POLICIES = ("preprovisioned", "ephemeral", "dealer-distributed")
COEFF_SIDES = ("dealer", "signer")


class ConfigError(ValueError):
    pass


@dataclass
class SwarmConfig:
    """Parameters of one simulated swarm.

    ``tau`` is a wait budget in simulated ticks, not seconds: the clock
    is a counter so that a seed reproduces a byte-identical transcript.
    ``population`` is the pool the dealer selects n actors from; it must
    exceed n for retries after withholding to succeed.
    """

    n: int = 5
    t: int = 3
    tau: int = 3
    backend: str = "toy"
    x_mode: str = "sequential"
    drop_prob: float = 0.0
    seed: int = 0
    population: int | None = None
    max_retries: int = 5
    enc_policy: str = "preprovisioned"
    coeff_side: str = "dealer"
    disable_bundle_checks: bool = False
    toy_q: int = 1019
    behaviors: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.population is None:
            self.population = self.n
        if not 1 <= self.t <= self.n:
            raise ConfigError(f"need 1 <= t <= n, got t={self.t} n={self.n}")
        if self.population < self.n:
            raise ConfigError("population smaller than swarm size")
        if not 0.0 <= self.drop_prob <= 1.0:
            raise ConfigError("drop_prob must be in [0, 1]")
        if self.tau < 1:
            raise ConfigError("tau must be at least 1 tick")
        if self.x_mode not in X_MODES:
            raise ConfigError(f"unknown x_mode {self.x_mode!r}")
        if self.enc_policy not in ENC_POLICIES:
            raise ConfigError(f"unknown enc_policy {self.enc_policy!r}")
        if self.coeff_side not in COEFF_SIDES:
            raise ConfigError(f"unknown coeff_side {self.coeff_side!r}")
        for idx, mode in self.behaviors.items():
            if mode not in BEHAVIORS:
                raise ConfigError(f"unknown behavior {mode!r} for actor {idx}")
            if not 1 <= idx <= self.population:
                raise ConfigError(f"behavior index {idx} outside population")

    def make_group(self) -> Group:
        return get_group(self.backend, toy_q=self.toy_q)

    def rng_for(self, label: str) -> random.Random:
        """Independent deterministic stream per party/purpose."""
        digest = hashlib.sha256(f"{self.seed}:{label}".encode()).digest()
        return random.Random(int.from_bytes(digest, "big"))

    def header(self) -> dict:
        fields = {
            "backend": self.backend,
            "n": self.n,
            "t": self.t,
            "tau": self.tau,
            "seed": self.seed,
            "x_mode": self.x_mode,
            "drop_prob": self.drop_prob,
            "population": self.population,
            "enc_policy": self.enc_policy,
            "coeff_side": self.coeff_side,
        }
        if self.backend == "toy":
            fields["toy_q"] = self.toy_q
        if self.disable_bundle_checks:
            fields["disable_bundle_checks"] = True
        if self.behaviors:
            fields["behaviors"] = {str(k): v for k, v in sorted(self.behaviors.items())}
        return fields
