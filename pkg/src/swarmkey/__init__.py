"""Nested Shamir secret sharing for threshold key generation on
twisted Edwards curve groups, with threshold EdDSA signing, threshold
Diffie-Hellman, and a deterministic adversarial swarm simulator.

The aggregate secret scalar is the sum of per-actor secrets; every
actor ends up holding one Shamir share of that sum without the sum ever
existing anywhere.  Any t of n shares can then sign or run key exchange
by combining per-share contributions with Lagrange coefficients.
"""

from .groups import Ed25519Group, Group, GroupError, ToyGroup, get_group
from .keygen import (
    ActorKeygenState,
    KeygenAbort,
    KeygenResult,
    Proof,
    SecretScalarPair,
    ShareBundle,
    begin,
    complete,
    make_proof,
    new_secret_scalar,
    verify_bundle,
)
from .shamir import (
    Share,
    ShareSet,
    SharingPolynomial,
    aggregate_share,
    eval_share,
    interpolate_at_zero,
    lagrange_coefficient,
    sample_polynomial,
)
from .threshold import (
    AggregateInvalidError,
    NonceHandle,
    NonceReuseError,
    Signature,
    aggregate_and_verify,
    dh_aggregate,
    dh_contribution,
    eddsa_verify,
    sign_round1,
    sign_round2,
)

__version__ = "0.1.0"
