"""Authenticated public-key encryption for share bundles in transit.

Sealed-box construction over primitives from ``cryptography``: an
ephemeral X25519 key agrees a shared secret with the recipient's static
key, HKDF-SHA256 derives a one-shot ChaCha20-Poly1305 key, and the
ephemeral public key travels in the clear ahead of the ciphertext.
Only the recipient can decrypt, and any ciphertext tampering fails the
Poly1305 tag.

The ephemeral key is drawn from the caller's rng so that simulations
are reproducible from a seed.  That is fine for a simulator and would
be fine in production too provided the rng is a CSPRNG.
"""

from __future__ import annotations

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    NoEncryption,
    PrivateFormat,
    PublicFormat,
)

_INFO = b"swarmkey sealed share v1"
_NONCE = bytes(12)  # key is single-use, so a fixed nonce is safe


class SealError(ValueError):
    """Decryption failed: wrong recipient or tampered ciphertext."""


def generate_keypair(rng) -> tuple[bytes, bytes]:
    """(private, public) raw 32-byte X25519 keypair from the given rng."""
    private = X25519PrivateKey.from_private_bytes(rng.randbytes(32))
    public = private.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    raw = private.private_bytes(Encoding.Raw, PrivateFormat.Raw, NoEncryption())
    return raw, public


def _derive_key(shared: bytes, eph_public: bytes, recipient_public: bytes) -> bytes:
    return HKDF(
        algorithm=SHA256(),
        length=32,
        salt=eph_public + recipient_public,
        info=_INFO,
    ).derive(shared)


def seal(recipient_public: bytes, plaintext: bytes, rng) -> bytes:
    """Encrypt so that only the holder of the matching private key can read."""
    eph_private = X25519PrivateKey.from_private_bytes(rng.randbytes(32))
    eph_public = eph_private.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    shared = eph_private.exchange(X25519PublicKey.from_public_bytes(recipient_public))
    key = _derive_key(shared, eph_public, recipient_public)
    return eph_public + ChaCha20Poly1305(key).encrypt(_NONCE, plaintext, None)


def open_sealed(recipient_private: bytes, blob: bytes) -> bytes:
    """Decrypt a sealed blob; raises SealError on any authentication failure."""
    if len(blob) < 32 + 16:
        raise SealError("sealed blob too short")
    eph_public, ciphertext = blob[:32], blob[32:]
    private = X25519PrivateKey.from_private_bytes(recipient_private)
    recipient_public = private.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    shared = private.exchange(X25519PublicKey.from_public_bytes(eph_public))
    key = _derive_key(shared, eph_public, recipient_public)
    try:
        return ChaCha20Poly1305(key).decrypt(_NONCE, ciphertext, None)
    except InvalidTag as exc:
        raise SealError("sealed blob failed authentication") from exc
