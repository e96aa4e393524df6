"""Prime-order-subgroup arithmetic with interchangeable backends.

Two instantiations share one interface:

``ed25519``
    The twisted Edwards curve group from RFC 8032, implemented in pure
    Python over extended homogeneous coordinates.  Subgroup order ``ell``
    is prime, the full group has cofactor ``2**3``, encodings are the
    32-byte little-endian point compression from the RFC.

``toy``
    The additive integers mod ``8*q`` for a configurable prime ``q``
    (default 1019), generator 8, cofactor ``2**3``.  It mirrors the
    cofactor-8 structure of Ed25519 while keeping the discrete log
    trivially solvable, so tests can exhaustively inspect secrets that
    the protocol promises never to reveal.

Scalars are plain Python ints.  Group elements are backend-specific and
opaque: ints for the toy group, :class:`EdwardsPoint` for ed25519.  All
operations are pure and safe for unrestricted concurrent use.
"""

from __future__ import annotations

import hashlib


class GroupError(ValueError):
    """Invalid encoding or element outside the backend's domain."""


# ---------------------------------------------------------------------------
# shared interface


class Group:
    """Base class holding the parameter set shared by all backends.

    Attributes
    ----------
    name : backend identifier ("ed25519" | "toy").
    ell : prime order of the subgroup generated by ``generator``.
    cofactor_log2 : c, with full group order ``2**c * ell``.
    b : bit-length parameter for seeds and secret-scalar derivation.
    hash_name : identifier of the wide hash (2b bits) used for key material.
    clamp_top_bit : the bit that clamping forces to 1 (all higher bits 0).
    scalar_bytes / element_bytes : fixed wire widths, little-endian.
    """

    name: str
    ell: int
    cofactor_log2: int
    b: int
    hash_name = "sha512"
    clamp_top_bit: int
    scalar_bytes: int
    element_bytes: int
    generator: object
    identity: object

    # -- group operations, implemented per backend ---------------------------

    def point_add(self, P, Q):
        raise NotImplementedError

    def point_neg(self, P):
        raise NotImplementedError

    def point_mul(self, s: int, P):
        raise NotImplementedError

    def point_eq(self, P, Q) -> bool:
        raise NotImplementedError

    def encode_point(self, P) -> bytes:
        raise NotImplementedError

    def decode_point(self, data: bytes):
        raise NotImplementedError

    # -- shared helpers -------------------------------------------------------

    def point_sub(self, P, Q):
        return self.point_add(P, self.point_neg(Q))

    def point_sum(self, points):
        acc = self.identity
        for P in points:
            acc = self.point_add(acc, P)
        return acc

    def is_low_order(self, P) -> bool:
        """True iff P lies in the small-order subgroup (2^c · P = O)."""
        return self.point_eq(self.point_mul(1 << self.cofactor_log2, P), self.identity)

    def small_order_element(self):
        """A nontrivial element of the small-order subgroup (order 2)."""
        raise NotImplementedError

    def encode_scalar(self, s: int) -> bytes:
        if not 0 <= s < 1 << (8 * self.scalar_bytes):
            raise GroupError(f"scalar {s} does not fit in {self.scalar_bytes} bytes")
        return s.to_bytes(self.scalar_bytes, "little")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != self.scalar_bytes:
            raise GroupError(f"scalar encoding must be {self.scalar_bytes} bytes")
        return int.from_bytes(data, "little")

    def random_scalar(self, rng) -> int:
        """Uniform scalar in [0, ell)."""
        return rng.randrange(self.ell)

    def hash_to_scalar(self, *parts: bytes) -> int:
        """SHA-512 over the concatenated parts, little-endian, reduced mod ell."""
        h = hashlib.sha512()
        for part in parts:
            h.update(part)
        return int.from_bytes(h.digest(), "little") % self.ell

    def wide_hash(self, data: bytes) -> bytes:
        """The 2b-bit hash used to expand a secret seed (SHA-512, truncated)."""
        return hashlib.sha512(data).digest()[: self.b // 4]

    def clamp_scalar(self, raw: int) -> int:
        """Clamp the low b bits of a hash into a secret scalar.

        Bits below ``cofactor_log2`` and above ``clamp_top_bit`` are
        cleared and ``clamp_top_bit`` is set, so the result is a multiple
        of the cofactor with a fixed top bit.  The scalar is returned
        unreduced; reduction mod ``ell`` happens only inside arithmetic.
        """
        top = self.clamp_top_bit
        keep = ((1 << top) - 1) ^ ((1 << self.cofactor_log2) - 1)
        return (raw & keep) | (1 << top)

    def keyspace_contains(self, a: int) -> bool:
        """True iff ``a`` is an output clamping could produce."""
        top = self.clamp_top_bit
        return a % (1 << self.cofactor_log2) == 0 and (1 << top) <= a < (1 << (top + 1))

    def __repr__(self) -> str:
        return f"<Group {self.name} ell={self.ell}>"


# ---------------------------------------------------------------------------
# ed25519 backend (RFC 8032 parameters, pure Python)

_P = 2**255 - 19
_D = (-121665 * pow(121666, _P - 2, _P)) % _P
_ELL = 2**252 + 27742317777372353535851937790883648493
_SQRT_M1 = pow(2, (_P - 1) // 4, _P)


class EdwardsPoint:
    """Point on edwards25519 in extended coordinates (X:Y:Z:T), x=X/Z, y=Y/Z."""

    __slots__ = ("X", "Y", "Z", "T")

    def __init__(self, X: int, Y: int, Z: int, T: int):
        self.X, self.Y, self.Z, self.T = X, Y, Z, T

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdwardsPoint):
            return NotImplemented
        # projective equality: X1/Z1 == X2/Z2 and Y1/Z1 == Y2/Z2
        return (
            (self.X * other.Z - other.X * self.Z) % _P == 0
            and (self.Y * other.Z - other.Y * self.Z) % _P == 0
        )

    def __hash__(self) -> int:
        z_inv = pow(self.Z, _P - 2, _P)
        return hash((self.X * z_inv % _P, self.Y * z_inv % _P))

    def __repr__(self) -> str:
        return f"EdwardsPoint({_compress(self).hex()[:16]}…)"


def _ed_add(p: EdwardsPoint, q: EdwardsPoint) -> EdwardsPoint:
    # complete addition law for a = -1 twisted Edwards curves
    A = (p.Y - p.X) * (q.Y - q.X) % _P
    B = (p.Y + p.X) * (q.Y + q.X) % _P
    C = 2 * p.T * q.T * _D % _P
    D = 2 * p.Z * q.Z % _P
    E, F, G, H = (B - A) % _P, (D - C) % _P, (D + C) % _P, (B + A) % _P
    return EdwardsPoint(E * F % _P, G * H % _P, F * G % _P, E * H % _P)


_ED_IDENTITY = EdwardsPoint(0, 1, 1, 0)


def _ed_mul(s: int, p: EdwardsPoint) -> EdwardsPoint:
    q = _ED_IDENTITY
    while s > 0:
        if s & 1:
            q = _ed_add(q, p)
        p = _ed_add(p, p)
        s >>= 1
    return q


def _recover_x(y: int, sign: int) -> int | None:
    if y >= _P:
        return None
    x2 = (y * y - 1) * pow(_D * y * y + 1, _P - 2, _P) % _P
    if x2 == 0:
        return None if sign else 0
    x = pow(x2, (_P + 3) // 8, _P)
    if (x * x - x2) % _P != 0:
        x = x * _SQRT_M1 % _P
    if (x * x - x2) % _P != 0:
        return None
    if (x & 1) != sign:
        x = _P - x
    return x


def _compress(p: EdwardsPoint) -> bytes:
    z_inv = pow(p.Z, _P - 2, _P)
    x = p.X * z_inv % _P
    y = p.Y * z_inv % _P
    return int.to_bytes(y | ((x & 1) << 255), 32, "little")


def _decompress(data: bytes) -> EdwardsPoint:
    if len(data) != 32:
        raise GroupError("point encoding must be 32 bytes")
    y = int.from_bytes(data, "little")
    sign = y >> 255
    y &= (1 << 255) - 1
    if y >= _P:
        raise GroupError("non-canonical point encoding")
    x = _recover_x(y, sign)
    if x is None:
        raise GroupError("encoding is not a curve point")
    return EdwardsPoint(x, y, 1, x * y % _P)


_G_Y = 4 * pow(5, _P - 2, _P) % _P
_G_X = _recover_x(_G_Y, 0)
_ED_G = EdwardsPoint(_G_X, _G_Y, 1, _G_X * _G_Y % _P)


class Ed25519Group(Group):
    name = "ed25519"
    ell = _ELL
    cofactor_log2 = 3
    b = 256
    clamp_top_bit = 254  # RFC 8032: second-highest bit set, highest cleared
    scalar_bytes = 32
    element_bytes = 32
    generator = _ED_G
    identity = _ED_IDENTITY

    def point_add(self, P, Q):
        return _ed_add(P, Q)

    def point_neg(self, P):
        return EdwardsPoint((-P.X) % _P, P.Y, P.Z, (-P.T) % _P)

    def point_mul(self, s, P):
        return _ed_mul(s % (self.ell << self.cofactor_log2), P)

    def point_eq(self, P, Q):
        return P == Q

    def encode_point(self, P):
        return _compress(P)

    def decode_point(self, data):
        return _decompress(data)

    def small_order_element(self):
        return EdwardsPoint(0, _P - 1, 1, 0)  # (0, -1), order 2


# ---------------------------------------------------------------------------
# toy backend: additive Z_{8q}


class ToyGroup(Group):
    """Additive group of integers mod 8q with generator 8.

    The subgroup <8> has prime order q and the small-order subgroup is
    the multiples of q, so the cofactor check and clamping semantics
    behave exactly as on a cofactor-8 curve.  Not constant-time and not
    for production use: its whole purpose is solvable discrete logs.
    """

    name = "toy"
    cofactor_log2 = 3
    b = 8
    clamp_top_bit = 7
    identity = 0

    def __init__(self, q: int = 1019):
        if q < 3 or any(q % d == 0 for d in range(2, int(q**0.5) + 1)):
            raise GroupError(f"toy group modulus {q} must be an odd prime")
        self.ell = q
        self.order = 8 * q
        self.generator = 8
        # one width for scalars and points; both live below 8q
        width = ((self.order - 1).bit_length() + 7) // 8
        self.scalar_bytes = width
        self.element_bytes = width

    def point_add(self, P, Q):
        return (P + Q) % self.order

    def point_neg(self, P):
        return (-P) % self.order

    def point_mul(self, s, P):
        return s * P % self.order

    def point_eq(self, P, Q):
        return P == Q

    def encode_point(self, P):
        if not 0 <= P < self.order:
            raise GroupError(f"element {P} outside Z_{self.order}")
        return P.to_bytes(self.element_bytes, "little")

    def decode_point(self, data):
        if len(data) != self.element_bytes:
            raise GroupError(f"point encoding must be {self.element_bytes} bytes")
        value = int.from_bytes(data, "little")
        if value >= self.order:
            raise GroupError("non-canonical point encoding")
        return value

    def small_order_element(self):
        return 4 * self.ell  # half the group order, hence order 2


# ---------------------------------------------------------------------------


def get_group(name: str, *, toy_q: int = 1019) -> Group:
    """Instantiate a backend by name ("ed25519" | "toy")."""
    if name == "ed25519":
        return Ed25519Group()
    if name == "toy":
        return ToyGroup(toy_q)
    raise GroupError(f"unknown group backend {name!r}")
