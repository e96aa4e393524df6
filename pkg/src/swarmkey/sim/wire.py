"""Wire encodings for simulated traffic.

Share bundles get a compact binary layout prefixed with a fixed marker;
the marker doubles as the taint used by confidentiality tests — if a
bundle ever crosses the dealer in plaintext, the marker shows up in the
dealer-observable byte stream.  Everything else rides as compact JSON.
"""

from __future__ import annotations

import json

from ..groups import Group, GroupError
from ..keygen import ShareBundle
from ..shamir import Share

SHARE_MAGIC = b"\xf0SHRWIRE"


def bundle_to_bytes(group: Group, bundle: ShareBundle) -> bytes:
    return b"".join(
        (
            SHARE_MAGIC,
            group.encode_scalar(bundle.sigma.x),
            group.encode_scalar(bundle.sigma.y),
            group.encode_point(bundle.R),
            group.encode_point(bundle.A),
            group.encode_scalar(bundle.S),
        )
    )


def bundle_from_bytes(group: Group, data: bytes) -> ShareBundle:
    s, e = group.scalar_bytes, group.element_bytes
    expected = len(SHARE_MAGIC) + 3 * s + 2 * e
    if len(data) != expected or not data.startswith(SHARE_MAGIC):
        raise GroupError("malformed share bundle")
    off = len(SHARE_MAGIC)
    x = group.decode_scalar(data[off : off + s])
    y = group.decode_scalar(data[off + s : off + 2 * s])
    R = group.decode_point(data[off + 2 * s : off + 2 * s + e])
    A = group.decode_point(data[off + 2 * s + e : off + 2 * s + 2 * e])
    S = group.decode_scalar(data[off + 2 * s + 2 * e :])
    return ShareBundle(Share(x, y), R, A, S)


def json_payload(obj: dict) -> bytes:
    return json.dumps(obj, separators=(",", ":"), sort_keys=True).encode()


def parse_payload(data: bytes) -> dict:
    return json.loads(data.decode())
