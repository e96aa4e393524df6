import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmkey.groups import GroupError, ToyGroup, get_group

from oracles import toy_dlog

# FIPS 180-2 appendix C test vector: SHA-512("abc")
SHA512_ABC = bytes.fromhex(
    "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
    "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f"
)


def test_get_group_names(toy, ed25519):
    assert get_group("toy").ell == 1019
    assert get_group("ed25519").ell == ed25519.ell
    with pytest.raises(GroupError):
        get_group("p256")


def test_toy_rejects_composite_modulus():
    with pytest.raises(GroupError):
        ToyGroup(1020)


def test_toy_point_mul_examples(toy):
    assert toy.point_mul(3, toy.generator) == 24
    assert toy.point_mul(0, toy.generator) == toy.identity
    assert toy.point_mul(toy.ell, toy.generator) == toy.identity


def test_toy_point_add_examples(toy):
    P = toy.point_mul(3, toy.generator)
    assert toy.point_add(P, toy.identity) == P
    assert toy.point_add(24, 40) == 64
    assert toy.point_add(toy.point_mul(2, toy.generator), toy.point_mul(3, toy.generator)) == \
        toy.point_mul(5, toy.generator)


def test_low_order_examples(toy):
    assert toy.is_low_order(4076)  # 4 * 1019, order 2
    assert not toy.is_low_order(toy.generator)
    assert toy.is_low_order(toy.identity)
    assert toy.is_low_order(toy.small_order_element())


def test_ed25519_low_order(ed25519):
    assert ed25519.is_low_order(ed25519.identity)
    assert ed25519.is_low_order(ed25519.small_order_element())
    assert not ed25519.is_low_order(ed25519.generator)


@pytest.mark.parametrize("backend", ["toy", "ed25519"])
def test_scalar_linearity(backend):
    group = get_group(backend)
    rng = random.Random(1)
    for _ in range(3 if backend == "ed25519" else 50):
        s1, s2 = group.random_scalar(rng), group.random_scalar(rng)
        left = group.point_mul((s1 + s2) % group.ell, group.generator)
        right = group.point_add(
            group.point_mul(s1, group.generator), group.point_mul(s2, group.generator)
        )
        assert group.point_eq(left, right)


@given(st.integers(0, 1018), st.integers(0, 1018))
def test_toy_linearity_property(s1, s2):
    group = ToyGroup()
    left = group.point_mul((s1 + s2) % group.ell, group.generator)
    right = group.point_add(
        group.point_mul(s1, group.generator), group.point_mul(s2, group.generator)
    )
    assert left == right


@pytest.mark.parametrize("backend", ["toy", "ed25519"])
def test_encode_decode_round_trip(backend):
    group = get_group(backend)
    rng = random.Random(2)
    count = 1000 if backend == "toy" else 40
    for _ in range(count):
        P = group.point_mul(group.random_scalar(rng), group.generator)
        data = group.encode_point(P)
        assert group.point_eq(group.decode_point(data), P)
        assert group.encode_point(group.decode_point(data)) == data


def test_toy_decode_rejects_non_canonical(toy):
    too_big = (8 * 1019).to_bytes(toy.element_bytes, "little")
    with pytest.raises(GroupError):
        toy.decode_point(too_big)
    with pytest.raises(GroupError):
        toy.decode_point(b"\x00")  # wrong width


def test_ed25519_decode_rejects_non_canonical(ed25519):
    p = 2**255 - 19
    with pytest.raises(GroupError):
        ed25519.decode_point((p + 1).to_bytes(32, "little"))
    with pytest.raises(GroupError):
        ed25519.decode_point(b"\x00" * 31)
    # y that is not on the curve
    with pytest.raises(GroupError):
        ed25519.decode_point((2).to_bytes(32, "little"))


def test_hash_to_scalar_contract(toy, ed25519):
    for group in (toy, ed25519):
        for data in (b"", b"x", b"swarm", bytes(range(64))):
            v = group.hash_to_scalar(data)
            assert 0 <= v < group.ell
            assert v == group.hash_to_scalar(data)


def test_hash_to_scalar_against_reference_vector(toy, ed25519):
    # reduce the published SHA-512("abc") digest with independent arithmetic
    expected_wide = int.from_bytes(SHA512_ABC, "little")
    assert toy.hash_to_scalar(b"abc") == expected_wide % toy.ell
    assert ed25519.hash_to_scalar(b"abc") == expected_wide % ed25519.ell
    # multi-part hashing concatenates
    assert ed25519.hash_to_scalar(b"a", b"bc") == ed25519.hash_to_scalar(b"abc")


def test_toy_dlog_oracle_sanity(toy):
    assert toy_dlog(toy, toy.identity) == 0
    assert toy_dlog(toy, toy.generator) == 1
    assert toy_dlog(toy, toy.point_mul(517, toy.generator)) == 517


def test_ed25519_generator_matches_rfc(ed25519):
    # the canonical base point compression from RFC 8032
    assert ed25519.encode_point(ed25519.generator).hex() == (
        "5866666666666666666666666666666666666666666666666666666666666666"
    )


def test_clamping(toy, ed25519):
    assert toy.clamp_scalar(0xFF) == 248
    assert toy.clamp_scalar(0x00) == 128
    for raw in (0, 7, 2**256 - 1, 123456789):
        a = ed25519.clamp_scalar(raw)
        assert a % 8 == 0
        assert 2**254 <= a < 2**255
        assert ed25519.keyspace_contains(a)
    assert toy.keyspace_contains(248)
    assert not toy.keyspace_contains(64)  # top bit not set
    assert not toy.keyspace_contains(130)  # not a cofactor multiple


def test_wide_hash_width(toy, ed25519):
    assert len(toy.wide_hash(b"seed")) == 2
    assert len(ed25519.wide_hash(b"seed")) == 64
