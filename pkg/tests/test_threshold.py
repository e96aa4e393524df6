import random
from itertools import combinations

import pytest

import swarmkey.threshold as th
from swarmkey.shamir import Share, ShareSet, eval_share, interpolate_at_zero, sample_polynomial
from swarmkey.threshold import (
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

from oracles import direct_sign, rfc8032_verify, toy_dlog

RFC_VECTOR1_PUBLIC = bytes.fromhex(
    "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a"
)
RFC_VECTOR1_SIGNATURE = bytes.fromhex(
    "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e06522490155"
    "5fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b"
)


def shared_key_setup(group, n, t, seed):
    """Shamir-share a random secret directly (no ceremony machinery)."""
    rng = random.Random(seed)
    secret = group.random_scalar(rng)
    poly = sample_polynomial(secret, t, group.ell, rng)
    shares = [eval_share(poly, x) for x in range(1, n + 1)]
    A = group.point_mul(secret, group.generator)
    return secret, shares, A, rng


def threshold_sign(group, shares, A, message, rng):
    nonces = [sign_round1(group, rng) for _ in shares]
    R = group.point_sum(R_i for R_i, _ in nonces)
    cohort = ShareSet(tuple(Share(s.x, 0) for s in shares), len(shares), group.ell)
    S_parts = [
        sign_round2(group, handle, R, th.lagrange_coefficient(s.x, cohort), s, A, message)
        for (R_i, handle), s in zip(nonces, shares)
    ]
    return [R_i for R_i, _ in nonces], S_parts


# ---------------------------------------------------------------------------
# round 1


def test_round1_commitment_in_subgroup(toy):
    rng = random.Random(0)
    R, handle = sign_round1(toy, rng)
    assert not toy.is_low_order(R) or toy.point_eq(R, toy.identity)
    assert toy.point_eq(toy.point_mul(toy.ell, R), toy.identity)
    assert isinstance(handle, NonceHandle)


def test_round1_nonces_distinct(toy):
    rng = random.Random(1)
    rs = {sign_round1(toy, rng)[1].consume() for _ in range(50)}
    assert len(rs) > 45  # collisions only at 1/q


def test_nonce_handle_single_use(toy):
    handle = NonceHandle(3)
    assert handle.consume() == 3
    with pytest.raises(NonceReuseError):
        handle.consume()


def test_round2_consumed_handle_errors(toy):
    _, shares, A, rng = shared_key_setup(toy, 3, 2, seed=2)
    R, handle = sign_round1(toy, rng)
    sign_round2(toy, handle, R, 1, shares[0], A, b"m")
    with pytest.raises(NonceReuseError):
        sign_round2(toy, handle, R, 1, shares[0], A, b"m")


# ---------------------------------------------------------------------------
# round 2 arithmetic


def test_round2_forced_values(toy, monkeypatch):
    # r=3, l=2, k=5, y=7: S = 3 + 2*5*7 = 73
    monkeypatch.setattr(th, "signing_challenge", lambda *args: 5)
    S = th.sign_round2(toy, NonceHandle(3), toy.identity, 2, Share(1, 7), toy.identity, b"")
    assert S == 73


def test_round2_zero_coefficient_returns_nonce(toy):
    _, shares, A, rng = shared_key_setup(toy, 3, 2, seed=3)
    R, handle = sign_round1(toy, rng)
    r_copy = NonceHandle(handle._r)  # peek for the assertion
    assert sign_round2(toy, handle, R, 0, shares[0], A, b"m") == r_copy.consume()


def test_round2_random_nonce_varies(toy):
    _, shares, A, rng = shared_key_setup(toy, 3, 2, seed=4)
    outs = set()
    for _ in range(10):
        R, handle = sign_round1(toy, rng)
        outs.add(sign_round2(toy, handle, R, 2, shares[0], A, b"m"))
    assert len(outs) > 1


# ---------------------------------------------------------------------------
# aggregate and verify


@pytest.mark.parametrize("backend_fixture", ["toy", "ed25519"])
def test_threshold_signature_verifies(backend_fixture, request):
    group = request.getfixturevalue(backend_fixture)
    secret, shares, A, rng = shared_key_setup(group, 5, 3, seed=5)
    cohort = shares[:3]
    R_list, S_list = threshold_sign(group, cohort, A, b"attack at dawn", rng)
    sig = aggregate_and_verify(group, R_list, S_list, A, b"attack at dawn")
    assert eddsa_verify(group, A, b"attack at dawn", sig)


def test_threshold_matches_direct_oracle_signer(toy):
    secret, shares, A, rng = shared_key_setup(toy, 5, 3, seed=6)
    R_list, S_list = threshold_sign(toy, shares[:3], A, b"msg", rng)
    sig = aggregate_and_verify(toy, R_list, S_list, A, b"msg")

    # oracle: reconstruct the secret, sign directly with a fresh nonce
    assert toy_dlog(toy, A) == secret
    A2, direct = direct_sign(toy, secret, b"msg", nonce=rng.randrange(toy.ell))
    assert toy.point_eq(A2, A)
    assert eddsa_verify(toy, A, b"msg", direct)
    assert not toy.point_eq(direct.R, sig.R)  # different nonces, both valid


def test_perturbed_contribution_fails(toy):
    _, shares, A, rng = shared_key_setup(toy, 5, 3, seed=7)
    R_list, S_list = threshold_sign(toy, shares[:3], A, b"m", rng)
    S_list[0] = (S_list[0] + 1) % toy.ell
    with pytest.raises(AggregateInvalidError):
        aggregate_and_verify(toy, R_list, S_list, A, b"m")


def test_undersized_cohort_fails(toy):
    _, shares, A, rng = shared_key_setup(toy, 5, 3, seed=8)
    R_list, S_list = threshold_sign(toy, shares[:2], A, b"m", rng)
    with pytest.raises(AggregateInvalidError):
        aggregate_and_verify(toy, R_list, S_list, A, b"m")


def test_two_cohorts_different_signatures_same_key(toy):
    _, shares, A, rng = shared_key_setup(toy, 5, 3, seed=9)
    sig1 = aggregate_and_verify(toy, *threshold_sign(toy, shares[:3], A, b"m", rng), A, b"m")
    sig2 = aggregate_and_verify(toy, *threshold_sign(toy, shares[2:], A, b"m", rng), A, b"m")
    assert not toy.point_eq(sig1.R, sig2.R)
    assert eddsa_verify(toy, A, b"m", sig1) and eddsa_verify(toy, A, b"m", sig2)


# ---------------------------------------------------------------------------
# eddsa_verify


def test_rfc8032_vector1(ed25519):
    A = ed25519.decode_point(RFC_VECTOR1_PUBLIC)
    sig = Signature(
        ed25519.decode_point(RFC_VECTOR1_SIGNATURE[:32]),
        int.from_bytes(RFC_VECTOR1_SIGNATURE[32:], "little"),
    )
    assert eddsa_verify(ed25519, A, b"", sig)
    # perturbation fails
    assert not eddsa_verify(ed25519, A, b"x", sig)
    assert not eddsa_verify(ed25519, A, b"", Signature(sig.R, (sig.S + 1) % ed25519.ell))


def test_verify_rejects_identity_junk(toy):
    assert not eddsa_verify(toy, toy.point_mul(5, toy.generator), b"m",
                            Signature(toy.identity, 0))


def test_verify_rejects_out_of_range_scalar(toy):
    _, shares, A, rng = shared_key_setup(toy, 3, 2, seed=10)
    R_list, S_list = threshold_sign(toy, shares[:2], A, b"m", rng)
    sig = aggregate_and_verify(toy, R_list, S_list, A, b"m")
    assert not eddsa_verify(toy, A, b"m", Signature(sig.R, sig.S + toy.ell))


def test_threshold_ed25519_verifies_under_external_library(ed25519):
    _, shares, A, rng = shared_key_setup(ed25519, 4, 2, seed=11)
    R_list, S_list = threshold_sign(ed25519, shares[:2], A, b"external check", rng)
    sig = aggregate_and_verify(ed25519, R_list, S_list, A, b"external check")
    assert rfc8032_verify(ed25519.encode_point(A), b"external check", sig.encode(ed25519))


# ---------------------------------------------------------------------------
# Diffie-Hellman


def test_dh_contribution_examples(toy):
    assert dh_contribution(toy, Share(1, 3), 16) == 48
    assert dh_contribution(toy, Share(1, 0), 16) == toy.identity
    y = 29
    assert dh_contribution(toy, Share(2, y), toy.generator) == toy.point_mul(y, toy.generator)


def test_dh_refuses_low_order_point(toy):
    with pytest.raises(ValueError):
        dh_contribution(toy, Share(1, 3), toy.small_order_element())
    with pytest.raises(ValueError):
        dh_contribution(toy, Share(1, 3), toy.identity)


def test_dh_aggregate_matches_oracle(toy):
    secret, shares, A, rng = shared_key_setup(toy, 5, 3, seed=12)
    P = toy.point_mul(rng.randrange(1, toy.ell), toy.generator)
    expected = toy.point_mul(secret, P)
    for subset in combinations(shares, 3):
        cohort = ShareSet(subset, 3, toy.ell)
        contribs = [(s.x, dh_contribution(toy, s, P)) for s in subset]
        assert toy.point_eq(dh_aggregate(toy, contribs, cohort), expected)
    # over-threshold cohorts work too
    cohort = ShareSet(tuple(shares), 3, toy.ell)
    contribs = [(s.x, dh_contribution(toy, s, P)) for s in shares]
    assert toy.point_eq(dh_aggregate(toy, contribs, cohort), expected)


def test_dh_single_share_t1(toy):
    secret, shares, A, rng = shared_key_setup(toy, 3, 1, seed=13)
    P = toy.point_mul(17, toy.generator)
    cohort = ShareSet((shares[0],), 1, toy.ell)
    K1 = dh_contribution(toy, shares[0], P)
    assert toy.point_eq(dh_aggregate(toy, [(shares[0].x, K1)], cohort), K1)
    assert toy.point_eq(K1, toy.point_mul(secret, P))  # t=1: share == secret


def test_dh_undersized_cohort_misses_oracle(toy):
    rng = random.Random(14)
    mismatches = 0
    for trial in range(20):
        secret, shares, A, _ = shared_key_setup(toy, 5, 3, seed=1000 + trial)
        P = toy.point_mul(rng.randrange(1, toy.ell), toy.generator)
        expected = toy.point_mul(secret, P)
        cohort = ShareSet(tuple(shares[:2]), 3, toy.ell)
        contribs = [(s.x, dh_contribution(toy, s, P)) for s in shares[:2]]
        if not toy.point_eq(dh_aggregate(toy, contribs, cohort), expected):
            mismatches += 1
    assert mismatches == 20


def test_dh_aggregate_rejects_duplicates(toy):
    _, shares, A, rng = shared_key_setup(toy, 3, 2, seed=15)
    P = toy.point_mul(5, toy.generator)
    cohort = ShareSet(tuple(shares[:2]), 2, toy.ell)
    K = dh_contribution(toy, shares[0], P)
    with pytest.raises(ValueError):
        dh_aggregate(toy, [(shares[0].x, K), (shares[0].x, K)], cohort)
