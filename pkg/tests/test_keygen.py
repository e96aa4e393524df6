import hashlib
import random
from itertools import combinations

import pytest

from swarmkey.groups import ToyGroup
from swarmkey.keygen import (
    CHECK_LOW_ORDER,
    CHECK_PROOF_EQUATION,
    CHECK_SCALAR_RANGE,
    KeygenAbort,
    PrefixReuseError,
    SecretScalarPair,
    ShareBundle,
    begin,
    complete,
    make_proof,
    new_secret_scalar,
    proof_challenge,
    proof_from_nonce,
    verify_bundle,
)
from swarmkey.shamir import Share, ShareSet, interpolate_at_zero

from oracles import toy_dlog

ELL = 2**252 + 27742317777372353535851937790883648493  # ed25519 subgroup order


# ---------------------------------------------------------------------------
# secret scalar derivation


def test_clamp_all_ones_toy(toy):
    # b=8, c=3 with an all-ones hash: a = 128 + (8+16+32+64), p = 255
    assert toy.clamp_scalar(0xFF) == 248
    prefix = int.from_bytes(b"\xff", "little")
    assert prefix == 255


def test_new_secret_scalar_cofactor_multiple(toy, ed25519):
    rng = random.Random(0)
    for group in (toy, ed25519):
        for _ in range(50):
            pair = new_secret_scalar(group, rng)
            assert pair.a % (1 << group.cofactor_log2) == 0
            assert group.keyspace_contains(pair.a)


def test_new_secret_scalar_keyspace_ed25519(ed25519):
    rng = random.Random(1)
    for _ in range(100):
        pair = new_secret_scalar(ed25519, rng)
        # KeySpace: a = 2^254 + 8k with 0 <= k <= 2^251 - 1
        k, rem = divmod(pair.a - 2**254, 8)
        assert rem == 0
        assert 0 <= k <= 2**251 - 1


def test_new_secret_scalar_matches_hash_expansion(toy):
    # reproduce the derivation with independent code: seed -> SHA-512 -> clamp
    rng = random.Random(42)
    pair = new_secret_scalar(toy, rng)
    seed = random.Random(42).randbytes(1)
    digest = hashlib.sha512(seed).digest()
    expected_a = 128 + (digest[0] & 0b0111_1000)
    assert pair.a == expected_a
    assert pair.consume_prefix() == digest[1]


def test_prefix_single_use():
    pair = SecretScalarPair(8, 77)
    assert pair.consume_prefix() == 77
    with pytest.raises(PrefixReuseError):
        pair.consume_prefix()


def test_example1_reduced_scalar_leaves_keyspace(ed25519):
    # the scalar 2 is reachable as a clamped key reduced mod ell ...
    k = pow(8, -1, ELL) * (2 - 2**254) % ELL
    assert 0 <= k <= 2**251 - 1
    a = 2**254 + 8 * k
    assert ed25519.keyspace_contains(a)
    assert a % ELL == 2
    # ... but not as 8*a' with a' in [1, floor(ell/8)]
    assert pow(8, -1, ELL) * 2 % ELL > ELL // 8


# ---------------------------------------------------------------------------
# proofs


def test_proof_verifies_by_construction(toy):
    rng = random.Random(3)
    for _ in range(10):
        pair = new_secret_scalar(toy, rng)
        a = pair.a
        proof = make_proof(toy, pair)
        bundle = ShareBundle(Share(1, 0), proof.R, proof.A, proof.S)
        assert verify_bundle(toy, bundle).ok
        assert toy.point_eq(proof.A, toy.point_mul(a, toy.generator))


def test_proof_with_forced_nonce_matches_reference_hash(toy):
    # a=5, r=7: A = 40, R = 56, S = (H*5 + 7) mod 1019 with H recomputed
    # from the raw SHA-512 of the two encodings
    proof = proof_from_nonce(toy, 5, 7)
    assert proof.A == 40
    assert proof.R == 56
    digest = hashlib.sha512(
        (40).to_bytes(2, "little") + (56).to_bytes(2, "little")
    ).digest()
    h = int.from_bytes(digest, "little") % 1019
    assert proof.S == (h * 5 + 7) % 1019
    assert proof_challenge(toy, 40, 56) == h


def test_tampered_proof_rejected(toy):
    proof = proof_from_nonce(toy, 5, 7)
    bad = ShareBundle(Share(1, 0), proof.R, proof.A, (proof.S + 1) % toy.ell)
    verdict = verify_bundle(toy, bad)
    assert not verdict.ok
    assert verdict.failed_check == CHECK_PROOF_EQUATION


def test_verify_bundle_check_order(toy):
    proof = proof_from_nonce(toy, 5, 7)
    low = ShareBundle(Share(1, 0), proof.R, toy.identity, proof.S)
    assert verify_bundle(toy, low).failed_check == CHECK_LOW_ORDER
    out_of_range = ShareBundle(Share(1, 0), proof.R, proof.A, toy.ell)
    assert verify_bundle(toy, out_of_range).failed_check == CHECK_SCALAR_RANGE


# ---------------------------------------------------------------------------
# begin / complete


def run_full_keygen(group, n, t, seed):
    rngs = [random.Random(f"{seed}:{i}") for i in range(n)]
    xs = list(range(1, n + 1))
    outputs = [begin(group, i + 1, xs, t, rngs[i]) for i in range(n)]
    results = []
    for i in range(n):
        incoming = [outputs[j][0][i] for j in range(n)]  # sender order
        results.append(complete(outputs[i][1], incoming))
    states = [state for _, state in outputs]
    return results, states


def test_begin_single_actor(toy):
    bundles, state = begin(toy, 1, [1], 1, random.Random(0))
    assert len(bundles) == 1
    assert bundles[0].sigma.y == state.secret.a % toy.ell
    result = complete(state, bundles)
    assert toy.point_eq(result.aggregate_public, toy.point_mul(state.secret.a, toy.generator))
    assert result.my_share == Share(1, state.secret.a % toy.ell)


def test_begin_proof_identical_across_recipients(toy):
    bundles, _ = begin(toy, 1, [1, 2, 3], 2, random.Random(1))
    assert len({(b.A, b.R, b.S) for b in bundles}) == 1


def test_begin_rejects_duplicates_and_bad_indices(toy):
    rng = random.Random(0)
    with pytest.raises(ValueError):
        begin(toy, 1, [1, 1, 2], 2, rng)
    with pytest.raises(ValueError):
        begin(toy, 4, [1, 2, 3], 2, rng)
    with pytest.raises(ValueError):
        begin(toy, 1, [1, 2, 3], 4, rng)


def test_begin_shares_interpolate_to_secret(toy):
    bundles, state = begin(toy, 1, [1, 2, 3, 4], 3, random.Random(5))
    cohort = ShareSet(tuple(b.sigma for b in bundles[:3]), 3, toy.ell)
    assert interpolate_at_zero(cohort) == state.secret.a % toy.ell


def test_complete_two_honest_actors(toy):
    results, states = run_full_keygen(toy, 2, 2, seed=9)
    assert toy.point_eq(results[0].aggregate_public, results[1].aggregate_public)
    expected = (states[0].secret.a + states[1].secret.a) % toy.ell
    cohort = ShareSet((results[0].my_share, results[1].my_share), 2, toy.ell)
    assert interpolate_at_zero(cohort) == expected
    assert toy_dlog(toy, results[0].aggregate_public) == expected


@pytest.mark.parametrize("n,t", [(3, 2), (5, 3), (6, 4)])
def test_complete_key_correctness_oracle(toy, n, t):
    results, states = run_full_keygen(toy, n, t, seed=n * 10 + t)
    expected = sum(s.secret.a for s in states) % toy.ell
    assert toy_dlog(toy, results[0].aggregate_public) == expected
    shares = [r.my_share for r in results]
    for subset in combinations(shares, t):
        assert interpolate_at_zero(ShareSet(subset, t, toy.ell)) == expected


def test_complete_aborts_on_tamper(toy):
    n, t = 3, 2
    rngs = [random.Random(f"1:{i}") for i in range(n)]
    xs = [1, 2, 3]
    outputs = [begin(toy, i + 1, xs, t, rngs[i]) for i in range(n)]
    incoming = [outputs[j][0][0] for j in range(n)]
    bad = incoming[1]
    incoming[1] = ShareBundle(bad.sigma, bad.R, bad.A, (bad.S + 1) % toy.ell)
    with pytest.raises(KeygenAbort) as exc:
        complete(outputs[0][1], incoming)
    assert exc.value.sender == 2
    assert exc.value.failed_check == CHECK_PROOF_EQUATION


def test_complete_rejects_wrong_count_and_wrong_x(toy):
    bundles, state = begin(toy, 1, [1, 2], 2, random.Random(2))
    with pytest.raises(ValueError):
        complete(state, bundles[:1])
    other, _ = begin(toy, 2, [1, 2], 2, random.Random(3))
    with pytest.raises(ValueError):
        complete(state, [bundles[0], other[1]])  # addressed to x=2, not x=1


def test_complete_detects_replaced_own_bundle(toy):
    rng0, rng1 = random.Random(4), random.Random(5)
    mine, state = begin(toy, 1, [1, 2], 2, rng0)
    theirs, _ = begin(toy, 1, [1, 2], 2, rng1)  # same slot, different actor
    with pytest.raises(ValueError):
        complete(state, [theirs[0], mine[0]])


def test_no_single_state_contains_aggregate(toy):
    results, states = run_full_keygen(toy, 4, 2, seed=21)
    aggregate = sum(s.secret.a for s in states) % toy.ell
    for state, result in zip(states, results):
        visible = {
            state.secret.a,
            state.secret.a % toy.ell,
            *state.polynomial.coefficients,
            result.my_share.y,
        }
        assert aggregate not in visible


def test_rogue_key_soundness_exhaustive_small():
    """Over a tiny toy group: the only S passing the proof equation for a
    rogue point is the one matching its discrete log, which the rogue
    cannot know without solving DLOG."""
    toy = ToyGroup(11)
    rng = random.Random(6)
    honest = [new_secret_scalar(toy, rng) for _ in range(2)]
    target = 7
    A_target = toy.point_mul(target, toy.generator)
    peers = [toy.point_mul(p.a, toy.generator) for p in honest]
    A_rogue = toy.point_sub(A_target, toy.point_sum(peers))
    a_rogue = toy_dlog(toy, A_rogue)  # the oracle may know it; the rogue may not

    passing = []
    for r in range(toy.ell):
        R = toy.point_mul(r, toy.generator)
        h = proof_challenge(toy, A_rogue, R)
        for S in range(toy.ell):
            lhs = toy.point_mul(S, toy.generator)
            rhs = toy.point_add(toy.point_mul(h, A_rogue), R)
            if toy.point_eq(lhs, rhs):
                passing.append((r, S))
    # exactly one passing S per nonce, and it always encodes knowledge of
    # the rogue secret: S = h*a_rogue + r
    assert len(passing) == toy.ell
    for r, S in passing:
        R = toy.point_mul(r, toy.generator)
        h = proof_challenge(toy, A_rogue, R)
        assert S == (h * a_rogue + r) % toy.ell
