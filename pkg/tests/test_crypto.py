"""Crypto primitive tests: frozen oracle values, laws, and forgery resistance."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from std2d import crypto
from std2d.crypto import (
    AuthTag,
    DhkeParams,
    SharedSecret,
    Signature,
    SigningRegistry,
    SymmetricKey,
    auth_tag,
    decrypt,
    derive_key,
    dhke_keypair,
    dhke_shared,
    encrypt,
    is_prime,
    verify_tag,
)

TOY = DhkeParams(q=23, alpha=5)


def slow_modpow(base: int, exponent: int, modulus: int) -> int:
    """Independent oracle: plain repeated multiplication."""
    out = 1
    for _ in range(exponent):
        out = out * base % modulus
    return out


class FixedRng:
    """random-source stub yielding a chosen secret exponent."""

    def __init__(self, value: int):
        self.value = value

    def randrange(self, lo, hi):
        assert lo <= self.value < hi
        return self.value


# -- key agreement -----------------------------------------------------------


def test_keypair_known_values_against_oracle():
    # Expected publics computed with the repeated-multiplication oracle.
    assert slow_modpow(5, 6, 23) == 8
    assert dhke_keypair(TOY, FixedRng(6)).y_public == 8
    assert slow_modpow(5, 15, 23) == 19
    assert dhke_keypair(TOY, FixedRng(15)).y_public == 19
    assert dhke_keypair(TOY, FixedRng(1)).y_public == 5  # alpha^1


def test_shared_secret_known_values():
    # Both directions land on the same secret, value checked by the oracle.
    assert slow_modpow(19, 6, 23) == 2
    assert dhke_shared(19, 6, TOY).k == 2
    assert dhke_shared(8, 15, TOY).k == 2


def test_shared_rejects_trivial_publics():
    for bad in (0, 1, TOY.q - 1, TOY.q, -3):
        with pytest.raises(ValueError):
            dhke_shared(bad, 6, TOY)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        DhkeParams(q=20, alpha=5).validate()  # composite modulus
    with pytest.raises(ValueError):
        DhkeParams(q=23, alpha=1).validate()
    with pytest.raises(ValueError):
        DhkeParams(q=23, alpha=23).validate()
    with pytest.raises(ValueError):
        DhkeParams(q=23, alpha=22).validate()  # order 2, not a generator


def test_default_params_valid_and_keypair_consistent():
    params = DhkeParams()
    params.validate()
    rng = random.Random(11)
    for _ in range(20):
        pair = dhke_keypair(params, rng)
        assert 1 <= pair.y_public <= params.q - 1
        assert pow(params.alpha, pair.x_secret, params.q) == pair.y_public


def test_production_size_params_load_and_work():
    # RFC 3526 group 14 (2048-bit MODP); alpha=2 is the standard generator.
    q = int(
        "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E08"
        "8A67CC74020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B"
        "302B0A6DF25F14374FE1356D6D51C245E485B576625E7EC6F44C42E9"
        "A637ED6B0BFF5CB6F406B7EDEE386BFB5A899FA5AE9F24117C4B1FE6"
        "49286651ECE45B3DC2007CB8A163BF0598DA48361C55D39A69163FA8"
        "FD24CF5F83655D23DCA3AD961C62F356208552BB9ED529077096966D"
        "670C354E4ABC9804F1746C08CA18217C32905E462E36CE3BE39E772C"
        "180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
        "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFF"
        "FFFFFFFF",
        16,
    )
    params = DhkeParams(q=q, alpha=2)
    params.validate()
    rng = random.Random(5)
    a = dhke_keypair(params, rng)
    b = dhke_keypair(params, rng)
    k1 = dhke_shared(b.y_public, a.x_secret, params)
    k2 = dhke_shared(a.y_public, b.x_secret, params)
    assert k1 == k2


def test_symmetry_against_oracle_small_exponents():
    # Oracle-tractable triples: small prime moduli, exponents <= 2000.
    rng = random.Random(99)
    primes = [p for p in range(1_000, 20_000) if is_prime(p)]
    for _ in range(200):
        q = rng.choice(primes)
        alpha = rng.randrange(2, q - 1)
        params = DhkeParams(q=q, alpha=alpha)
        x_i, x_j = rng.randrange(1, 2000), rng.randrange(1, 2000)
        y_i, y_j = slow_modpow(alpha, x_i, q), slow_modpow(alpha, x_j, q)
        if not 1 < y_i < q - 1 or not 1 < y_j < q - 1:
            continue
        k1 = dhke_shared(y_j, x_i, params).k
        k2 = dhke_shared(y_i, x_j, params).k
        assert k1 == k2 == slow_modpow(y_j, x_i, q)


@settings(max_examples=300, deadline=None)
@given(
    x_i=st.integers(min_value=1, max_value=DhkeParams().q - 2),
    x_j=st.integers(min_value=1, max_value=DhkeParams().q - 2),
)
def test_symmetry_full_range(x_i, x_j):
    params = DhkeParams()
    y_i = pow(params.alpha, x_i, params.q)
    y_j = pow(params.alpha, x_j, params.q)
    if not 1 < y_i < params.q - 1 or not 1 < y_j < params.q - 1:
        return
    assert dhke_shared(y_j, x_i, params) == dhke_shared(y_i, x_j, params)


# -- key derivation ------------------------------------------------------------


def test_derive_key_deterministic_and_distinct():
    assert derive_key(SharedSecret(2)) == derive_key(SharedSecret(2))
    assert derive_key(SharedSecret(2)) != derive_key(SharedSecret(3))
    assert len(derive_key(SharedSecret(2)).key) == 32
    assert len(derive_key(SharedSecret(2), length=16).key) == 16


def test_derive_key_depends_only_on_secret():
    # Same numeric secret under different domains maps to the same key.
    assert derive_key(dhke_shared(19, 6, TOY)) == derive_key(SharedSecret(2))


# -- cipher -------------------------------------------------------------------


def test_roundtrip_various_sizes():
    key = derive_key(SharedSecret(1234))
    for size in (0, 1, 17, 1000, 62_500):
        message = random.Random(size).randbytes(size)
        assert decrypt(encrypt(message, key), key) == message


def test_roundtrip_ten_megabytes():
    key = derive_key(SharedSecret(77))
    message = random.Random(0).randbytes(10_000_000)
    assert decrypt(encrypt(message, key), key) == message


def test_encrypt_deterministic():
    key = derive_key(SharedSecret(5))
    assert encrypt(b"abc", key) == encrypt(b"abc", key)


def test_wrong_key_fails_explicitly():
    rng = random.Random(42)
    message = b"payload under test"
    for _ in range(100):
        k1 = derive_key(SharedSecret(rng.randrange(1, 2**60)))
        k2 = derive_key(SharedSecret(rng.randrange(1, 2**60)))
        if k1 == k2:
            continue
        with pytest.raises(crypto.DecryptError):
            decrypt(encrypt(message, k1), k2)


def test_malformed_ciphertext_rejected():
    key = derive_key(SharedSecret(5))
    with pytest.raises(ValueError):
        decrypt(b"short", key)


# -- message authentication -----------------------------------------------------


def test_tag_roundtrip_and_bitflip():
    key = SymmetricKey(key=b"k" * 32)
    message = b"attach me to a control message"
    tag = auth_tag(message, key)
    assert verify_tag(message, key, tag)
    for i in range(len(message) * 8):
        flipped = bytearray(message)
        flipped[i // 8] ^= 1 << (i % 8)
        assert not verify_tag(bytes(flipped), key, tag)


def test_tag_wrong_key_rejected():
    rng = random.Random(3)
    message = b"same message"
    key = SymmetricKey(key=b"a" * 32)
    tag = auth_tag(message, key)
    for _ in range(100):
        other = SymmetricKey(key=rng.randbytes(32))
        if other == key:
            continue
        assert not verify_tag(message, other, tag)


# -- signatures ------------------------------------------------------------------


def test_sign_verify_roundtrip():
    reg = SigningRegistry()
    reg.register("node-a", b"seed-a")
    reg.register("node-b", b"seed-b")
    sig = reg.sign(b"hello", "node-a")
    assert reg.verify(b"hello", sig, "node-a")
    assert not reg.verify(b"hello", sig, "node-b")
    assert not reg.verify(b"hellp", sig, "node-a")


def test_unknown_signer_raises():
    reg = SigningRegistry()
    with pytest.raises(KeyError):
        reg.sign(b"x", "ghost")
    assert not reg.verify(b"x", Signature(signer="ghost", sig=b"\x00" * 64), "ghost")


def test_random_forgeries_never_verify():
    reg = SigningRegistry()
    reg.register("node-a", b"seed-a")
    rng = random.Random(8)
    message = b"the signed content"
    for _ in range(2_000):
        fake = Signature(signer="node-a", sig=rng.randbytes(64))
        assert not reg.verify(message, fake, "node-a")
    tag_key = SymmetricKey(key=b"t" * 32)
    for _ in range(2_000):
        fake_tag = AuthTag(tag=rng.randbytes(32))
        assert not verify_tag(message, tag_key, fake_tag)
