"""Key agreement, symmetric encryption, message authentication, and signatures.

All primitives are deterministic functions of their inputs (plus an explicit
random source where noted), so simulation runs stay reproducible. Default
key-agreement parameters use a 64-bit safe prime for fast desk-scale sweeps;
production-size groups can be loaded from config.

Scheme choices (recorded in every config echo):
  - key agreement: classic modular-exponentiation key exchange over GF(q)
  - key derivation: SHA-256 of the big-endian shared-secret encoding
  - cipher: AES-256-GCM with a synthetic nonce (HMAC of the plaintext under
    the key), so encryption is deterministic and keys remain single-use safe
  - message authentication: HMAC-SHA256
  - signatures: Ed25519, signing keys derived deterministically per identity
"""

import hashlib
import hmac as _hmac
from dataclasses import dataclass
from random import Random

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

# Largest 64-bit safe prime; 2 generates the full multiplicative group.
DEFAULT_PRIME = 18446744073709550147
DEFAULT_GENERATOR = 2

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

AEAD_NONCE_BYTES = 12
AEAD_TAG_BYTES = 16


class DecryptError(Exception):
    """Authenticated decryption failed (wrong key or corrupted ciphertext)."""


def is_prime(n: int) -> bool:
    """Miller-Rabin primality check, deterministic for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class DhkeParams:
    """Public key-exchange domain: prime modulus q and primitive element alpha."""

    q: int = DEFAULT_PRIME
    alpha: int = DEFAULT_GENERATOR

    def validate(self) -> None:
        if not is_prime(self.q):
            raise ValueError(f"modulus {self.q} is not prime")
        if not 1 < self.alpha < self.q - 1:
            raise ValueError(f"generator {self.alpha} out of range (1, q-1)")
        # For a safe prime, every element outside {1, q-1} generates either
        # the full group or its large prime-order subgroup; both are fine.
        # Other moduli are accepted on the caller's authority (the order
        # can't be checked without factoring q-1).
        half = (self.q - 1) // 2
        if is_prime(half) and pow(self.alpha, 2, self.q) == 1:
            raise ValueError(f"{self.alpha} has trivial order in GF({self.q})*")


@dataclass(frozen=True)
class KeyPair:
    """Secret exponent and the matching public value alpha^x mod q."""

    x_secret: int
    y_public: int


@dataclass(frozen=True)
class SharedSecret:
    k: int


@dataclass(frozen=True)
class SymmetricKey:
    key: bytes


@dataclass(frozen=True)
class AuthTag:
    tag: bytes


@dataclass(frozen=True)
class Signature:
    signer: str
    sig: bytes


def dhke_keypair(params: DhkeParams, rng: Random) -> KeyPair:
    """Draw a secret exponent uniformly from [1, q-2] and derive its public value."""
    params.validate()
    x = rng.randrange(1, params.q - 1)
    return KeyPair(x_secret=x, y_public=pow(params.alpha, x, params.q))


def dhke_shared(peer_public: int, own_secret: int, params: DhkeParams) -> SharedSecret:
    """Combine the peer's public value with our secret exponent.

    Values in {0, 1, q-1} are rejected: they confine the result to a trivial
    subgroup regardless of the secret.
    """
    if not 1 < peer_public < params.q - 1:
        raise ValueError(f"peer public value {peer_public} out of range (1, q-1)")
    return SharedSecret(k=pow(peer_public, own_secret, params.q))


def derive_key(shared: SharedSecret, length: int = 32) -> SymmetricKey:
    """Hash the canonical big-endian encoding of the shared secret to a cipher key."""
    if not 16 <= length <= 32:
        raise ValueError("key length must be between 16 and 32 bytes")
    width = max(1, (shared.k.bit_length() + 7) // 8)
    digest = hashlib.sha256(shared.k.to_bytes(width, "big")).digest()
    return SymmetricKey(key=digest[:length])


def encrypt(plaintext: bytes, key: SymmetricKey) -> bytes:
    """AES-GCM with a synthetic nonce; identical inputs give identical output."""
    nonce = _hmac.new(key.key, b"nonce" + plaintext, hashlib.sha256).digest()[:AEAD_NONCE_BYTES]
    return nonce + AESGCM(key.key).encrypt(nonce, plaintext, None)


def decrypt(ciphertext: bytes, key: SymmetricKey) -> bytes:
    if len(ciphertext) < AEAD_NONCE_BYTES + AEAD_TAG_BYTES:
        raise ValueError("malformed ciphertext: shorter than nonce plus tag")
    nonce, body = ciphertext[:AEAD_NONCE_BYTES], ciphertext[AEAD_NONCE_BYTES:]
    try:
        return AESGCM(key.key).decrypt(nonce, body, None)
    except InvalidTag as exc:
        raise DecryptError("authentication failed") from exc


def auth_tag(message: bytes, key: SymmetricKey) -> AuthTag:
    return AuthTag(tag=_hmac.new(key.key, message, hashlib.sha256).digest())


def verify_tag(message: bytes, key: SymmetricKey, tag: AuthTag) -> bool:
    expected = _hmac.new(key.key, message, hashlib.sha256).digest()
    return _hmac.compare_digest(expected, tag.tag)


class SigningRegistry:
    """Per-identity Ed25519 keys, derived deterministically from registration seeds.

    Verification keys are public: any holder of the registry can verify any
    registered identity's signature (mirrors network-wide known credentials).
    """

    def __init__(self) -> None:
        self._private: dict[str, Ed25519PrivateKey] = {}
        self._public: dict[str, Ed25519PublicKey] = {}

    def register(self, identity: str, seed: bytes) -> None:
        raw = hashlib.sha256(b"signing-key:" + seed + identity.encode()).digest()
        private = Ed25519PrivateKey.from_private_bytes(raw)
        self._private[identity] = private
        self._public[identity] = private.public_key()

    def is_registered(self, identity: str) -> bool:
        return identity in self._private

    def sign(self, message: bytes, signer: str) -> Signature:
        if signer not in self._private:
            raise KeyError(f"unknown signer identity: {signer}")
        return Signature(signer=signer, sig=self._private[signer].sign(message))

    def verify(self, message: bytes, signature: Signature, signer: str) -> bool:
        if signature.signer != signer or signer not in self._public:
            return False
        try:
            self._public[signer].verify(signature.sig, message)
            return True
        except InvalidSignature:
            return False


def payload_digest(payload: bytes) -> bytes:
    """Digest used wherever large payloads are signed or tagged."""
    return hashlib.sha256(payload).digest()
