"""委員会メンバー宛ての公開鍵暗号

HybridCipher: X25519 の一時鍵で共有鍵を作り、HKDF-SHA256 で AES-256-GCM の鍵を導出する。
    暗号文 = 一時公開鍵(32B) ∥ nonce(12B) ∥ AES-GCM 暗号文(タグ付き)
    関連データ（反復番号 ℓ とクライアント番号 i）は GCM の AAD として束縛する。
NullCipher: 恒等変換。鍵と関連データの一致だけを検査する決定的なテスト用バックエンド。

どちらも乱数は呼び出し側の random.Random から取るので、シードが同じなら暗号文も同じ。
シード付きの random.Random は再現可能なシミュレーション専用で、rng を省略すると
鍵と nonce は secrets から取る。
"""

import hashlib
import random
import secrets
from dataclasses import dataclass
from typing import Protocol

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from src.errors import DecryptionError

HKDF_INFO_AUX = b"OPA-aux-encryption"
_KEY_SIZE = 32
_NONCE_SIZE = 12


@dataclass(frozen=True)
class Keypair:
    """32バイトの生の鍵ペア"""

    public: bytes
    secret: bytes


def associated_data(label: int, client: int) -> bytes:
    """AD = ℓ(8B LE) ∥ i(4B LE)"""
    return label.to_bytes(8, "little") + client.to_bytes(4, "little")


class PkeBackend(Protocol):
    def keygen(self, rng: random.Random | None = None) -> Keypair: ...

    def seal(self, public: bytes, ad: bytes, payload: bytes, rng: random.Random | None = None) -> bytes: ...

    def open(self, keypair: Keypair, ad: bytes, ciphertext: bytes) -> bytes: ...


def _random_bytes(rng: random.Random | None, size: int) -> bytes:
    return secrets.token_bytes(size) if rng is None else rng.randbytes(size)


def _public_bytes(private: X25519PrivateKey) -> bytes:
    return private.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)


def _derive_key(shared: bytes, eph_public: bytes, recipient: bytes) -> bytes:
    return HKDF(
        algorithm=SHA256(),
        length=_KEY_SIZE,
        salt=None,
        info=HKDF_INFO_AUX + eph_public + recipient,
    ).derive(shared)


class HybridCipher:
    """X25519 + HKDF-SHA256 + AES-256-GCM"""

    def keygen(self, rng: random.Random | None = None) -> Keypair:
        secret = _random_bytes(rng, _KEY_SIZE)
        private = X25519PrivateKey.from_private_bytes(secret)
        return Keypair(public=_public_bytes(private), secret=secret)

    def seal(self, public: bytes, ad: bytes, payload: bytes, rng: random.Random | None = None) -> bytes:
        eph = X25519PrivateKey.from_private_bytes(_random_bytes(rng, _KEY_SIZE))
        eph_public = _public_bytes(eph)
        shared = eph.exchange(X25519PublicKey.from_public_bytes(public))
        key = _derive_key(shared, eph_public, public)
        nonce = _random_bytes(rng, _NONCE_SIZE)
        return eph_public + nonce + AESGCM(key).encrypt(nonce, payload, ad)

    def open(self, keypair: Keypair, ad: bytes, ciphertext: bytes) -> bytes:
        if len(ciphertext) < _KEY_SIZE + _NONCE_SIZE + 16:
            raise DecryptionError("ciphertext too short")
        eph_public = ciphertext[:_KEY_SIZE]
        nonce = ciphertext[_KEY_SIZE : _KEY_SIZE + _NONCE_SIZE]
        body = ciphertext[_KEY_SIZE + _NONCE_SIZE :]
        try:
            private = X25519PrivateKey.from_private_bytes(keypair.secret)
            shared = private.exchange(X25519PublicKey.from_public_bytes(eph_public))
            key = _derive_key(shared, eph_public, keypair.public)
            return AESGCM(key).decrypt(nonce, body, ad)
        except (InvalidTag, ValueError) as exc:
            raise DecryptionError("aux ciphertext failed to open") from exc


class NullCipher:
    """暗号化しないバックエンド

    公開鍵は sha256(秘密鍵)。暗号文 = 公開鍵 ∥ len(AD) ∥ AD ∥ payload で、
    開くときに鍵と AD の一致を検査する。
    """

    def keygen(self, rng: random.Random | None = None) -> Keypair:
        secret = _random_bytes(rng, _KEY_SIZE)
        return Keypair(public=hashlib.sha256(secret).digest(), secret=secret)

    def seal(self, public: bytes, ad: bytes, payload: bytes, rng: random.Random | None = None) -> bytes:
        return public + len(ad).to_bytes(2, "little") + ad + payload

    def open(self, keypair: Keypair, ad: bytes, ciphertext: bytes) -> bytes:
        if hashlib.sha256(keypair.secret).digest() != keypair.public:
            raise DecryptionError("keypair is inconsistent")
        if ciphertext[:_KEY_SIZE] != keypair.public:
            raise DecryptionError("ciphertext is addressed to another key")
        ad_len = int.from_bytes(ciphertext[_KEY_SIZE : _KEY_SIZE + 2], "little")
        start = _KEY_SIZE + 2
        if ciphertext[start : start + ad_len] != ad:
            raise DecryptionError("associated data mismatch")
        return ciphertext[start + ad_len :]


def make_cipher(null_cipher: bool) -> PkeBackend:
    return NullCipher() if null_cipher else HybridCipher()
