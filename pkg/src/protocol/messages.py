"""プロトコルメッセージとワイヤ形式

フレーム: 種別(1B) ∥ ℓ(8B LE) ∥ 送信者(4B LE) ∥ 長さ(4B LE) ∥ 本体
    0x00 開始、0x1A マスク済み入力、0x1B 暗号化された補助情報、0x02 委員会の結合結果
体の元は16バイト（それ以上の幅の体ではその幅）のリトルエンディアン。

プロトコルが定義する中断は例外ではなく Abort の値として IterationResult に入れる。
"""

import hashlib
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import IntEnum

from src._compat import StrEnum
from src.errors import DecodeError, ParameterError
from src.shprg.xof import field_bytes
from src.verify.group import SchnorrGroup
from src.verify.proof import SharingProof, serialize_proof


class MessageType(IntEnum):
    BEGIN = 0x00
    MASKED_INPUT = 0x1A
    AUX_CIPHERTEXT = 0x1B
    COMMITTEE_COMBINED = 0x02


class AbortReason(StrEnum):
    TOO_MANY_DROPOUTS = "too_many_dropouts"
    TOO_FEW_COMMITTEE = "too_few_committee"
    MALICIOUS_CLIENT = "malicious_client"
    EQUIVOCATION = "equivocation"
    COMMITTEE_COMPLAINT = "committee_complaint"


@dataclass(frozen=True)
class Abort:
    reason: AbortReason
    detail: str = ""


@dataclass(frozen=True)
class IterationId:
    """反復の識別子

    Attributes:
        label: 反復番号 ℓ（セッション内で単調増加）
        model_digest: 行列シードの調整に使うモデルのハッシュ（空なら調整しない）
    """

    label: int
    model_digest: bytes = b""

    def __post_init__(self):
        if not 0 <= self.label < 1 << 64:
            raise ParameterError("label must fit in 8 bytes")

    @property
    def label_bytes(self) -> bytes:
        return self.label.to_bytes(8, "little")


# === フレーム ===

@dataclass(frozen=True)
class Frame:
    kind: MessageType
    label: int
    sender: int
    body: bytes

    def encode(self) -> bytes:
        return (
            bytes([self.kind])
            + self.label.to_bytes(8, "little")
            + self.sender.to_bytes(4, "little")
            + len(self.body).to_bytes(4, "little")
            + self.body
        )


_HEADER = 17


def decode_frame(data: bytes, offset: int = 0) -> tuple[Frame, int]:
    """1フレームを読み、(Frame, 次のオフセット) を返す"""
    if len(data) - offset < _HEADER:
        raise DecodeError("truncated frame header")
    try:
        kind = MessageType(data[offset])
    except ValueError as exc:
        raise DecodeError(f"unknown message type {data[offset]:#04x}") from exc
    label = int.from_bytes(data[offset + 1 : offset + 9], "little")
    sender = int.from_bytes(data[offset + 9 : offset + 13], "little")
    length = int.from_bytes(data[offset + 13 : offset + 17], "little")
    body = data[offset + _HEADER : offset + _HEADER + length]
    if len(body) != length:
        raise DecodeError("truncated frame body")
    return Frame(kind, label, sender, body), offset + _HEADER + length


def decode_frames(data: bytes) -> list[Frame]:
    frames = []
    offset = 0
    while offset < len(data):
        frame, offset = decode_frame(data, offset)
        frames.append(frame)
    return frames


def pack_ints(values: Sequence[int], modulus: int) -> bytes:
    """個数(4B LE) + 固定幅の値"""
    return len(values).to_bytes(4, "little") + b"".join(field_bytes(v, modulus) for v in values)


def unpack_ints(data: bytes, modulus: int, offset: int = 0) -> tuple[tuple[int, ...], int]:
    width = len(field_bytes(0, modulus))
    if len(data) - offset < 4:
        raise DecodeError("truncated vector header")
    count = int.from_bytes(data[offset : offset + 4], "little")
    offset += 4
    end = offset + count * width
    if len(data) < end:
        raise DecodeError("truncated vector body")
    values = tuple(
        int.from_bytes(data[k : k + width], "little") for k in range(offset, end, width)
    )
    if any(v >= modulus for v in values):
        raise DecodeError("vector entry is not canonical")
    return values, end


# === 補助情報（委員会メンバー宛ての平文） ===

@dataclass(frozen=True)
class AuxPayload:
    """メンバー j 宛ての補助情報

    Attributes:
        label: 反復番号 ℓ
        client: 送信クライアント i
        values: シードのチャンクごとのシェア（OPA′ では DPRF の部分評価）
        dig_share: 第2マスク用ダイジェストのシェア（能動的安全性モードのみ）
    """

    label: int
    client: int
    values: tuple[int, ...]
    dig_share: int | None = None

    def serialize(self, modulus: int) -> bytes:
        head = self.label.to_bytes(8, "little") + self.client.to_bytes(4, "little")
        if self.dig_share is None:
            tail = b"\x00"
        else:
            tail = b"\x01" + field_bytes(self.dig_share, modulus)
        return head + pack_ints(self.values, modulus) + tail

    @classmethod
    def deserialize(cls, data: bytes, modulus: int) -> "AuxPayload":
        if len(data) < 12:
            raise DecodeError("truncated aux payload")
        label = int.from_bytes(data[:8], "little")
        client = int.from_bytes(data[8:12], "little")
        values, offset = unpack_ints(data, modulus, 12)
        if offset >= len(data):
            raise DecodeError("missing digest flag")
        dig_share = None
        if data[offset] == 1:
            width = len(field_bytes(0, modulus))
            raw = data[offset + 1 : offset + 1 + width]
            if len(raw) != width:
                raise DecodeError("truncated digest share")
            dig_share = int.from_bytes(raw, "little")
        return cls(label=label, client=client, values=values, dig_share=dig_share)


# === ロールごとのメッセージ ===

@dataclass(frozen=True)
class ClientMessage:
    """クライアント i が1回だけ送るメッセージ

    Attributes:
        client: クライアント番号
        label: 反復番号
        ct: マスク済み入力
        aux_ciphertexts: メンバー 1..m 宛ての暗号文（添字 j-1）
        proofs: チャンクごとの分散の証明（能動的安全性モードのみ）
    """

    client: int
    label: int
    ct: tuple[int, ...]
    aux_ciphertexts: tuple[bytes, ...]
    proofs: tuple[SharingProof, ...] = ()

    def commitments_for(self, member: int) -> tuple[int, ...]:
        """メンバー j のシェアに対応するチャンクごとのコミットメント

        証明の評価点は（秘密の位置 ρ 個, 1..m）の順に並ぶ。
        """
        if not self.proofs:
            return ()
        rho = len(self.proofs[0].commitments) - len(self.aux_ciphertexts)
        return tuple(p.commitments[rho + member - 1] for p in self.proofs)

    def frames(self, ct_modulus: int, group: SchnorrGroup | None = None) -> list[Frame]:
        """1a（マスク済み入力 + 証明）と m 個の 1b フレーム"""
        body = pack_ints(self.ct, ct_modulus)
        if self.proofs and group is not None:
            body += len(self.proofs).to_bytes(4, "little")
            body += b"".join(serialize_proof(p, group) for p in self.proofs)
        out = [Frame(MessageType.MASKED_INPUT, self.label, self.client, body)]
        out += [
            Frame(MessageType.AUX_CIPHERTEXT, self.label, self.client, ciphertext)
            for ciphertext in self.aux_ciphertexts
        ]
        return out

    def wire_size(self, ct_modulus: int, group: SchnorrGroup | None = None) -> int:
        return sum(len(f.encode()) for f in self.frames(ct_modulus, group))


def view_digest(online: Iterable[int]) -> bytes:
    """オンライン集合 C のダイジェスト（昇順の 4B LE 連結の SHA-256）"""
    return hashlib.sha256(b"".join(i.to_bytes(4, "little") for i in sorted(online))).digest()


@dataclass(frozen=True)
class CommitteeMessage:
    """委員会メンバー j が1回だけ送る返信

    Attributes:
        member: メンバー番号（1..m）
        label: 反復番号
        aux: チャンクごとのシェアの和（OPA′ では u に丸めた部分評価）
        dig_shares: (クライアント, ダイジェストのシェア) の組（能動的安全性モード）
        view: このメンバーが受け取ったオンライン集合のダイジェスト
        complaint: 検査に失敗した場合の中断理由
        group: 所属する委員会グループ
    """

    member: int
    label: int
    aux: tuple[int, ...]
    view: bytes
    dig_shares: tuple[tuple[int, int], ...] = ()
    complaint: Abort | None = None
    group: int = 0

    def frame(self, modulus: int) -> Frame:
        body = self.view + pack_ints(self.aux, modulus)
        body += len(self.dig_shares).to_bytes(4, "little")
        for client, share in self.dig_shares:
            body += client.to_bytes(4, "little") + field_bytes(share, modulus)
        body += b"\x01" if self.complaint is not None else b"\x00"
        return Frame(MessageType.COMMITTEE_COMBINED, self.label, self.member, body)

    def wire_size(self, modulus: int) -> int:
        return len(self.frame(modulus).encode())


@dataclass
class IterationResult:
    """1反復の結果

    Attributes:
        label: 反復番号
        aggregate: オンライン集合上の入力の和（中断時は None）
        abort: 中断理由
        online: オンライン集合 C
        metrics: ロールごとの計測値
    """

    label: int
    aggregate: tuple[int, ...] | None = None
    abort: Abort | None = None
    online: tuple[int, ...] = ()
    metrics: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.abort is None and self.aggregate is not None
