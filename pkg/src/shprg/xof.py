"""拡張出力ハッシュ（XOF）によるサンプリング

SHAKE256 の出力を ⌈log2(modulus)/8⌉ バイトずつ切り出し、
上位ビットをマスクして modulus 未満のものだけ採用する（棄却サンプリング）。
バイト配置はリトルエンディアンで固定し、実行環境によらず同じ値を返す。
"""

import hashlib
from collections.abc import Iterable

# ドメインタグ（用途ごとに出力を分離する）
TAG_MATRIX = b"OPA-A"
TAG_MASK2 = b"OPA-MASK2"
TAG_TWEAK = b"OPA-TWEAK"
TAG_DPRF = b"OPA-DPRF-H"
TAG_SCRAPE = b"OPA-SCRAPE-M"
TAG_CHALLENGE = b"OPA-FS-CHAL"
TAG_BEACON = b"OPA-BEACON"


def xof_bytes(tag: bytes, parts: Iterable[bytes], length: int) -> bytes:
    """タグ付き・長さ接頭辞付きで連結した入力の SHAKE256 出力"""
    h = hashlib.shake_256()
    h.update(len(tag).to_bytes(2, "little") + tag)
    for part in parts:
        h.update(len(part).to_bytes(4, "little") + part)
    return h.digest(length)


def sample_mod(tag: bytes, parts: Iterable[bytes], modulus: int, count: int) -> list[int]:
    """[0, modulus) の一様な値を count 個、決定的に生成する"""
    parts = list(parts)
    bits = max(1, (modulus - 1).bit_length())
    width = (bits + 7) // 8
    mask = (1 << bits) - 1
    # SHAKEは出力長を伸ばしても先頭が変わらないので、足りなければ長さを倍にして引き直す
    length = width * (count + count // 2 + 8)
    while True:
        stream = xof_bytes(tag, parts, length)
        values = []
        for offset in range(0, length - width + 1, width):
            candidate = int.from_bytes(stream[offset : offset + width], "little") & mask
            if candidate < modulus:
                values.append(candidate)
                if len(values) == count:
                    return values
        length *= 2


def field_bytes(value: int, modulus: int) -> bytes:
    """体の元の固定幅リトルエンディアン表現（最低16バイト）"""
    width = max(16, (modulus.bit_length() + 7) // 8)
    return value.to_bytes(width, "little")
