"""公開行列 A と第2マスクの導出

A は 32 バイトの matrix_seed から XOF で決定的に展開する。
出力の各座標 j について λ 次元の行ベクトル a_j を持ち、
LWR では ⌊⟨a_j, s⟩⌋_p、LWE では ⟨a_j, s⟩ + e_j を計算する
（A⊤·s と A·s は同じ行ベクトル表現で扱える）。
"""

import hashlib
from dataclasses import dataclass
from functools import lru_cache

from src.errors import ParameterError
from src.ringmath.modulus import Modulus
from src.shprg.xof import TAG_MASK2, TAG_MATRIX, TAG_TWEAK, field_bytes, sample_mod, xof_bytes


@dataclass(frozen=True)
class PrgParams:
    """SHPRGの公開パラメータ

    Attributes:
        lambda_: シード次元 λ
        big_l: 出力長 L
        q: シード側モジュラス
        p: 丸め先モジュラス（LWRのみ使用）
        matrix_seed: A を導出する32バイトの公開シード
        eta: LWE誤差の中心二項分布パラメータ（誤差の上界 B = 2η+1）
    """

    lambda_: int
    big_l: int
    q: Modulus
    p: Modulus
    matrix_seed: bytes
    eta: int = 1

    def __post_init__(self):
        if self.lambda_ <= 0 or self.big_l <= 0:
            raise ParameterError("lambda and L must be positive")
        if self.p.value >= self.q.value:
            raise ParameterError("p must be smaller than q")
        if len(self.matrix_seed) != 32:
            raise ParameterError("matrix_seed must be 32 bytes")
        if self.eta < 0:
            raise ParameterError("eta must be non-negative")

    @property
    def error_bound(self) -> int:
        return 2 * self.eta + 1


@dataclass(frozen=True)
class PublicMatrix:
    """公開行列。rows[j] が出力座標 j の λ 次元ベクトル"""

    rows: tuple[tuple[int, ...], ...]
    modulus: int
    seed: bytes

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0


def derive_matrix(params: PrgParams, seed: bytes | None = None) -> PublicMatrix:
    """matrix_seed（または調整済みシード）から A を導出する"""
    seed = params.matrix_seed if seed is None else seed
    rows = _derive_rows(seed, params.lambda_, params.big_l, params.q.value)
    return PublicMatrix(rows=rows, modulus=params.q.value, seed=seed)


@lru_cache(maxsize=8)
def _derive_rows(seed: bytes, lambda_: int, big_l: int, q: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(sample_mod(TAG_MATRIX, [seed, j.to_bytes(8, "little")], q, lambda_))
        for j in range(big_l)
    )


def tweak_matrix_seed(matrix_seed: bytes, label: int, model_digest: bytes) -> bytes:
    """反復番号とモデルのハッシュで matrix_seed を調整する

    サーバがクライアントごとに異なるモデルを配った場合、各クライアントの A が
    食い違いシード準同型が崩れるため、特定クライアントの寄与を分離できなくなる。
    """
    return xof_bytes(TAG_TWEAK, [matrix_seed, label.to_bytes(8, "little"), model_digest], 32)


def model_digest(model_bytes: bytes) -> bytes:
    return hashlib.sha3_256(model_bytes).digest()


def second_mask(dig: int, big_l: int, p: int, q: int | None = None) -> list[int]:
    """能動的攻撃者向けの第2マスク mask' = H(dig) を Z_p^L に展開する

    Args:
        dig: ダイジェスト種（Shamir体の元として共有される値）
        big_l: 出力長 L
        p: 出力のモジュラス
        q: dig のバイト幅を決めるモジュラス（省略時は16バイト）
    """
    dig_bytes = field_bytes(dig, q) if q is not None else dig.to_bytes(16, "little")
    return sample_mod(TAG_MASK2, [dig_bytes], p, big_l)
