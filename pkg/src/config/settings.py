"""アプリケーション設定モジュール

pydantic-settingsを使い、環境変数と.envファイルから設定を読み込む。
プロトコルの既定パラメータ（モジュラス、委員会サイズ、閾値など）と
シミュレータ・ログの設定を一元管理する。

環境変数は OPA_ プレフィックス付きで上書きできる（例: OPA_COMMITTEE_SIZE=20）。
"""

import logging
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """プロトコル全体の既定設定を管理するクラス

    ここで定義するのは「既定値」のみ。1回の実行で使う公開パラメータは
    ProtocolParams.from_settings() でこの値から組み立てる。
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="OPA_",
    )

    # === モジュラス ===
    # Shamir秘密分散の体とLWRの q を兼ねる。2^127-1 はメルセンヌ素数
    field_modulus: int = 2**127 - 1
    # 丸め先のモジュラス p
    rounding_modulus: int = 2**53

    # === SHPRG ===
    # シード次元 λ
    seed_dim: int = 2048
    # 統計的安全パラメータ。p=2^53 のもとでメッセージ空間を残すため小さめに取る
    kappa_s: int = 10
    # LWEモードの中心二項分布パラメータ η
    lwe_eta: int = 2

    # === 委員会 ===
    committee_size: int = 50
    recon_threshold: int = 34
    corrupt_threshold: int = 17
    pack_factor: int = 16
    committee_dropout: float = 0.01
    committee_corruption: float = 0.01
    # 委員会の汚染率が 1/3 を超える確率の許容上限
    committee_failure_target: float = 1e-4

    # === 検証（Schnorr群） ===
    group_bits: int = 256

    # === シミュレータ ===
    # 基本遅延（マイクロ秒）。ローカル配置の端末を想定した範囲
    latency_min_us: float = 21.0
    latency_max_us: float = 100.0
    jitter_fraction: float = 0.2
    metrics_dir: str = "./data/metrics"
    # Trueにすると公開鍵暗号を恒等変換（関連データ検査のみ）に差し替える
    null_cipher: bool = False

    log_level: str = "INFO"

    def configure_logging(self) -> None:
        """ルートロガーを log_level で初期化する（CLI・スクリプト用）"""
        logging.basicConfig(
            level=getattr(logging, self.log_level.upper(), logging.INFO),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )


# lru_cacheでSettingsインスタンスをキャッシュ（シングルトン）
# FastAPIのDepends(get_settings)でも使用できる
@lru_cache
def get_settings() -> Settings:
    """Settingsのシングルトンインスタンスを返す"""
    return Settings()
