"""遅延モデル

リンク (src, dst) ごとの基本遅延を [base_min_us, base_max_us] から一様に決め、
メッセージごとに ±jitter_fraction の乗法的なジッタを掛ける。
基本遅延はシードとリンク名から決定的に決まる。
"""

import hashlib
import random

from pydantic import BaseModel, Field, model_validator

from src.config.settings import Settings


class LatencyModel(BaseModel):
    """ネットワーク遅延のモデル（単位はマイクロ秒）"""

    base_min_us: float = Field(default=21.0, ge=0.0)
    base_max_us: float = Field(default=100.0, ge=0.0)
    jitter_fraction: float = Field(default=0.2, ge=0.0, lt=1.0)
    rng_seed: int = 0

    @model_validator(mode="after")
    def _check_range(self) -> "LatencyModel":
        if self.base_min_us > self.base_max_us:
            raise ValueError("base_min_us must not exceed base_max_us")
        return self

    @classmethod
    def from_settings(cls, settings: Settings, rng_seed: int = 0) -> "LatencyModel":
        return cls(
            base_min_us=settings.latency_min_us,
            base_max_us=settings.latency_max_us,
            jitter_fraction=settings.jitter_fraction,
            rng_seed=rng_seed,
        )

    @classmethod
    def zero(cls) -> "LatencyModel":
        return cls(base_min_us=0.0, base_max_us=0.0, jitter_fraction=0.0)

    def link_base(self, src: str, dst: str) -> float:
        """リンクの基本遅延"""
        digest = hashlib.sha256(f"{self.rng_seed}|{src}|{dst}".encode()).digest()
        return random.Random(digest).uniform(self.base_min_us, self.base_max_us)

    def delay(self, src: str, dst: str, rng: random.Random) -> float:
        base = self.link_base(src, dst)
        if self.jitter_fraction == 0.0:
            return base
        return base * (1.0 + rng.uniform(-self.jitter_fraction, self.jitter_fraction))
