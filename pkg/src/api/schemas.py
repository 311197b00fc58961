"""APIスキーマ定義

FastAPIのリクエスト/レスポンスの型をPydanticモデルで定義する。
公開パラメータは ProtocolParams をそのまま入れ子にする。
"""

from pydantic import BaseModel, Field

from src.protocol.params import ProtocolParams, RuleCheck
from src.sim.metrics import MetricsRecord


# === シナリオ（検査・実行の共通入力） ===

class ScenarioRequest(BaseModel):
    """パラメータ検査・セッション実行のリクエスト"""

    params: ProtocolParams = Field(
        default_factory=ProtocolParams,
        description="公開パラメータ（省略したフィールドは既定値）",
    )
    iterations: int = Field(default=1, ge=1, le=10, description="反復回数")
    client_dropout: float = Field(default=0.0, ge=0.0, lt=1.0, description="脱落させるクライアントの割合")
    member_dropout: int = Field(default=0, ge=0, description="脱落させる委員会メンバー数")
    adversary: str = Field(default="honest", description="故障注入の名前")
    seed: int = Field(default=0, description="乱数シード")
    null_cipher: bool = Field(default=True, description="補助情報の暗号化を恒等変換にする")


# === パラメータ検査 ===

class VerifyParamsResponse(BaseModel):
    ok: bool = Field(..., description="重大度 error の条件が全て満たされたか")
    rules: list[RuleCheck] = Field(default_factory=list)


# === セッション実行 ===

class IterationOutcome(BaseModel):
    """1反復の結果"""

    iteration: int
    aggregate: list[int] | None = Field(default=None, description="C 上の入力の和（中断時は null）")
    abort: str | None = Field(default=None, description="中断理由")
    abort_detail: str = ""
    online: list[int] = Field(default_factory=list)
    metrics: MetricsRecord


class SessionResponse(BaseModel):
    outcomes: list[IterationOutcome]
    all_aborted: bool


# === ヘルスチェック ===

class HealthResponse(BaseModel):
    """ヘルスチェックレスポンス"""

    status: str = Field(..., description="全体のステータス")
    defaults_valid: bool = Field(..., description="既定パラメータが全ての条件を満たすか")
    committee_size: int
    recon_threshold: int
    pack_factor: int
    seed_dim: int
