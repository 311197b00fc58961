"""APIルート定義

各エンドポイントの処理ロジックを定義する。
セッション実行は同期処理なので、小さなパラメータに制限する。
"""

from fastapi import APIRouter, Depends, HTTPException
from pydantic import ValidationError

from src.api.schemas import (
    HealthResponse,
    IterationOutcome,
    ScenarioRequest,
    SessionResponse,
    VerifyParamsResponse,
)
from src.config.settings import Settings, get_settings
from src.errors import ParameterError
from src.protocol.params import ProtocolParams
from src.sim.latency import LatencyModel
from src.sim.report import report_ok, verify_params
from src.sim.session import ScenarioConfig, run_session

router = APIRouter()

# 1リクエストで実行できるセッションの規模の上限
MAX_CLIENTS = 200
MAX_SEED_DIM = 512
MAX_VEC_LEN = 256


@router.get("/health", response_model=HealthResponse)
def health_check(settings: Settings = Depends(get_settings)):
    """既定パラメータの要約と検査結果を返す"""
    params = ProtocolParams.from_settings(settings)
    valid = report_ok(verify_params(params))
    return HealthResponse(
        status="healthy" if valid else "degraded",
        defaults_valid=valid,
        committee_size=params.m,
        recon_threshold=params.r,
        pack_factor=params.rho,
        seed_dim=params.seed_dim,
    )


@router.post("/verify-params", response_model=VerifyParamsResponse)
def verify(request: ScenarioRequest):
    """全ての条件を評価する（失敗してもステータスは200）"""
    checks = verify_params(request.params)
    return VerifyParamsResponse(ok=report_ok(checks), rules=checks)


@router.post("/sessions", response_model=SessionResponse)
def run(request: ScenarioRequest, settings: Settings = Depends(get_settings)):
    """小さなセッションを実行して反復ごとの結果を返す"""
    params = request.params
    if params.n > MAX_CLIENTS or params.seed_dim > MAX_SEED_DIM or params.vec_len > MAX_VEC_LEN:
        raise HTTPException(
            status_code=400,
            detail=f"セッションが大きすぎます（n ≤ {MAX_CLIENTS}, λ ≤ {MAX_SEED_DIM}, L ≤ {MAX_VEC_LEN}）",
        )
    try:
        cfg = ScenarioConfig(
            params=params,
            iterations=request.iterations,
            client_dropout=request.client_dropout,
            member_dropout=request.member_dropout,
            adversary=request.adversary,
            seed=request.seed,
            null_cipher=request.null_cipher,
            latency=LatencyModel.from_settings(settings, rng_seed=request.seed),
        )
        session = run_session(cfg)
    except (ParameterError, ValidationError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc

    outcomes = [
        IterationOutcome(
            iteration=result.label,
            aggregate=list(result.aggregate) if result.aggregate is not None else None,
            abort=str(result.abort.reason) if result.abort else None,
            abort_detail=result.abort.detail if result.abort else "",
            online=list(result.online),
            metrics=record,
        )
        for result, record in zip(session.results, session.records)
    ]
    return SessionResponse(outcomes=outcomes, all_aborted=session.all_aborted)
