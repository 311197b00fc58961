"""プロトコルの公開パラメータと正しさの条件

ProtocolParams は1回の実行で使う全ての公開パラメータをまとめる pydantic モデル。
フィールド単位の範囲は Field で検査し、複数フィールドにまたがる条件は
rules() が RuleCheck のリストとして返す（verify-params の表示にも使う）。
require_valid() は重大度 error の条件が1つでも失敗すれば ParameterError を送出する。
"""

import hashlib
import logging
import math
from src._compat import StrEnum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from src.config.settings import Settings
from src.dkhprf.dprf import DprfParams
from src.errors import ParameterError
from src.protocol.committee import union_tail_bound
from src.protocol.opa_prime import dprf_rounding_floor, prime_codec
from src.ringmath.modulus import Modulus
from src.sharing.field import chunk_count
from src.sharing.shares import ShareParams
from src.shprg.codec import EncodeParams
from src.shprg.matrix import PrgParams

logger = logging.getLogger(__name__)


class Mode(StrEnum):
    LWR = "lwr"
    LWE = "lwe"
    PRIME_LWR = "prime_lwr"


class Security(StrEnum):
    SEMI_HONEST = "semi_honest"
    ACTIVE_ABORT = "active_abort"


class RuleCheck(BaseModel):
    """1つの条件の検査結果"""

    name: str
    passed: bool
    detail: str
    severity: Literal["error", "warning"] = "error"


class ProtocolParams(BaseModel):
    """公開パラメータ

    既定値は実験設定（λ=2048, p=2^53, m=50, r=34, ρ=16）に合わせている。
    """

    model_config = ConfigDict(frozen=True)

    mode: Mode = Mode.LWR
    security: Security = Security.SEMI_HONEST

    # クライアント
    n: int = Field(default=100, ge=1, description="1反復あたりの入力クライアント数")
    universe: int = Field(default=0, ge=0, description="全体のクライアント数 N（0 なら n と m·M の大きい方）")
    vec_len: int = Field(default=16, ge=1, description="入力ベクトル長 L")
    dropout: float = Field(default=0.0, ge=0.0, lt=1.0, description="クライアントの脱落率の上限 δ")

    # 委員会
    m: int = Field(default=50, ge=2)
    r: int = Field(default=34, ge=1)
    t: int = Field(default=17, ge=0)
    rho: int = Field(default=16, ge=1)
    groups: int = Field(default=1, ge=1, description="委員会グループ数 M")
    committee_dropout: float = Field(default=0.01, ge=0.0, lt=1.0)
    committee_corruption: float = Field(default=0.01, ge=0.0, lt=1.0)
    committee_failure_target: float = Field(default=1e-4, gt=0.0, lt=1.0)

    # モジュラスと PRG
    field_modulus: int = Field(default=2**127 - 1, ge=3)
    rounding_modulus: int = Field(default=2**53, ge=3)
    seed_dim: int = Field(default=2048, ge=1)
    kappa_s: int = Field(default=10, ge=0)
    lwe_eta: int = Field(default=2, ge=0)
    hash_twist: bool = False
    setup_seed: int = Field(default=0, ge=0)

    # OPA′
    dprf_dim: int = Field(default=4, ge=1)
    dprf_u: int | None = Field(default=None, ge=2)
    dprf_v: int | None = Field(default=None, ge=2)

    group_bits: int = Field(default=256, ge=64)

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "ProtocolParams":
        """Settings の既定値から組み立て、overrides で上書きする"""
        base = {
            "m": settings.committee_size,
            "r": settings.recon_threshold,
            "t": settings.corrupt_threshold,
            "rho": settings.pack_factor,
            "committee_dropout": settings.committee_dropout,
            "committee_corruption": settings.committee_corruption,
            "committee_failure_target": settings.committee_failure_target,
            "field_modulus": settings.field_modulus,
            "rounding_modulus": settings.rounding_modulus,
            "seed_dim": settings.seed_dim,
            "kappa_s": settings.kappa_s,
            "lwe_eta": settings.lwe_eta,
            "group_bits": settings.group_bits,
        }
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    # === 派生値 ===

    @property
    def big_n(self) -> int:
        return self.universe or max(self.n, self.m * self.groups)

    @property
    def q(self) -> Modulus:
        return Modulus(self.field_modulus, is_prime=True)

    @property
    def p(self) -> Modulus:
        return Modulus(self.rounding_modulus)

    @property
    def matrix_seed(self) -> bytes:
        return hashlib.sha256(b"OPA-setup" + self.setup_seed.to_bytes(8, "little")).digest()

    @property
    def beacon(self) -> bytes:
        return hashlib.sha256(b"OPA-beacon" + self.setup_seed.to_bytes(8, "little")).digest()

    @property
    def delta_fact(self) -> int:
        return math.factorial(self.m)

    @property
    def chunks(self) -> int:
        """メンバー1人が受け取るシードのシェア数 ⌈λ/ρ⌉"""
        return chunk_count(self.seed_dim, self.rho)

    @property
    def ct_modulus(self) -> int:
        """マスク済み入力の法"""
        if self.mode is Mode.LWE:
            return self.field_modulus
        if self.mode is Mode.PRIME_LWR:
            return self.dprf_params().v
        return self.rounding_modulus

    @property
    def active(self) -> bool:
        return self.security is Security.ACTIVE_ABORT

    def share_params(self) -> ShareParams:
        """シードのパック分散のパラメータ"""
        return ShareParams.packed(self.m, self.r, self.rho, field=self.q, kappa_s=self.kappa_s)

    def digest_share_params(self) -> ShareParams:
        """第2マスク用ダイジェストの通常の Shamir 分散"""
        return ShareParams(m=self.m, r=self.r, t=self.r - 1, field=self.q)

    def prg_params(self) -> PrgParams:
        return PrgParams(
            lambda_=self.seed_dim,
            big_l=self.vec_len,
            q=self.q,
            p=self.p,
            matrix_seed=self.matrix_seed,
            eta=self.lwe_eta,
        )

    def encode_params(self) -> EncodeParams:
        if self.mode is Mode.LWE:
            return EncodeParams.for_lwe(self.n, self.q, self.p)
        return EncodeParams.for_lwr(self.kappa_s, self.n, self.p)

    def dprf_moduli(self) -> tuple[int, int]:
        """(u, v)。未指定なら ⌊p/u⌋ と ⌊u/v⌋ の条件を満たす最大の 2 冪の比で決める"""
        delta = self.delta_fact
        u = self.dprf_u
        if u is None:
            floor = max(self.r * delta + self.r * delta * delta, self.n * delta)
            u = max(2, self.rounding_modulus >> floor.bit_length())
        v = self.dprf_v
        if v is None:
            v = max(2, u >> (delta * self.r).bit_length())
        return u, v

    def dprf_params(self) -> DprfParams:
        u, v = self.dprf_moduli()
        return DprfParams(
            rho_dim=self.dprf_dim,
            q=self.field_modulus,
            p=self.rounding_modulus,
            u=u,
            v=v,
            m=self.m,
            r=self.r,
            enforce_bounds=False,
        )

    # === 条件 ===

    def rules(self) -> list[RuleCheck]:
        """全ての正しさ・安全性の条件を評価する"""
        checks = [
            self._unique_set_rule(),
            self._committee_budget_rule(),
            self._tail_rule(),
            self._survivor_rule(),
            self._universe_rule(),
            self._moduli_rule(),
        ]
        if self.mode is Mode.PRIME_LWR:
            checks += self._prime_rules()
        else:
            checks += [
                self._packing_rule(),
                self._threshold_rule(),
                self._error_correction_rule(),
                self._encode_rule(),
            ]
            if self.mode is Mode.LWE:
                checks.append(self._lwe_error_rule())
        return checks

    def failures(self) -> list[RuleCheck]:
        return [c for c in self.rules() if not c.passed and c.severity == "error"]

    def require_valid(self) -> "ProtocolParams":
        failures = self.failures()
        if failures:
            for check in failures:
                logger.warning("parameter rule %s failed: %s", check.name, check.detail)
            raise ParameterError("; ".join(f"{c.name}: {c.detail}" for c in failures))
        return self

    def _unique_set_rule(self) -> RuleCheck:
        passed = 2 * self.r > self.m + self.t
        return RuleCheck(
            name="unique_set",
            passed=passed,
            detail=f"r={self.r} vs (m+t)/2={(self.m + self.t) / 2}",
        )

    def _committee_budget_rule(self) -> RuleCheck:
        total = self.committee_dropout + self.committee_corruption
        return RuleCheck(
            name="committee_budget",
            passed=total < 1 / 3,
            detail=f"delta_C+eta_C={total:.4f} vs 1/3",
        )

    def _tail_rule(self) -> RuleCheck:
        d = 1 / 3 - self.committee_dropout - self.committee_corruption
        if d <= 0:
            return RuleCheck(name="committee_tail", passed=False, detail="no slack below 1/3", severity="warning")
        bound = union_tail_bound(self.m, min(d, 0.999), self.groups)
        return RuleCheck(
            name="committee_tail",
            passed=bound <= self.committee_failure_target,
            detail=f"Pr[committee over 1/3] <= {bound:.3e} (target {self.committee_failure_target:.0e})",
            severity="warning",
        )

    def _survivor_rule(self) -> RuleCheck:
        survivors = math.floor((1 - self.committee_dropout) * self.m)
        return RuleCheck(
            name="committee_survivors",
            passed=self.r <= survivors,
            detail=f"r={self.r} vs floor((1-delta_C)m)={survivors}",
        )

    def _universe_rule(self) -> RuleCheck:
        need = self.m * self.groups
        return RuleCheck(name="universe", passed=self.big_n >= need, detail=f"N={self.big_n} vs m*M={need}")

    def _moduli_rule(self) -> RuleCheck:
        try:
            self.q
        except ParameterError as exc:
            return RuleCheck(name="moduli", passed=False, detail=str(exc))
        passed = self.rounding_modulus < self.field_modulus and self.m + self.rho < self.field_modulus
        return RuleCheck(
            name="moduli",
            passed=passed,
            detail=f"p={self.rounding_modulus} < q={self.field_modulus}, q prime",
        )

    def _packing_rule(self) -> RuleCheck:
        need = math.ceil(3 * self.rho / 2)
        return RuleCheck(name="packing", passed=self.m >= need, detail=f"m={self.m} vs ceil(3rho/2)={need}")

    def _threshold_rule(self) -> RuleCheck:
        passed = self.t <= self.r - self.rho and self.r <= self.m
        return RuleCheck(
            name="thresholds",
            passed=passed,
            detail=f"t={self.t} <= r-rho={self.r - self.rho}, r={self.r} <= m={self.m}",
        )

    def _error_correction_rule(self) -> RuleCheck:
        lhs = 2 * self.m * self.committee_corruption
        rhs = (1 - self.committee_dropout) * self.m - self.rho + 1
        return RuleCheck(
            name="error_correction",
            passed=lhs < rhs,
            detail=f"2m*eta_C={lhs:.2f} vs (1-delta_C)m-rho+1={rhs:.2f}",
        )

    def _encode_rule(self) -> RuleCheck:
        try:
            ep = self.encode_params()
        except ParameterError as exc:
            return RuleCheck(name="encode_budget", passed=False, detail=str(exc))
        per_client = ep.max_summand()
        return RuleCheck(
            name="encode_budget",
            passed=per_client >= 1,
            detail=f"per-client input <= {per_client} ({ep.input_bits()} bits), delta={ep.delta}",
        )

    def _lwe_error_rule(self) -> RuleCheck:
        delta = self.field_modulus // self.rounding_modulus
        total = self.n * (2 * self.lwe_eta + 1)
        return RuleCheck(
            name="lwe_error_budget",
            passed=2 * total < delta,
            detail=f"n(2eta+1)={total} vs delta/2={delta // 2}",
        )

    def _prime_rules(self) -> list[RuleCheck]:
        u, v = self.dprf_moduli()
        delta = self.delta_fact
        checks = [
            RuleCheck(
                name="single_group",
                passed=self.groups == 1,
                detail=f"M={self.groups} (keys are shared with one committee)",
            ),
            RuleCheck(
                name="prime_thresholds",
                passed=self.r <= self.m and 2 * self.r > self.m + self.t,
                detail=f"r={self.r}, m={self.m}",
            ),
            RuleCheck(
                name="prime_security",
                passed=not self.active,
                detail=f"security={self.security} (DPRF masks carry no sharing proofs)",
            ),
        ]
        if not self.rounding_modulus > u > v:
            checks.append(RuleCheck(name="dprf_moduli", passed=False, detail=f"need p > u={u} > v={v}"))
            return checks
        dp = self.dprf_params()
        floor = dprf_rounding_floor(dp, self.n)
        checks.append(
            RuleCheck(
                name="dprf_rounding",
                passed=self.rounding_modulus // u > floor,
                detail=f"floor(p/u)={self.rounding_modulus // u} vs max(r*D+r*D^2, n*D)={floor}",
            )
        )
        checks.append(
            RuleCheck(
                name="dprf_combine",
                passed=u // v > delta * self.r,
                detail=f"floor(u/v)={u // v} vs D*r={delta * self.r}",
            )
        )
        codec = prime_codec(dp, self.n)
        checks.append(
            RuleCheck(
                name="prime_budget",
                passed=codec.max_aggregate >= self.n,
                detail=f"sum of inputs <= {codec.max_aggregate} (W={codec.weight}, c={codec.offset})",
            )
        )
        return checks
