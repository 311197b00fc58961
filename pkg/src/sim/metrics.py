"""計測値の記録と出力

MetricsRecord は1反復分の計測値。emit_metrics は JSON（正準形、sort_keys）か
CSV で書き出し、どちらにもスキーマのバージョンと設定のエコーを含める。
CSV では設定を先頭のコメント行（# config: {...}）に置く。
"""

import csv
import json
import logging
from collections.abc import Sequence
from src._compat import StrEnum
from pathlib import Path
from typing import Any

from pydantic import BaseModel

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class MetricsFormat(StrEnum):
    JSON = "json"
    CSV = "csv"


class MetricsRecord(BaseModel):
    """1反復の計測値

    時間の単位は計算時間がミリ秒、シミュレートしたネットワーク上の完了時刻がマイクロ秒。
    """

    iteration: int
    outcome: str
    online: int
    client_compute_ms: float = 0.0
    member_compute_ms: float = 0.0
    server_compute_ms: float = 0.0
    completion_us: float = 0.0
    bytes_sent: int = 0
    bytes_received: int = 0
    bytes_dropped: int = 0
    exact: bool | None = None
    injected: bool = False

    @property
    def bytes_balanced(self) -> bool:
        return self.bytes_sent == self.bytes_received + self.bytes_dropped


def emit_metrics(
    records: Sequence[MetricsRecord],
    path: str | Path,
    fmt: MetricsFormat | str = MetricsFormat.JSON,
    config: dict[str, Any] | None = None,
) -> Path:
    """計測値をファイルに書き出す

    Args:
        records: 反復ごとの計測値
        path: 出力先（親ディレクトリは作成する）
        fmt: "json" または "csv"
        config: 再現用に埋め込む設定

    Returns:
        書き出したファイルのパス
    """
    fmt = MetricsFormat(fmt)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    config = config or {}
    if fmt is MetricsFormat.JSON:
        document = {
            "schema_version": SCHEMA_VERSION,
            "config": config,
            "records": [record.model_dump() for record in records],
        }
        path.write_text(json.dumps(document, sort_keys=True, indent=2), encoding="utf-8")
    else:
        fields = list(MetricsRecord.model_fields)
        with path.open("w", newline="", encoding="utf-8") as f:
            f.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
            writer = csv.DictWriter(f, fieldnames=["schema_version", *fields])
            writer.writeheader()
            for record in records:
                writer.writerow({"schema_version": SCHEMA_VERSION, **record.model_dump()})
    logger.info("wrote %d metrics records to %s", len(records), path)
    return path


def _csv_value(raw: str) -> str | None:
    return None if raw == "" else raw


def load_metrics(path: str | Path) -> tuple[list[MetricsRecord], dict[str, Any]]:
    """emit_metrics の出力を読み戻す（拡張子で形式を判定）"""
    path = Path(path)
    if path.suffix == ".csv":
        with path.open(newline="", encoding="utf-8") as f:
            header = f.readline()
            config = {}
            if header.startswith("# config: "):
                config = json.loads(header.removeprefix("# config: "))
            else:
                f.seek(0)
            rows = list(csv.DictReader(f))
        records = []
        for row in rows:
            row.pop("schema_version", None)
            records.append(MetricsRecord.model_validate({k: _csv_value(v) for k, v in row.items()}))
        return records, config
    document = json.loads(path.read_text(encoding="utf-8"))
    if document.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported metrics schema {document.get('schema_version')}")
    return [MetricsRecord.model_validate(r) for r in document["records"]], document.get("config", {})
