"""1反復のState定義

LangGraphのStateGraphで使用するState。各ノード（ロールの処理）の間で共有する。
timings と events は Annotated[list, operator.add] で各ノードの結果を蓄積する。
"""

import operator
from typing import Annotated, TypedDict

from src.protocol.messages import Abort, ClientMessage, CommitteeMessage, IterationId, IterationResult


class IterationState(TypedDict):
    """1反復の状態

    各フィールドの役割:
    - iteration: 反復の識別子（不変）
    - inputs: クライアント i → 入力ベクトル（不変）
    - messages: サーバーに届いたクライアントのメッセージ
    - online: オンライン集合 C
    - abort: 中断理由（設定されたら finish に進む）
    - replies: 委員会グループ → 届いた返信
    - result: 反復の結果
    - timings: (ロール, 計算時間 µs) の記録
    - events: ノードごとの要約（トレース用）
    """

    iteration: IterationId
    inputs: dict[int, list[int]]
    messages: dict[int, ClientMessage]
    online: tuple[int, ...]
    abort: Abort | None
    replies: dict[int, list[CommitteeMessage]]
    result: IterationResult | None
    timings: Annotated[list[tuple[str, float]], operator.add]
    events: Annotated[list[str], operator.add]


def initial_state(iteration: IterationId, inputs: dict[int, list[int]]) -> IterationState:
    return {
        "iteration": iteration,
        "inputs": inputs,
        "messages": {},
        "online": (),
        "abort": None,
        "replies": {},
        "result": None,
        "timings": [],
        "events": [],
    }
