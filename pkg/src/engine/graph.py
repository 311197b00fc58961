"""1反復のワークフロー構築

StateGraphでロールの処理を接続する。サーバーの検査で中断が決まった時点で
残りのフェーズを飛ばして finish に進む。

グラフのフロー:
```
encrypt_inputs → intersect → verify_proofs → combine → aggregate → finish → END
                     |              |                                 ^
                     |-- (abort) ---|-------------------------------->|
```
"""

from langgraph.graph import END, StateGraph
from langgraph.graph.state import CompiledStateGraph

from src.engine.nodes import EngineContext, create_nodes
from src.engine.state import IterationState


def should_continue(state: IterationState) -> str:
    """中断理由が設定されていれば "abort"、そうでなければ "continue" """
    return "abort" if state.get("abort") is not None else "continue"


def create_iteration_graph(ctx: EngineContext) -> CompiledStateGraph:
    """1反復のグラフを構築してコンパイルする

    Args:
        ctx: ノードに注入する実行時の依存

    Returns:
        CompiledStateGraph: invoke(initial_state(...)) で1反復を実行する

    使用例:
        graph = create_iteration_graph(ctx)
        state = graph.invoke(initial_state(IterationId(0), inputs))
        print(state["result"].aggregate)
    """
    nodes = create_nodes(ctx)
    workflow = StateGraph(IterationState)

    for name, node in nodes.items():
        workflow.add_node(name, node)

    workflow.set_entry_point("encrypt_inputs")
    workflow.add_edge("encrypt_inputs", "intersect")
    workflow.add_conditional_edges(
        "intersect",
        should_continue,
        {"continue": "verify_proofs", "abort": "finish"},
    )
    workflow.add_conditional_edges(
        "verify_proofs",
        should_continue,
        {"continue": "combine", "abort": "finish"},
    )
    workflow.add_edge("combine", "aggregate")
    workflow.add_edge("aggregate", "finish")
    workflow.add_edge("finish", END)

    return workflow.compile()
