"""
路径规划模块
在RW头之间寻找避开故障开关的最短路径（可跨平面）
"""

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from core.lattice import LatticeGraph, Vertex
from utils.errors import RouteRequestError, UnroutableError
from utils.logger import get_logger

# 跨平面一步的方向标记（离开时的ξ指标也是0）
PLANE_CROSSING = 0


@dataclass(frozen=True)
class RoutePlan:
    """
    一条路由计划

    step_directions[k] 是第 k 步在出发顶点处的方向（1..3），跨平面为 PLANE_CROSSING；
    step_connectors[k] 是跨平面时使用的连接器编号，平面内为 None。
    """
    input_head: Vertex
    output_head: Vertex
    vertex_path: Tuple[Vertex, ...]
    step_directions: Tuple[int, ...]
    step_connectors: Tuple[Optional[int], ...] = ()

    @property
    def n_three_chain_hops(self) -> int:
        return len(self.step_directions)

    @property
    def n_crossings(self) -> int:
        return sum(1 for d in self.step_directions if d == PLANE_CROSSING)

    @property
    def in_plane(self) -> bool:
        return self.n_crossings == 0

    def summary(self) -> str:
        if not self.vertex_path:
            return str(self.input_head)
        parts = [str(self.vertex_path[0])]
        for vertex, direction in zip(self.vertex_path[1:], self.step_directions):
            arrow = '=>' if direction == PLANE_CROSSING else f'-{direction}->'
            parts.append(f"{arrow}{vertex}")
        return ''.join(parts)


def _moves(graph: LatticeGraph, vertex: Vertex, blocked) -> List[Tuple[Vertex, int, Optional[int]]]:
    """从 vertex 出发的一步：(目标顶点, 方向或跨平面标记, 连接器编号)"""
    moves = [(w, i, None) for i, w in graph.neighbors(vertex).items() if w not in blocked]
    partner = graph.connector_partner(vertex)
    if partner is not None and partner[1] not in blocked:
        moves.append((partner[1], PLANE_CROSSING, partner[0]))
    return sorted(moves)


def _distances_to(graph: LatticeGraph, target: Vertex, blocked) -> Dict[Vertex, int]:
    """从终点出发的广度优先搜索，得到每个可达顶点到终点的跳数"""
    dist = {target: 0}
    queue = deque([target])
    while queue:
        current = queue.popleft()
        for nxt, _, _ in _moves(graph, current, blocked):
            if nxt not in dist:
                dist[nxt] = dist[current] + 1
                queue.append(nxt)
    return dist


def _blocking_cut(graph: LatticeGraph, source: Vertex, blocked) -> List[Vertex]:
    """从起点可达区域边界上的故障开关"""
    seen = {source}
    queue = deque([source])
    cut = set()
    while queue:
        current = queue.popleft()
        for nxt, _, _ in _moves(graph, current, set()):
            if nxt in blocked:
                cut.add(nxt)
            elif nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return sorted(cut)


def plan_path(graph: LatticeGraph, v_in, v_out, faults: Optional[Iterable] = None) -> RoutePlan:
    """
    规划 v_in 到 v_out 的最短跳数路径

    平面内链路与层间连接器都算一跳；故障开关不可经过；相同长度的路径中
    取顶点序列字典序最小的一条（先从终点做BFS求距离，再从起点贪心走）。

    Args:
        graph: 晶格图
        v_in: 输入RW头所在顶点
        v_out: 输出RW头所在顶点
        faults: 覆盖晶格自带的故障集合

    Raises:
        RouteRequestError: 端点不存在或没有RW头
        UnroutableError: 故障把两端隔开
    """
    logger = get_logger()
    v_in, v_out = Vertex(*v_in), Vertex(*v_out)
    blocked = set(graph.faulty if faults is None else (Vertex(*f) for f in faults))

    for name, v in (('v_in', v_in), ('v_out', v_out)):
        if v not in graph.vertex_adjacency:
            raise RouteRequestError(f"{name}={tuple(v)} 不是晶格顶点")
        if not graph.has_head(v):
            raise RouteRequestError(f"{name}={tuple(v)} 上没有RW头")

    if v_in == v_out:
        return RoutePlan(v_in, v_out, (), (), ())

    if v_in in blocked or v_out in blocked:
        raise UnroutableError(v_in, v_out, sorted({v for v in (v_in, v_out) if v in blocked}))

    dist = _distances_to(graph, v_out, blocked)
    if v_in not in dist:
        raise UnroutableError(v_in, v_out, _blocking_cut(graph, v_in, blocked))

    path = [v_in]
    directions = []
    connectors = []
    current = v_in
    while current != v_out:
        for nxt, direction, connector in _moves(graph, current, blocked):
            if dist.get(nxt) == dist[current] - 1:
                break
        path.append(nxt)
        directions.append(direction)
        connectors.append(connector)
        current = nxt

    plan = RoutePlan(v_in, v_out, tuple(path), tuple(directions), tuple(connectors))
    logger.debug(f"📡 路径规划: {plan.summary()} (N={plan.n_three_chain_hops})")
    return plan
