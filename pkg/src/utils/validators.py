"""
数据验证模块
晶格描述与晶格图的不变量检查
"""

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np


@dataclass(frozen=True)
class Violation:
    """一条不变量违规记录"""
    rule: str
    sites: Tuple[str, ...]
    detail: str

    def to_record(self) -> Dict:
        return {'rule': self.rule, 'sites': list(self.sites), 'detail': self.detail}

    def __str__(self) -> str:
        return f"[{self.rule}] {', '.join(self.sites)}: {self.detail}"


class LatticeValidator:
    """晶格验证器"""

    # 允许的耦合权重
    WEIGHT = 0.5
    WEIGHT_TOL = 1e-15

    @classmethod
    def validate_spec(cls, spec) -> Tuple[bool, List[str]]:
        """
        验证一个 LatticeSpec

        Args:
            spec: 晶格描述

        Returns:
            (是否有效, 错误列表)
        """
        from core.lattice import Vertex

        errors = []

        if spec.planes < 1:
            errors.append(f"planes 必须 ≥ 1: {spec.planes}")

        if len(spec.hex_extent) != 2 or any(v < 0 for v in spec.hex_extent):
            errors.append(f"hex_extent 必须是两个非负整数: {spec.hex_extent}")
            return False, errors

        for v in spec.extra_vertices:
            if not 0 <= v.plane < spec.planes:
                errors.append(f"extra_vertices 中的 {tuple(v)} 引用了不存在的平面")

        vertex_set = set(spec.vertices())

        # 层间连接器
        used_legs: Dict[Vertex, int] = {}
        for cid, conn in enumerate(spec.interplane_connectors):
            name = f"connector[{cid}]"
            if conn.plane_a == conn.plane_b:
                errors.append(f"{name}: plane_a 与 plane_b 相同 ({conn.plane_a})")
            for plane in (conn.plane_a, conn.plane_b):
                if not 0 <= plane < spec.planes:
                    errors.append(f"{name}: 平面 {plane} 不存在")
            for end in (conn.endpoint_a, conn.endpoint_b):
                if end not in vertex_set:
                    errors.append(f"{name}: 顶点 {tuple(end)} 不存在")
                    continue
                if end in used_legs:
                    errors.append(
                        f"{name}: 顶点 {tuple(end)} 的 e0 腿已被 connector[{used_legs[end]}] 占用"
                    )
                else:
                    used_legs[end] = cid

        # RW头
        if spec.rw_head_policy.value == 'listed':
            for v in spec.rw_head_vertices:
                if v not in vertex_set:
                    errors.append(f"RW头顶点 {tuple(v)} 不存在")
                elif v in used_legs:
                    errors.append(
                        f"connector[{used_legs[v]}]: 顶点 {tuple(v)} 同时被要求放置RW头"
                    )

        # 故障开关
        for v in sorted(spec.faulty_switches):
            if v not in vertex_set:
                errors.append(f"故障开关 {tuple(v)} 不是晶格顶点")

        return len(errors) == 0, errors

    @classmethod
    def validate_graph(cls, graph) -> List[Violation]:
        """
        检查 LatticeGraph 的不变量

        - 站点唯一（索引是到 0..n-1 的双射）
        - 耦合成对只列一次、权重为 ±1/2、中心比特之间没有耦合
        - 每个外部比特与每个所连开关的四个中心比特按Hadamard矩阵对应列耦合
        - 链路最多连接两个开关（其两个端点），RW头/悬挂链路只连接一个
        - 顶点的A/B二染色合法

        Returns:
            违规列表
        """
        from core.lattice import HADAMARD, HEAD_LEG, SiteKind

        violations: List[Violation] = []
        sites = graph.sites
        labels = [s.label for s in sites]
        n = len(sites)

        if len(set(sites)) != n:
            seen = set()
            duplicated = []
            for s in sites:
                if s in seen:
                    duplicated.append(s.label)
                seen.add(s)
            violations.append(Violation('site_bijection', tuple(duplicated), '站点重复'))

        pairs_seen = set()
        # external -> vertex -> {layer: weight}
        attached: Dict[int, Dict] = defaultdict(lambda: defaultdict(dict))

        for i, j, w in graph.couplings:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                violations.append(Violation('coupling_index', (str(i), str(j)), '耦合索引越界或自耦合'))
                continue
            pair = (min(i, j), max(i, j))
            names = (labels[pair[0]], labels[pair[1]])
            if pair in pairs_seen:
                violations.append(Violation('coupling_duplicate', names, '同一对耦合出现多次'))
                continue
            pairs_seen.add(pair)

            if abs(abs(w) - cls.WEIGHT) > cls.WEIGHT_TOL:
                violations.append(Violation('coupling_weight', names, f'权重 {w} 不是 ±1/2'))

            si, sj = sites[pair[0]], sites[pair[1]]
            if si.is_center and sj.is_center:
                violations.append(Violation('center_center', names, '开关中心比特之间不应有耦合'))
                continue
            if not si.is_center and not sj.is_center:
                violations.append(Violation('external_external', names, '外部比特之间不应直接耦合'))
                continue

            center, external = (si, pair[1]) if si.is_center else (sj, pair[0])
            attached[external][center.vertex][center.index] = w

        vertex_set = set(graph.vertex_adjacency)
        for ext in graph.external_indices():
            site = sites[ext]
            by_vertex = attached.get(ext, {})

            if site.kind == SiteKind.LINK:
                leg = site.index
                expected = {site.vertex}
                other = site.vertex.step(site.index)
                if other in vertex_set:
                    expected.add(other)
            elif site.kind == SiteKind.RW_HEAD:
                leg = HEAD_LEG
                expected = {site.vertex}
            else:
                leg = HEAD_LEG
                conn = graph.spec.interplane_connectors[site.index]
                expected = {conn.endpoint_a, conn.endpoint_b}

            actual = set(by_vertex)
            if actual != expected:
                detail = (
                    f'连接了 {len(actual)} 个开关 {sorted(str(v) for v in actual)}，'
                    f'应为 {sorted(str(v) for v in expected)}'
                )
                violations.append(Violation('attachment', (labels[ext],), detail))
                continue

            column = HADAMARD[:, leg]
            for vertex in sorted(actual):
                weights = by_vertex[vertex]
                vector = np.array([weights.get(alpha, 0.0) for alpha in range(4)])
                if len(weights) != 4 or not np.array_equal(vector, column):
                    violations.append(Violation(
                        'hadamard_column', (labels[ext], str(vertex)),
                        f'耦合向量 {vector.tolist()} 不等于Hadamard第 {leg} 列 {column.tolist()}'
                    ))

        # 蜂窝二染色
        for v, nbrs in graph.vertex_adjacency.items():
            for w in nbrs.values():
                if w is not None and w.is_a == v.is_a:
                    violations.append(Violation('bipartite', (str(v), str(w)), '同色顶点相邻'))

        return violations
