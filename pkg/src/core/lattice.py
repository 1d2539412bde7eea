"""
六角开关晶格模块
根据声明式的 LatticeSpec 构造站点集合与带符号的耦合列表

坐标约定（砖墙嵌入）：
    顶点记为 (plane, x, y)，x+y 为偶数时属于A子格，否则属于B子格。
    A顶点: e1 向上 (x, y+1)，e2 左下 (x-1, y)，e3 右下 (x+1, y)
    B顶点: e1 向下 (x, y-1)，e2 右上 (x+1, y)，e3 左上 (x-1, y)
    因此一条链路在两个端点上的方向编号相同。
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from utils.errors import AdjacencyError, LatticeSpecError
from utils.logger import get_logger


# 四维Hadamard矩阵（含1/2归一化），行列编号0..3
HADAMARD = 0.5 * np.array([
    [1, 1, 1, 1],
    [1, 1, -1, -1],
    [1, -1, 1, -1],
    [1, -1, -1, 1],
], dtype=float)

DIRECTIONS = (1, 2, 3)
LAYERS = (0, 1, 2, 3)
CONTROL_LAYERS = (1, 2, 3)

# e0 腿：RW头或层间连接器
HEAD_LEG = 0


class BoundaryPolicy(str, Enum):
    TRIM_DANGLING = 'trim_dangling'
    KEEP_DANGLING = 'keep_dangling'


class HeadPolicy(str, Enum):
    ALL_VERTICES = 'all_vertices'
    LISTED = 'listed'


class SiteKind(str, Enum):
    CENTER = 'center'
    LINK = 'link'
    RW_HEAD = 'rw_head'
    INTERPLANE_LINK = 'interplane_link'


class Vertex(NamedTuple):
    """开关所在的顶点"""
    plane: int
    x: int
    y: int

    @property
    def is_a(self) -> bool:
        return (self.x + self.y) % 2 == 0

    @property
    def sublattice(self) -> str:
        return 'A' if self.is_a else 'B'

    def step(self, direction: int) -> 'Vertex':
        """沿方向 direction 走一步（不检查目标是否存在）"""
        if direction == 1:
            return Vertex(self.plane, self.x, self.y + 1 if self.is_a else self.y - 1)
        if direction == 2:
            return Vertex(self.plane, self.x - 1 if self.is_a else self.x + 1, self.y)
        if direction == 3:
            return Vertex(self.plane, self.x + 1 if self.is_a else self.x - 1, self.y)
        raise ValueError(f"方向必须是1、2或3: {direction}")

    def __str__(self) -> str:
        return f"p{self.plane}({self.x},{self.y})"


@dataclass(frozen=True)
class Connector:
    """连接两个平面的层间连接器，占用两端顶点的 e0 腿"""
    plane_a: int
    plane_b: int
    vertex_on_a: Tuple[int, int]
    vertex_on_b: Tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, 'vertex_on_a', tuple(int(c) for c in self.vertex_on_a))
        object.__setattr__(self, 'vertex_on_b', tuple(int(c) for c in self.vertex_on_b))

    @property
    def endpoint_a(self) -> Vertex:
        return Vertex(self.plane_a, *self.vertex_on_a)

    @property
    def endpoint_b(self) -> Vertex:
        return Vertex(self.plane_b, *self.vertex_on_b)

    def other_end(self, vertex: Vertex) -> Vertex:
        if vertex == self.endpoint_a:
            return self.endpoint_b
        if vertex == self.endpoint_b:
            return self.endpoint_a
        raise ValueError(f"{vertex} 不是该连接器的端点")


def hex_cell_vertices(plane: int, row: int, col: int) -> List[Vertex]:
    """第 (row, col) 个六边形单元的六个顶点"""
    x0 = 2 * col + (row % 2)
    y0 = row
    return [Vertex(plane, x0 + dx, y0 + dy) for dy in (0, 1) for dx in (0, 1, 2)]


@dataclass(frozen=True)
class LatticeSpec:
    """晶格的声明式描述"""
    planes: int = 1
    hex_extent: Tuple[int, int] = (1, 1)
    boundary_policy: BoundaryPolicy = BoundaryPolicy.TRIM_DANGLING
    interplane_connectors: Tuple[Connector, ...] = ()
    faulty_switches: FrozenSet[Vertex] = frozenset()
    rw_head_policy: HeadPolicy = HeadPolicy.ALL_VERTICES
    rw_head_vertices: Tuple[Vertex, ...] = ()
    extra_vertices: Tuple[Vertex, ...] = ()

    def __post_init__(self):
        # 接受普通元组/字符串输入，统一成规范类型
        object.__setattr__(self, 'hex_extent', tuple(int(v) for v in self.hex_extent))
        object.__setattr__(self, 'boundary_policy', BoundaryPolicy(self.boundary_policy))
        object.__setattr__(self, 'rw_head_policy', HeadPolicy(self.rw_head_policy))
        object.__setattr__(self, 'interplane_connectors', tuple(self.interplane_connectors))
        object.__setattr__(self, 'faulty_switches', frozenset(Vertex(*v) for v in self.faulty_switches))
        object.__setattr__(self, 'rw_head_vertices', tuple(Vertex(*v) for v in self.rw_head_vertices))
        object.__setattr__(self, 'extra_vertices', tuple(Vertex(*v) for v in self.extra_vertices))

    def plane_vertices(self, plane: int) -> List[Vertex]:
        """某个平面上的全部顶点（六边形单元并集加额外顶点），按字典序"""
        rows, cols = self.hex_extent
        vertices = set()
        for row in range(rows):
            for col in range(cols):
                vertices.update(hex_cell_vertices(plane, row, col))
        vertices.update(v for v in self.extra_vertices if v.plane == plane)
        return sorted(vertices)

    def vertices(self) -> List[Vertex]:
        result = []
        for plane in range(self.planes):
            result.extend(self.plane_vertices(plane))
        return result

    def with_faults(self, faults: Iterable) -> 'LatticeSpec':
        return replace(self, faulty_switches=frozenset(Vertex(*v) for v in faults))


@dataclass(frozen=True)
class SiteId:
    """
    站点标识

    center: vertex=开关顶点, index=层 α
    link: vertex=所属端点（有A端点时为A端点）, index=方向 i
    rw_head: vertex=所在顶点, index=0
    interplane_link: vertex=None, index=连接器编号
    """
    plane: int
    kind: SiteKind
    vertex: Optional[Vertex]
    index: int

    @property
    def label(self) -> str:
        if self.kind == SiteKind.CENTER:
            return f"p{self.plane}:c({self.vertex.x},{self.vertex.y})/{self.index}"
        if self.kind == SiteKind.LINK:
            return f"p{self.plane}:l({self.vertex.x},{self.vertex.y})/{self.index}"
        if self.kind == SiteKind.RW_HEAD:
            return f"p{self.plane}:h({self.vertex.x},{self.vertex.y})"
        return f"x{self.index}"

    @property
    def is_center(self) -> bool:
        return self.kind == SiteKind.CENTER

    @classmethod
    def center(cls, vertex: Vertex, layer: int) -> 'SiteId':
        return cls(vertex.plane, SiteKind.CENTER, vertex, layer)

    @classmethod
    def link(cls, vertex: Vertex, direction: int) -> 'SiteId':
        return cls(vertex.plane, SiteKind.LINK, vertex, direction)

    @classmethod
    def head(cls, vertex: Vertex) -> 'SiteId':
        return cls(vertex.plane, SiteKind.RW_HEAD, vertex, HEAD_LEG)

    @classmethod
    def interplane(cls, connector_id: int, plane: int) -> 'SiteId':
        return cls(plane, SiteKind.INTERPLANE_LINK, None, connector_id)


@dataclass(frozen=True)
class LatticeGraph:
    """
    实现后的站点/耦合图，构造后不可变，可在并发模拟中共享读取

    couplings 中每一对只出现一次 (i, j, weight)，i < j，矩阵按对称方式使用。
    """
    spec: LatticeSpec
    sites: Tuple[SiteId, ...]
    couplings: Tuple[Tuple[int, int, float], ...]

    # 以下为派生字段
    vertex_adjacency: Dict[Vertex, Dict[int, Optional[Vertex]]] = field(init=False, repr=False, compare=False)
    layer_membership: Dict[int, Tuple[int, ...]] = field(init=False, repr=False, compare=False)
    site_index: Dict[SiteId, int] = field(init=False, repr=False, compare=False)
    attachments: Dict[Vertex, Dict[int, int]] = field(init=False, repr=False, compare=False)
    connector_at: Dict[Vertex, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'sites', tuple(self.sites))
        object.__setattr__(self, 'couplings', tuple(
            (int(i), int(j), float(w)) for i, j, w in self.couplings
        ))

        vertices = self.spec.vertices()
        vertex_set = set(vertices)
        adjacency = {
            v: {i: (v.step(i) if v.step(i) in vertex_set else None) for i in DIRECTIONS}
            for v in vertices
        }

        site_index = {site: idx for idx, site in enumerate(self.sites)}

        layers = {layer: [] for layer in LAYERS}
        for idx, site in enumerate(self.sites):
            if site.kind == SiteKind.CENTER:
                layers[site.index].append(idx)

        # 每个顶点各条腿上挂着的外部站点
        attachments: Dict[Vertex, Dict[int, int]] = {v: {} for v in vertices}
        for idx, site in enumerate(self.sites):
            if site.kind == SiteKind.LINK:
                attachments.setdefault(site.vertex, {})[site.index] = idx
                other = site.vertex.step(site.index)
                if other in vertex_set:
                    attachments.setdefault(other, {})[site.index] = idx
            elif site.kind == SiteKind.RW_HEAD:
                attachments.setdefault(site.vertex, {})[HEAD_LEG] = idx

        connector_at = {}
        for cid, conn in enumerate(self.spec.interplane_connectors):
            site = SiteId.interplane(cid, conn.plane_a)
            if site in site_index:
                for end in (conn.endpoint_a, conn.endpoint_b):
                    attachments.setdefault(end, {})[HEAD_LEG] = site_index[site]
                    connector_at[end] = cid

        object.__setattr__(self, 'vertex_adjacency', adjacency)
        object.__setattr__(self, 'layer_membership', {k: tuple(v) for k, v in layers.items()})
        object.__setattr__(self, 'site_index', site_index)
        object.__setattr__(self, 'attachments', attachments)
        object.__setattr__(self, 'connector_at', connector_at)

    @property
    def dim(self) -> int:
        return len(self.sites)

    @property
    def vertices(self) -> List[Vertex]:
        return list(self.vertex_adjacency)

    @property
    def faulty(self) -> FrozenSet[Vertex]:
        return self.spec.faulty_switches

    def center_index(self, vertex: Vertex, layer: int) -> int:
        return self.site_index[SiteId.center(Vertex(*vertex), layer)]

    def head_index(self, vertex: Vertex) -> int:
        vertex = Vertex(*vertex)
        try:
            return self.site_index[SiteId.head(vertex)]
        except KeyError:
            raise KeyError(f"{vertex} 上没有RW头")

    def has_head(self, vertex) -> bool:
        return SiteId.head(Vertex(*vertex)) in self.site_index

    def head_vertices(self) -> List[Vertex]:
        return [site.vertex for site in self.sites if site.kind == SiteKind.RW_HEAD]

    def neighbors(self, vertex: Vertex) -> Dict[int, Vertex]:
        """平面内邻居：方向 -> 顶点"""
        return {i: w for i, w in self.vertex_adjacency[Vertex(*vertex)].items() if w is not None}

    def connector_partner(self, vertex: Vertex) -> Optional[Tuple[int, Vertex]]:
        """若该顶点的 e0 腿接层间连接器，返回 (连接器编号, 另一端顶点)"""
        vertex = Vertex(*vertex)
        cid = self.connector_at.get(vertex)
        if cid is None:
            return None
        return cid, self.spec.interplane_connectors[cid].other_end(vertex)

    def external_indices(self) -> List[int]:
        return [idx for idx, site in enumerate(self.sites) if not site.is_center]

    def labels(self) -> List[str]:
        return [site.label for site in self.sites]


def _head_vertices(spec: LatticeSpec, vertices: Sequence[Vertex], connector_ends: set) -> List[Vertex]:
    if spec.rw_head_policy == HeadPolicy.ALL_VERTICES:
        # e0 腿已被连接器占用的顶点把角色让给连接器
        return [v for v in vertices if v not in connector_ends]
    return sorted(set(spec.rw_head_vertices))


def build_lattice(spec: LatticeSpec) -> LatticeGraph:
    """
    根据描述构造晶格图

    站点顺序：全部中心比特（顶点优先、层次之），链路比特（所属端点、方向），
    RW头，最后是层间连接比特（按连接器编号）。

    Args:
        spec: 晶格描述

    Returns:
        LatticeGraph

    Raises:
        LatticeSpecError: 描述不一致（例如连接器所在顶点又被要求放置RW头）
    """
    from utils.validators import LatticeValidator

    logger = get_logger()

    ok, errors = LatticeValidator.validate_spec(spec)
    if not ok:
        raise LatticeSpecError("晶格描述无效", errors)

    vertices = spec.vertices()
    vertex_set = set(vertices)
    connector_ends = set()
    for conn in spec.interplane_connectors:
        connector_ends.update((conn.endpoint_a, conn.endpoint_b))

    sites: List[SiteId] = [SiteId.center(v, layer) for v in vertices for layer in LAYERS]

    # 每条链路只存一次：内部链路挂在A端点上，悬挂链路挂在唯一的端点上
    keep_dangling = spec.boundary_policy == BoundaryPolicy.KEEP_DANGLING
    for v in vertices:
        for i in DIRECTIONS:
            has_neighbor = v.step(i) in vertex_set
            if (has_neighbor and v.is_a) or (not has_neighbor and keep_dangling):
                sites.append(SiteId.link(v, i))

    heads = _head_vertices(spec, vertices, connector_ends)
    sites.extend(SiteId.head(v) for v in heads)
    sites.extend(
        SiteId.interplane(cid, conn.plane_a)
        for cid, conn in enumerate(spec.interplane_connectors)
    )

    index = {site: idx for idx, site in enumerate(sites)}

    couplings = []

    def couple(external: int, vertex: Vertex, leg: int):
        for alpha in LAYERS:
            couplings.append((index[SiteId.center(vertex, alpha)], external, HADAMARD[alpha, leg]))

    for idx, site in enumerate(sites):
        if site.kind == SiteKind.LINK:
            couple(idx, site.vertex, site.index)
            other = site.vertex.step(site.index)
            if other in vertex_set:
                couple(idx, other, site.index)
        elif site.kind == SiteKind.RW_HEAD:
            couple(idx, site.vertex, HEAD_LEG)
        elif site.kind == SiteKind.INTERPLANE_LINK:
            conn = spec.interplane_connectors[site.index]
            couple(idx, conn.endpoint_a, HEAD_LEG)
            couple(idx, conn.endpoint_b, HEAD_LEG)

    couplings.sort(key=lambda c: (c[0], c[1]))

    graph = LatticeGraph(spec=spec, sites=tuple(sites), couplings=tuple(couplings))

    logger.debug(
        f"🔧 晶格构造完成: {spec.planes} 个平面, {len(vertices)} 个开关, "
        f"{graph.dim} 个站点, {len(couplings)} 个耦合"
    )
    return graph


def link_direction_index(graph: LatticeGraph, vertex, neighbor_vertex) -> int:
    """
    返回两个相邻顶点之间链路的方向编号（从 vertex 一侧看）

    Raises:
        AdjacencyError: 两个顶点不在同一平面内相邻
    """
    vertex = Vertex(*vertex)
    neighbor_vertex = Vertex(*neighbor_vertex)
    for direction, w in graph.vertex_adjacency.get(vertex, {}).items():
        if w == neighbor_vertex:
            return direction
    raise AdjacencyError(f"{vertex} 与 {neighbor_vertex} 不相邻")


def validate(graph: LatticeGraph) -> list:
    """检查 LatticeGraph 的全部不变量，返回违规列表（为空表示通过）"""
    from utils.validators import LatticeValidator
    return LatticeValidator.validate_graph(graph)
