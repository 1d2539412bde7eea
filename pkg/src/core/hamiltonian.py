"""
单激发哈密顿量模块
由晶格图组装哈密顿量，构造ξ基正交变换，并验证其分解为均匀2链和3链的直和
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from config import config
from core.lattice import HADAMARD, HEAD_LEG, LAYERS, LatticeGraph, SiteKind
from utils.errors import StructureViolationError
from utils.logger import get_logger
from utils.validators import Violation


@dataclass(frozen=True)
class Hamiltonian:
    """
    稀疏实对称哈密顿量，按上三角三元组 (row < col) 规范存储

    graph 为 None 时表示不来自晶格的独立矩阵（例如单独的一条链）。
    """
    dim: int
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]
    values: Tuple[float, ...]
    graph: Optional[LatticeGraph] = field(default=None, compare=False, repr=False)

    @classmethod
    def from_triplets(cls, dim: int, triplets, graph: Optional[LatticeGraph] = None) -> 'Hamiltonian':
        """由 (i, j, value) 三元组构造，自动转为上三角并排序"""
        canonical = sorted(
            (min(i, j), max(i, j), float(v)) for i, j, v in triplets if v != 0.0
        )
        rows = tuple(c[0] for c in canonical)
        cols = tuple(c[1] for c in canonical)
        values = tuple(c[2] for c in canonical)
        return cls(dim=dim, rows=rows, cols=cols, values=values, graph=graph)

    @property
    def nnz_pairs(self) -> int:
        return len(self.values)

    def triplets(self) -> List[Tuple[int, int, float]]:
        return list(zip(self.rows, self.cols, self.values))

    def to_sparse(self) -> sparse.csr_matrix:
        """对称的CSR矩阵"""
        if self.dim == 0:
            return sparse.csr_matrix((0, 0))
        upper = sparse.coo_matrix(
            (np.asarray(self.values, dtype=float), (np.asarray(self.rows), np.asarray(self.cols))),
            shape=(self.dim, self.dim),
        )
        return (upper + upper.T).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def with_entry(self, i: int, j: int, value: float) -> 'Hamiltonian':
        """返回修改了一个对称矩阵元的副本（测试中用于注入损坏）"""
        entries = {(r, c): v for r, c, v in self.triplets()}
        key = (min(i, j), max(i, j))
        if i == j:
            raise ValueError("XY哈密顿量在单激发子空间中没有对角项")
        entries[key] = float(value)
        return Hamiltonian.from_triplets(self.dim, [(r, c, v) for (r, c), v in entries.items()], self.graph)

    def check_invariants(self) -> List[str]:
        """检查对称性以外的不变量：无对角项、幅值1/2、非零模式与图耦合一一对应"""
        problems = []
        if any(r == c for r, c in zip(self.rows, self.cols)):
            problems.append("存在对角项")
        for r, c, v in self.triplets():
            if abs(abs(v) - 0.5) > 1e-15:
                problems.append(f"({r},{c}) 幅值 {v} 不是 1/2")
        if self.graph is not None:
            expected = {(min(i, j), max(i, j)): w for i, j, w in self.graph.couplings}
            actual = {(r, c): v for r, c, v in self.triplets()}
            if expected != actual:
                problems.append("非零模式与晶格耦合不一致")
        return problems


def assemble(graph: LatticeGraph) -> Hamiltonian:
    """
    由晶格图组装单激发哈密顿量

    每个耦合 (m, n, w) 给出 H[m, n] = H[n, m] = w。

    Args:
        graph: 合法的晶格图

    Returns:
        Hamiltonian
    """
    H = Hamiltonian.from_triplets(graph.dim, graph.couplings, graph)
    get_logger().debug(f"🔧 哈密顿量组装完成: 维数 {H.dim}, {H.nnz_pairs} 对非零元")
    return H


@dataclass(frozen=True)
class XiTransform:
    """
    ξ基正交变换 Q

    外部站点上为单位阵；每个顶点的四个中心比特上为Hadamard块，
    第 (v, α) 列即 |ξ_v^α⟩ 在站点基中的展开。ξ指标与中心站点共用同一编号。
    """
    matrix: sparse.csr_matrix = field(compare=False)
    graph: LatticeGraph = field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def orthogonality_error(self) -> float:
        """max |QᵀQ - I|"""
        if self.dim == 0:
            return 0.0
        product = (self.matrix.T @ self.matrix) - sparse.identity(self.dim, format='csr')
        return float(abs(product).max()) if product.nnz else 0.0

    def to_xi(self, amplitudes: np.ndarray) -> np.ndarray:
        """站点基振幅 -> ξ基振幅"""
        return self.matrix.T @ amplitudes

    def from_xi(self, amplitudes: np.ndarray) -> np.ndarray:
        """ξ基振幅 -> 站点基振幅"""
        return self.matrix @ amplitudes

    def xi_state(self, vertex, alpha: int) -> np.ndarray:
        """|ξ_v^α⟩ 在站点基中的向量"""
        col = self.graph.center_index(vertex, alpha)
        return self.matrix[:, col].toarray().ravel()


def xi_transform(graph: LatticeGraph) -> XiTransform:
    """
    构造ξ基变换

    |ξ_v^α⟩ = Σ_β J^{αβ} |v_β⟩，于是 Q[(v,β), (v,α)] = J[α, β]。
    """
    rows, cols, values = [], [], []
    for idx in graph.external_indices():
        rows.append(idx)
        cols.append(idx)
        values.append(1.0)

    for v in graph.vertices:
        centers = [graph.center_index(v, alpha) for alpha in LAYERS]
        for alpha in LAYERS:
            for beta in LAYERS:
                rows.append(centers[beta])
                cols.append(centers[alpha])
                values.append(HADAMARD[alpha, beta])

    Q = sparse.coo_matrix((values, (rows, cols)), shape=(graph.dim, graph.dim)).tocsr()
    return XiTransform(matrix=Q, graph=graph)


@dataclass(frozen=True)
class Chain:
    """ξ基下的一个连通分量"""
    kind: str                   # two_chain / three_chain / isolated
    indices: Tuple[int, ...]    # 沿链排列的ξ/站点编号
    coupling: float
    scope: str                  # head / dangling / in_plane / inter_plane / trimmed
    labels: Tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.indices)

    def eigenvalues(self) -> List[float]:
        if self.kind == 'two_chain':
            return [-1.0, 1.0]
        if self.kind == 'three_chain':
            return [-np.sqrt(2.0), 0.0, np.sqrt(2.0)]
        return [0.0]

    def to_record(self) -> Dict:
        return {
            'kind': self.kind,
            'scope': self.scope,
            'indices': list(self.indices),
            'labels': list(self.labels),
            'coupling': self.coupling,
        }


@dataclass(frozen=True)
class ChainInventory:
    """链清单：所有分量划分ξ基指标集"""
    chains: Tuple[Chain, ...]
    dim: int
    max_off_pattern: float = 0.0
    max_coupling_error: float = 0.0

    def census(self) -> Dict[str, int]:
        counts = {'two_chain': 0, 'three_chain': 0, 'isolated': 0, 'inter_plane': 0}
        for chain in self.chains:
            counts[chain.kind] += 1
            if chain.scope == 'inter_plane':
                counts['inter_plane'] += 1
        return counts

    def census_line(self) -> str:
        c = self.census()
        return f"2-chains: {c['two_chain']}, 3-chains: {c['three_chain']}, isolated: {c['isolated']}"

    def chain_of(self, index: int) -> Chain:
        for chain in self.chains:
            if index in chain.indices:
                return chain
        raise KeyError(index)

    def eigenvalues(self) -> np.ndarray:
        values = [ev for chain in self.chains for ev in chain.eigenvalues()]
        return np.sort(np.array(values, dtype=float))

    def to_record(self) -> Dict:
        return {
            'dim': self.dim,
            'census': self.census(),
            'max_off_pattern': self.max_off_pattern,
            'max_coupling_error': self.max_coupling_error,
            'chains': [chain.to_record() for chain in self.chains],
        }


def _leg_of(graph: LatticeGraph, external: int) -> int:
    site = graph.sites[external]
    return site.index if site.kind == SiteKind.LINK else HEAD_LEG


def verify_block_structure(
    H: Hamiltonian,
    Q: XiTransform,
    structure_tol: Optional[float] = None,
    coupling_tol: Optional[float] = None,
) -> ChainInventory:
    """
    验证 QᵀHQ 恰好是均匀2链与3链的直和

    每个非零元必须位于 ξ_v^β 与 v 的第 β 条腿上外部比特之间，且取值为 +1；
    连通分量按长度分类为 two_chain / three_chain / isolated。

    Raises:
        StructureViolationError: 分块结构不符（附带违规明细）
    """
    logger = get_logger()
    structure_tol = config.STRUCTURE_TOL if structure_tol is None else structure_tol
    coupling_tol = config.COUPLING_TOL if coupling_tol is None else coupling_tol

    graph = Q.graph
    if H.dim != Q.dim:
        raise StructureViolationError("H 与 Q 维数不一致", [
            Violation('dimension', (), f'H: {H.dim}, Q: {Q.dim}')
        ])

    dim = H.dim
    if dim == 0:
        return ChainInventory(chains=(), dim=0)

    labels = graph.labels()
    Hs = H.to_sparse()
    M = (Q.matrix.T @ Hs @ Q.matrix).tocoo()

    violations: List[Violation] = []
    max_off_pattern = 0.0
    max_coupling_error = 0.0
    pattern_rows, pattern_cols = [], []
    couplings: Dict[Tuple[int, int], float] = {}

    for i, j, value in zip(M.row, M.col, M.data):
        if i > j or abs(value) <= structure_tol:
            continue
        names = (labels[i], labels[j])
        if i == j:
            max_off_pattern = max(max_off_pattern, abs(value))
            violations.append(Violation('diagonal', names[:1], f'对角元 {value:.3e}'))
            continue

        si, sj = graph.sites[i], graph.sites[j]
        if si.is_center == sj.is_center:
            max_off_pattern = max(max_off_pattern, abs(value))
            violations.append(Violation('off_pattern', names, f'ξ基中不应出现的耦合 {value:.3e}'))
            continue

        center, external = (i, j) if si.is_center else (j, i)
        site = graph.sites[center]
        if graph.attachments.get(site.vertex, {}).get(site.index) != external:
            max_off_pattern = max(max_off_pattern, abs(value))
            violations.append(Violation(
                'off_pattern', names,
                f'ξ_{site.vertex}^{site.index} 只应与其第 {site.index} 条腿耦合，实际值 {value:.3e}'
            ))
            continue

        error = abs(value - 1.0)
        max_coupling_error = max(max_coupling_error, error)
        if error > coupling_tol:
            violations.append(Violation('coupling_value', names, f'链耦合 {value!r} 不等于 1'))

        pattern_rows.append(i)
        pattern_cols.append(j)
        couplings[(i, j)] = float(value)

    adjacency = sparse.coo_matrix(
        (np.ones(len(pattern_rows)), (pattern_rows, pattern_cols)), shape=(dim, dim)
    ).tocsr()
    n_components, component_of = connected_components(adjacency, directed=False)

    members: Dict[int, List[int]] = {}
    for idx, comp in enumerate(component_of):
        members.setdefault(int(comp), []).append(idx)

    neighbors: Dict[int, List[int]] = {idx: [] for idx in range(dim)}
    for i, j in couplings:
        neighbors[i].append(j)
        neighbors[j].append(i)

    chains = []
    for comp in sorted(members, key=lambda c: members[c][0]):
        nodes = members[comp]
        if len(nodes) == 1:
            idx = nodes[0]
            if not graph.sites[idx].is_center:
                violations.append(Violation('isolated_external', (labels[idx],), '外部比特没有任何耦合'))
                continue
            chains.append(Chain('isolated', (idx,), 0.0, 'trimmed', (labels[idx],)))
        elif len(nodes) == 2:
            center = nodes[0] if graph.sites[nodes[0]].is_center else nodes[1]
            external = nodes[1] if center == nodes[0] else nodes[0]
            kind = graph.sites[external].kind
            scope = 'head' if kind == SiteKind.RW_HEAD else 'dangling'
            value = couplings[(min(nodes), max(nodes))]
            chains.append(Chain(
                'two_chain', (external, center), value, scope, (labels[external], labels[center])
            ))
        elif len(nodes) == 3:
            middle = [n for n in nodes if len(neighbors[n]) == 2]
            if len(middle) != 1 or graph.sites[middle[0]].is_center:
                violations.append(Violation(
                    'chain_shape', tuple(labels[n] for n in nodes), '三元分量不是 ξ-外部-ξ 的链'
                ))
                continue
            mid = middle[0]
            ends = sorted(neighbors[mid])
            ordered = (ends[0], mid, ends[1])
            value = couplings[(min(ends[0], mid), max(ends[0], mid))]
            scope = 'inter_plane' if graph.sites[mid].kind == SiteKind.INTERPLANE_LINK else 'in_plane'
            chains.append(Chain(
                'three_chain', ordered, value, scope, tuple(labels[n] for n in ordered)
            ))
        else:
            violations.append(Violation(
                'component_too_long', tuple(labels[n] for n in nodes),
                f'分量长度 {len(nodes)} > 3'
            ))

    if violations:
        for v in violations[:5]:
            logger.error(f"❌ {v}")
        raise StructureViolationError("ξ基分块结构验证失败", violations)

    inventory = ChainInventory(
        chains=tuple(chains),
        dim=dim,
        max_off_pattern=max_off_pattern,
        max_coupling_error=max_coupling_error,
    )
    logger.info(f"✅ 分块结构验证通过: {inventory.census_line()}")
    return inventory


@dataclass(frozen=True)
class SwitchProperties:
    """候选开关矩阵的性质"""
    real: bool
    symmetric: bool
    orthogonal: bool
    uniform: bool
    control_algebra: bool

    @property
    def is_hadamard_switch(self) -> bool:
        return all((self.real, self.symmetric, self.orthogonal, self.uniform, self.control_algebra))

    def to_record(self) -> Dict:
        return {
            'real': self.real,
            'symmetric': self.symmetric,
            'orthogonal': self.orthogonal,
            'uniform': self.uniform,
            'control_algebra': self.control_algebra,
        }


def switch_properties(J: np.ndarray, tol: float = 1e-12) -> SwitchProperties:
    """
    检查一个4×4候选开关矩阵是否具备Hadamard开关所需的性质

    - real / symmetric / orthogonal：ξ基分解成立的条件
    - uniform：所有耦合幅值相同（均匀耦合）
    - control_algebra：每个 Z_iZ_j 脉冲都把矩阵的行精确地两两互换
    """
    J = np.asarray(J)
    real = bool(np.all(np.abs(np.imag(J)) <= tol))
    symmetric = bool(np.allclose(J, J.T, atol=tol))
    orthogonal = bool(np.allclose(J.conj().T @ J, np.eye(J.shape[0]), atol=tol))
    magnitudes = np.abs(J)
    uniform = bool(np.allclose(magnitudes, magnitudes.flat[0], atol=tol))

    control_algebra = True
    rows = [J[alpha] for alpha in range(J.shape[0])]
    for layers in ((1, 2), (1, 3), (2, 3)):
        signs = np.ones(J.shape[0])
        signs[list(layers)] = -1
        for row in rows:
            flipped = row * signs
            if not any(np.allclose(flipped, other, atol=tol) for other in rows):
                control_algebra = False

    return SwitchProperties(real, symmetric, orthogonal, uniform, control_algebra)
