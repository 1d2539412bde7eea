"""
动力学模块
精确的分段幺正演化：H 下的自由演化与瞬时 Z 层相位脉冲交替进行
"""

import math
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import expm_multiply

from config import config
from core.chains import T1
from core.hamiltonian import Hamiltonian
from core.lattice import CONTROL_LAYERS, HADAMARD, LatticeGraph, SiteId, Vertex
from utils.errors import PropagatorError, ScheduleError
from utils.helpers import phase_of
from utils.logger import get_logger


@dataclass
class StateVector:
    """站点上的复振幅向量，归属于一次模拟运行"""
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)

    @classmethod
    def basis(cls, dim: int, index: int, time: float = 0.0) -> 'StateVector':
        amplitudes = np.zeros(dim, dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes, time)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> 'StateVector':
        return StateVector(self.amplitudes.copy(), self.time)


@dataclass(frozen=True)
class PhasePulse:
    """
    瞬时相位脉冲：把 α∈layers 的中心比特振幅乘以 -1

    region 为 None 时作用于全部顶点（全局控制），否则只作用于给定顶点。
    """
    layers: FrozenSet[int]
    region: Optional[FrozenSet[Vertex]] = None

    def __post_init__(self):
        layers = frozenset(int(a) for a in self.layers)
        if not layers <= set(CONTROL_LAYERS):
            raise ValueError(f"脉冲只能作用于控制层1、2、3: {sorted(layers)}")
        object.__setattr__(self, 'layers', layers)
        if self.region is not None:
            object.__setattr__(self, 'region', frozenset(Vertex(*v) for v in self.region))

    @classmethod
    def of(cls, *layers: int, region: Optional[Iterable] = None) -> 'PhasePulse':
        return cls(frozenset(layers), None if region is None else frozenset(region))

    @property
    def label(self) -> str:
        name = 'Z' + 'Z'.join(str(a) for a in sorted(self.layers)) if self.layers else 'I'
        return name if self.region is None else f"{name}@{len(self.region)}"

    def sign_vector(self, graph: LatticeGraph) -> np.ndarray:
        signs = np.ones(graph.dim)
        for layer in self.layers:
            for idx in graph.layer_membership[layer]:
                if self.region is None or graph.sites[idx].vertex in self.region:
                    signs[idx] = -1.0
        return signs


def xi_permutation(layers: Iterable[int]) -> dict:
    """
    脉冲 Π_{i∈layers} Z_i 在ξ态上诱导的置换 {α: β}

    Z_iZ_j 作用后 |ξ^α⟩ 的第 i、j 分量变号，结果恰是另一行 |ξ^β⟩。
    """
    flip = set(layers)
    # 整数符号模式，比较是精确的
    rows = [tuple(int(s) for s in np.sign(HADAMARD[alpha])) for alpha in range(4)]
    mapping = {}
    for alpha, row in enumerate(rows):
        pattern = tuple(-s if beta in flip else s for beta, s in enumerate(row))
        if pattern in rows:
            mapping[alpha] = rows.index(pattern)
    return mapping


class Propagator:
    """
    可复用的演化算子 e^{-iHΔt}

    维数不超过稠密阈值时使用完整的对称本征分解，否则退回到
    scipy 的 expm_multiply。对象构造后不可变，可在线程间共享。
    """

    def __init__(self, H: Hamiltonian, dense_threshold: Optional[int] = None):
        self.logger = get_logger()
        self.hamiltonian = H
        self.dim = H.dim
        self.dense_threshold = config.DENSE_THRESHOLD if dense_threshold is None else dense_threshold
        self.dense = self.dim <= self.dense_threshold
        self.energies = None
        self.vectors = None
        self._sparse = None

        if self.dense:
            try:
                self.energies, self.vectors = linalg.eigh(H.to_dense()) if self.dim else (
                    np.zeros(0), np.zeros((0, 0))
                )
            except linalg.LinAlgError as e:
                raise PropagatorError(f"对称本征分解失败: {e}")
            self.logger.debug(f"🔧 稠密传播子: 维数 {self.dim}")
        else:
            self._sparse = H.to_sparse().tocsc()
            self.logger.debug(f"🔧 稀疏传播子 (expm_multiply): 维数 {self.dim}")

    def evolve(self, amplitudes: np.ndarray, dt: float) -> np.ndarray:
        """返回 e^{-iHΔt} ψ"""
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if dt == 0 or self.dim == 0:
            return amplitudes.copy()
        if self.dense:
            coefficients = self.vectors.T @ amplitudes
            return self.vectors @ (np.exp(-1j * self.energies * dt) * coefficients)
        return expm_multiply(-1j * dt * self._sparse, amplitudes)

    def matrix(self, dt: float) -> np.ndarray:
        """稠密的 e^{-iHΔt}，仅用于检查"""
        if self.dense:
            return (self.vectors * np.exp(-1j * self.energies * dt)) @ self.vectors.T
        return np.column_stack([self.evolve(col, dt) for col in np.eye(self.dim)])

    def unitarity_error(self, amplitudes: np.ndarray, dt: float) -> float:
        """‖e^{-iHΔt} e^{+iHΔt} ψ - ψ‖"""
        back = self.evolve(self.evolve(amplitudes, -dt), dt)
        return float(np.linalg.norm(back - amplitudes))


def make_propagator(H: Hamiltonian, dense_threshold: Optional[int] = None) -> Propagator:
    return Propagator(H, dense_threshold)


def apply_pulse(state: StateVector, pulse: PhasePulse, graph: LatticeGraph) -> StateVector:
    """对目标中心比特施加符号翻转，范数严格保持"""
    return StateVector(state.amplitudes * pulse.sign_vector(graph), state.time)


@dataclass
class Trajectory:
    """按时间采样的状态序列"""
    times: List[float] = field(default_factory=list)
    states: List[np.ndarray] = field(default_factory=list)

    def add(self, time: float, amplitudes: np.ndarray):
        self.times.append(float(time))
        self.states.append(np.asarray(amplitudes, dtype=complex).copy())

    def __len__(self) -> int:
        return len(self.times)

    def max_norm_deviation(self) -> float:
        if not self.states:
            return 0.0
        return float(max(abs(np.linalg.norm(s) - 1.0) for s in self.states))


def run_schedule(
    H: Hamiltonian,
    state0: StateVector,
    schedule,
    propagator: Optional[Propagator] = None,
    samples_per_t1: Optional[int] = None,
    horizon: Optional[float] = None,
) -> Tuple[StateVector, Optional[Trajectory]]:
    """
    按时间顺序交替执行自由演化与瞬时脉冲

    Args:
        H: 哈密顿量（必须携带晶格图，脉冲需要它定位中心比特）
        state0: 初态（time 字段为起始时刻）
        schedule: 具有 events 与 total_duration 的脉冲时序
        propagator: 可选的共享传播子
        samples_per_t1: 给定时按每个 t1 区间采样这么多次记录轨迹
        horizon: 允许的最晚时刻，默认为 schedule.total_duration

    Returns:
        (末态, 轨迹或None)

    Raises:
        ScheduleError: 事件时刻非递增或超出时间范围
    """
    if H.graph is None:
        raise ScheduleError("哈密顿量没有关联晶格图，无法施加脉冲")

    graph = H.graph
    propagator = propagator or make_propagator(H)
    horizon = schedule.total_duration if horizon is None else horizon

    events = list(schedule.events)
    last = 0.0
    for event in events:
        if event.time < last - 1e-15:
            raise ScheduleError(f"脉冲时刻非递增: {event.time} < {last}")
        if event.time > horizon + 1e-12:
            raise ScheduleError(f"脉冲时刻 {event.time} 超出时间范围 {horizon}")
        last = event.time
    if schedule.total_duration > horizon + 1e-12:
        raise ScheduleError(f"总时长 {schedule.total_duration} 超出时间范围 {horizon}")

    trajectory = Trajectory() if samples_per_t1 else None
    sample_dt = T1 / samples_per_t1 if samples_per_t1 else None
    next_sample = 0

    t = 0.0
    psi = state0.amplitudes.astype(complex)

    def advance(psi_start: np.ndarray, t_start: float, t_end: float) -> np.ndarray:
        nonlocal next_sample
        if trajectory is not None:
            while next_sample * sample_dt < t_end - 1e-12:
                tau = next_sample * sample_dt
                if tau >= t_start - 1e-12:
                    trajectory.add(tau, propagator.evolve(psi_start, tau - t_start))
                next_sample += 1
        return propagator.evolve(psi_start, t_end - t_start)

    for event in events:
        psi = advance(psi, t, event.time)
        t = event.time
        psi = psi * event.pulse.sign_vector(graph)

    psi = advance(psi, t, schedule.total_duration)
    t = schedule.total_duration
    if trajectory is not None:
        trajectory.add(t, psi)

    final = StateVector(psi, state0.time + t)
    deviation = abs(final.norm() - 1.0)
    if deviation > 1e-12:
        get_logger().warning(f"⚠️ 范数偏离 {deviation:.2e}")
    return final, trajectory


def site_fidelity(state: StateVector, site: int) -> Tuple[float, float]:
    """
    返回 |⟨site|ψ⟩| 及其辐角（取值 (-π, π]）
    """
    amplitude = complex(state.amplitudes[site])
    return abs(amplitude), phase_of(amplitude)


def locate_excitation(state: StateVector, graph: LatticeGraph) -> Tuple[SiteId, float]:
    """激发粒子当前所在的主导站点及其占据概率"""
    populations = np.abs(state.amplitudes) ** 2
    idx = int(np.argmax(populations))
    return graph.sites[idx], float(populations[idx])


def qubit_transfer(
    alpha: complex,
    beta: complex,
    amplitude: complex,
    phase_correction: Optional[complex] = None,
) -> Tuple[np.ndarray, float]:
    """
    量子比特 α|0⟩+β|1⟩ 的传输结果

    |0⟩ 分量不演化，|1⟩ 分量乘以单激发振幅 f；可选地用已知的确定相位
    (phase_correction) 做一次局域修正。

    Returns:
        (输出比特的两个振幅 [未归一化时的 α, β·f], 与输入态的保真度)
    """
    amplitude = complex(amplitude)
    if phase_correction is not None:
        amplitude = amplitude * complex(phase_correction).conjugate() / abs(phase_correction)

    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    alpha, beta = alpha / norm, beta / norm
    out = np.array([alpha, beta * amplitude], dtype=complex)

    # 输出态的约化密度矩阵：|f|² 部分保持相干，其余落回 |0⟩
    rho = np.outer(out, out.conj())
    rho[0, 0] += abs(beta) ** 2 * (1 - abs(amplitude) ** 2)
    psi_in = np.array([alpha, beta], dtype=complex)
    fidelity = float(np.real(psi_in.conj() @ rho @ psi_in))
    return out, fidelity
