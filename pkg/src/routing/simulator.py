"""
路由模拟模块
端到端执行：规划路径 -> 编译时序 -> 精确演化 -> 在输出RW头上测量并给出判定
"""

import itertools
import time
from dataclasses import dataclass, field
from multiprocessing.pool import ThreadPool
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import config
from core.dynamics import Propagator, StateVector, Trajectory, make_propagator, run_schedule, site_fidelity
from core.hamiltonian import Hamiltonian, assemble
from core.lattice import LatticeGraph, LatticeSpec, Vertex, build_lattice
from routing.compiler import PulseSchedule, compile_schedule, expected_duration
from routing.planner import plan_path
from utils.errors import UnroutableError
from utils.helpers import phase_error
from utils.logger import LoggerMixin, get_logger

VERDICT_PASS = 'pass'
VERDICT_FAIL = 'fail'


@dataclass
class TransferReport:
    """一次端到端传输的测量结果与判定"""
    v_in: Vertex
    v_out: Vertex
    fidelity_modulus: float
    measured_phase: float
    predicted_phase: float
    phase_error: float
    total_duration: float
    n_hops: int
    n_pulses: int
    path: str
    vertex_path: List[Vertex]
    tolerance: float
    phase_tolerance: float
    max_norm_deviation: float = 0.0
    faults: List[Vertex] = field(default_factory=list)
    schedule: Optional[PulseSchedule] = field(default=None, repr=False)
    trajectory: Optional[Trajectory] = field(default=None, repr=False)

    @property
    def modulus_ok(self) -> bool:
        return abs(self.fidelity_modulus - 1.0) <= self.tolerance

    @property
    def phase_ok(self) -> bool:
        return self.phase_error <= self.phase_tolerance

    @property
    def verdict(self) -> str:
        return VERDICT_PASS if self.modulus_ok and self.phase_ok else VERDICT_FAIL

    @property
    def passed(self) -> bool:
        return self.verdict == VERDICT_PASS

    def to_record(self) -> Dict:
        return {
            'v_in': list(self.v_in),
            'v_out': list(self.v_out),
            'fidelity_modulus': self.fidelity_modulus,
            'measured_phase': self.measured_phase,
            'predicted_phase': self.predicted_phase,
            'phase_error': self.phase_error,
            'total_duration': self.total_duration,
            'n_hops': self.n_hops,
            'n_pulses': self.n_pulses,
            'path': self.path,
            'vertex_path': [list(v) for v in self.vertex_path],
            'faults': [list(v) for v in self.faults],
            'tolerance': self.tolerance,
            'phase_tolerance': self.phase_tolerance,
            'max_norm_deviation': self.max_norm_deviation,
            'verdict': self.verdict,
        }


class RouteSimulator(LoggerMixin):
    """
    一个晶格上的路由模拟器

    晶格图、哈密顿量与传播子只构造一次，之后各次模拟只读共享，
    可以在多个线程中并发调用 simulate。
    """

    def __init__(self, spec_or_graph, dense_threshold: Optional[int] = None):
        if isinstance(spec_or_graph, LatticeGraph):
            self.graph = spec_or_graph
        else:
            self.graph = build_lattice(spec_or_graph)
        self.hamiltonian: Hamiltonian = assemble(self.graph)
        self.propagator: Propagator = make_propagator(self.hamiltonian, dense_threshold)
        self.logger.debug(f"📦 模拟器就绪: 维数 {self.graph.dim}")

    @property
    def spec(self) -> LatticeSpec:
        return self.graph.spec

    def schedule_for(
        self,
        v_in,
        v_out,
        faults: Optional[Iterable] = None,
        delays: Optional[Mapping[int, float]] = None,
        regional: bool = False,
    ) -> PulseSchedule:
        plan = plan_path(self.graph, v_in, v_out, faults=faults)
        return compile_schedule(plan, delays=delays, graph=self.graph, regional=regional)

    def simulate(
        self,
        v_in,
        v_out,
        tol: Optional[float] = None,
        phase_tol: Optional[float] = None,
        faults: Optional[Iterable] = None,
        delays: Optional[Mapping[int, float]] = None,
        samples_per_t1: Optional[int] = None,
        regional: bool = False,
    ) -> TransferReport:
        """
        模拟一次 v_in -> v_out 的传输

        Args:
            v_in: 输入RW头顶点
            v_out: 输出RW头顶点
            tol: 模容差，默认取配置
            phase_tol: 相位容差（弧度），默认取配置
            faults: 覆盖晶格自带的故障集合
            delays: {脉冲序号: 额外等待时间}
            samples_per_t1: 给定时记录轨迹
            regional: 使用只作用于当前顶点的脉冲

        Returns:
            TransferReport（判定失败也是正常返回）

        Raises:
            UnroutableError: 找不到避开故障的路径
        """
        tol = config.TOLERANCE if tol is None else tol
        phase_tol = config.PHASE_TOLERANCE if phase_tol is None else phase_tol
        fault_set = sorted(self.graph.faulty if faults is None else {Vertex(*f) for f in faults})

        schedule = self.schedule_for(v_in, v_out, faults=fault_set, delays=delays, regional=regional)
        plan = schedule.plan

        state0 = StateVector.basis(self.graph.dim, self.graph.head_index(plan.input_head))
        final, trajectory = run_schedule(
            self.hamiltonian, state0, schedule,
            propagator=self.propagator, samples_per_t1=samples_per_t1,
        )

        target = self.graph.head_index(plan.output_head)
        modulus, phase = site_fidelity(final, target)
        amplitude = complex(final.amplitudes[target])

        report = TransferReport(
            v_in=plan.input_head,
            v_out=plan.output_head,
            fidelity_modulus=modulus,
            measured_phase=phase,
            predicted_phase=schedule.predicted_phase,
            phase_error=phase_error(amplitude, schedule.predicted_amplitude),
            total_duration=schedule.total_duration,
            n_hops=schedule.n_hops,
            n_pulses=schedule.n_pulses,
            path=plan.summary(),
            vertex_path=list(plan.vertex_path),
            tolerance=tol,
            phase_tolerance=phase_tol,
            max_norm_deviation=abs(final.norm() - 1.0) if trajectory is None else trajectory.max_norm_deviation(),
            faults=fault_set,
            schedule=schedule,
            trajectory=trajectory,
        )

        if report.passed:
            self.logger.debug(f"✅ {report.path}: |f|={modulus:.12f}")
        else:
            self.logger.warning(
                f"⚠️ 传输未通过 {report.path}: |f|={modulus:.12f}, 相位误差 {report.phase_error:.2e}"
            )
        return report


def simulate_route(
    spec: LatticeSpec,
    v_in,
    v_out,
    tol: Optional[float] = None,
    **kwargs,
) -> TransferReport:
    """
    构造晶格与哈密顿量后模拟一次传输

    其余关键字参数原样传给 RouteSimulator.simulate。
    """
    return RouteSimulator(spec).simulate(v_in, v_out, tol=tol, **kwargs)


@dataclass
class SweepReport:
    """批量扫描的汇总结果"""
    reports: List[TransferReport] = field(default_factory=list)
    unroutable: List[Dict] = field(default_factory=list)
    strict: bool = False

    @property
    def n_routes(self) -> int:
        return len(self.reports)

    @property
    def min_fidelity(self) -> Optional[float]:
        return min((r.fidelity_modulus for r in self.reports), default=None)

    @property
    def max_phase_error(self) -> Optional[float]:
        return max((r.phase_error for r in self.reports), default=None)

    @property
    def failures(self) -> List[TransferReport]:
        return [r for r in self.reports if not r.passed]

    @property
    def all_pass(self) -> bool:
        if self.failures:
            return False
        return not (self.strict and self.unroutable)

    def timing_table(self) -> List[Dict]:
        """按跳数 N 汇总：路由数、实测总时长范围与理论值 2t0+N·t1"""
        by_hops: Dict[int, List[float]] = {}
        for r in self.reports:
            by_hops.setdefault(r.n_hops, []).append(r.total_duration)
        table = []
        for n in sorted(by_hops):
            durations = by_hops[n]
            expected = expected_duration(n)
            table.append({
                'n_hops': n,
                'routes': len(durations),
                'min_duration': min(durations),
                'max_duration': max(durations),
                'expected_duration': expected,
                'max_deviation': max(abs(d - expected) for d in durations),
            })
        return table

    def to_record(self) -> Dict:
        return {
            'summary': {
                'routes': self.n_routes,
                'passed': self.n_routes - len(self.failures),
                'failed': len(self.failures),
                'unroutable': len(self.unroutable),
                'min_fidelity': self.min_fidelity,
                'max_phase_error': self.max_phase_error,
                'all_pass': self.all_pass,
                'strict': self.strict,
            },
            'timing': self.timing_table(),
            'routes': [r.to_record() for r in self.reports],
            'unroutable': self.unroutable,
        }


def head_pairs(
    graph: LatticeGraph,
    ordered: bool = False,
    sample: Optional[int] = None,
    seed: Optional[int] = None,
) -> List[Tuple[Vertex, Vertex]]:
    """
    枚举RW头对

    默认只取 v_in < v_out（字典序）；ordered 为 True 时两个方向都取。
    sample 给定时用 seed 随机抽取这么多对，结果仍按字典序排列。
    """
    heads = sorted(graph.head_vertices())
    combos = itertools.permutations(heads, 2) if ordered else itertools.combinations(heads, 2)
    pairs = sorted(combos)
    if sample is not None and sample < len(pairs):
        rng = np.random.default_rng(seed)
        chosen = rng.choice(len(pairs), size=sample, replace=False)
        pairs = [pairs[i] for i in sorted(int(c) for c in chosen)]
    return pairs


def sweep(
    simulator: RouteSimulator,
    pairs: Optional[Sequence[Tuple]] = None,
    single_faults: bool = False,
    tol: Optional[float] = None,
    phase_tol: Optional[float] = None,
    workers: Optional[int] = None,
    strict: bool = False,
) -> SweepReport:
    """
    对一组RW头对（可选地再枚举单个故障开关）并发执行模拟

    结果按提交顺序收集，相同配置得到逐字节相同的报告。
    单故障枚举时，故障开关取晶格中除两端点与已知故障以外的每个顶点；
    把两端隔开的情形记入 unroutable，非 strict 模式下不算失败。
    """
    logger = get_logger()
    graph = simulator.graph
    pairs = head_pairs(graph) if pairs is None else [(Vertex(*a), Vertex(*b)) for a, b in pairs]
    base_faults = set(graph.faulty)

    jobs: List[Tuple[Vertex, Vertex, Optional[List[Vertex]]]] = []
    for v_in, v_out in pairs:
        if not single_faults:
            jobs.append((v_in, v_out, None))
            continue
        for vertex in graph.vertices:
            if vertex in (v_in, v_out) or vertex in base_faults:
                continue
            jobs.append((v_in, v_out, sorted(base_faults | {vertex})))

    def run(job):
        v_in, v_out, faults = job
        try:
            return simulator.simulate(v_in, v_out, tol=tol, phase_tol=phase_tol, faults=faults)
        except UnroutableError as e:
            return {
                'v_in': list(v_in),
                'v_out': list(v_out),
                'faults': [list(v) for v in (faults if faults is not None else sorted(base_faults))],
                'blocking_cut': [list(v) for v in e.blocking_cut],
            }

    workers = workers or config.worker_count()
    logger.info(f"📡 开始扫描: {len(pairs)} 个RW头对, {len(jobs)} 次模拟, {workers} 个工作线程")
    started = time.monotonic()

    if workers == 1 or len(jobs) <= 1:
        results = [run(job) for job in jobs]
    else:
        with ThreadPool(processes=workers) as pool:
            results = pool.map(run, jobs)

    report = SweepReport(strict=strict)
    for result in results:
        if isinstance(result, TransferReport):
            report.reports.append(result)
        else:
            report.unroutable.append(result)

    elapsed = time.monotonic() - started
    if report.all_pass:
        logger.info(
            f"✅ 扫描完成: {report.n_routes} 条路由全部通过, "
            f"{len(report.unroutable)} 个不可路由, 用时 {elapsed:.2f} 秒"
        )
    else:
        logger.error(
            f"❌ 扫描完成: {len(report.failures)} 条路由未通过, "
            f"{len(report.unroutable)} 个不可路由, 用时 {elapsed:.2f} 秒"
        )
    return report
