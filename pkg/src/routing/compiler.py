"""
脉冲时序编译模块
把路由计划编译成全局 Z 层控制脉冲序列，并记录预期的确定相位
"""

from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Tuple

from core.chains import T0, T1
from core.dynamics import PhasePulse, xi_permutation
from core.lattice import CONTROL_LAYERS, LatticeGraph, Vertex, link_direction_index
from routing.planner import PLANE_CROSSING, RoutePlan
from utils.errors import AdjacencyError, DelayRequestError, ScheduleError
from utils.helpers import phase_of
from utils.logger import get_logger

# 脉冲角色
ROLE_UPLOAD = 'upload'
ROLE_TURN = 'turn'
ROLE_PARK = 'park'
ROLE_LAUNCH = 'launch'
ROLE_DOWNLOAD = 'download'

# 判断延迟是否为整数个回归周期
_REVIVAL_TOL = 1e-9


@dataclass(frozen=True)
class PulseEvent:
    """时序中的一个瞬时脉冲"""
    time: float
    pulse: PhasePulse
    role: str
    vertex: Vertex
    from_xi: int
    to_xi: int
    delay: float = 0.0

    def to_record(self) -> Dict:
        return {
            'time': self.time,
            'layers': sorted(self.pulse.layers),
            'label': self.pulse.label,
            'role': self.role,
            'vertex': list(self.vertex),
            'from_xi': self.from_xi,
            'to_xi': self.to_xi,
            'delay': self.delay,
        }


@dataclass(frozen=True)
class PulseSchedule:
    """
    编译好的脉冲时序

    predicted_amplitude 是到达输出RW头时振幅的确定相位因子（模为1）：
    每经过一条2链乘 -i，每经过一条3链乘 -1，延迟按回归周期另乘因子。
    """
    events: Tuple[PulseEvent, ...]
    total_duration: float
    predicted_amplitude: complex
    n_hops: int
    revival_aligned: bool = True
    plan: Optional[RoutePlan] = field(default=None, compare=False, repr=False)

    @property
    def predicted_phase(self) -> float:
        return phase_of(self.predicted_amplitude)

    @property
    def n_pulses(self) -> int:
        return len(self.events)

    def times(self) -> List[float]:
        return [e.time for e in self.events]

    def to_record(self) -> Dict:
        return {
            'n_hops': self.n_hops,
            'total_duration': self.total_duration,
            'predicted_phase': self.predicted_phase,
            'revival_aligned': self.revival_aligned,
            'events': [e.to_record() for e in self.events],
        }


def pulse_layers(from_xi: int, to_xi: int) -> frozenset:
    """
    把 ξ^a 映成 ξ^b 的脉冲层集合

    两个指标都非零时是 Z_aZ_b（转向）；其中一个是0时是 Ẑ_c，
    即 {1,2,3} 去掉非零的那个方向 c（上传、下载、驻留、发射）。
    相同指标不需要脉冲，返回空集。
    """
    for index in (from_xi, to_xi):
        if index not in (0,) + CONTROL_LAYERS:
            raise ScheduleError(f"ξ指标越界: {index}")
    if from_xi == to_xi:
        return frozenset()
    if from_xi and to_xi:
        return frozenset((from_xi, to_xi))
    direction = from_xi or to_xi
    return frozenset(CONTROL_LAYERS) - {direction}


def revival_period(role: str) -> Tuple[float, int]:
    """
    脉冲之前激发粒子所在链的回归周期及每个周期带来的符号

    上传脉冲之前粒子在 (RW头, ξ^0) 2链上，2t0 后回到原处并乘 -1；
    其余脉冲之前粒子停在某条3链的端点，2t1 后精确回到原处。
    """
    if role == ROLE_UPLOAD:
        return 2 * T0, -1
    return 2 * T1, 1


def _role(k: int, n: int, from_xi: int, to_xi: int) -> str:
    if k == 0:
        return ROLE_UPLOAD
    if k == n:
        return ROLE_DOWNLOAD
    if to_xi == 0:
        return ROLE_PARK
    if from_xi == 0:
        return ROLE_LAUNCH
    return ROLE_TURN


def _revival_factor(delay: float, role: str) -> Optional[int]:
    """整数个回归周期时返回累计符号，否则返回None"""
    period, factor = revival_period(role)
    periods = delay / period
    if abs(periods - round(periods)) > _REVIVAL_TOL:
        return None
    return factor ** int(round(periods))


def _check_plan(plan: RoutePlan, graph: LatticeGraph):
    """逐步核对计划中的方向与图的邻接关系一致"""
    for k, direction in enumerate(plan.step_directions):
        v, w = plan.vertex_path[k], plan.vertex_path[k + 1]
        if direction == PLANE_CROSSING:
            partner = graph.connector_partner(v)
            if partner is None or partner[1] != w:
                raise ScheduleError(f"第 {k} 步 {v} => {w} 没有对应的层间连接器")
            continue
        try:
            actual = link_direction_index(graph, v, w)
        except AdjacencyError as e:
            raise ScheduleError(f"第 {k} 步: {e}")
        if actual != direction:
            raise ScheduleError(f"第 {k} 步 {v} -> {w} 的方向应为 {actual}，计划中为 {direction}")


def compile_schedule(
    plan: RoutePlan,
    delays: Optional[Mapping[int, float]] = None,
    graph: Optional[LatticeGraph] = None,
    regional: bool = False,
) -> PulseSchedule:
    """
    编译路由计划

    第 k 个路径顶点上的脉冲在 t0 + k·t1 触发（加上之前累计的延迟），
    把到达时的ξ指标映到离开时的ξ指标；之后再自由演化 t0 完成下载。

    Args:
        plan: 路由计划
        delays: {脉冲序号: 额外等待时间}，延迟会顺延其后的所有脉冲
        graph: 提供时先核对计划与图的邻接关系
        regional: 为 True 时每个脉冲只作用于当前顶点（默认全局脉冲）

    Returns:
        PulseSchedule

    Raises:
        ScheduleError: 方向记账不一致
        DelayRequestError: 延迟为负或引用了不存在的脉冲
    """
    logger = get_logger()
    delays = dict(delays or {})
    n = plan.n_three_chain_hops

    if graph is not None:
        _check_plan(plan, graph)

    if n == 0:
        if delays:
            raise DelayRequestError("空路由没有可延迟的脉冲")
        return PulseSchedule(events=(), total_duration=0.0, predicted_amplitude=1 + 0j, n_hops=0, plan=plan)

    amplitude = (-1j) ** 2 * (-1) ** n
    aligned = True
    shift = 0.0
    events: List[PulseEvent] = []

    for k in range(n + 1):
        vertex = plan.vertex_path[k]
        from_xi = 0 if k == 0 else plan.step_directions[k - 1]
        to_xi = 0 if k == n else plan.step_directions[k]
        layers = pulse_layers(from_xi, to_xi)
        if not layers:
            continue

        role = _role(k, n, from_xi, to_xi)
        index = len(events)
        delay = float(delays.pop(index, 0.0))
        if delay < 0:
            raise DelayRequestError(f"脉冲 {index} 的延迟不能为负: {delay}")
        if delay:
            factor = _revival_factor(delay, role)
            if factor is None:
                aligned = False
                logger.warning(f"⚠️ 脉冲 {index} ({role}) 的延迟 {delay:.6f} 不是回归周期的整数倍")
            else:
                amplitude *= factor
            shift += delay

        if xi_permutation(layers).get(from_xi) != to_xi:
            raise ScheduleError(f"脉冲 {sorted(layers)} 不能把 ξ^{from_xi} 映到 ξ^{to_xi}")

        region = frozenset([vertex]) if regional else None
        events.append(PulseEvent(
            time=T0 + k * T1 + shift,
            pulse=PhasePulse(layers, region),
            role=role,
            vertex=vertex,
            from_xi=from_xi,
            to_xi=to_xi,
            delay=delay,
        ))

    if delays:
        raise DelayRequestError(f"延迟引用了不存在的脉冲序号: {sorted(delays)}")

    if len(events) > n + 2:
        raise ScheduleError(f"脉冲数 {len(events)} 超过 N+2 = {n + 2}")

    schedule = PulseSchedule(
        events=tuple(events),
        total_duration=2 * T0 + n * T1 + shift,
        predicted_amplitude=complex(amplitude),
        n_hops=n,
        revival_aligned=aligned,
        plan=plan,
    )
    logger.debug(
        f"🔧 时序编译完成: N={n}, {schedule.n_pulses} 个脉冲, 总时长 {schedule.total_duration:.6f}"
    )
    return schedule


def delay_event(schedule: PulseSchedule, index: int, delay: float) -> PulseSchedule:
    """
    在已编译的时序上把第 index 个脉冲（及其后全部脉冲）推迟 delay

    等待整数个回归周期时传输仍然完美，预期相位按周期符号更新。
    """
    if not 0 <= index < schedule.n_pulses:
        raise ScheduleError(f"脉冲序号 {index} 超出范围 0..{schedule.n_pulses - 1}")
    if delay < 0:
        raise ScheduleError(f"延迟不能为负: {delay}")

    target = schedule.events[index]
    factor = _revival_factor(delay, target.role)
    amplitude = schedule.predicted_amplitude * (factor or 1)

    events = list(schedule.events[:index])
    events.append(replace(target, time=target.time + delay, delay=target.delay + delay))
    events.extend(replace(e, time=e.time + delay) for e in schedule.events[index + 1:])

    return replace(
        schedule,
        events=tuple(events),
        total_duration=schedule.total_duration + delay,
        predicted_amplitude=complex(amplitude),
        revival_aligned=schedule.revival_aligned and factor is not None,
    )


def expected_duration(n_hops: int) -> float:
    """无延迟路由的理论总时长 2t0 + N·t1（N=0 时为0）"""
    return 0.0 if n_hops == 0 else 2 * T0 + n_hops * T1


def expected_phase(n_hops: int) -> float:
    """无延迟路由的理论相位 arg((-i)²(-1)^N)"""
    return 0.0 if n_hops == 0 else phase_of((-1j) ** 2 * (-1) ** n_hops)
