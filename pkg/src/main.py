"""
六角开关晶格完美态传输模拟器 - 命令行入口
构造晶格、验证ξ基分块结构、规划并模拟路由、批量扫描RW头对与故障模式。
"""

import argparse
import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

# 添加src到路径
sys.path.insert(0, str(Path(__file__).parent))

from config import config
from core.chains import T0, T1, TIME_UNITS, engineered_chain, max_transfer_modulus, transfer_amplitude, uniform_chain
from core.hamiltonian import Hamiltonian, assemble, verify_block_structure, xi_transform
from core.lattice import LatticeSpec, build_lattice, validate
from exporters.report_writer import dump_graph, dump_hamiltonian, report_json, write_text, write_trajectory
from exporters.spec_loader import load_spec
from routing.simulator import RouteSimulator, head_pairs, sweep
from utils.errors import (
    EXIT_OK,
    EXIT_SPEC_ERROR,
    EXIT_STRUCTURE_VIOLATION,
    EXIT_UNROUTABLE,
    EXIT_VERDICT_FAIL,
    HexPSTError,
    LatticeSpecError,
    StructureViolationError,
)
from utils.helpers import format_phase, parse_time_expression, parse_vertex, parse_vertex_list
from utils.logger import setup_logger

COMMANDS = ('build', 'verify-blocks', 'verify-chains', 'route', 'sweep')

# 链参考检查的阈值
CHAIN_PST_TOL = 1e-12
ENGINEERED_TOL = 1e-10
NEGATIVE_THRESHOLD = 0.999


def _default(value, fallback):
    return fallback if value is None else value


@dataclass
class RunConfig:
    """一次命令行运行的完整参数"""
    command: str
    spec_path: Optional[Path] = None
    v_in: Optional[Tuple[int, int, int]] = None
    v_out: Optional[Tuple[int, int, int]] = None
    tol: float = config.TOLERANCE
    phase_tol: float = config.PHASE_TOLERANCE
    faults: Optional[List[Tuple[int, int, int]]] = None
    output: Optional[Path] = None
    output_format: str = 'table'
    trajectory: Optional[Path] = None
    occupancy: bool = False
    samples_per_t1: int = config.SAMPLES_PER_T1
    delays: Dict[int, float] = field(default_factory=dict)
    regional: bool = False
    single_faults: bool = False
    workers: int = 0
    strict: bool = False
    seed: Optional[int] = None
    sample: Optional[int] = None
    ordered: bool = False
    max_n: int = 32
    t_max: float = 50.0
    step: float = 1e-3

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        """
        由解析后的参数构造并校验

        Raises:
            LatticeSpecError: 参数取值无效或引用的文件不存在
        """
        errors = []

        def vertex(text):
            if text is None:
                return None
            try:
                return parse_vertex(text)
            except ValueError as e:
                errors.append(str(e))
                return None

        faults = None
        if getattr(args, 'faults', None) is not None:
            try:
                faults = parse_vertex_list(args.faults)
            except ValueError as e:
                errors.append(f"--faults: {e}")

        delays = {}
        for index, expr in getattr(args, 'delay_pulse', None) or []:
            try:
                delays[int(index)] = delays.get(int(index), 0.0) + parse_time_expression(expr, TIME_UNITS)
            except ValueError as e:
                errors.append(f"--delay-pulse {index} {expr}: {e}")

        spec_path = Path(args.spec) if getattr(args, 'spec', None) else None
        if spec_path is not None and not spec_path.is_file():
            errors.append(f"晶格描述文件不存在: {spec_path}")

        run = cls(
            command=args.command,
            spec_path=spec_path,
            v_in=vertex(getattr(args, 'v_in', None)),
            v_out=vertex(getattr(args, 'v_out', None)),
            tol=args.tol if getattr(args, 'tol', None) is not None else config.TOLERANCE,
            phase_tol=args.phase_tol if getattr(args, 'phase_tol', None) is not None else config.PHASE_TOLERANCE,
            faults=faults,
            output=Path(args.output) if getattr(args, 'output', None) else None,
            output_format=getattr(args, 'format', 'table'),
            trajectory=Path(args.trajectory) if getattr(args, 'trajectory', None) else None,
            occupancy=getattr(args, 'occupancy', False),
            samples_per_t1=_default(getattr(args, 'samples_per_t1', None), config.SAMPLES_PER_T1),
            delays=delays,
            regional=getattr(args, 'regional', False),
            single_faults=getattr(args, 'single_faults', False),
            workers=_default(getattr(args, 'workers', None), 0),
            strict=getattr(args, 'strict', False),
            seed=getattr(args, 'seed', None),
            sample=getattr(args, 'sample', None),
            ordered=getattr(args, 'ordered', False),
            max_n=getattr(args, 'max_n', 32),
            t_max=getattr(args, 't_max', 50.0),
            step=getattr(args, 'step', 1e-3),
        )

        if run.tol <= 0 or run.phase_tol <= 0:
            errors.append("容差必须为正数")
        if run.samples_per_t1 <= 0:
            errors.append("--samples-per-t1 必须为正整数")
        if run.workers < 0:
            errors.append("--workers 不能为负数")
        if any(index < 0 for index in run.delays):
            errors.append("--delay-pulse 的脉冲序号不能为负")
        if any(delay < 0 for delay in run.delays.values()):
            errors.append("--delay-pulse 的延迟不能为负")
        if run.sample is not None and run.sample < 0:
            errors.append("--sample 不能为负数")
        if run.max_n < 2:
            errors.append("--max-n 至少为2")

        if errors:
            raise LatticeSpecError("命令行参数无效", errors)
        return run

    def load(self) -> LatticeSpec:
        spec = load_spec(self.spec_path)
        if self.faults is not None:
            spec = spec.with_faults(self.faults)
        return spec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='hexpst',
        description='六角Hadamard开关晶格上的完美量子态传输模拟与验证',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def with_spec(p):
        p.add_argument('spec', help='YAML晶格描述文件')
        p.add_argument('--faults', help='覆盖故障开关列表，如 "0,1,0;0,2,1"（空字符串表示无故障）')
        p.add_argument('--output', '-o', help='输出文件（默认打印到标准输出）')

    def with_tolerances(p):
        p.add_argument('--tol', type=float, help=f'模容差（默认 {config.TOLERANCE}）')
        p.add_argument('--phase-tol', type=float, help=f'相位容差，弧度（默认 {config.PHASE_TOLERANCE}）')

    p = sub.add_parser('build', help='构造晶格并输出站点表与耦合列表')
    with_spec(p)
    p.add_argument('--format', choices=('table', 'triplets'), default='table',
                   help='table: 站点表+耦合；triplets: 哈密顿量三元组')

    p = sub.add_parser('verify-blocks', help='验证ξ基下的链分解')
    with_spec(p)

    p = sub.add_parser('verify-chains', help='链参考检查（均匀2/3链、工程化链、4链反例）')
    p.add_argument('--output', '-o', help='输出文件')
    p.add_argument('--max-n', type=int, default=32, help='工程化链的最大长度')
    p.add_argument('--t-max', type=float, default=50.0, help='4链反例的搜索区间上限')
    p.add_argument('--step', type=float, default=1e-3, help='4链反例的搜索步长')

    p = sub.add_parser('route', help='模拟一次RW头之间的传输')
    with_spec(p)
    with_tolerances(p)
    p.add_argument('--from', dest='v_in', required=True, help='输入RW头顶点 p,x,y')
    p.add_argument('--to', dest='v_out', required=True, help='输出RW头顶点 p,x,y')
    p.add_argument('--trajectory', help='写出轨迹CSV')
    p.add_argument('--occupancy', action='store_true', help='轨迹只写占据概率')
    p.add_argument('--samples-per-t1', type=int, help=f'每个t1的采样数（默认 {config.SAMPLES_PER_T1}）')
    p.add_argument('--delay-pulse', nargs=2, action='append', metavar=('K', 'EXPR'),
                   help='把第K个脉冲推迟EXPR（如 2t1），可重复')
    p.add_argument('--regional', action='store_true', help='脉冲只作用于当前顶点')

    p = sub.add_parser('sweep', help='批量扫描全部RW头对')
    with_spec(p)
    with_tolerances(p)
    p.add_argument('--single-faults', action='store_true', help='对每个RW头对枚举单个故障开关')
    p.add_argument('--workers', type=int, help='工作线程数（默认为可用核心数）')
    p.add_argument('--strict', action='store_true', help='存在不可路由的RW头对时以退出码4结束')
    p.add_argument('--sample', type=int, help='随机抽取的RW头对数')
    p.add_argument('--seed', type=int, help='抽样随机种子')
    p.add_argument('--ordered', action='store_true', help='同时模拟两个方向')

    return parser


def _emit(text: str, run: RunConfig):
    if run.output:
        write_text(text, run.output)
    else:
        sys.stdout.write(text)


def cmd_build(run: RunConfig) -> int:
    """构造晶格，输出确定性的站点表/耦合列表或哈密顿量三元组"""
    logger = setup_logger()
    graph = build_lattice(run.load())

    violations = validate(graph)
    if violations:
        for v in violations:
            logger.error(f"❌ {v}")
        return EXIT_STRUCTURE_VIOLATION
    logger.info(f"✅ 晶格验证通过: {graph.dim} 个站点, {len(graph.couplings)} 个耦合")

    if run.output_format == 'triplets':
        _emit(dump_hamiltonian(assemble(graph)), run)
    else:
        _emit(dump_graph(graph), run)
    return EXIT_OK


def cmd_verify_blocks(
    run: RunConfig,
    hamiltonian_hook: Optional[Callable[[Hamiltonian], Hamiltonian]] = None,
) -> int:
    """
    组装哈密顿量并验证ξ基分解

    hamiltonian_hook 可以在验证前替换哈密顿量（测试中用于注入损坏）。
    """
    logger = setup_logger()
    graph = build_lattice(run.load())
    H = assemble(graph)
    if hamiltonian_hook is not None:
        H = hamiltonian_hook(H)

    try:
        inventory = verify_block_structure(H, xi_transform(graph))
    except StructureViolationError as e:
        logger.error(f"❌ {e}")
        _emit(report_json({'violations': [v.to_record() for v in e.violations]}, 'block_violations'), run)
        return EXIT_STRUCTURE_VIOLATION

    print(inventory.census_line())
    if run.output:
        write_text(report_json(inventory.to_record(), 'chain_inventory'), run.output)
    return EXIT_OK


def chain_checks(max_n: int = 32, t_max: float = 50.0, step: float = 1e-3) -> List[Dict]:
    """链参考检查的全部条目"""
    checks = []

    for n, t, name in ((2, T0, 'uniform_2_chain'), (3, T1, 'uniform_3_chain')):
        chain = uniform_chain(n)
        amplitude = transfer_amplitude(chain, 0, n - 1, t)
        checks.append({
            'name': name,
            'time': t,
            'modulus': abs(amplitude),
            'passed': abs(abs(amplitude) - 1.0) <= CHAIN_PST_TOL,
        })

    worst = 1.0
    worst_case = None
    for N in range(2, max_n + 1):
        chain = engineered_chain(N)
        t = chain.mirror_time()
        for site in range(N):
            modulus = abs(transfer_amplitude(chain, site, chain.mirror(site), t))
            if modulus < worst:
                worst, worst_case = modulus, [N, site]
    checks.append({
        'name': 'engineered_chains',
        'max_n': max_n,
        'time': 'mirror_time',
        'min_modulus': worst,
        'worst_case': worst_case,
        'passed': worst >= 1.0 - ENGINEERED_TOL,
    })

    modulus, at = max_transfer_modulus(uniform_chain(4), t_max=t_max, step=step)
    checks.append({
        'name': 'uniform_4_chain_negative',
        't_max': t_max,
        'step': step,
        'max_modulus': modulus,
        'at_time': at,
        'passed': modulus < NEGATIVE_THRESHOLD,
    })
    return checks


def cmd_verify_chains(run: RunConfig) -> int:
    logger = setup_logger()
    checks = chain_checks(run.max_n, run.t_max, run.step)
    for check in checks:
        mark = '✅' if check['passed'] else '❌'
        logger.info(f"{mark} {check['name']}")
    _emit(report_json({'checks': checks}, 'chain_checks'), run)
    return EXIT_OK if all(c['passed'] for c in checks) else EXIT_VERDICT_FAIL


def cmd_route(run: RunConfig) -> int:
    """完整流程：规划、编译、演化、测量"""
    logger = setup_logger()
    simulator = RouteSimulator(run.load())

    report = simulator.simulate(
        run.v_in, run.v_out,
        tol=run.tol,
        phase_tol=run.phase_tol,
        delays=run.delays,
        samples_per_t1=run.samples_per_t1 if run.trajectory else None,
        regional=run.regional,
    )

    record = report.to_record()
    record['schedule'] = report.schedule.to_record()
    _emit(report_json(record, 'transfer'), run)

    if run.trajectory and report.trajectory is not None:
        write_trajectory(report.trajectory, simulator.graph, run.trajectory, occupancy=run.occupancy)

    phases = f"相位 {format_phase(report.measured_phase)} (预期 {format_phase(report.predicted_phase)})"
    if report.passed:
        logger.info(f"✅ 传输通过: {report.path} |f|={report.fidelity_modulus:.12f} {phases}")
        return EXIT_OK
    logger.error(f"❌ 传输未通过: {report.path} |f|={report.fidelity_modulus:.12f} {phases}")
    return EXIT_VERDICT_FAIL


def cmd_sweep(run: RunConfig) -> int:
    """批量扫描：全部（或抽样的）RW头对，可选单故障枚举"""
    simulator = RouteSimulator(run.load())
    pairs = head_pairs(simulator.graph, ordered=run.ordered, sample=run.sample, seed=run.seed)
    result = sweep(
        simulator,
        pairs=pairs,
        single_faults=run.single_faults,
        tol=run.tol,
        phase_tol=run.phase_tol,
        workers=run.workers,
        strict=run.strict,
    )
    _emit(report_json(result.to_record(), 'sweep'), run)

    if result.failures:
        return EXIT_VERDICT_FAIL
    if run.strict and result.unroutable:
        return EXIT_UNROUTABLE
    return EXIT_OK


HANDLERS = {
    'build': cmd_build,
    'verify-blocks': cmd_verify_blocks,
    'verify-chains': cmd_verify_chains,
    'route': cmd_route,
    'sweep': cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主程序入口，返回退出码"""

    # 初始化日志
    logger = setup_logger()

    if config.DEBUG_MODE:
        config.print_config()

    # 验证配置
    errors = config.validate()
    if errors:
        for error in errors:
            logger.error(f"❌ 配置错误: {error}")
        return EXIT_SPEC_ERROR

    args = build_parser().parse_args(argv)
    logger.debug(f"🚀 hexpst {args.command} ({datetime.now().strftime('%Y-%m-%d %H:%M:%S')})")

    try:
        run = RunConfig.from_args(args)
        return HANDLERS[run.command](run)

    except HexPSTError as e:
        logger.error(f"❌ {e}")
        return e.exit_code

    except Exception as e:
        logger.error(f"\n❌ 运行出错: {str(e)}")
        logger.exception(e)
        return 1


if __name__ == '__main__':
    sys.exit(main())
