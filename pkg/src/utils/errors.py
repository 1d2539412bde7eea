"""
异常定义模块
每类异常对应命令行的一个固定退出码
"""

from typing import Iterable, List, Optional, Sequence


# 命令行退出码（稳定约定）
EXIT_OK = 0
EXIT_SPEC_ERROR = 2
EXIT_STRUCTURE_VIOLATION = 3
EXIT_UNROUTABLE = 4
EXIT_VERDICT_FAIL = 5


class HexPSTError(Exception):
    """所有业务异常的基类"""

    exit_code = 1


class LatticeSpecError(HexPSTError, ValueError):
    """晶格描述无效或自相矛盾"""

    exit_code = EXIT_SPEC_ERROR

    def __init__(self, message: str, diagnostics: Optional[Iterable[str]] = None):
        self.diagnostics: List[str] = list(diagnostics or [])
        if self.diagnostics:
            message = f"{message}: " + '; '.join(self.diagnostics)
        super().__init__(message)


class RouteRequestError(HexPSTError, ValueError):
    """路由请求本身无效（端点不存在或没有RW头）"""

    exit_code = EXIT_SPEC_ERROR


class AdjacencyError(HexPSTError, ValueError):
    """两个顶点在平面内不相邻"""


class StructureViolationError(HexPSTError):
    """ξ基下的分块结构与预期不符"""

    exit_code = EXIT_STRUCTURE_VIOLATION

    def __init__(self, message: str, violations: Sequence = ()):
        self.violations = list(violations)
        super().__init__(f"{message} ({len(self.violations)} 处违规)")


class UnroutableError(HexPSTError):
    """在避开故障开关的前提下找不到路径"""

    exit_code = EXIT_UNROUTABLE

    def __init__(self, v_in, v_out, blocking_cut: Iterable = ()):
        self.v_in = v_in
        self.v_out = v_out
        self.blocking_cut = sorted(blocking_cut)
        if self.blocking_cut:
            cut = ', '.join(str(tuple(v)) for v in self.blocking_cut)
            detail = f"阻断割集: {cut}"
        else:
            detail = "两端点所在区域之间没有连接"
        super().__init__(f"unroutable {tuple(v_in)} -> {tuple(v_out)}: {detail}")


class ScheduleError(HexPSTError, ValueError):
    """脉冲时序非法或方向记账不一致"""


class DelayRequestError(ScheduleError):
    """请求的延迟无效（负数或引用了不存在的脉冲）"""

    exit_code = EXIT_SPEC_ERROR


class PropagatorError(HexPSTError):
    """本征分解失败"""
