"""
辅助函数模块
相位运算、时间表达式与顶点字符串解析
"""

import re
import math
import cmath
from typing import Dict, List, Tuple


def wrap_phase(angle: float) -> float:
    """
    把角度折回 (-π, π] 区间

    Args:
        angle: 任意实数角度

    Returns:
        折回后的角度
    """
    wrapped = math.remainder(angle, 2 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2 * math.pi
    return wrapped


def phase_of(z: complex) -> float:
    """复数的辐角，取值 (-π, π]；零振幅返回0"""
    if z == 0:
        return 0.0
    return wrap_phase(cmath.phase(z))


def phase_error(measured: complex, predicted: complex) -> float:
    """
    在单位圆上比较两个相位

    只看 measured·conj(predicted) 的辐角，因此 -π 与 π 视为同一相位。

    Returns:
        相位差的绝对值（弧度）
    """
    if measured == 0 or predicted == 0:
        return math.pi
    return abs(cmath.phase(measured * predicted.conjugate()))


_TIME_PATTERN = re.compile(
    r'^\s*(?P<coef>[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)?\s*\*?\s*(?P<unit>[a-zA-Z]\w*)?\s*$'
)


def parse_time_expression(expr: str, units: Dict[str, float]) -> float:
    """
    解析时间表达式，例如 "2t1"、"t0"、"3*t1"、"1.25"

    Args:
        expr: 表达式字符串
        units: 单位名到数值的映射，如 {'t0': π/2, 't1': π/√2}

    Returns:
        时间值
    """
    match = _TIME_PATTERN.match(str(expr))
    if not match or (match.group('coef') is None and match.group('unit') is None):
        raise ValueError(f"无法解析的时间表达式: {expr!r}")

    coef = float(match.group('coef')) if match.group('coef') else 1.0
    unit = match.group('unit')
    if unit is None:
        return coef

    unit = unit.lower()
    if unit not in units:
        raise ValueError(f"未知的时间单位 {unit!r}，可用: {', '.join(sorted(units))}")
    return coef * units[unit]


def parse_vertex(text: str, default_plane: int = 0) -> Tuple[int, int, int]:
    """
    解析顶点字符串

    "p,x,y" 为完整形式，"x,y" 时平面取 default_plane。

    Returns:
        (plane, x, y)
    """
    parts = [p.strip() for p in str(text).replace(':', ',').split(',') if p.strip()]
    try:
        numbers = [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"顶点格式无效: {text!r}（应为 p,x,y 或 x,y）")

    if len(numbers) == 3:
        return numbers[0], numbers[1], numbers[2]
    if len(numbers) == 2:
        return default_plane, numbers[0], numbers[1]
    raise ValueError(f"顶点格式无效: {text!r}（应为 p,x,y 或 x,y）")


def parse_vertex_list(text: str) -> List[Tuple[int, int, int]]:
    """解析以分号分隔的顶点列表，空字符串返回空列表"""
    if text is None or not str(text).strip():
        return []
    return [parse_vertex(item) for item in str(text).split(';') if item.strip()]


def format_phase(angle: float) -> str:
    """以 π 为单位格式化相位，便于日志阅读"""
    return f"{angle / math.pi:+.6f}π"
