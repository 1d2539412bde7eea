# src/routing/__init__.py
"""路由模块"""
from .planner import RoutePlan, plan_path
from .compiler import PulseSchedule, compile_schedule
from .simulator import RouteSimulator, TransferReport, simulate_route, sweep

__all__ = [
    'RoutePlan', 'plan_path', 'PulseSchedule', 'compile_schedule',
    'RouteSimulator', 'TransferReport', 'simulate_route', 'sweep',
]
