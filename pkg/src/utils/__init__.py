# src/utils/__init__.py
"""工具模块"""
from .logger import setup_logger, get_logger
from .validators import LatticeValidator, Violation

__all__ = ['setup_logger', 'get_logger', 'LatticeValidator', 'Violation']
