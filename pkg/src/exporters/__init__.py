# src/exporters/__init__.py
"""文件读写模块"""
from .spec_loader import load_spec, dump_spec
from .report_writer import report_json, dump_graph, load_graph

__all__ = ['load_spec', 'dump_spec', 'report_json', 'dump_graph', 'load_graph']
