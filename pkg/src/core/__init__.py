# src/core/__init__.py
"""核心模块：晶格、哈密顿量、动力学、参考链"""
from .lattice import LatticeSpec, LatticeGraph, Vertex, build_lattice
from .hamiltonian import Hamiltonian, assemble, xi_transform, verify_block_structure

__all__ = [
    'LatticeSpec', 'LatticeGraph', 'Vertex', 'build_lattice',
    'Hamiltonian', 'assemble', 'xi_transform', 'verify_block_structure',
]
