# src/__init__.py
"""六角Hadamard开关晶格完美态传输模拟器"""
__version__ = "1.0.0"
