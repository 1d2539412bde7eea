"""
配置管理模块
集中管理所有系统配置，从环境变量加载
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# 加载环境变量
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(env_path)


class Config:
    """系统配置类"""

    # ==================== 判定容差 ====================
    TOLERANCE = float(os.getenv('HEXPST_TOLERANCE', '1e-9'))
    PHASE_TOLERANCE = float(os.getenv('HEXPST_PHASE_TOLERANCE', '1e-8'))
    STRUCTURE_TOL = float(os.getenv('HEXPST_STRUCTURE_TOL', '1e-13'))
    COUPLING_TOL = float(os.getenv('HEXPST_COUPLING_TOL', '1e-12'))

    # ==================== 数值引擎 ====================
    DENSE_THRESHOLD = int(os.getenv('HEXPST_DENSE_THRESHOLD', '2048'))
    SAMPLES_PER_T1 = int(os.getenv('HEXPST_SAMPLES_PER_T1', '64'))

    # ==================== 批量扫描 ====================
    WORKERS = int(os.getenv('HEXPST_WORKERS', '0'))

    # ==================== 运行模式 ====================
    DEBUG_MODE = os.getenv('DEBUG_MODE', 'false').lower() == 'true'
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

    # ==================== 文件格式 ====================
    SPEC_SCHEMA = 'hexpst.lattice/v1'
    REPORT_SCHEMA = 'hexpst.report/v1'

    @classmethod
    def worker_count(cls) -> int:
        """扫描使用的工作线程数，0 表示取可用核心数"""
        if cls.WORKERS > 0:
            return cls.WORKERS
        return os.cpu_count() or 1

    @classmethod
    def validate(cls) -> list:
        """验证配置取值是否合理"""
        errors = []

        for name in ('TOLERANCE', 'PHASE_TOLERANCE', 'STRUCTURE_TOL', 'COUPLING_TOL'):
            if getattr(cls, name) <= 0:
                errors.append(f"{name} 必须为正数")

        if cls.DENSE_THRESHOLD <= 0:
            errors.append("DENSE_THRESHOLD 必须为正整数")

        if cls.SAMPLES_PER_T1 <= 0:
            errors.append("SAMPLES_PER_T1 必须为正整数")

        if cls.WORKERS < 0:
            errors.append("WORKERS 不能为负数")

        return errors

    @classmethod
    def print_config(cls):
        """打印当前配置"""
        print("=" * 50)
        print("📋 系统配置")
        print("=" * 50)
        print(f"保真度容差: {cls.TOLERANCE}")
        print(f"相位容差: {cls.PHASE_TOLERANCE}")
        print(f"结构零容差: {cls.STRUCTURE_TOL}")
        print(f"链耦合容差: {cls.COUPLING_TOL}")
        print(f"稠密阈值: {cls.DENSE_THRESHOLD}")
        print(f"每t1采样数: {cls.SAMPLES_PER_T1}")
        print(f"工作线程: {cls.worker_count()}")
        print("=" * 50)


# 创建全局配置实例
config = Config()
