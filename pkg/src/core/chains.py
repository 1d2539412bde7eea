"""
完美传输链参考模块
XY自旋链的闭式/三对角本征展开结果，作为其他模块测试的独立基准
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

# 均匀2链与3链的完美传输时间（耦合归一化为1，ħ=1）
T0 = math.pi / 2
T1 = math.pi / math.sqrt(2)

TIME_UNITS = {'t0': T0, 't1': T1}


@dataclass(frozen=True)
class ChainHamiltonian:
    """
    单激发子空间中的XY链：对角为零的三对角对称矩阵

    站点编号从0开始，站点 n 的镜像是 length-1-n。
    """
    couplings: Tuple[float, ...]

    def __post_init__(self):
        couplings = tuple(float(k) for k in self.couplings)
        if len(couplings) < 1:
            raise ValueError("链长度至少为2")
        if any(k <= 0 for k in couplings):
            raise ValueError(f"耦合必须为正: {couplings}")
        object.__setattr__(self, 'couplings', couplings)

    @classmethod
    def from_couplings(cls, couplings: Sequence[float]) -> 'ChainHamiltonian':
        return cls(tuple(couplings))

    @property
    def length(self) -> int:
        return len(self.couplings) + 1

    def matrix(self) -> np.ndarray:
        return np.diag(self.couplings, 1) + np.diag(self.couplings, -1)

    def eigensystem(self) -> Tuple[np.ndarray, np.ndarray]:
        """三对角本征分解 (本征值升序, 本征向量按列)"""
        return eigh_tridiagonal(np.zeros(self.length), np.asarray(self.couplings))

    def spectrum(self) -> np.ndarray:
        return self.eigensystem()[0]

    def mirror(self, site: int) -> int:
        return self.length - 1 - site

    def is_mirror_symmetric(self, tol: float = 1e-12) -> bool:
        c = np.asarray(self.couplings)
        return bool(np.allclose(c, c[::-1], atol=tol))

    def spectral_gap(self, tol: float = 1e-10) -> Optional[float]:
        """相邻本征值间距全部相等时返回该间距，否则返回None"""
        gaps = np.diff(self.spectrum())
        if np.allclose(gaps, gaps[0], atol=tol):
            return float(gaps[0])
        return None

    def mirror_time(self) -> Optional[float]:
        """
        镜像对称且谱等间距的链在 π/gap 时刻完成镜像传输

        Returns:
            传输时间；条件不满足时返回None
        """
        gap = self.spectral_gap()
        if gap is None or not self.is_mirror_symmetric():
            return None
        return math.pi / gap


def uniform_chain(n: int) -> ChainHamiltonian:
    """长度为 n、耦合全为1的链"""
    if n < 2:
        raise ValueError(f"链长度至少为2: {n}")
    return ChainHamiltonian(tuple([1.0] * (n - 1)))


def engineered_chain(N: int) -> ChainHamiltonian:
    """
    工程化耦合链 K_{n,n+1} = √(n(N-n))，n = 1..N-1

    按公式原样取值，不做整体缩放。
    """
    if N < 2:
        raise ValueError(f"链长度至少为2: {N}")
    return ChainHamiltonian(tuple(math.sqrt(n * (N - n)) for n in range(1, N)))


def transfer_amplitude(chain: ChainHamiltonian, site_in: int, site_out: int, t):
    """
    ⟨out| e^{-iHt} |in⟩，通过三对角本征展开计算

    Args:
        chain: 链哈密顿量
        site_in: 输入站点（从0开始）
        site_out: 输出站点
        t: 时间，标量或数组

    Returns:
        复振幅（与 t 同形状）
    """
    for site in (site_in, site_out):
        if not 0 <= site < chain.length:
            raise ValueError(f"站点 {site} 超出链长度 {chain.length}")

    energies, vectors = chain.eigensystem()
    weights = vectors[site_out, :] * vectors[site_in, :]
    t_arr = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t_arr, energies))
    amplitude = phases @ weights
    if np.ndim(t) == 0:
        return complex(amplitude)
    return amplitude


def max_transfer_modulus(
    chain: ChainHamiltonian,
    site_in: int = 0,
    site_out: Optional[int] = None,
    t_max: float = 50.0,
    step: float = 1e-3,
) -> Tuple[float, float]:
    """
    在 [0, t_max] 的等距网格上搜索端到端振幅模的最大值

    只是数值上的健全性检查，不能证明不存在完美传输。

    Returns:
        (最大模, 对应时刻)
    """
    site_out = chain.mirror(site_in) if site_out is None else site_out
    grid = np.arange(0.0, t_max + step / 2, step)
    moduli = np.abs(transfer_amplitude(chain, site_in, site_out, grid))
    best = int(np.argmax(moduli))
    return float(moduli[best]), float(grid[best])
