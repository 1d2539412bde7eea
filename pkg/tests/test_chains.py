"""完美传输参考链"""
import math

import numpy as np
import pytest

from core.chains import (
    T0,
    T1,
    ChainHamiltonian,
    engineered_chain,
    max_transfer_modulus,
    transfer_amplitude,
    uniform_chain,
)
from core.dynamics import Propagator
from core.hamiltonian import Hamiltonian


def test_uniform_two_chain():
    chain = uniform_chain(2)
    np.testing.assert_allclose(chain.spectrum(), [-1.0, 1.0], atol=1e-14)
    amplitude = transfer_amplitude(chain, 0, 1, T0)
    assert abs(amplitude - (-1j)) <= 1e-12
    assert abs(abs(amplitude) - 1.0) <= 1e-12


def test_uniform_three_chain():
    chain = uniform_chain(3)
    np.testing.assert_allclose(chain.spectrum(), [-math.sqrt(2), 0.0, math.sqrt(2)], atol=1e-14)
    amplitude = transfer_amplitude(chain, 0, 2, T1)
    assert abs(amplitude - (-1.0)) <= 1e-12


def test_three_chain_closed_form():
    chain = uniform_chain(3)
    t = np.linspace(0.0, 3 * T1, 50)
    np.testing.assert_allclose(
        transfer_amplitude(chain, 0, 2, t), (np.cos(math.sqrt(2) * t) - 1) / 2, atol=1e-12
    )


def test_uniform_four_chain_never_transfers():
    modulus, at = max_transfer_modulus(uniform_chain(4), t_max=50.0, step=1e-3)
    assert modulus < 0.999
    assert 0.0 <= at <= 50.0


def test_uniform_four_chain_has_no_mirror_time():
    assert uniform_chain(4).mirror_time() is None


@pytest.mark.parametrize('N, expected', [
    (2, [1.0]),
    (3, [math.sqrt(2), math.sqrt(2)]),
    (8, [math.sqrt(k) for k in (7, 12, 15, 16, 15, 12, 7)]),
])
def test_engineered_couplings(N, expected):
    np.testing.assert_allclose(engineered_chain(N).couplings, expected, rtol=0, atol=1e-15)


def test_engineered_chain_two_equals_uniform():
    assert engineered_chain(2) == uniform_chain(2)


@pytest.mark.parametrize('N', range(2, 33))
def test_engineered_chain_mirror_transfer(N):
    chain = engineered_chain(N)
    assert chain.is_mirror_symmetric()
    assert chain.spectral_gap() == pytest.approx(2.0, abs=1e-10)
    t = chain.mirror_time()
    assert t == pytest.approx(math.pi / 2)
    for site in range(N):
        assert abs(transfer_amplitude(chain, site, chain.mirror(site), t)) >= 1 - 1e-10


def test_engineered_chain_revives_at_pi():
    chain = engineered_chain(9)
    for site in range(chain.length):
        assert abs(transfer_amplitude(chain, site, site, math.pi)) >= 1 - 1e-10


def test_halved_engineered_chain_transfers_at_pi():
    chain = ChainHamiltonian.from_couplings([k / 2 for k in engineered_chain(12).couplings])
    assert chain.mirror_time() == pytest.approx(math.pi)
    assert abs(transfer_amplitude(chain, 0, 11, math.pi)) >= 1 - 1e-10


def test_probability_is_conserved():
    chain = engineered_chain(7)
    rng = np.random.default_rng(3)
    for t in rng.uniform(0, 10, size=20):
        amplitudes = [transfer_amplitude(chain, 2, out, t) for out in range(7)]
        assert all(abs(a) <= 1 + 1e-12 for a in amplitudes)
        assert sum(abs(a) ** 2 for a in amplitudes) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize('n', [2, 3])
def test_oracle_agrees_with_propagator(n):
    """把均匀链当作独立哈密顿量演化，结果与三对角本征展开一致"""
    H = Hamiltonian.from_triplets(n, [(k, k + 1, 1.0) for k in range(n - 1)])
    propagator = Propagator(H)
    chain = uniform_chain(n)
    start = np.zeros(n, dtype=complex)
    start[0] = 1.0
    rng = np.random.default_rng(11)
    for t in rng.uniform(0, 20, size=100):
        evolved = propagator.evolve(start, t)
        expected = [transfer_amplitude(chain, 0, out, t) for out in range(n)]
        np.testing.assert_allclose(evolved, expected, atol=1e-11)


def test_invalid_chains():
    with pytest.raises(ValueError):
        uniform_chain(1)
    with pytest.raises(ValueError):
        engineered_chain(1)
    with pytest.raises(ValueError):
        ChainHamiltonian.from_couplings([1.0, -1.0])
    with pytest.raises(ValueError):
        transfer_amplitude(uniform_chain(3), 0, 3, 1.0)
