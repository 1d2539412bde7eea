"""哈密顿量组装、ξ基变换与链分解"""
import numpy as np
import pytest

from core.hamiltonian import assemble, switch_properties, verify_block_structure, xi_transform
from core.lattice import HADAMARD, Connector, LatticeSpec, build_lattice
from utils.errors import StructureViolationError


@pytest.fixture
def dangling_switch():
    return build_lattice(LatticeSpec(
        hex_extent=(0, 0), extra_vertices=[(0, 0, 0)], boundary_policy='keep_dangling'
    ))


def test_isolated_switch_block_is_hadamard(dangling_switch):
    H = assemble(dangling_switch).to_dense()
    assert H.shape == (8, 8)
    # 外部站点顺序：链路1、2、3，然后RW头（e0腿）
    block = H[0:4, [7, 4, 5, 6]]
    np.testing.assert_array_equal(block, HADAMARD)
    np.testing.assert_array_equal(H[0:4, 0:4], np.zeros((4, 4)))
    np.testing.assert_array_equal(H, H.T)


def test_empty_graph_gives_empty_matrix():
    graph = build_lattice(LatticeSpec(hex_extent=(0, 0)))
    H = assemble(graph)
    assert H.dim == 0
    assert H.to_dense().shape == (0, 0)
    assert verify_block_structure(H, xi_transform(graph)).chains == ()


def test_hexagon_nonzero_pairs(hexagon):
    H = assemble(hexagon)
    assert H.nnz_pairs == 72
    assert H.check_invariants() == []
    assert all(r < c for r, c in zip(H.rows, H.cols))


def test_xi_transform_is_orthogonal_and_involutive(two_planes):
    Q = xi_transform(two_planes)
    assert Q.orthogonality_error() <= 1e-14
    dense = Q.dense()
    np.testing.assert_allclose(dense @ dense, np.eye(Q.dim), atol=1e-15)


def test_isolated_switch_xi_couplings(dangling_switch):
    H = assemble(dangling_switch)
    Q = xi_transform(dangling_switch)
    M = Q.dense().T @ H.to_dense() @ Q.dense()
    upper = np.triu(M, 1)
    nonzero = np.argwhere(np.abs(upper) > 1e-13)
    assert len(nonzero) == 4
    np.testing.assert_allclose(upper[tuple(nonzero.T)], np.ones(4), atol=1e-15)


def test_hexagon_census(hexagon):
    inventory = verify_block_structure(assemble(hexagon), xi_transform(hexagon))
    assert inventory.census_line() == "2-chains: 6, 3-chains: 6, isolated: 6"
    assert sum(chain.length for chain in inventory.chains) == 36
    indices = sorted(i for chain in inventory.chains for i in chain.indices)
    assert indices == list(range(36))


def test_interior_vertex_chains():
    graph = build_lattice(LatticeSpec(hex_extent=(3, 3)))
    inventory = verify_block_structure(assemble(graph), xi_transform(graph))
    interior = next(v for v in graph.vertices if len(graph.neighbors(v)) == 3)
    assert inventory.chain_of(graph.center_index(interior, 0)).kind == 'two_chain'
    for alpha in (1, 2, 3):
        chain = inventory.chain_of(graph.center_index(interior, alpha))
        assert chain.kind == 'three_chain'
        assert chain.scope == 'in_plane'


def test_two_planes_have_one_interplane_chain(two_planes):
    inventory = verify_block_structure(assemble(two_planes), xi_transform(two_planes))
    census = inventory.census()
    assert census['inter_plane'] == 1
    chain = next(c for c in inventory.chains if c.scope == 'inter_plane')
    assert chain.labels[1] == 'x0'
    assert chain.labels[0].endswith('/0') and chain.labels[2].endswith('/0')


def test_dangling_links_form_two_chains():
    graph = build_lattice(LatticeSpec(hex_extent=(1, 1), boundary_policy='keep_dangling'))
    inventory = verify_block_structure(assemble(graph), xi_transform(graph))
    scopes = [c.scope for c in inventory.chains if c.kind == 'two_chain']
    assert scopes.count('dangling') == 6
    assert scopes.count('head') == 6
    assert inventory.census()['isolated'] == 0


@pytest.mark.parametrize('spec', [
    LatticeSpec(hex_extent=(4, 4)),
    LatticeSpec(hex_extent=(4, 4), boundary_policy='keep_dangling'),
    LatticeSpec(planes=2, hex_extent=(3, 3), interplane_connectors=[
        Connector(0, 1, (1, 1), (1, 1)),
        Connector(0, 1, (3, 2), (4, 2)),
    ]),
    LatticeSpec(planes=3, hex_extent=(2, 2), interplane_connectors=[
        Connector(0, 1, (1, 1), (1, 1)),
        Connector(1, 2, (2, 1), (2, 1)),
        Connector(0, 2, (3, 2), (3, 2)),
    ]),
])
def test_block_structure_on_generated_lattices(spec):
    graph = build_lattice(spec)
    inventory = verify_block_structure(assemble(graph), xi_transform(graph))
    assert inventory.max_off_pattern <= 1e-13
    assert inventory.max_coupling_error <= 1e-12
    assert all(c.length <= 3 for c in inventory.chains)
    assert inventory.census()['inter_plane'] == len(spec.interplane_connectors)


def test_spectrum_matches_chain_union(two_planes):
    H = assemble(two_planes)
    inventory = verify_block_structure(H, xi_transform(two_planes))
    np.testing.assert_allclose(np.linalg.eigvalsh(H.to_dense()), inventory.eigenvalues(), atol=1e-10)


def test_corrupted_entry_is_detected(hexagon):
    H = assemble(hexagon)
    r, c, _ = H.triplets()[0]
    with pytest.raises(StructureViolationError) as excinfo:
        verify_block_structure(H.with_entry(r, c, 0.3), xi_transform(hexagon))
    assert excinfo.value.violations


def test_extra_coupling_is_detected(hexagon):
    H = assemble(hexagon).with_entry(0, 1, 0.5)
    assert H.check_invariants()
    with pytest.raises(StructureViolationError):
        verify_block_structure(H, xi_transform(hexagon))


def test_hadamard_switch_properties():
    props = switch_properties(HADAMARD)
    assert props.is_hadamard_switch


def test_fourier_switch_is_not_real():
    omega = np.exp(2j * np.pi / 4)
    fourier = np.array([[omega ** (j * k) for k in range(4)] for j in range(4)]) / 2
    props = switch_properties(fourier)
    assert not props.real
    assert props.orthogonal
    assert not props.is_hadamard_switch


def test_rotation_switch_is_not_uniform():
    c, s = np.cos(0.3), np.sin(0.3)
    rotation = np.array([[c, s, 0, 0], [s, -c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    props = switch_properties(rotation)
    assert props.real and props.symmetric and props.orthogonal
    assert not props.uniform
