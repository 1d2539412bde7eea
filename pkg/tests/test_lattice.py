"""晶格构造、方向约定与图不变量"""
import numpy as np
import pytest

from core.lattice import (
    HADAMARD,
    BoundaryPolicy,
    Connector,
    HeadPolicy,
    LatticeGraph,
    LatticeSpec,
    SiteId,
    SiteKind,
    Vertex,
    build_lattice,
    link_direction_index,
    validate,
)
from utils.errors import AdjacencyError, LatticeSpecError


def _count(graph, kind):
    return sum(1 for s in graph.sites if s.kind == kind)


def test_single_hexagon_site_count(hexagon):
    assert hexagon.dim == 36
    assert _count(hexagon, SiteKind.CENTER) == 24
    assert _count(hexagon, SiteKind.LINK) == 6
    assert _count(hexagon, SiteKind.RW_HEAD) == 6
    assert len(hexagon.vertices) == 6


def test_single_hexagon_couplings(hexagon):
    """每个RW头连一个开关、每条链路连两个开关，各4个耦合"""
    assert len(hexagon.couplings) == 6 * 4 + 6 * 8
    assert all(abs(w) == 0.5 for _, _, w in hexagon.couplings)


def test_keep_dangling_gives_four_externals_per_vertex():
    graph = build_lattice(LatticeSpec(hex_extent=(2, 2), boundary_policy=BoundaryPolicy.KEEP_DANGLING))
    for v in graph.vertices:
        assert sorted(graph.attachments[v]) == [0, 1, 2, 3]


def test_two_planes_site_count(two_planes):
    assert two_planes.dim == 71
    assert _count(two_planes, SiteKind.INTERPLANE_LINK) == 1
    assert _count(two_planes, SiteKind.RW_HEAD) == 10
    assert not two_planes.has_head((0, 2, 1))
    assert not two_planes.has_head((1, 2, 1))
    assert two_planes.connector_partner((0, 2, 1)) == (0, Vertex(1, 2, 1))


def test_plane_2x2_vertex_count(plane_2x2):
    assert len(plane_2x2.vertices) == 16


def test_isolated_switch_keep_dangling():
    graph = build_lattice(LatticeSpec(
        hex_extent=(0, 0), extra_vertices=[(0, 0, 0)], boundary_policy='keep_dangling'
    ))
    assert graph.dim == 8
    assert _count(graph, SiteKind.LINK) == 3


def test_empty_graph():
    graph = build_lattice(LatticeSpec(hex_extent=(0, 0)))
    assert graph.dim == 0
    assert graph.couplings == ()
    assert validate(graph) == []


def test_direction_convention(hexagon):
    assert link_direction_index(hexagon, (0, 0, 0), (0, 0, 1)) == 1    # A顶点向上
    assert link_direction_index(hexagon, (0, 0, 1), (0, 0, 0)) == 1    # B顶点向下
    assert link_direction_index(hexagon, (0, 0, 0), (0, 1, 0)) == 3
    assert link_direction_index(hexagon, (0, 2, 0), (0, 1, 0)) == 2


def test_direction_symmetric_on_every_edge():
    graph = build_lattice(LatticeSpec(planes=2, hex_extent=(3, 3)))
    edges = 0
    for v in graph.vertices:
        for w in graph.neighbors(v).values():
            assert link_direction_index(graph, v, w) == link_direction_index(graph, w, v)
            edges += 1
    assert edges > 0


def test_non_adjacent_raises(hexagon):
    with pytest.raises(AdjacencyError):
        link_direction_index(hexagon, (0, 0, 0), (0, 2, 1))


def test_bipartite_coloring():
    graph = build_lattice(LatticeSpec(hex_extent=(4, 4)))
    for v in graph.vertices:
        for w in graph.neighbors(v).values():
            assert v.is_a != w.is_a


def test_interior_vertex_couples_to_full_hadamard():
    """内部顶点的 中心×外部 耦合矩阵恰为Hadamard矩阵"""
    graph = build_lattice(LatticeSpec(hex_extent=(3, 3)))
    interior = next(v for v in graph.vertices if len(graph.neighbors(v)) == 3)
    block = np.zeros((4, 4))
    legs = graph.attachments[interior]
    for i, j, w in graph.couplings:
        for alpha in range(4):
            if i == graph.center_index(interior, alpha):
                for leg, ext in legs.items():
                    if j == ext:
                        block[alpha, leg] = w
    np.testing.assert_array_equal(block, HADAMARD)


def test_site_indices_are_bijection(two_planes):
    assert sorted(two_planes.site_index.values()) == list(range(two_planes.dim))


def test_build_is_deterministic(two_plane_spec):
    a = build_lattice(two_plane_spec)
    b = build_lattice(two_plane_spec)
    assert a.sites == b.sites
    assert a.couplings == b.couplings


def test_valid_graphs_have_no_violations(hexagon, two_planes, isolated_switch):
    for graph in (hexagon, two_planes, isolated_switch):
        assert validate(graph) == []


def test_center_center_coupling_is_reported(hexagon):
    v = Vertex(0, 0, 0)
    extra = (hexagon.center_index(v, 0), hexagon.center_index(v, 1), 0.5)
    broken = LatticeGraph(hexagon.spec, hexagon.sites, hexagon.couplings + (extra,))
    violations = validate(broken)
    assert len(violations) == 1
    assert violations[0].rule == 'center_center'
    assert violations[0].sites == ('p0:c(0,0)/0', 'p0:c(0,0)/1')


def test_link_on_three_switches_is_reported(hexagon):
    link = hexagon.site_index[SiteId.link(Vertex(0, 0, 0), 1)]
    third = Vertex(0, 2, 0)
    extra = tuple((hexagon.center_index(third, a), link, HADAMARD[a, 1]) for a in range(4))
    broken = LatticeGraph(hexagon.spec, hexagon.sites, hexagon.couplings + extra)
    violations = validate(broken)
    assert len(violations) == 1
    assert violations[0].rule == 'attachment'


def test_wrong_weight_is_reported(hexagon):
    i, j, w = hexagon.couplings[0]
    broken = LatticeGraph(hexagon.spec, hexagon.sites, ((i, j, 0.7),) + hexagon.couplings[1:])
    rules = {v.rule for v in validate(broken)}
    assert 'coupling_weight' in rules


def test_connector_on_listed_head_is_rejected():
    spec = LatticeSpec(
        planes=2,
        interplane_connectors=[Connector(0, 1, (2, 1), (2, 1))],
        rw_head_policy=HeadPolicy.LISTED,
        rw_head_vertices=[(0, 2, 1), (1, 0, 0)],
    )
    with pytest.raises(LatticeSpecError) as excinfo:
        build_lattice(spec)
    assert 'connector[0]' in str(excinfo.value)


@pytest.mark.parametrize('connector, fragment', [
    (Connector(0, 0, (0, 0), (1, 0)), 'plane_a 与 plane_b 相同'),
    (Connector(0, 2, (0, 0), (0, 0)), '平面 2 不存在'),
    (Connector(0, 1, (0, 0), (9, 9)), '不存在'),
])
def test_bad_connector_is_rejected(connector, fragment):
    with pytest.raises(LatticeSpecError) as excinfo:
        build_lattice(LatticeSpec(planes=2, interplane_connectors=[connector]))
    assert 'connector[0]' in str(excinfo.value)
    assert fragment in str(excinfo.value)


def test_vertex_with_two_connectors_is_rejected():
    spec = LatticeSpec(planes=3, interplane_connectors=[
        Connector(0, 1, (0, 0), (0, 0)),
        Connector(0, 2, (0, 0), (0, 0)),
    ])
    with pytest.raises(LatticeSpecError) as excinfo:
        build_lattice(spec)
    assert 'connector[1]' in str(excinfo.value)


def test_fault_outside_lattice_is_rejected():
    with pytest.raises(LatticeSpecError):
        build_lattice(LatticeSpec(faulty_switches=[(0, 7, 7)]))


def test_faults_do_not_change_sites(hexagon_spec, hexagon):
    faulty = build_lattice(hexagon_spec.with_faults([(0, 1, 1)]))
    assert faulty.sites == hexagon.sites
    assert faulty.couplings == hexagon.couplings
    assert faulty.faulty == frozenset({Vertex(0, 1, 1)})


def test_site_labels(two_planes):
    labels = two_planes.labels()
    assert 'p0:c(0,0)/0' in labels
    assert 'p1:h(0,0)' in labels
    assert 'x0' in labels
