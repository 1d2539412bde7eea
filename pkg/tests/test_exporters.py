"""晶格描述文件、转储文本与报告格式"""
import json

import pytest
import yaml

from config import config
from core.chains import T0, T1
from core.hamiltonian import assemble
from core.lattice import build_lattice
from exporters.report_writer import (
    dump_graph,
    dump_hamiltonian,
    load_graph,
    report_json,
    sites_frame,
    trajectory_frame,
    write_trajectory,
)
from exporters.spec_loader import load_spec, parse_spec, spec_to_dict
from routing.simulator import RouteSimulator
from utils.errors import LatticeSpecError

from conftest import SPECS_DIR


def test_spec_file_round_trip(two_plane_spec, spec_file):
    path = spec_file(two_plane_spec.with_faults([(1, 0, 0)]))
    loaded = load_spec(path)
    assert loaded == two_plane_spec.with_faults([(1, 0, 0)])


@pytest.mark.parametrize('name', sorted(p.name for p in SPECS_DIR.glob('*.yaml')))
def test_bundled_specs_load(name):
    spec = load_spec(SPECS_DIR / name)
    assert build_lattice(spec).dim > 0


def test_bundled_two_planes_matches_fixture(two_plane_spec):
    assert load_spec(SPECS_DIR / 'two_planes.yaml') == two_plane_spec


def test_missing_schema_is_rejected():
    with pytest.raises(LatticeSpecError) as excinfo:
        parse_spec({'planes': 1})
    assert 'schema' in str(excinfo.value)


def test_wrong_schema_is_rejected():
    with pytest.raises(LatticeSpecError):
        parse_spec({'schema': 'hexpst.lattice/v0'})


def test_unknown_key_is_rejected():
    with pytest.raises(LatticeSpecError) as excinfo:
        parse_spec({'schema': config.SPEC_SCHEMA, 'planez': 2})
    assert 'planez' in str(excinfo.value)


def test_connector_errors_are_numbered():
    data = {
        'schema': config.SPEC_SCHEMA,
        'planes': 2,
        'interplane_connectors': [
            {'plane_a': 0, 'plane_b': 1, 'vertex_on_a': [0, 0], 'vertex_on_b': [0, 0]},
            {'plane_a': 0, 'plane_b': 1, 'vertex_on_a': [0, 0]},
        ],
    }
    with pytest.raises(LatticeSpecError) as excinfo:
        parse_spec(data)
    assert 'connector[1]' in str(excinfo.value)
    assert 'vertex_on_b' in str(excinfo.value)


def test_bad_policy_is_rejected():
    with pytest.raises(LatticeSpecError):
        parse_spec({'schema': config.SPEC_SCHEMA, 'boundary_policy': 'wrap_around'})


def test_unreadable_and_invalid_files(tmp_path):
    with pytest.raises(LatticeSpecError):
        load_spec(tmp_path / 'missing.yaml')
    bad = tmp_path / 'bad.yaml'
    bad.write_text('planes: [1, 2\n', encoding='utf-8')
    with pytest.raises(LatticeSpecError):
        load_spec(bad)


def test_spec_to_dict_is_plain_yaml(two_plane_spec):
    text = yaml.safe_dump(spec_to_dict(two_plane_spec))
    assert parse_spec(yaml.safe_load(text)) == two_plane_spec


def test_graph_dump_round_trip(two_planes):
    text = dump_graph(two_planes)
    restored = load_graph(text)
    assert restored.sites == two_planes.sites
    assert restored.couplings == two_planes.couplings
    assert assemble(restored).triplets() == assemble(two_planes).triplets()


def test_graph_dump_is_deterministic(two_plane_spec):
    assert dump_graph(build_lattice(two_plane_spec)) == dump_graph(build_lattice(two_plane_spec))


def test_load_graph_rejects_garbage():
    with pytest.raises(LatticeSpecError):
        load_graph('')
    with pytest.raises(LatticeSpecError):
        load_graph('# spec: {not json\n[sites]\n')


def test_sites_frame_columns(two_planes):
    df = sites_frame(two_planes)
    assert list(df.columns) == ['index', 'label', 'plane', 'kind', 'x', 'y', 'slot']
    connector = df[df['kind'] == 'interplane_link'].iloc[0]
    assert connector['label'] == 'x0'
    assert connector['x'] == -1


def test_hamiltonian_dump(hexagon):
    text = dump_hamiltonian(assemble(hexagon))
    assert text.startswith('[sites]\n')
    block = text.split('[triplets] dim=36\n', 1)[1].splitlines()
    assert block[0] == 'row,col,value'
    assert len(block) == 1 + 72


def test_report_json_is_stable():
    record = {'b': 1.0, 'a': [1, 2]}
    text = report_json(record, 'transfer')
    payload = json.loads(text)
    assert payload['schema'] == config.REPORT_SCHEMA
    assert payload['kind'] == 'transfer'
    assert text == report_json(dict(reversed(list(record.items()))), 'transfer')


def test_trajectory_frames(hexagon, tmp_path):
    report = RouteSimulator(hexagon).simulate((0, 0, 0), (0, 1, 0), samples_per_t1=4)
    trajectory = report.trajectory

    amplitudes = trajectory_frame(trajectory, hexagon)
    assert list(amplitudes.columns) == ['time', 'site', 're', 'im']
    assert len(amplitudes) == len(trajectory) * hexagon.dim

    occupancy = trajectory_frame(trajectory, hexagon, occupancy=True)
    assert list(occupancy.columns) == ['time', 'site', 'population']
    assert (occupancy['population'] > 1e-15).all()
    last = occupancy[occupancy['time'] == occupancy['time'].max()]
    assert last.loc[last['population'].idxmax(), 'site'] == 'p0:h(1,0)'
    assert last['time'].iloc[0] == pytest.approx(2 * T0 + T1)

    path = write_trajectory(trajectory, hexagon, tmp_path / 'out' / 'traj.csv', occupancy=True)
    assert path.read_text(encoding='utf-8').splitlines()[0] == 'time,site,population'


def test_empty_trajectory_frame(hexagon):
    from core.dynamics import Trajectory
    df = trajectory_frame(Trajectory(), hexagon)
    assert list(df.columns) == ['time', 'site', 're', 'im']
    assert df.empty
