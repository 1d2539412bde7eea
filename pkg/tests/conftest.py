"""测试公共配置：把src加入路径，日志只输出到控制台"""
import os
import sys
from pathlib import Path

import pytest

os.environ['LOG_DIR'] = ''

ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT / 'src'))

from core.lattice import Connector, LatticeSpec, build_lattice  # noqa: E402
from exporters.spec_loader import dump_spec  # noqa: E402

SPECS_DIR = ROOT / 'specs'


@pytest.fixture
def hexagon_spec():
    return LatticeSpec(planes=1, hex_extent=(1, 1))


@pytest.fixture
def hexagon(hexagon_spec):
    return build_lattice(hexagon_spec)


@pytest.fixture
def plane_2x2():
    return build_lattice(LatticeSpec(planes=1, hex_extent=(2, 2)))


@pytest.fixture
def two_plane_spec():
    return LatticeSpec(
        planes=2,
        hex_extent=(1, 1),
        interplane_connectors=(Connector(0, 1, (2, 1), (2, 1)),),
    )


@pytest.fixture
def two_planes(two_plane_spec):
    return build_lattice(two_plane_spec)


@pytest.fixture
def isolated_switch():
    return build_lattice(LatticeSpec(planes=1, hex_extent=(0, 0), extra_vertices=[(0, 0, 0)]))


@pytest.fixture
def spec_file(tmp_path):
    """把 LatticeSpec 写成临时YAML文件，返回路径"""
    def write(spec, name='lattice.yaml'):
        path = tmp_path / name
        dump_spec(spec, path)
        return path
    return write
