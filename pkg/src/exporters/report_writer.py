"""
报告输出模块
JSON报告、晶格图/哈密顿量的确定性文本转储、轨迹CSV
"""

import io
import json
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from config import config
from core.dynamics import Trajectory
from core.hamiltonian import Hamiltonian
from core.lattice import LatticeGraph, SiteId, SiteKind, Vertex
from exporters.spec_loader import parse_spec, spec_to_dict
from utils.errors import LatticeSpecError
from utils.logger import get_logger

FLOAT_FORMAT = '%.17g'

SITE_COLUMNS = ['index', 'label', 'plane', 'kind', 'x', 'y', 'slot']


def report_json(record: Dict, kind: str) -> str:
    """带 schema 与类型字段的JSON文本，键排序、缩进固定"""
    payload = {'schema': config.REPORT_SCHEMA, 'kind': kind, **record}
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def write_text(text: str, path: Optional[Union[str, Path]] = None) -> str:
    """写出文本；path 为空时只返回文本"""
    if path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        get_logger().info(f"💾 已写出: {path}")
    return text


def _csv(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def sites_frame(graph: LatticeGraph) -> pd.DataFrame:
    """站点表，行号即站点编号"""
    rows = []
    for idx, site in enumerate(graph.sites):
        vertex = site.vertex
        rows.append({
            'index': idx,
            'label': site.label,
            'plane': site.plane,
            'kind': site.kind.value,
            'x': vertex.x if vertex is not None else -1,
            'y': vertex.y if vertex is not None else -1,
            'slot': site.index,
        })
    return pd.DataFrame(rows, columns=SITE_COLUMNS)


def couplings_frame(graph: LatticeGraph) -> pd.DataFrame:
    return pd.DataFrame(list(graph.couplings), columns=['i', 'j', 'weight'])


def dump_graph(graph: LatticeGraph) -> str:
    """
    晶格图的确定性文本转储

    第一行是 "# spec: " 加描述的JSON，随后是 [sites] 与 [couplings] 两个CSV块。
    """
    header = json.dumps(spec_to_dict(graph.spec), sort_keys=True)
    return (
        f"# spec: {header}\n"
        f"[sites]\n{_csv(sites_frame(graph))}"
        f"[couplings]\n{_csv(couplings_frame(graph))}"
    )


def load_graph(text: str) -> LatticeGraph:
    """
    从 dump_graph 的输出还原晶格图

    Raises:
        LatticeSpecError: 文本格式不符
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith('# spec: '):
        raise LatticeSpecError("晶格图转储缺少 '# spec:' 头")
    try:
        data = json.loads(lines[0][len('# spec: '):])
    except json.JSONDecodeError as e:
        raise LatticeSpecError("晶格图转储的描述头不是合法JSON", [str(e)])
    spec = parse_spec(data)

    if '[sites]' not in lines or '[couplings]' not in lines:
        raise LatticeSpecError("晶格图转储缺少 [sites] 或 [couplings] 块")
    sites_at = lines.index('[sites]')
    couplings_at = lines.index('[couplings]')

    sites_df = pd.read_csv(io.StringIO('\n'.join(lines[sites_at + 1:couplings_at])))
    couplings_df = pd.read_csv(io.StringIO('\n'.join(lines[couplings_at + 1:])))

    sites = []
    for row in sites_df.itertuples(index=False):
        kind = SiteKind(row.kind)
        vertex = None if kind == SiteKind.INTERPLANE_LINK else Vertex(int(row.plane), int(row.x), int(row.y))
        sites.append(SiteId(int(row.plane), kind, vertex, int(row.slot)))

    couplings = [(int(r.i), int(r.j), float(r.weight)) for r in couplings_df.itertuples(index=False)]
    return LatticeGraph(spec=spec, sites=tuple(sites), couplings=tuple(couplings))


def dump_hamiltonian(H: Hamiltonian) -> str:
    """哈密顿量三元组文本（上三角 row<col），带站点表头"""
    parts = []
    if H.graph is not None:
        parts.append(f"[sites]\n{_csv(sites_frame(H.graph))}")
    triplets = pd.DataFrame(H.triplets(), columns=['row', 'col', 'value'])
    parts.append(f"[triplets] dim={H.dim}\n{_csv(triplets)}")
    return ''.join(parts)


def trajectory_frame(trajectory: Trajectory, graph: LatticeGraph, occupancy: bool = False) -> pd.DataFrame:
    """
    轨迹转为长表

    occupancy 为 False 时列为 time,site,re,im；为 True 时列为 time,site,population，
    并且只保留占据概率大于 1e-15 的站点。
    """
    if not len(trajectory):
        columns = ['time', 'site', 'population'] if occupancy else ['time', 'site', 're', 'im']
        return pd.DataFrame(columns=columns)

    labels = np.array(graph.labels())
    states = np.vstack(trajectory.states)
    n_times, dim = states.shape
    times = np.repeat(np.asarray(trajectory.times), dim)
    sites = np.tile(labels, n_times)
    flat = states.ravel()

    if occupancy:
        population = np.abs(flat) ** 2
        keep = population > 1e-15
        return pd.DataFrame({'time': times[keep], 'site': sites[keep], 'population': population[keep]})
    return pd.DataFrame({'time': times, 'site': sites, 're': flat.real, 'im': flat.imag})


def write_trajectory(
    trajectory: Trajectory,
    graph: LatticeGraph,
    path: Union[str, Path],
    occupancy: bool = False,
) -> Path:
    """写出轨迹CSV"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = trajectory_frame(trajectory, graph, occupancy)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    get_logger().info(f"💾 轨迹已写出: {path} ({len(trajectory)} 个采样点, {len(df)} 行)")
    return path
