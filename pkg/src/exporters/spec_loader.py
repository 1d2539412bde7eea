"""
晶格描述文件读写模块
YAML格式，字段与 LatticeSpec 一一对应，schema 字段必填
"""

from pathlib import Path
from typing import Dict, List, Union

import yaml

from config import config
from core.lattice import Connector, LatticeSpec
from utils.errors import LatticeSpecError
from utils.logger import get_logger

# 文件中允许出现的键
SPEC_KEYS = (
    'schema',
    'planes',
    'hex_extent',
    'boundary_policy',
    'interplane_connectors',
    'faulty_switches',
    'rw_head_policy',
    'rw_head_vertices',
    'extra_vertices',
)

CONNECTOR_KEYS = ('plane_a', 'plane_b', 'vertex_on_a', 'vertex_on_b')


def _vertex_list(value, name: str, errors: List[str]) -> List[tuple]:
    """[[p, x, y], ...] -> 元组列表"""
    result = []
    for item in value or []:
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            errors.append(f"{name}: 顶点 {item!r} 应为 [plane, x, y]")
            continue
        try:
            result.append(tuple(int(c) for c in item))
        except (TypeError, ValueError):
            errors.append(f"{name}: 顶点 {item!r} 含有非整数坐标")
    return result


def _connector(item, cid: int, errors: List[str]):
    name = f"connector[{cid}]"
    if not isinstance(item, dict):
        errors.append(f"{name}: 应为映射，实际为 {type(item).__name__}")
        return None
    missing = [k for k in CONNECTOR_KEYS if k not in item]
    unknown = sorted(set(item) - set(CONNECTOR_KEYS))
    if missing:
        errors.append(f"{name}: 缺少字段 {', '.join(missing)}")
    if unknown:
        errors.append(f"{name}: 未知字段 {', '.join(unknown)}")
    if missing or unknown:
        return None
    for key in ('vertex_on_a', 'vertex_on_b'):
        value = item[key]
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            errors.append(f"{name}: {key} 应为 [x, y]，实际为 {value!r}")
            return None
    try:
        return Connector(
            plane_a=int(item['plane_a']),
            plane_b=int(item['plane_b']),
            vertex_on_a=item['vertex_on_a'],
            vertex_on_b=item['vertex_on_b'],
        )
    except (TypeError, ValueError) as e:
        errors.append(f"{name}: {e}")
        return None


def parse_spec(data: Dict) -> LatticeSpec:
    """
    由已解析的映射构造 LatticeSpec

    Raises:
        LatticeSpecError: schema 缺失或不匹配、字段未知或类型错误
    """
    if not isinstance(data, dict):
        raise LatticeSpecError("晶格描述文件的顶层必须是映射")

    errors: List[str] = []
    schema = data.get('schema')
    if schema is None:
        errors.append(f"缺少 schema 字段（应为 {config.SPEC_SCHEMA}）")
    elif schema != config.SPEC_SCHEMA:
        errors.append(f"不支持的 schema {schema!r}（应为 {config.SPEC_SCHEMA}）")

    unknown = sorted(set(data) - set(SPEC_KEYS))
    if unknown:
        errors.append(f"未知字段: {', '.join(unknown)}")

    kwargs = {}
    try:
        if 'planes' in data:
            kwargs['planes'] = int(data['planes'])
        if 'hex_extent' in data:
            extent = data['hex_extent']
            if not isinstance(extent, (list, tuple)) or len(extent) != 2:
                errors.append(f"hex_extent 应为 [rows, cols]，实际为 {extent!r}")
            else:
                kwargs['hex_extent'] = tuple(int(v) for v in extent)
    except (TypeError, ValueError) as e:
        errors.append(f"数值字段无效: {e}")

    for key in ('boundary_policy', 'rw_head_policy'):
        if key in data:
            kwargs[key] = data[key]

    for key in ('faulty_switches', 'rw_head_vertices', 'extra_vertices'):
        if key in data:
            kwargs[key] = _vertex_list(data[key], key, errors)

    connectors = []
    for cid, item in enumerate(data.get('interplane_connectors') or []):
        conn = _connector(item, cid, errors)
        if conn is not None:
            connectors.append(conn)
    kwargs['interplane_connectors'] = tuple(connectors)

    if errors:
        raise LatticeSpecError("晶格描述文件无效", errors)

    try:
        return LatticeSpec(**kwargs)
    except ValueError as e:
        # 枚举取值无效
        raise LatticeSpecError("晶格描述文件无效", [str(e)])


def load_spec(path: Union[str, Path]) -> LatticeSpec:
    """
    读取YAML晶格描述文件

    Raises:
        LatticeSpecError: 文件不可读、不是合法YAML或内容无效
    """
    logger = get_logger()
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise LatticeSpecError(f"无法读取晶格描述文件 {path}", [str(e)])
    except yaml.YAMLError as e:
        raise LatticeSpecError(f"晶格描述文件 {path} 不是合法的YAML", [str(e)])

    spec = parse_spec(data)
    logger.info(f"📦 已加载晶格描述: {path.name} ({spec.planes} 个平面, 六边形 {spec.hex_extent})")
    return spec


def spec_to_dict(spec: LatticeSpec) -> Dict:
    """LatticeSpec -> 可写回文件的映射（顶点按字典序）"""
    return {
        'schema': config.SPEC_SCHEMA,
        'planes': spec.planes,
        'hex_extent': list(spec.hex_extent),
        'boundary_policy': spec.boundary_policy.value,
        'rw_head_policy': spec.rw_head_policy.value,
        'rw_head_vertices': [list(v) for v in spec.rw_head_vertices],
        'faulty_switches': [list(v) for v in sorted(spec.faulty_switches)],
        'extra_vertices': [list(v) for v in spec.extra_vertices],
        'interplane_connectors': [
            {
                'plane_a': c.plane_a,
                'plane_b': c.plane_b,
                'vertex_on_a': list(c.vertex_on_a),
                'vertex_on_b': list(c.vertex_on_b),
            }
            for c in spec.interplane_connectors
        ],
    }


def dump_spec(spec: LatticeSpec, path: Union[str, Path]):
    """写出YAML晶格描述文件"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        yaml.safe_dump(spec_to_dict(spec), f, sort_keys=False, allow_unicode=True)
