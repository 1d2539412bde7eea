#!/usr/bin/env python3
"""
验收检查脚本
依次跑一遍链参考、分块结构、端到端路由和单故障扫描，逐项打印结果
"""

import sys
from pathlib import Path

# 添加src到路径
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from dotenv import load_dotenv

# 加载环境变量
load_dotenv(Path(__file__).parent.parent / '.env')

SPECS = Path(__file__).parent.parent / 'specs'


def check_chains():
    from main import chain_checks

    print("\n🔗 链参考检查...")
    checks = chain_checks(max_n=16, t_max=50.0, step=1e-3)
    for check in checks:
        print(f"   {'✅' if check['passed'] else '❌'} {check['name']}")
    return all(c['passed'] for c in checks)


def check_blocks():
    from core.hamiltonian import assemble, verify_block_structure, xi_transform
    from core.lattice import build_lattice
    from exporters.spec_loader import load_spec

    print("\n🧱 ξ基分块结构...")
    for name in ('single_hexagon.yaml', 'two_planes.yaml', 'plane_4x4.yaml'):
        graph = build_lattice(load_spec(SPECS / name))
        inventory = verify_block_structure(assemble(graph), xi_transform(graph))
        print(f"   ✅ {name}: {inventory.census_line()}")
    return True


def check_routes():
    from exporters.spec_loader import load_spec
    from routing.simulator import RouteSimulator, sweep

    print("\n📡 端到端路由...")
    ok = True
    for name in ('single_hexagon.yaml', 'two_planes.yaml', 'plane_2x2.yaml', 'plane_4x4.yaml'):
        result = sweep(RouteSimulator(load_spec(SPECS / name)))
        mark = '✅' if result.all_pass else '❌'
        print(f"   {mark} {name}: {result.n_routes} 条路由, 最小保真度 {result.min_fidelity}")
        ok = ok and result.all_pass
    return ok


def check_single_faults():
    from exporters.spec_loader import load_spec
    from routing.simulator import RouteSimulator, sweep

    print("\n🛠️ 单故障扫描...")
    result = sweep(RouteSimulator(load_spec(SPECS / 'single_hexagon.yaml')), single_faults=True)
    print(f"   {'✅' if result.all_pass else '❌'} {result.n_routes} 次模拟, {len(result.unroutable)} 个不可路由")
    return result.all_pass


def main():
    print("=" * 50)
    print("🧪 hexpst 验收检查")
    print("=" * 50)

    results = {}
    for name, check in (
        ('chains', check_chains),
        ('blocks', check_blocks),
        ('routes', check_routes),
        ('single_faults', check_single_faults),
    ):
        try:
            results[name] = check()
        except Exception as e:
            print(f"\n❌ {name} 出错: {str(e)}")
            results[name] = False

    print("\n" + "=" * 50)
    if all(results.values()):
        print("✅ 验收检查完成 - 全部通过")
    else:
        failed = ', '.join(k for k, v in results.items() if not v)
        print(f"❌ 未通过: {failed}")
    print("=" * 50)
    return all(results.values())


if __name__ == '__main__':
    success = main()
    sys.exit(0 if success else 1)
