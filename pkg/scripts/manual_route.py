#!/usr/bin/env python3
"""
手动运行脚本
不带参数时在单六边形上模拟一次对角路由，带参数时原样交给命令行
"""

import os
import sys
from pathlib import Path

# 切换到src目录
src_path = Path(__file__).parent.parent / 'src'
os.chdir(src_path)
sys.path.insert(0, str(src_path))

from dotenv import load_dotenv

# 加载环境变量
load_dotenv(Path(__file__).parent.parent / '.env')

# 运行主程序
from main import main

DEFAULT_ARGS = [
    'route',
    str(Path(__file__).parent.parent / 'specs' / 'single_hexagon.yaml'),
    '--from', '0,0,0',
    '--to', '0,2,1',
]

if __name__ == '__main__':
    sys.exit(main(sys.argv[1:] or DEFAULT_ARGS))
