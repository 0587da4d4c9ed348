import os
import sys
import importlib.util

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
TOOLS = os.path.join(ROOT, 'tools')
sys.path.insert(0, TOOLS)

from contour_model import SystemParams  # noqa: E402


def valid_params(n_max, n_min=2):
    return [
        SystemParams(n, d, l1, l2)
        for n in range(n_min, n_max + 1)
        for d in range(1, n // 2 + 1)
        for l1 in range(1, n)
        for l2 in range(1, n)
    ]


@pytest.fixture(scope='session')
def cli():
    """하이픈이 들어간 스크립트는 importlib로 로드"""
    path = os.path.join(TOOLS, 'contour-duo.py')
    spec = importlib.util.spec_from_file_location('contour_duo_cli', path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module
