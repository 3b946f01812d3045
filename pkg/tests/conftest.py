import sys
from pathlib import Path

import pytest

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from core.rng import make_rng  # noqa: E402


@pytest.fixture
def rng():
    return make_rng(20240601)
