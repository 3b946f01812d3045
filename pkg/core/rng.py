"""
随机数流 - 可复现、可拆分的 64 位随机源
"""
from typing import List, Optional, Union

import numpy as np


SeedLike = Union[int, np.random.Generator, None]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """由种子得到 PCG64 生成器；已是生成器时原样返回"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def spawn_streams(seed: Optional[int], count: int) -> List[np.random.Generator]:
    """
    按固定方式把一个种子拆成 count 条独立流
    同一 (seed, count) 在同一版本下得到完全相同的流
    """
    root = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(child)) for child in root.spawn(count)]
