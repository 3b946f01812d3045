"""
置换核心 - {1..N} 上的置换：构造 β、均匀抽取无不动点对合 α、复合、轮换分析、奇偶性
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .errors import InvalidParams


@dataclass(frozen=True)
class Permutation:
    """置换，image[i-1] = π(i)，标号从 1 开始"""
    n: int
    image: Tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        object.__setattr__(self, "image", image)
        if self.n < 1 or len(image) != self.n:
            raise InvalidParams(f"置换长度 {len(image)} 与 n={self.n} 不符")
        if sorted(image) != list(range(1, self.n + 1)):
            raise InvalidParams(f"image 不是 {{1..{self.n}}} 上的双射")

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.image, 1))


@dataclass(frozen=True)
class CycleType:
    """轮换型：各轮换长度（降序）及轮换个数"""
    partition: Tuple[int, ...]
    count: int = field(default=-1)

    def __post_init__(self):
        parts = tuple(sorted((int(p) for p in self.partition), reverse=True))
        if not parts or parts[-1] < 1:
            raise InvalidParams(f"轮换型必须由正整数组成: {self.partition}")
        object.__setattr__(self, "partition", parts)
        object.__setattr__(self, "count", len(parts))

    @property
    def n(self) -> int:
        return sum(self.partition)

    @property
    def sign(self) -> int:
        return 1 if (self.n - self.count) % 2 == 0 else -1

    def multiplicities(self) -> Dict[int, int]:
        return dict(Counter(self.partition))

    def label(self) -> str:
        """序列化用的键，如 "3+1" """
        return "+".join(str(p) for p in self.partition)

    @classmethod
    def from_label(cls, label: str) -> "CycleType":
        return cls(tuple(int(p) for p in label.split("+")))


def _require_even(n: int):
    if n < 2 or n % 2:
        raise InvalidParams(f"n={n} 必须是正偶数才能两两配对")


def identity(n: int) -> Permutation:
    return Permutation(n, tuple(range(1, n + 1)))


def from_cycles(n: int, cycles: Sequence[Sequence[int]]) -> Permutation:
    """由轮换列表构造置换，未出现的标号为不动点"""
    image = list(range(1, n + 1))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            image[a - 1] = b
    return Permutation(n, tuple(image))


def make_beta(n: int, k: int) -> Permutation:
    """
    规范的 β：(1 2 … k)(k+1 … 2k)…，轮换型 [k^{n/k}]
    """
    if k < 3:
        raise InvalidParams(f"k={k} 必须 ≥ 3")
    if n < 1 or n % k:
        raise InvalidParams(f"k={k} 不整除 n={n}")
    image = []
    for start in range(1, n + 1, k):
        image.extend(range(start + 1, start + k))
        image.append(start)
    return Permutation(n, tuple(image))


def _pool_remove(pool: List[int], where: List[int], size: int, v: int) -> int:
    """把 v 从未配对池中移除（与末尾交换），返回新大小"""
    pos = where[v]
    last = pool[size - 1]
    pool[pos] = last
    where[last] = pos
    return size - 1


def matching_partners(n: int, rng: np.random.Generator) -> List[int]:
    """
    顺序配对：每次取最小的未配对标号，与其余未配对标号中均匀选出的一个配对
    返回 partner 列表，partner[i] 为 i 的配偶，下标 0 不用
    """
    _require_even(n)
    partner = [0] * (n + 1)
    pool = list(range(1, n + 1))
    where = [-1] + list(range(n))
    # 第 m 步在 n-2m-1 个候选中均匀选取
    draws = rng.integers(0, np.arange(n - 1, 0, -2))
    size = n
    low = 1
    for d in draws.tolist():
        while partner[low]:
            low += 1
        size = _pool_remove(pool, where, size, low)
        j = pool[d]
        size = _pool_remove(pool, where, size, j)
        partner[low] = j
        partner[j] = low
    return partner


def sample_matching(n: int, rng: np.random.Generator) -> Permutation:
    """均匀抽取 [2^{n/2}] 中的一个无不动点对合"""
    partner = matching_partners(n, rng)
    return Permutation(n, tuple(partner[1:]))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """先 p 后 q：i ↦ q(p(i))"""
    if p.n != q.n:
        raise InvalidParams(f"置换长度不一致: {p.n} ≠ {q.n}")
    qi = q.image
    return Permutation(p.n, tuple(qi[v - 1] for v in p.image))


def inverse(p: Permutation) -> Permutation:
    image = [0] * p.n
    for i, v in enumerate(p.image, 1):
        image[v - 1] = i
    return Permutation(p.n, tuple(image))


def conjugate(p: Permutation, by: Permutation) -> Permutation:
    """by ∘ p ∘ by⁻¹，与 p 同轮换型"""
    return compose(compose(inverse(by), p), by)


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(n, tuple((rng.permutation(n) + 1).tolist()))


def cycles(p: Permutation) -> List[Tuple[int, ...]]:
    """按最小元素顺序列出全部轮换"""
    seen = [False] * (p.n + 1)
    result = []
    for start in range(1, p.n + 1):
        if seen[start]:
            continue
        cyc = []
        v = start
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = p.image[v - 1]
        result.append(tuple(cyc))
    return result


def count_cycles(image: Sequence[int]) -> int:
    """
    原地追踪轮换个数；image 为 1 起标号的像，下标 0 占位
    """
    n = len(image) - 1
    seen = bytearray(n + 1)
    total = 0
    for start in range(1, n + 1):
        if seen[start]:
            continue
        total += 1
        v = start
        while not seen[v]:
            seen[v] = 1
            v = image[v]
    return total


def cycle_census(p: Permutation) -> CycleType:
    return CycleType(tuple(len(c) for c in cycles(p)))


def sign(p: Permutation) -> int:
    """(−1)^(n − 轮换数)"""
    return cycle_census(p).sign


def matching_sign_constant(n: int, k: int) -> int:
    """β = make_beta(n,k) 时 sign(αβ) 的固定取值 (−1)^{n/2}·(−1)^{(k−1)n/k}"""
    exponent = n // 2 + (k - 1) * (n // k)
    return 1 if exponent % 2 == 0 else -1


def integer_partitions(n: int, largest: int = 0) -> Iterator[Tuple[int, ...]]:
    """降序分部递归枚举 n 的全部整数分拆"""
    if n == 0:
        yield ()
        return
    top = n if largest <= 0 else min(n, largest)
    for first in range(top, 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def class_size(cycle_type: CycleType) -> int:
    """共轭类大小 n!/Π j^{m_j}·m_j!"""
    denom = 1
    for length, mult in cycle_type.multiplicities().items():
        denom *= length ** mult * math.factorial(mult)
    return math.factorial(cycle_type.n) // denom


if __name__ == "__main__":
    from .rng import make_rng

    rng = make_rng(7)
    beta = make_beta(6, 3)
    alpha = sample_matching(6, rng)
    ab = compose(alpha, beta)
    print(f"β = {cycles(beta)}")
    print(f"α = {cycles(alpha)}")
    print(f"αβ = {cycles(ab)}  轮换型 {cycle_census(ab).label()}  符号 {sign(ab)}")
