"""
流式矩累加器 - 单遍更新到四阶中心矩，支持批量加入与两两合并
累加在 numpy.longdouble 上进行
"""
from typing import Iterable, Tuple

import numpy as np

_LD = np.longdouble


class MomentAccumulator:
    """
    维护 count, mean 以及 M2, M3, M4（偏差幂和）
    中心矩按总体口径给出：central_p = M_p / count
    """

    __slots__ = ("count", "_mean", "_m2", "_m3", "_m4")

    def __init__(self):
        self.count = 0
        self._mean = _LD(0)
        self._m2 = _LD(0)
        self._m3 = _LD(0)
        self._m4 = _LD(0)

    def add(self, val) -> None:
        self.count += 1
        n = _LD(self.count)
        m2, m3 = self._m2, self._m3
        delta = _LD(val) - self._mean
        delta_n = delta / n
        delta_n2 = delta_n * delta_n
        term = delta * delta_n * (n - 1)
        self._mean = self._mean + delta_n
        self._m4 = self._m4 + term * delta_n2 * (n * n - 3 * n + 3) + 6 * delta_n2 * m2 - 4 * delta_n * m3
        self._m3 = m3 + term * delta_n * (n - 2) - 3 * delta_n * m2
        self._m2 = m2 + term

    def add_batch(self, values: Iterable) -> None:
        """整批算出偏差幂和后合并"""
        x = np.asarray(values, dtype=_LD)
        if x.size == 0:
            return
        batch = MomentAccumulator()
        batch.count = int(x.size)
        batch._mean = x.mean(dtype=_LD)
        d = x - batch._mean
        d2 = d * d
        batch._m2 = d2.sum(dtype=_LD)
        batch._m3 = (d2 * d).sum(dtype=_LD)
        batch._m4 = (d2 * d2).sum(dtype=_LD)
        self.merge(batch)

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """把 other 并入自身；合并顺序固定时结果逐位确定"""
        if other.count == 0:
            return self
        if self.count == 0:
            self.count = other.count
            self._mean, self._m2, self._m3, self._m4 = other._mean, other._m2, other._m3, other._m4
            return self
        na, nb = _LD(self.count), _LD(other.count)
        n = na + nb
        delta = other._mean - self._mean
        delta2 = delta * delta
        m2a, m3a, m4a = self._m2, self._m3, self._m4
        m2b, m3b, m4b = other._m2, other._m3, other._m4

        self._mean = self._mean + delta * nb / n
        self._m2 = m2a + m2b + delta2 * na * nb / n
        self._m3 = (
            m3a + m3b
            + delta2 * delta * na * nb * (na - nb) / (n * n)
            + 3 * delta * (na * m2b - nb * m2a) / n
        )
        self._m4 = (
            m4a + m4b
            + delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6 * delta2 * (na * na * m2b + nb * nb * m2a) / (n * n)
            + 4 * delta * (na * m3b - nb * m3a) / n
        )
        self.count += other.count
        return self

    @property
    def mean(self) -> float:
        return float(self._mean)

    def central(self, p: int) -> float:
        if self.count == 0:
            return 0.0
        total = {2: self._m2, 3: self._m3, 4: self._m4}[p]
        return float(total / _LD(self.count))

    def central_moments(self) -> Tuple[float, float, float]:
        return self.central(2), self.central(3), self.central(4)

    @property
    def standard_error(self) -> float:
        if self.count == 0:
            return 0.0
        return float(np.sqrt(max(self.central(2), 0.0) / self.count))


if __name__ == "__main__":
    acc = MomentAccumulator()
    for v in (1, 3, 3, 1, 3):
        acc.add(v)
    other = MomentAccumulator()
    other.add_batch([1, 3, 3, 1, 3])
    print(acc.mean, acc.central_moments())
    print(other.mean, other.central_moments())
