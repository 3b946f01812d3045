"""
穷举真值 - 小 N 时枚举全部 (N−1)!! 个配对，给出 C_{αβ} 的精确分布、
A_N 上的精确分布以及二者之间的精确全变差距离
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import CapExceeded, InternalInconsistency, InvalidParams, RegimeMismatch
from .exact_engine import MomentSet, double_factorial, g_sigma, g_tau
from .permutation import (
    CycleType,
    Permutation,
    class_size,
    cycle_census,
    integer_partitions,
    make_beta,
)
from .storage import format_rational
from .surface import validate_params

logger = logging.getLogger(__name__)

DEFAULT_MATCHING_CAP = 14
DEFAULT_PARTITION_CAP = 40


@dataclass(frozen=True)
class CycleDistribution:
    """轮换数 t → 精确概率，t = 1..n"""
    n: int
    probs: Dict[int, Fraction]
    k: Optional[int] = None

    def __post_init__(self):
        if sum(self.probs.values(), Fraction(0)) != 1:
            raise InternalInconsistency(f"n={self.n} 的轮换数分布总和不为 1")
        if any(p < 0 for p in self.probs.values()):
            raise InternalInconsistency(f"n={self.n} 的轮换数分布出现负概率")

    def support(self) -> List[int]:
        return [t for t, p in sorted(self.probs.items()) if p]

    def mean(self) -> Fraction:
        return sum((t * p for t, p in self.probs.items()), Fraction(0))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "probs": {str(t): format_rational(p) for t, p in sorted(self.probs.items()) if p},
        }


@dataclass(frozen=True)
class ClassDistribution:
    """轮换型 → 精确概率；single_coset 为真时要求支撑集只落在同一符号的共轭类上"""
    n: int
    probs: Dict[CycleType, Fraction]
    single_coset: bool = True

    def __post_init__(self):
        if sum(self.probs.values(), Fraction(0)) != 1:
            raise InternalInconsistency(f"n={self.n} 的共轭类分布总和不为 1")
        signs = {ct.sign for ct, p in self.probs.items() if p}
        if self.single_coset and len(signs) > 1:
            raise InternalInconsistency(f"n={self.n} 的共轭类分布跨越了两个陪集")

    @property
    def sign(self) -> int:
        """支撑集的公共符号；跨两个陪集时为 0"""
        signs = {ct.sign for ct, p in self.probs.items() if p}
        return signs.pop() if len(signs) == 1 else 0

    def marginal(self, k: Optional[int] = None) -> CycleDistribution:
        """按轮换个数求边缘分布"""
        probs = {t: Fraction(0) for t in range(1, self.n + 1)}
        for ct, p in self.probs.items():
            probs[ct.count] += p
        return CycleDistribution(self.n, probs, k)

    def to_json_dict(self, k: Optional[int] = None) -> dict:
        ordered = sorted(self.probs.items(), key=lambda item: item[0].partition, reverse=True)
        return {
            "n": self.n,
            "k": k,
            "classes": {ct.label(): format_rational(p) for ct, p in ordered if p},
        }


def _pairings(partner: List[int], unpaired: List[int]) -> Iterator[List[int]]:
    """递归：最小未配对标号依次与其余每个未配对标号配对"""
    if not unpaired:
        yield partner
        return
    i = unpaired[0]
    for idx in range(1, len(unpaired)):
        j = unpaired[idx]
        partner[i] = j
        partner[j] = i
        yield from _pairings(partner, unpaired[1:idx] + unpaired[idx + 1:])
    partner[i] = 0


def _ab_cycle_type(partner: List[int], beta_image: List[int]) -> Tuple[int, ...]:
    """αβ 的轮换长度（降序），αβ(i) = β(α(i))"""
    n = len(partner) - 1
    seen = bytearray(n + 1)
    lengths = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = 1
            length += 1
            v = beta_image[partner[v]]
        lengths.append(length)
    lengths.sort(reverse=True)
    return tuple(lengths)


def brute_moments(dist: CycleDistribution, l: int) -> MomentSet:
    """直接由分布求 1..l 阶阶乘矩、原点矩、中心矩"""
    if l < 1:
        raise InvalidParams(f"l={l} 必须 ≥ 1")
    mean = dist.mean()
    factorial, raw, central = [], [], []
    for m in range(1, l + 1):
        f = r = c = Fraction(0)
        for t, p in dist.probs.items():
            if not p:
                continue
            falling = 1
            for j in range(m):
                falling *= t - j
            f += falling * p
            r += t ** m * p
            c += (t - mean) ** m * p
        factorial.append(f)
        raw.append(r)
        central.append(c)
    return MomentSet(order=l, factorial=tuple(factorial), raw=tuple(raw), central=tuple(central))


def tail_probabilities(dist: CycleDistribution) -> Dict[int, Fraction]:
    """Pr[C ≥ t]，t = 0..n+1"""
    tails = {}
    acc = Fraction(0)
    for t in range(dist.n + 1, -1, -1):
        acc += dist.probs.get(t, Fraction(0))
        tails[t] = acc
    return dict(sorted(tails.items()))


class EnumerationOracle:
    """穷举真值引擎"""

    def __init__(self, matching_cap: int = DEFAULT_MATCHING_CAP, partition_cap: int = DEFAULT_PARTITION_CAP):
        self.matching_cap = matching_cap
        self.partition_cap = partition_cap

    def _check_matching_cap(self, n: int):
        if n < 2 or n % 2:
            raise InvalidParams(f"n={n} 必须是正偶数")
        if n > self.matching_cap:
            required = double_factorial(n - 1)
            raise CapExceeded(
                f"n={n} 超过穷举上限 {self.matching_cap}，需要枚举 {required} 个配对",
                required=required,
            )

    def enumerate_matchings(self, n: int) -> Iterator[Permutation]:
        """按规范顺序逐个给出全部无不动点对合"""
        self._check_matching_cap(n)
        for partner in _pairings([0] * (n + 1), list(range(1, n + 1))):
            yield Permutation(n, tuple(partner[1:]))

    def matching_shard(self, n: int, first_partner: int) -> Iterator[List[int]]:
        """标号 1 与 first_partner 配对的那一片；给出可变的 partner 列表，调用方不得持有"""
        self._check_matching_cap(n)
        if not 2 <= first_partner <= n:
            raise InvalidParams(f"first_partner={first_partner} 必须在 2..{n} 之间")
        partner = [0] * (n + 1)
        partner[1] = first_partner
        partner[first_partner] = 1
        rest = [v for v in range(2, n + 1) if v != first_partner]
        yield from _pairings(partner, rest)

    def ab_class_counts(self, n: int, beta: Permutation, first_partner: int) -> Counter:
        """单个分片上 αβ 各轮换型的出现次数"""
        beta_image = [0] + list(beta.image)
        counts: Counter = Counter()
        for partner in self.matching_shard(n, first_partner):
            counts[_ab_cycle_type(partner, beta_image)] += 1
        return counts

    def exact_ab_distribution(
        self, n: int, k: int, beta: Optional[Permutation] = None
    ) -> Tuple[CycleDistribution, ClassDistribution]:
        """
        遍历全部配对 α，得到 αβ 的轮换数分布与轮换型分布（每个 α 权重 1/(n−1)!!）
        按首个配对分片后做精确加法合并，与合并顺序无关
        """
        validate_params(n, k)
        self._check_matching_cap(n)
        if beta is None:
            beta = make_beta(n, k)
        elif beta.n != n or cycle_census(beta).partition != (k,) * (n // k):
            raise InvalidParams(f"β 必须属于共轭类 [{k}^{n // k}]")

        counts: Counter = Counter()
        for first in range(2, n + 1):
            counts.update(self.ab_class_counts(n, beta, first))
        total = double_factorial(n - 1)
        if sum(counts.values()) != total:
            raise InternalInconsistency(f"枚举到 {sum(counts.values())} 个配对，应为 {total}")
        logger.debug("n=%d k=%d 共枚举 %d 个配对，%d 个轮换型", n, k, total, len(counts))

        classes = ClassDistribution(n, {CycleType(parts): Fraction(c, total) for parts, c in counts.items()})
        return classes.marginal(k), classes

    def _class_distribution(self, n: int, even_only: bool) -> ClassDistribution:
        if n > self.partition_cap:
            raise CapExceeded(f"n={n} 超过分拆枚举上限 {self.partition_cap}")
        group_order = math.factorial(n) // (2 if even_only else 1)
        probs = {}
        for parts in integer_partitions(n):
            ct = CycleType(parts)
            if even_only and ct.sign != 1:
                continue
            probs[ct] = Fraction(class_size(ct), group_order)
        return ClassDistribution(n, probs, single_coset=even_only)

    def exact_sigma_distribution(
        self, n: int, with_classes: bool = True
    ) -> Tuple[CycleDistribution, Optional[ClassDistribution]]:
        """S_n 上均匀置换的轮换数分布（由 G_σ 的系数给出）"""
        poly = g_sigma(n)
        counts = CycleDistribution(n, {t: poly.coefficient(t) for t in range(1, n + 1)})
        classes = self._class_distribution(n, even_only=False) if with_classes else None
        return counts, classes

    def exact_tau_distribution(
        self, n: int, with_classes: bool = True
    ) -> Tuple[CycleDistribution, Optional[ClassDistribution]]:
        """A_n 上均匀置换的轮换数分布（G_τ 系数）与共轭类分布"""
        poly = g_tau(n)
        counts = CycleDistribution(n, {t: poly.coefficient(t) for t in range(1, n + 1)})
        classes = self._class_distribution(n, even_only=True) if with_classes else None
        return counts, classes

    def tv_distance(self, n: int, k: int) -> Fraction:
        """
        精确全变差距离 ½·Σ_类 |P_{αβ}(类) − P_τ(类)|
        两个分布在共轭类上都是常数，所以按类求和即可
        """
        params = validate_params(n, k)
        if not params.gamburd_regime:
            raise RegimeMismatch(
                f"n={n}, k={k}：2·lcm(2,{k})={2 * math.lcm(2, k)} ∤ {n}，αβ 落在奇置换陪集上，不能与 A_n 比较"
            )
        _, ab_classes = self.exact_ab_distribution(n, k)
        if ab_classes.sign != 1:
            raise RegimeMismatch(f"n={n}, k={k}：αβ 的支撑集不在 A_n 上")
        _, tau_classes = self.exact_tau_distribution(n)
        keys = set(ab_classes.probs) | set(tau_classes.probs)
        diff = sum(
            (abs(ab_classes.probs.get(ct, Fraction(0)) - tau_classes.probs.get(ct, Fraction(0))) for ct in keys),
            Fraction(0),
        )
        return diff / 2

    def moment_transfer_gap(self, n: int, k: int, l: int) -> List[Fraction]:
        """|Ex[C_{αβ}^m] − Ex[C_τ^m]|，m = 1..l；只在 2·lcm(2,k) | n 时有意义"""
        params = validate_params(n, k)
        if not params.gamburd_regime:
            raise RegimeMismatch(f"n={n}, k={k} 不满足 2·lcm(2,{k}) | n")
        ab, _ = self.exact_ab_distribution(n, k)
        tau, _ = self.exact_tau_distribution(n, with_classes=False)
        ab_raw = brute_moments(ab, l).raw
        tau_raw = brute_moments(tau, l).raw
        return [abs(a - b) for a, b in zip(ab_raw, tau_raw)]


if __name__ == "__main__":
    oracle = EnumerationOracle()
    dist, classes = oracle.exact_ab_distribution(6, 3)
    print(f"(6,3) 轮换数分布: {dist.to_json_dict()['probs']}")
    print(f"(6,3) 轮换型分布: {classes.to_json_dict(3)['classes']}")
    print(f"TV(12,3) = {oracle.tv_distance(12, 3)}")
