"""
蒙特卡洛引擎 - 大 N 下抽样 C_{αβ}，流式累积矩与尾频率，并给出曲面不变量汇总

单次抽样走顺序配对 + 原地追踪轮换；批量抽样走 numpy 向量化路径，二者分布相同
"""
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy.stats import chi2

from .enum_oracle import DEFAULT_MATCHING_CAP, EnumerationOracle, brute_moments
from .errors import InvalidParams
from .exact_engine import MAX_MOMENT_ORDER, AsymptoticValue, MomentSet, asymptotic_moments, tail_bound_ab
from .moments import MomentAccumulator
from .permutation import make_beta, matching_partners
from .rng import SeedLike, make_rng, spawn_streams
from .storage import format_rational
from .surface import SurfaceParams, euler_histogram, genus_histogram, validate_params

logger = logging.getLogger(__name__)

# 单个批次大约处理的标号数
BATCH_CELLS = 1 << 20
SEED_LIMIT = 1 << 64


def default_tail_thresholds(n: int) -> Tuple[int, ...]:
    """⌈log n⌉ + 5j，j = 0..5"""
    base = math.ceil(math.log(n))
    return tuple(base + 5 * j for j in range(6))


@dataclass(frozen=True)
class RunConfig:
    """一次蒙特卡洛运行的参数"""
    n: int
    k: int
    samples: int
    seed: int = 0
    threads: int = 1
    tail_thresholds: Tuple[int, ...] = ()

    def __post_init__(self):
        validate_params(self.n, self.k)
        if self.samples < 1:
            raise InvalidParams(f"samples={self.samples} 必须 ≥ 1")
        if self.threads < 1:
            raise InvalidParams(f"threads={self.threads} 必须 ≥ 1")
        if not 0 <= self.seed < SEED_LIMIT:
            raise InvalidParams(f"seed={self.seed} 必须是 64 位非负整数")
        thresholds = tuple(int(t) for t in self.tail_thresholds) or default_tail_thresholds(self.n)
        if any(t < 0 for t in thresholds):
            raise InvalidParams(f"尾概率阈值不能为负: {thresholds}")
        object.__setattr__(self, "tail_thresholds", tuple(sorted(set(thresholds))))


@dataclass(frozen=True)
class MomentReport:
    samples: int
    mean: float
    central2: float
    central3: float
    central4: float
    standard_error_mean: float
    exact_reference: Optional[MomentSet] = None
    asymptotic_reference: List[AsymptoticValue] = field(default_factory=list)


@dataclass(frozen=True)
class TailReport:
    thresholds: Tuple[int, ...]
    empirical: Dict[int, float]
    bound: Dict[int, Fraction]

    def bound_strings(self) -> Dict[int, str]:
        return {t: format_rational(b) for t, b in self.bound.items()}

    def dominated(self) -> bool:
        """经验尾频率是否都不超过上界"""
        return all(Fraction(self.empirical[t]) <= self.bound[t] for t in self.thresholds)


@dataclass(frozen=True)
class SurfaceSummary:
    """由轮换数与连通分支数换算的曲面统计；亏格为各分支亏格之和"""
    mean_euler_characteristic: float
    euler_histogram: Dict[int, int]
    genus_histogram: Dict[int, int]
    component_histogram: Dict[int, int]
    cycle_histogram: Dict[int, int]


@dataclass(frozen=True)
class McResult:
    config: RunConfig
    moments: MomentReport
    tails: TailReport
    surface: SurfaceSummary


def sample_cycles(n: int, k: int, rng: SeedLike = None) -> int:
    """抽一个 α，数 αβ 的轮换个数；沿 i → β(α(i)) 原地追踪，不构造中间置换"""
    validate_params(n, k)
    rng = make_rng(rng)
    partner = matching_partners(n, rng)
    beta = [0] + list(make_beta(n, k).image)
    seen = bytearray(n + 1)
    count = 0
    for start in range(1, n + 1):
        if seen[start]:
            continue
        count += 1
        v = start
        while not seen[v]:
            seen[v] = 1
            v = beta[partner[v]]
    return count


def _beta_zero_based(n: int, k: int) -> np.ndarray:
    """规范 β 的 0 起标号数组；第 f 个多边形占据标号 f·k .. f·k+k−1"""
    idx = np.arange(n)
    return np.where(idx % k == k - 1, idx - (k - 1), idx + 1)


def _batch_partners(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """每行先均匀洗牌再相邻两两配对，得到 0 起标号的 α"""
    order = rng.permuted(np.tile(np.arange(n), (size, 1)), axis=1)
    a, b = order[:, 0::2], order[:, 1::2]
    rows = np.arange(size)[:, None]
    partner = np.empty((size, n), dtype=np.int64)
    partner[rows, a] = b
    partner[rows, b] = a
    return partner


def cycle_counts(partner: np.ndarray, k: int) -> np.ndarray:
    """αβ 的轮换数：倍增法求出每个点所在轨道的最小标号后计数"""
    size, n = partner.shape
    # αβ(i) = β(α(i))
    step = _beta_zero_based(n, k)[partner]
    minima = np.tile(np.arange(n), (size, 1))
    for _ in range(n.bit_length()):
        minima = np.minimum(minima, np.take_along_axis(minima, step, axis=1))
        step = np.take_along_axis(step, step, axis=1)
    return (minima == np.arange(n)).sum(axis=1)


def component_counts(partner: np.ndarray, k: int) -> np.ndarray:
    """
    曲面的连通分支数，即 ⟨α, β⟩ 的轨道数
    在多边形上做最小标签传播：沿 α 取邻面标签的最小值，再做一次指针跳跃，直到不动
    """
    size, n = partner.shape
    faces = n // k
    neighbour = partner // k
    label = np.tile(np.arange(faces), (size, 1))
    while True:
        via = np.take_along_axis(label, neighbour, axis=1).reshape(size, faces, k).min(axis=2)
        new = np.minimum(label, via)
        new = np.minimum(new, np.take_along_axis(new, new, axis=1))
        if np.array_equal(new, label):
            break
        label = new
    return (label == np.arange(faces)).sum(axis=1)


def sample_surfaces_batch(n: int, k: int, rng: SeedLike, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    向量化抽样 size 次，返回 (轮换数, 连通分支数)
    洗牌配对得到的 α 与顺序配对同分布，只是随机数的消耗方式不同
    """
    validate_params(n, k)
    if size < 1:
        raise InvalidParams(f"size={size} 必须 ≥ 1")
    partner = _batch_partners(n, make_rng(rng), size)
    return cycle_counts(partner, k), component_counts(partner, k)


def sample_cycles_batch(n: int, k: int, rng: SeedLike, size: int) -> np.ndarray:
    """向量化抽样 size 次，只返回轮换数"""
    validate_params(n, k)
    if size < 1:
        raise InvalidParams(f"size={size} 必须 ≥ 1")
    return cycle_counts(_batch_partners(n, make_rng(rng), size), k)


def _split_samples(samples: int, threads: int) -> List[int]:
    base, extra = divmod(samples, threads)
    return [base + (1 if i < extra else 0) for i in range(threads)]


def _worker(
    n: int, k: int, rng: np.random.Generator, samples: int
) -> Tuple[MomentAccumulator, np.ndarray, Counter]:
    acc = MomentAccumulator()
    hist = np.zeros(n + 1, dtype=np.int64)
    joint: Counter = Counter()
    batch = max(1, BATCH_CELLS // n)
    remaining = samples
    while remaining > 0:
        size = min(batch, remaining)
        counts, components = sample_surfaces_batch(n, k, rng, size)
        acc.add_batch(counts)
        hist += np.bincount(counts, minlength=n + 1)
        pairs, freq = np.unique(np.stack([counts, components], axis=1), axis=0, return_counts=True)
        joint.update({(int(v), int(c)): int(f) for (v, c), f in zip(pairs, freq)})
        remaining -= size
    return acc, hist, joint


def surface_summary(
    params: SurfaceParams,
    mean_cycles: float,
    hist: Mapping[int, int],
    joint: Mapping[Tuple[int, int], int],
) -> SurfaceSummary:
    cycle_hist = {int(t): int(c) for t, c in sorted(hist.items()) if c}
    component_hist: Dict[int, int] = {}
    for (_, c), count in sorted(joint.items()):
        component_hist[c] = component_hist.get(c, 0) + count
    return SurfaceSummary(
        mean_euler_characteristic=mean_cycles - params.edges_after + params.faces,
        euler_histogram=euler_histogram(params, cycle_hist),
        genus_histogram=genus_histogram(params, joint),
        component_histogram=component_hist,
        cycle_histogram=cycle_hist,
    )


def run_mc(
    config: RunConfig,
    exact_cap: int = DEFAULT_MATCHING_CAP,
    with_exact: bool = True,
) -> McResult:
    """
    按线程拆分种子流并行抽样，按线程序号固定顺序合并
    同一 (seed, threads) 得到逐位相同的结果

    抽样走 sample_surfaces_batch 的洗牌配对路径，而不是 sample_matching 的顺序配对：
    两者给出同一个均匀配对分布（卡方检验覆盖），但同一种子下抽到的 α 不同
    """
    params = validate_params(config.n, config.k)
    n, k = config.n, config.k
    streams = spawn_streams(config.seed, config.threads)
    shares = _split_samples(config.samples, config.threads)
    logger.info("n=%d k=%d 抽样 %d 次，%d 个线程", n, k, config.samples, config.threads)

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        parts = list(pool.map(lambda i: _worker(n, k, streams[i], shares[i]), range(config.threads)))

    acc = MomentAccumulator()
    hist = np.zeros(n + 1, dtype=np.int64)
    joint: Counter = Counter()
    for part_acc, part_hist, part_joint in parts:
        acc.merge(part_acc)
        hist += part_hist
        joint.update(part_joint)

    central2, central3, central4 = acc.central_moments()
    central2 = max(central2, 0.0)

    exact_reference = None
    if with_exact and n <= exact_cap:
        dist, _ = EnumerationOracle(matching_cap=exact_cap).exact_ab_distribution(n, k)
        exact_reference = brute_moments(dist, MAX_MOMENT_ORDER)

    moments = MomentReport(
        samples=config.samples,
        mean=acc.mean,
        central2=central2,
        central3=central3,
        central4=central4,
        standard_error_mean=acc.standard_error,
        exact_reference=exact_reference,
        asymptotic_reference=asymptotic_moments(n),
    )

    # 尾频率由直方图的后缀和得到，t 递增时单调不增
    suffix = np.cumsum(hist[::-1])[::-1]
    empirical = {}
    for t in config.tail_thresholds:
        hits = int(suffix[t]) if t <= n else 0
        empirical[t] = hits / config.samples
    tails = TailReport(
        thresholds=config.tail_thresholds,
        empirical=empirical,
        bound={t: tail_bound_ab(n, t) for t in config.tail_thresholds},
    )

    surface = surface_summary(params, acc.mean, {t: int(c) for t, c in enumerate(hist.tolist())}, joint)
    return McResult(config=config, moments=moments, tails=tails, surface=surface)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float


def chi_square_test(observed: Mapping[int, int], probs: Mapping[int, Fraction], min_expected: float = 5.0) -> ChiSquareResult:
    """
    观测直方图对精确分布的卡方拟合检验
    期望频数过小的相邻格子向后合并；落在支撑集之外的观测直接判 p=0
    """
    total = sum(observed.values())
    if total == 0:
        raise InvalidParams("观测直方图为空")
    support = sorted(t for t, p in probs.items() if p)
    if any(c and not probs.get(t) for t, c in observed.items()):
        return ChiSquareResult(statistic=math.inf, dof=max(len(support) - 1, 1), p_value=0.0)

    bins: List[Tuple[float, int]] = []
    exp_acc, obs_acc = 0.0, 0
    for t in support:
        exp_acc += total * float(probs[t])
        obs_acc += observed.get(t, 0)
        if exp_acc >= min_expected:
            bins.append((exp_acc, obs_acc))
            exp_acc, obs_acc = 0.0, 0
    if exp_acc or obs_acc:
        if bins:
            e, o = bins.pop()
            bins.append((e + exp_acc, o + obs_acc))
        else:
            bins.append((exp_acc, obs_acc))

    if len(bins) < 2:
        return ChiSquareResult(statistic=0.0, dof=0, p_value=1.0)
    statistic = sum((o - e) ** 2 / e for e, o in bins)
    dof = len(bins) - 1
    return ChiSquareResult(statistic=statistic, dof=dof, p_value=float(chi2.sf(statistic, dof)))


if __name__ == "__main__":
    result = run_mc(RunConfig(n=600, k=3, samples=5000, seed=7, threads=2))
    print(f"均值 {result.moments.mean:.4f}，方差 {result.moments.central2:.4f}")
    print(f"尾频率 {result.tails.empirical}")
    print(f"亏格直方图 {result.surface.genus_histogram}")
