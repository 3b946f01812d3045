"""
精确组合引擎 - ζ_N(m) 部分和、循环指标 Z_l、两类 Stirling 数、生成函数 G_σ/G_τ/F、
阶乘矩/原点矩/中心矩变换、尾概率上界，以及渐近矩的闭式值

所有公式路径都用 Fraction 精确计算；浮点只出现在 asymptotic_moments
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from scipy.special import zeta as riemann_zeta

from .errors import InternalInconsistency, InvalidParams
from .permutation import integer_partitions
from .polynomial import UnivariatePolynomial


# 矩的默认最高阶
MAX_MOMENT_ORDER = 4

EULER_GAMMA = float(np.euler_gamma)
ZETA_3 = float(riemann_zeta(3))
PI = math.pi

# 渐近中心矩中的常数项（四阶为独立推导结果）
MEAN_CONSTANT = EULER_GAMMA
VARIANCE_CONSTANT = EULER_GAMMA - PI ** 2 / 6
THIRD_CENTRAL_CONSTANT = EULER_GAMMA - PI ** 2 / 2 + 2 * ZETA_3
FOURTH_CENTRAL_LINEAR = 1 + 6 * EULER_GAMMA - PI ** 2
FOURTH_CENTRAL_CONSTANT = (
    EULER_GAMMA + 3 * EULER_GAMMA ** 2 - 7 * PI ** 2 / 6
    - EULER_GAMMA * PI ** 2 + 12 * ZETA_3 + PI ** 4 / 60
)


@dataclass(frozen=True)
class MomentSet:
    """
    1..order 阶的阶乘矩、原点矩、中心矩
    下标 0 对应 1 阶
    """
    order: int
    factorial: Tuple[Fraction, ...]
    raw: Tuple[Fraction, ...]
    central: Tuple[Fraction, ...]

    @property
    def mean(self) -> Fraction:
        return self.raw[0]

    @property
    def variance(self) -> Fraction:
        return self.central[1]


@dataclass(frozen=True)
class AsymptoticValue:
    """渐近闭式值及其误差项量级 (log n)^m / n^{1/12}"""
    order: int
    name: str
    value: float
    error_term: str
    error_scale: float


class ZetaCache:
    """
    固定 n 的 ζ_n(m) 表，建好后只读共享
    """

    def __init__(self, n: int, order: int = MAX_MOMENT_ORDER):
        if n < 0:
            raise InvalidParams(f"n={n} 不能为负")
        self.n = n
        self.values: Dict[int, Fraction] = {}
        for m in range(1, order + 1):
            self.values[m] = zeta_n(n, m)

    def __getitem__(self, m: int) -> Fraction:
        if m not in self.values:
            self.values[m] = zeta_n(self.n, m)
        return self.values[m]

    def arguments(self, l: int, negate: bool = False) -> List[Fraction]:
        sign = -1 if negate else 1
        return [sign * self[m] for m in range(1, l + 1)]


@lru_cache(maxsize=4096)
def zeta_n(n: int, m: int) -> Fraction:
    """ζ_n(m) = Σ_{1≤j≤n} 1/j^m；ζ_n(1) 即调和数 H_n"""
    if m < 1:
        raise InvalidParams(f"m={m} 必须 ≥ 1")
    if n < 0:
        raise InvalidParams(f"n={n} 不能为负")
    # 通分后一次约分
    denom = 1
    for j in range(1, n + 1):
        denom = denom * j ** m // math.gcd(denom, j ** m)
    return Fraction(sum(denom // j ** m for j in range(1, n + 1)), denom)


def cycle_indicator(l: int, g: Sequence) -> Fraction:
    """
    对称群 S_l 的循环指标：
    Z_l = Σ_{n_1+2n_2+…+l·n_l=l} l!·Π g_j^{n_j} / (n_j!·j^{n_j})
    直接枚举 l 的整数分拆
    """
    if l < 1:
        raise InvalidParams(f"l={l} 必须 ≥ 1")
    if len(g) < l:
        raise InvalidParams(f"Z_{l} 需要 {l} 个参数，只给了 {len(g)} 个")
    args = [Fraction(x) for x in g]
    fact_l = math.factorial(l)
    total = Fraction(0)
    for parts in integer_partitions(l):
        mult: Dict[int, int] = {}
        for p in parts:
            mult[p] = mult.get(p, 0) + 1
        term = Fraction(fact_l)
        for j, nj in mult.items():
            term *= args[j - 1] ** nj
            term /= math.factorial(nj) * j ** nj
        total += term
    return total


@lru_cache(maxsize=None)
def stirling_second(l: int, m: int) -> int:
    """第二类 Stirling 数：l 元集合分成 m 块的方式数"""
    if l < 0 or m < 0:
        raise InvalidParams(f"Stirling 数参数不能为负: ({l}, {m})")
    if l == 0 and m == 0:
        return 1
    if l == 0 or m == 0 or m > l:
        return 0
    return m * stirling_second(l - 1, m) + stirling_second(l - 1, m - 1)


@lru_cache(maxsize=64)
def stirling_first_row(n: int) -> Tuple[int, ...]:
    """无符号第一类 Stirling 数 c(n, 0..n)，即 x(x+1)⋯(x+n−1) 的系数"""
    if n < 0:
        raise InvalidParams(f"n={n} 不能为负")
    row = [1]
    for j in range(n):
        nxt = [0] * (len(row) + 1)
        for t, c in enumerate(row):
            nxt[t] += c * j
            nxt[t + 1] += c
        row = nxt
    return tuple(row)


def stirling_first(n: int, t: int) -> int:
    """c(n,t)：S_n 中恰有 t 个轮换的置换个数"""
    if t < 0 or t > n:
        return 0
    return stirling_first_row(n)[t]


def double_factorial(m: int) -> int:
    """m!! = m(m−2)⋯；m ≤ 0 时为 1"""
    result = 1
    while m > 1:
        result *= m
        m -= 2
    return result


def g_sigma(n: int) -> UnivariatePolynomial:
    """G_σ(x) = x(x+1)⋯(x+n−1)/n!"""
    if n < 1:
        raise InvalidParams(f"n={n} 必须 ≥ 1")
    fact = math.factorial(n)
    return UnivariatePolynomial(Fraction(c, fact) for c in stirling_first_row(n))


def g_tau(n: int) -> UnivariatePolynomial:
    """
    G_τ(x) = [x(x+1)⋯(x+n−1) + (−1)^n·(−x)(−x+1)⋯(−x+n−1)]/n!
    奇偶二分后归一：只保留 n−t 为偶数的项并加倍
    """
    if n < 3:
        raise InvalidParams(f"n={n}：交错群的生成函数要求 n ≥ 3")
    sigma = g_sigma(n)
    mirrored = sigma.negate_argument()
    if n % 2:
        mirrored = mirrored * -1
    tau = sigma + mirrored
    if tau.coefficient_sum() != 1:
        raise InternalInconsistency(f"n={n} 的 G_τ(1) = {tau.coefficient_sum()}，不是概率生成函数")
    return tau


def f_bound(n: int) -> UnivariatePolynomial:
    """F(x) = 3x²(1+4x)(3+4x)⋯(n−5+4x)/(n−1)!!，有趣步数生成函数的控制多项式"""
    if n < 6 or n % 2:
        raise InvalidParams(f"n={n}：F(x) 要求 n 为 ≥ 6 的偶数")
    poly = UnivariatePolynomial([0, 0, 3])
    for c in range(1, n - 4, 2):
        poly = poly * UnivariatePolynomial([c, 4])
    return poly * Fraction(1, double_factorial(n - 1))


@lru_cache(maxsize=256)
def f_bound_eval(n: int, x) -> Fraction:
    """直接按乘积求 F(x)，不展开多项式"""
    if n < 6 or n % 2:
        raise InvalidParams(f"n={n}：F(x) 要求 n 为 ≥ 6 的偶数")
    x = Fraction(x)
    value = 3 * x * x
    for c in range(1, n - 4, 2):
        value *= c + 4 * x
    return value / double_factorial(n - 1)


def gf_domination_holds(n: int, probs: Mapping[int, Fraction], x) -> bool:
    """
    检查 G_{αβ}(x) ≤ F(x²)，x 为 ≥ 1 的有理数
    probs 为已精确求出的 C_{αβ} 分布
    """
    x = Fraction(x)
    if x < 1:
        raise InvalidParams(f"x={x} 必须 ≥ 1")
    g_ab = sum((Fraction(p) * x ** t for t, p in probs.items()), Fraction(0))
    return g_ab <= f_bound_eval(n, x * x)


def _check_t(t: int):
    if t < 0:
        raise InvalidParams(f"t={t} 不能为负")


def tail_bound_ab_squared(n: int, t: int) -> Fraction:
    """B(n,t)² = F(3/2)²·(2/3)^t，精确有理数"""
    _check_t(t)
    f = f_bound_eval(n, Fraction(3, 2))
    return f * f * Fraction(2, 3) ** t


def tail_bound_ab(n: int, t: int) -> Fraction:
    """
    Pr[C_{αβ} ≥ t] ≤ F(3/2)·(2/3)^{t/2}
    t 为偶数时返回精确值；t 为奇数时返回上侧括号 F(3/2)·(2/3)^{(t−1)/2}
    """
    _check_t(t)
    return f_bound_eval(n, Fraction(3, 2)) * Fraction(2, 3) ** (t // 2)


def tail_bound_sigma(n: int, t: int) -> Fraction:
    """Pr[C_σ ≥ t] ≤ G_σ(2)/2^t"""
    _check_t(t)
    return g_sigma(n)(2) / 2 ** t


def tail_bound_tau(n: int, t: int) -> Fraction:
    """Pr[C_τ ≥ t] ≤ G_τ(2)/2^t"""
    _check_t(t)
    return g_tau(n)(2) / 2 ** t


def _check_order(l: int):
    if l < 1:
        raise InvalidParams(f"矩的阶数 l={l} 必须 ≥ 1")


def factorial_moments_sigma(n: int, l: int) -> List[Fraction]:
    """Ex[C_σ^{(m 降幂)}] = (−1)^m·Z_m(−ζ_n(1),…,−ζ_n(m))，m = 1..l"""
    _check_order(l)
    zetas = ZetaCache(n, l).arguments(l, negate=True)
    return [(-1) ** m * cycle_indicator(m, zetas) for m in range(1, l + 1)]


def factorial_moments_tau(n: int, l: int) -> List[Fraction]:
    """A_n 上轮换数的精确阶乘矩：G_τ 在 x=1 处的各阶导数"""
    _check_order(l)
    poly = g_tau(n)
    return [poly.derivative(m)(1) for m in range(1, l + 1)]


def elementary_symmetric_reciprocals(n: int, l: int) -> Fraction:
    """e_l(1, 1/2, …, 1/n)，由 l!·e_l = (−1)^l·Z_l(−p_1,…,−p_l) 得到"""
    if l == 0:
        return Fraction(1)
    if l > n:
        return Fraction(0)
    p = ZetaCache(n, l).arguments(l, negate=True)
    return (-1) ** l * cycle_indicator(l, p) / math.factorial(l)


def tau_correction(n: int, l: int) -> Fraction:
    """
    Ex[C_τ^{(l)}] − Ex[C_σ^{(l)}]，走导数路线而不展开 G_τ：
    去掉因子 (y+1)，对 y·(y+2)⋯(y+n−1) 用乘积法则，
    剩余导数在 y=−1 处为 m!·e_m(1,…,1/(n−2))/(n(n−1))
    """
    if n < 3:
        raise InvalidParams(f"n={n}：交错群要求 n ≥ 3")
    _check_order(l)

    def q_derivative(m: int) -> Fraction:
        return Fraction(math.factorial(m), n * (n - 1)) * elementary_symmetric_reciprocals(n - 2, m)

    inner = -q_derivative(l - 1)
    if l >= 2:
        inner += (l - 1) * q_derivative(l - 2)
    sign = (-1) ** (n + l)
    return sign * l * inner


def raw_from_factorial(factorial: Sequence[Fraction]) -> List[Fraction]:
    """Ex[C^m] = Σ_j S2(m,j)·Ex[C^{(j)}]"""
    return [
        sum((stirling_second(m, j) * factorial[j - 1] for j in range(1, m + 1)), Fraction(0))
        for m in range(1, len(factorial) + 1)
    ]


def factorial_from_raw(raw: Sequence[Fraction]) -> List[Fraction]:
    """逆变换，系数为带符号第一类 Stirling 数"""
    result = []
    for m in range(1, len(raw) + 1):
        total = Fraction(0)
        for j in range(1, m + 1):
            total += (-1) ** (m - j) * stirling_first(m, j) * raw[j - 1]
        result.append(total)
    return result


def central_from_raw(raw: Sequence[Fraction]) -> List[Fraction]:
    """Ex[(C−μ)^m] = Σ_j C(m,j)·Ex[C^j]·(−μ)^{m−j}"""
    powers = [Fraction(1)] + [Fraction(r) for r in raw]
    mu = powers[1] if len(powers) > 1 else Fraction(0)
    return [
        sum((math.comb(m, j) * powers[j] * (-mu) ** (m - j) for j in range(m + 1)), Fraction(0))
        for m in range(1, len(raw) + 1)
    ]


def raw_from_central(central: Sequence[Fraction], mean: Fraction) -> List[Fraction]:
    """逆变换：Ex[C^m] = Σ_j C(m,j)·Ex[(C−μ)^j]·μ^{m−j}"""
    powers = [Fraction(1)] + [Fraction(c) for c in central]
    return [
        sum((math.comb(m, j) * powers[j] * Fraction(mean) ** (m - j) for j in range(m + 1)), Fraction(0))
        for m in range(1, len(central) + 1)
    ]


def moment_set_from_factorial(factorial: Sequence[Fraction], l: int) -> MomentSet:
    _check_order(l)
    if len(factorial) < l:
        raise InvalidParams(f"需要 {l} 个阶乘矩，只给了 {len(factorial)} 个")
    fact = tuple(Fraction(f) for f in factorial[:l])
    raw = raw_from_factorial(fact)
    return MomentSet(order=l, factorial=fact, raw=tuple(raw), central=tuple(central_from_raw(raw)))


def sigma_central_closed_forms(n: int) -> Tuple[Fraction, Fraction, Fraction]:
    """
    C_σ 的 2、3、4 阶中心矩（独立伯努利和的累积量推出）：
    ζ1−ζ2；ζ1−3ζ2+2ζ3；3ζ1²+ζ1−6ζ1ζ2+3ζ2²−7ζ2+12ζ3−6ζ4
    """
    z = ZetaCache(n)
    z1, z2, z3, z4 = z[1], z[2], z[3], z[4]
    second = z1 - z2
    third = z1 - 3 * z2 + 2 * z3
    fourth = 3 * z1 ** 2 + z1 - 6 * z1 * z2 + 3 * z2 ** 2 - 7 * z2 + 12 * z3 - 6 * z4
    return second, third, fourth


def asymptotic_moments(n: float, order: int = MAX_MOMENT_ORDER) -> List[AsymptoticValue]:
    """
    C_{αβ} 的均值与 2–4 阶中心矩的渐近闭式值，附误差项量级
    """
    if order < 1 or order > MAX_MOMENT_ORDER:
        raise InvalidParams(f"order={order} 必须在 1..{MAX_MOMENT_ORDER} 之间")
    if n <= 1:
        raise InvalidParams(f"n={n} 必须 > 1")
    log_n = math.log(n)
    values = [
        ("mean", log_n + MEAN_CONSTANT),
        ("central2", log_n + VARIANCE_CONSTANT),
        ("central3", log_n + THIRD_CENTRAL_CONSTANT),
        ("central4", 3 * log_n ** 2 + FOURTH_CENTRAL_LINEAR * log_n + FOURTH_CENTRAL_CONSTANT),
    ]
    result = []
    for m, (name, value) in enumerate(values[:order], 1):
        result.append(AsymptoticValue(
            order=m,
            name=name,
            value=value,
            error_term=f"O((log n)^{m}/n^(1/12))",
            error_scale=log_n ** m / n ** (1 / 12),
        ))
    return result


if __name__ == "__main__":
    n = 4
    fact = factorial_moments_sigma(n, 4)
    ms = moment_set_from_factorial(fact, 4)
    print(f"n={n} σ 阶乘矩: {[str(f) for f in fact]}")
    print(f"n={n} σ 中心矩: {[str(c) for c in ms.central]}")
    print(f"G_τ({n}) = {g_tau(n)}")
    print(f"F(3/2) at n=6: {f_bound_eval(6, Fraction(3, 2))}")
