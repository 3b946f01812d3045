"""
粘合过程追踪 - 逐步构造 αβ 的图 Γ_{αβ,m}：每步取一个头 i，再均匀取另一个头 j，
加入 (i, β(j)) 与 (j, β(i)) 两条边；统计简单闭合、双重闭合、准圈的产生与有趣步

只维护路径端点：tail_of[h] 为以 h 为头的路径的尾，head_of[t] 为以 t 为尾的路径的头
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Set, Tuple

import numpy as np

from .errors import InternalInconsistency, InvalidParams
from .permutation import Permutation, count_cycles, make_beta
from .rng import SeedLike, make_rng
from .surface import validate_params

logger = logging.getLogger(__name__)

HEAD_RULES = ("lowest", "random")


@dataclass(frozen=True)
class StepOutcome:
    """单步粘合的结果"""
    simple_closures: int
    double_closure: bool
    quasi_cycles_created: int

    @property
    def interesting(self) -> bool:
        return self.simple_closures > 0 or self.quasi_cycles_created > 0


@dataclass(frozen=True)
class GlueTrace:
    """一次完整粘合的计数记录"""
    n: int
    k: int
    simple_closures: int
    quasi_cycle_creations: int
    double_closures: int
    interesting_steps: int
    final_cycles: int
    pairing: Tuple[int, ...]    # α 的像，1 起标号
    head_rule: str = "lowest"

    def matching(self) -> Permutation:
        return Permutation(self.n, self.pairing)

    def violations(self) -> List[str]:
        problems = []
        if self.interesting_steps > self.simple_closures + self.quasi_cycle_creations:
            problems.append("有趣步数超过简单闭合数与准圈产生数之和")
        if 2 * self.double_closures > self.quasi_cycle_creations:
            problems.append("双重闭合数超过准圈产生数的一半")
        if self.final_cycles != self.simple_closures + self.double_closures:
            problems.append("最终轮换数不等于简单闭合与双重闭合之和")
        if self.final_cycles > 2 * self.interesting_steps:
            problems.append("最终轮换数超过有趣步数的两倍")
        return problems

    def check(self):
        problems = self.violations()
        if problems:
            raise InternalInconsistency(f"n={self.n}, k={self.k} 的粘合记录不变量失败: {'；'.join(problems)}")


class GlueState:
    """Γ_{αβ,m} 的端点映射与未配对头的集合"""

    def __init__(self, beta: Permutation):
        n = beta.n
        self.n = n
        self.beta = [0] + list(beta.image)
        self.beta_inv = [0] * (n + 1)
        for i, v in enumerate(beta.image, 1):
            self.beta_inv[v] = i
        self.partner = [0] * (n + 1)
        self.head_of = list(range(n + 1))
        self.tail_of = list(range(n + 1))
        # 未配对的标号就是当前全部的头
        self.pool = list(range(1, n + 1))
        self.where = [-1] + list(range(n))
        self.size = n
        self.low = 1

    def copy(self) -> "GlueState":
        other = GlueState.__new__(GlueState)
        other.n = self.n
        other.beta = self.beta
        other.beta_inv = self.beta_inv
        other.partner = list(self.partner)
        other.head_of = list(self.head_of)
        other.tail_of = list(self.tail_of)
        other.pool = list(self.pool)
        other.where = list(self.where)
        other.size = self.size
        other.low = self.low
        return other

    def heads(self) -> List[int]:
        return sorted(self.pool[:self.size])

    def lowest_head(self) -> int:
        while self.partner[self.low]:
            self.low += 1
        return self.low

    def take(self, v: int):
        """把 v 移出未配对集合"""
        pos = self.where[v]
        last = self.pool[self.size - 1]
        self.pool[pos] = last
        self.where[last] = pos
        self.size -= 1

    def _add_edge(self, a: int, b: int) -> bool:
        """加入边 a→b（a 为头，b 为尾），闭合成圈时返回 True"""
        t = self.tail_of[a]
        if t == b:
            return True
        h = self.head_of[b]
        self.head_of[t] = h
        self.tail_of[h] = t
        return False

    def glue(self, i: int, j: int) -> StepOutcome:
        """配对 α(i)=j，加入 (i, β(j)) 与 (j, β(i))"""
        beta = self.beta
        t_i, t_j = self.tail_of[i], self.tail_of[j]
        first = self._add_edge(i, beta[j])
        second = self._add_edge(j, beta[i])
        self.partner[i] = j
        self.partner[j] = i

        simple = int(first)
        double = False
        if second:
            # 第一条边已并入 i 的路径且该路径尾为 β(i)：一次闭合用上了两条新边
            if not first and beta[i] == t_i:
                double = True
            else:
                simple += 1

        # 新路径只能以 t_i 或 t_j 为尾；β(i)、β(j) 已不再是尾
        gone = (beta[i], beta[j])
        created = 0
        for t in (t_i, t_j):
            if t in gone:
                continue
            if t == beta[self.head_of[t]]:
                created += 1
        return StepOutcome(simple, double, created)

    def formula_candidates(self, i: int) -> Tuple[Set[int], Set[int]]:
        """
        按端点公式给出的候选 j：
        闭合 j ∈ {β⁻¹(T(i)), H(β(i))}；准圈 j ∈ {β⁻¹(T(β⁻¹(T(i)))), H(β(H(β(i))))}
        """
        beta, beta_inv = self.beta, self.beta_inv
        u = beta_inv[self.tail_of[i]]
        w = self.head_of[beta[i]]
        closing = {beta_inv[self.tail_of[i]], w} - {i}
        quasi = {beta_inv[self.tail_of[u]], self.head_of[beta[w]]} - {i}
        return closing, quasi

    def interesting_candidates(self, i: int) -> Tuple[Set[int], Set[int]]:
        """逐个试探每个 j，返回会闭合的 j 与会产生准圈的 j"""
        closing, quasi = set(), set()
        for j in self.pool[:self.size]:
            if j == i:
                continue
            trial = self.copy()
            trial.take(i)
            trial.take(j)
            outcome = trial.glue(i, j)
            if outcome.simple_closures:
                closing.add(j)
            if outcome.quasi_cycles_created:
                quasi.add(j)
        return closing, quasi


def instrumented_glue(
    n: int,
    k: int,
    rng: SeedLike = None,
    head_rule: str = "lowest",
    beta: Optional[Permutation] = None,
) -> GlueTrace:
    """
    执行 n/2 步粘合并返回计数记录
    head_rule="lowest" 时随机数的消耗方式与 sample_matching 相同，同一随机状态给出同一个 α
    """
    params = validate_params(n, k)
    if head_rule not in HEAD_RULES:
        raise InvalidParams(f"head_rule={head_rule!r} 必须是 {HEAD_RULES} 之一")
    rng = make_rng(rng)
    if beta is None:
        beta = make_beta(n, k)
    state = GlueState(beta)

    partner_draws = rng.integers(0, np.arange(n - 1, 0, -2)).tolist()
    head_draws = rng.integers(0, np.arange(n, 0, -2)).tolist() if head_rule == "random" else None

    simple = quasi = double = interesting = 0
    for m, d in enumerate(partner_draws):
        if head_draws is None:
            i = state.lowest_head()
        else:
            i = state.pool[head_draws[m]]
        state.take(i)
        j = state.pool[d]
        state.take(j)
        outcome = state.glue(i, j)
        simple += outcome.simple_closures
        quasi += outcome.quasi_cycles_created
        double += int(outcome.double_closure)
        interesting += int(outcome.interesting)

    trace = GlueTrace(
        n=params.n,
        k=params.k,
        simple_closures=simple,
        quasi_cycle_creations=quasi,
        double_closures=double,
        interesting_steps=interesting,
        final_cycles=simple + double,
        pairing=tuple(state.partner[1:]),
        head_rule=head_rule,
    )
    trace.check()
    direct = count_cycles([0] + [state.beta[state.partner[v]] for v in range(1, n + 1)])
    if direct != trace.final_cycles:
        raise InternalInconsistency(f"粘合过程得到 {trace.final_cycles} 个轮换，直接计算为 {direct}")
    return trace


@dataclass(frozen=True)
class GlueAudit:
    """按最小头规则穷举整棵粘合树的统计"""
    n: int
    k: int
    leaves: int
    nodes: int
    max_closing: int
    max_quasi: int
    max_interesting: int
    closing_formula_mismatches: int
    quasi_outside_formula: int
    leaf_cycle_mismatches: int


def audit_glue_tree(n: int, k: int, beta: Optional[Permutation] = None) -> GlueAudit:
    """
    遍历所有分支：每个结点比较试探得到的闭合/准圈候选与端点公式，
    每个叶子比较过程计数与直接计算的轮换数
    """
    validate_params(n, k)
    if beta is None:
        beta = make_beta(n, k)
    stats = {
        "leaves": 0, "nodes": 0, "max_closing": 0, "max_quasi": 0, "max_interesting": 0,
        "closing_formula_mismatches": 0, "quasi_outside_formula": 0, "leaf_cycle_mismatches": 0,
    }

    def walk(state: GlueState, cycles_so_far: int):
        if state.size == 0:
            stats["leaves"] += 1
            direct = count_cycles([0] + [state.beta[state.partner[v]] for v in range(1, n + 1)])
            if direct != cycles_so_far:
                stats["leaf_cycle_mismatches"] += 1
            return
        stats["nodes"] += 1
        i = state.lowest_head()
        closing, quasi = state.interesting_candidates(i)
        formula_closing, formula_quasi = state.formula_candidates(i)
        stats["max_closing"] = max(stats["max_closing"], len(closing))
        stats["max_quasi"] = max(stats["max_quasi"], len(quasi))
        stats["max_interesting"] = max(stats["max_interesting"], len(closing | quasi))
        if closing != formula_closing:
            stats["closing_formula_mismatches"] += 1
        if not quasi <= formula_quasi:
            stats["quasi_outside_formula"] += 1
        for j in sorted(state.pool[:state.size]):
            if j == i:
                continue
            child = state.copy()
            child.take(i)
            child.take(j)
            outcome = child.glue(i, j)
            walk(child, cycles_so_far + outcome.simple_closures + int(outcome.double_closure))

    walk(GlueState(beta), 0)
    return GlueAudit(n=n, k=k, **stats)


@dataclass(frozen=True)
class GlueSummary:
    """多次粘合的汇总"""
    n: int
    k: int
    runs: int
    head_rule: str
    mean_interesting: float
    se_interesting: float
    mean_quasi: float
    mean_double: float
    mean_cycles: float
    violations: int
    domination_mean: float


def bernoulli_domination_mean(n: int) -> Fraction:
    """Σ_m min(1, 4/(n−2m−1))：独立伯努利控制模型的均值"""
    return sum((min(Fraction(1), Fraction(4, n - 2 * m - 1)) for m in range(n // 2)), Fraction(0))


def run_glue(n: int, k: int, runs: int, seed: Optional[int] = None, head_rule: str = "lowest") -> GlueSummary:
    """重复粘合 runs 次，统计有趣步数等指标"""
    if runs < 1:
        raise InvalidParams(f"runs={runs} 必须 ≥ 1")
    rng = make_rng(seed)
    interesting = np.empty(runs)
    quasi = np.empty(runs)
    double = np.empty(runs)
    cycles_ = np.empty(runs)
    violations = 0
    for r in range(runs):
        try:
            trace = instrumented_glue(n, k, rng, head_rule=head_rule)
        except InternalInconsistency as e:
            logger.error("第 %d 次粘合失败: %s", r, e)
            violations += 1
            interesting[r] = quasi[r] = double[r] = cycles_[r] = np.nan
            continue
        interesting[r] = trace.interesting_steps
        quasi[r] = trace.quasi_cycle_creations
        double[r] = trace.double_closures
        cycles_[r] = trace.final_cycles
    se = float(np.nanstd(interesting) / np.sqrt(runs))
    return GlueSummary(
        n=n,
        k=k,
        runs=runs,
        head_rule=head_rule,
        mean_interesting=float(np.nanmean(interesting)),
        se_interesting=se,
        mean_quasi=float(np.nanmean(quasi)),
        mean_double=float(np.nanmean(double)),
        mean_cycles=float(np.nanmean(cycles_)),
        violations=violations,
        domination_mean=float(bernoulli_domination_mean(n)),
    )


def sigma_process(n: int, rng: SeedLike = None) -> Tuple[int, Permutation]:
    """
    σ 的 n 步构造：依次把最小的头接到均匀选出的尾上
    闭合次数即 C_σ，得到的 σ 在 S_n 上均匀
    """
    if n < 1:
        raise InvalidParams(f"n={n} 必须 ≥ 1")
    rng = make_rng(rng)
    image = [0] * (n + 1)
    head_of = list(range(n + 1))
    tail_of = list(range(n + 1))
    pool = list(range(1, n + 1))
    where = [-1] + list(range(n))
    size = n
    closures = 0
    for i, d in zip(range(1, n + 1), rng.integers(0, np.arange(n, 0, -1)).tolist()):
        j = pool[d]
        last = pool[size - 1]
        pool[where[j]] = last
        where[last] = where[j]
        size -= 1
        image[i] = j
        t = tail_of[i]
        if t == j:
            closures += 1
        else:
            h = head_of[j]
            head_of[t] = h
            tail_of[h] = t
    return closures, Permutation(n, tuple(image[1:]))


if __name__ == "__main__":
    trace = instrumented_glue(60, 3, 7)
    print(trace)
    audit = audit_glue_tree(6, 3)
    print(audit)
