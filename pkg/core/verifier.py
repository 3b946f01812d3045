"""
校验套件 - 按 knowledge/verify_plan.json 中的网格逐族运行不变量检查
"""
import json
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .enum_oracle import CycleDistribution, EnumerationOracle, brute_moments, tail_probabilities
from .errors import CensusError, InvalidParams, RegimeMismatch
from .exact_engine import (
    MAX_MOMENT_ORDER,
    factorial_moments_sigma,
    factorial_moments_tau,
    g_sigma,
    g_tau,
    gf_domination_holds,
    sigma_central_closed_forms,
    tail_bound_ab_squared,
    tau_correction,
)
from .glue_process import audit_glue_tree, run_glue, sigma_process
from .mc_engine import RunConfig, chi_square_test, run_mc, sample_cycles_batch
from .permutation import conjugate, count_cycles, make_beta, random_permutation
from .rng import make_rng

logger = logging.getLogger(__name__)

DEFAULT_PLAN = Path(__file__).resolve().parent.parent / "knowledge" / "verify_plan.json"


@dataclass(frozen=True)
class CheckResult:
    family: str
    name: str
    passed: bool
    detail: str = ""


class VerifyPlanLoader:
    """读取校验网格"""

    MODES = ("quick", "full")

    def __init__(self, plan_path: Optional[str] = None):
        self.plan_path = Path(plan_path) if plan_path else DEFAULT_PLAN
        self._load_plan()

    def _load_plan(self):
        if not self.plan_path.exists():
            raise InvalidParams(f"校验计划文件不存在: {self.plan_path}")
        with open(self.plan_path, "r", encoding="utf-8") as f:
            self.plan = json.load(f)

    def grid(self, mode: str) -> Dict[str, dict]:
        if mode not in self.MODES:
            raise InvalidParams(f"mode={mode!r} 必须是 {self.MODES} 之一")
        return self.plan[mode]

    @property
    def seed(self) -> int:
        return int(self.plan.get("seed", 0))


def brute_sigma_counts(n: int) -> Counter:
    """遍历 S_n 的全部置换，统计轮换数"""
    counts: Counter = Counter()
    for perm in permutations(range(1, n + 1)):
        counts[count_cycles((0,) + perm)] += 1
    return counts


def _falling_moments(counts: Counter, total: int, l: int) -> List[Fraction]:
    result = []
    for m in range(1, l + 1):
        acc = 0
        for t, c in counts.items():
            falling = 1
            for j in range(m):
                falling *= t - j
            acc += falling * c
        result.append(Fraction(acc, total))
    return result


class Verifier:
    """按族运行检查，每项检查给出一行 CheckResult"""

    def __init__(self, loader: Optional[VerifyPlanLoader] = None, oracle: Optional[EnumerationOracle] = None):
        self.loader = loader or VerifyPlanLoader()
        self.oracle = oracle or EnumerationOracle()
        self.families: Dict[str, Callable[[dict], List[CheckResult]]] = {
            "exact_moments": self.check_exact_moments,
            "gf_identity": self.check_gf_identity,
            "tail_dominance": self.check_tail_dominance,
            "glue_invariants": self.check_glue_invariants,
            "chi_square": self.check_chi_square,
            "conjugacy": self.check_conjugacy,
            "tv_regime": self.check_tv_regime,
            "mc_moments": self.check_mc_moments,
        }

    def run(self, mode: str = "quick") -> List[CheckResult]:
        results: List[CheckResult] = []
        for family, params in self.loader.grid(mode).items():
            if family not in self.families:
                raise InvalidParams(f"校验计划中有未知的检查族: {family}")
            logger.info("运行检查族 %s", family)
            try:
                results.extend(self.families[family](params))
            except CensusError as e:
                results.append(CheckResult(family, "error", False, str(e)))
        return results

    def check_exact_moments(self, params: dict) -> List[CheckResult]:
        """公式矩与 S_n、A_n 暴力枚举逐项相等；τ 修正项与 σ 中心矩闭式"""
        l = min(int(params.get("l_max", MAX_MOMENT_ORDER)), MAX_MOMENT_ORDER)
        results = []
        for n in range(1, int(params["n_max"]) + 1):
            counts = brute_sigma_counts(n)
            total = sum(counts.values())
            brute_sigma = _falling_moments(counts, total, l)
            sigma = factorial_moments_sigma(n, l)
            results.append(CheckResult("exact_moments", f"sigma n={n}", sigma == brute_sigma))

            if n >= 2:
                central = brute_moments(self._counts_distribution(n, counts, total), 4).central
                closed = sigma_central_closed_forms(n)
                results.append(CheckResult(
                    "exact_moments", f"sigma closed forms n={n}", tuple(central[1:4]) == closed
                ))
            if n < 3:
                continue
            even = Counter({t: c for t, c in counts.items() if (n - t) % 2 == 0})
            brute_tau = _falling_moments(even, total // 2, l)
            tau = factorial_moments_tau(n, l)
            results.append(CheckResult("exact_moments", f"tau n={n}", tau == brute_tau))
            corrections = [tau_correction(n, m) for m in range(1, l + 1)]
            diffs = [a - b for a, b in zip(brute_tau, brute_sigma)]
            results.append(CheckResult("exact_moments", f"tau correction n={n}", corrections == diffs))
        return results

    @staticmethod
    def _counts_distribution(n: int, counts: Counter, total: int) -> CycleDistribution:
        return CycleDistribution(n, {t: Fraction(c, total) for t, c in counts.items()})

    def check_gf_identity(self, params: dict) -> List[CheckResult]:
        """G_σ(2) = G_τ(2) = n+1"""
        bad = []
        for n in range(3, int(params["n_max"]) + 1):
            if g_sigma(n)(2) != n + 1 or g_tau(n)(2) != n + 1:
                bad.append(n)
        detail = f"失败的 n: {bad}" if bad else ""
        return [CheckResult("gf_identity", f"n=3..{params['n_max']}", not bad, detail)]

    def check_tail_dominance(self, params: dict) -> List[CheckResult]:
        """精确尾概率 ≤ F(3/2)(2/3)^{t/2}（平方后比较）；G_{αβ}(x) ≤ F(x²)"""
        points = [Fraction(p) for p in params.get("gf_points", ["3/2"])]
        results = []
        for n, k in params["cases"]:
            dist, _ = self.oracle.exact_ab_distribution(n, k)
            tails = tail_probabilities(dist)
            failing = [t for t, p in tails.items() if p * p > tail_bound_ab_squared(n, t)]
            results.append(CheckResult(
                "tail_dominance", f"({n},{k}) tails", not failing, f"失败的 t: {failing}" if failing else ""
            ))
            gf_fail = [str(x) for x in points if not gf_domination_holds(n, dist.probs, x)]
            results.append(CheckResult(
                "tail_dominance", f"({n},{k}) G≤F(x²)", not gf_fail, f"失败的 x: {gf_fail}" if gf_fail else ""
            ))
        return results

    def check_glue_invariants(self, params: dict) -> List[CheckResult]:
        results = []
        for i, (n, k, runs) in enumerate(params.get("cases", [])):
            summary = run_glue(n, k, runs, seed=self.loader.seed + i)
            results.append(CheckResult(
                "glue_invariants", f"({n},{k}) x{runs} invariants", summary.violations == 0,
                f"{summary.violations} 次违反" if summary.violations else "",
            ))
            bound = summary.domination_mean + 4 * summary.se_interesting
            results.append(CheckResult(
                "glue_invariants", f"({n},{k}) interesting mean",
                summary.mean_interesting <= bound,
                f"{summary.mean_interesting:.4f} ≤ {bound:.4f}",
            ))
        for n, k in params.get("audit", []):
            audit = audit_glue_tree(n, k)
            ok = (
                audit.max_interesting <= 4
                and audit.closing_formula_mismatches == 0
                and audit.leaf_cycle_mismatches == 0
            )
            results.append(CheckResult(
                "glue_invariants", f"({n},{k}) step audit", ok,
                f"叶子 {audit.leaves}，有趣 j 最多 {audit.max_interesting} 个",
            ))
        return results

    def check_chi_square(self, params: dict) -> List[CheckResult]:
        min_p = float(params.get("min_p", 1e-3))
        rng = make_rng(self.loader.seed)
        results = []
        for n, k, draws in params.get("cases", []):
            dist, _ = self.oracle.exact_ab_distribution(n, k)
            counts = sample_cycles_batch(n, k, rng, draws)
            observed = {t: int(c) for t, c in enumerate(np.bincount(counts, minlength=n + 1).tolist())}
            test = chi_square_test(observed, dist.probs)
            results.append(CheckResult(
                "chi_square", f"({n},{k}) x{draws}", test.p_value > min_p, f"p={test.p_value:.4g}"
            ))
        sigma_n = params.get("sigma_n")
        if sigma_n:
            draws = int(params.get("sigma_draws", 10000))
            observed: Counter = Counter(sigma_process(sigma_n, rng)[0] for _ in range(draws))
            poly = g_sigma(sigma_n)
            probs = {t: poly.coefficient(t) for t in range(1, sigma_n + 1)}
            test = chi_square_test(observed, probs)
            results.append(CheckResult(
                "chi_square", f"sigma process n={sigma_n} x{draws}", test.p_value > min_p, f"p={test.p_value:.4g}"
            ))
        return results

    def check_conjugacy(self, params: dict) -> List[CheckResult]:
        """β 换成共轭元后精确分布不变"""
        rng = make_rng(self.loader.seed)
        results = []
        for n, k in params["cases"]:
            _, base = self.oracle.exact_ab_distribution(n, k)
            beta = make_beta(n, k)
            same = True
            for _ in range(int(params.get("conjugations", 3))):
                _, other = self.oracle.exact_ab_distribution(n, k, beta=conjugate(beta, random_permutation(n, rng)))
                same = same and other.probs == base.probs
            results.append(CheckResult("conjugacy", f"({n},{k})", same))
        return results

    def check_tv_regime(self, params: dict) -> List[CheckResult]:
        results = []
        for n, k in params.get("in_regime", []):
            tv = self.oracle.tv_distance(n, k)
            results.append(CheckResult("tv_regime", f"tv({n},{k})", 0 <= tv <= 1, f"{tv} ≈ {float(tv):.6f}"))
        for n, k in params.get("off_regime", []):
            try:
                self.oracle.tv_distance(n, k)
                results.append(CheckResult("tv_regime", f"tv({n},{k}) rejected", False, "未报告区间不符"))
            except RegimeMismatch:
                results.append(CheckResult("tv_regime", f"tv({n},{k}) rejected", True))
        return results

    def check_mc_moments(self, params: dict) -> List[CheckResult]:
        """抽样均值与精确均值相差不超过 4 个标准误，且两次运行结果一致"""
        threads = int(params.get("threads", 1))
        results = []
        for n, k, samples in params["cases"]:
            config = RunConfig(n=n, k=k, samples=samples, seed=self.loader.seed, threads=threads)
            first = run_mc(config, exact_cap=self.oracle.matching_cap)
            exact_mean = first.moments.exact_reference.mean if first.moments.exact_reference else None
            if exact_mean is not None:
                gap = abs(first.moments.mean - float(exact_mean))
                results.append(CheckResult(
                    "mc_moments", f"({n},{k}) mean", gap <= 4 * first.moments.standard_error_mean,
                    f"|{first.moments.mean:.5f} − {float(exact_mean):.5f}| = {gap:.5f}",
                ))
            second = run_mc(config, exact_cap=self.oracle.matching_cap)
            results.append(CheckResult("mc_moments", f"({n},{k}) determinism", first == second))
        return results


def summarize(results: List[CheckResult]) -> Tuple[int, int]:
    passed = sum(1 for r in results if r.passed)
    return passed, len(results) - passed


if __name__ == "__main__":
    for r in Verifier().run("quick"):
        print(f"{'✓' if r.passed else '✗'} {r.family} {r.name} {r.detail}")
