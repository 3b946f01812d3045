"""
多边形随机粘合曲面统计 - 命令行入口
"""
import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import ClassVar, Dict, List, Optional, Tuple

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from core.config_loader import ConfigLoader, Settings
from core.enum_oracle import EnumerationOracle, tail_probabilities
from core.errors import CensusError, InvalidParams
from core.exact_engine import (
    asymptotic_moments,
    factorial_moments_sigma,
    factorial_moments_tau,
    moment_set_from_factorial,
    tail_bound_ab,
)
from core.glue_process import HEAD_RULES, run_glue
from core.mc_engine import RunConfig, run_mc
from core.storage import (
    FORMATS,
    ReportStorage,
    distribution_rows,
    format_decimal,
    format_rational,
    moment_rows,
    tail_rows,
)
from core.surface import validate_params
from core.verifier import VerifyPlanLoader, Verifier, summarize


console = Console()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON 配置文件路径")
    common.add_argument("--verbose", action="store_true", help="输出调试日志")
    common.add_argument("--seed", type=int, help="随机种子（64 位非负整数）")
    common.add_argument("--threads", type=int, help="线程数，默认读取 SURFACE_CENSUS_THREADS")
    common.add_argument("--out", help="输出文件或目录")
    common.add_argument("--format", choices=FORMATS, help="输出格式")
    common.add_argument("--cap", type=int, help="穷举的 n 上限")

    parser = argparse.ArgumentParser(prog="surface-census", description="随机粘合 k 边形得到的曲面：轮换数、亏格与矩")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common], help="蒙特卡洛抽样 C_{αβ}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--tails", type=int, nargs="*", default=(), help="尾概率阈值")

    p = sub.add_parser("exact", parents=[common], help="S_n 与 A_n 上轮换数的精确矩")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, required=True)

    p = sub.add_parser("enumerate", parents=[common], help="穷举精确分布")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, help="给出时枚举 αβ，否则给出 S_n 与 A_n")

    p = sub.add_parser("tv", parents=[common], help="αβ 与 A_n 均匀分布的精确全变差距离")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("tails", parents=[common], help="精确尾概率与上界对照")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("verify", parents=[common], help="运行不变量校验套件")
    p.add_argument("--quick", action="store_true", help="只跑快速网格")
    p.add_argument("--plan", help="校验计划 JSON 路径")

    p = sub.add_parser("glue", parents=[common], help="粘合过程追踪统计")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, help="粘合次数")
    p.add_argument("--head-rule", choices=HEAD_RULES, default="lowest")
    return parser


def setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def load_settings(args: argparse.Namespace) -> Settings:
    overrides = {
        "seed": args.seed,
        "threads": args.threads,
        "format": args.format,
        "enum_cap": args.cap,
        "samples": getattr(args, "samples", None),
    }
    return ConfigLoader().load(args.config, overrides)


@dataclass(frozen=True)
class CommandSpec:
    """一条子命令的完整参数：命令行取值与合并后的设置"""
    command: str
    samples: int
    seed: int
    threads: int
    format: str
    n: Optional[int] = None
    k: Optional[int] = None
    l: Optional[int] = None
    out: Optional[str] = None
    tails: Tuple[int, ...] = ()
    quick: bool = False
    plan: Optional[str] = None
    head_rule: str = "lowest"

    REQUIRED: ClassVar[Dict[str, Tuple[str, ...]]] = {
        "sample": ("n", "k"),
        "exact": ("n", "l"),
        "enumerate": ("n",),
        "tv": ("n", "k"),
        "tails": ("n", "k"),
        "verify": (),
        "glue": ("n", "k"),
    }

    def __post_init__(self):
        if self.command not in self.REQUIRED:
            raise InvalidParams(f"未知的子命令: {self.command}")
        missing = [name for name in self.REQUIRED[self.command] if getattr(self, name) is None]
        if missing:
            raise InvalidParams(f"{self.command} 缺少参数: {', '.join(missing)}")
        if self.n is not None and self.k is not None:
            validate_params(self.n, self.k)

    @classmethod
    def from_args(cls, args: argparse.Namespace, settings: Settings) -> "CommandSpec":
        return cls(
            command=args.command,
            samples=settings.samples,
            seed=settings.seed,
            threads=settings.threads,
            format=settings.format,
            n=getattr(args, "n", None),
            k=getattr(args, "k", None),
            l=getattr(args, "l", None),
            out=args.out,
            tails=tuple(getattr(args, "tails", ())),
            quick=getattr(args, "quick", False),
            plan=getattr(args, "plan", None),
            head_rule=getattr(args, "head_rule", "lowest"),
        )


def write_report(settings: Settings, spec: CommandSpec, name: str, payload, rows, always: bool = False):
    if not (always or spec.out):
        return
    storage = ReportStorage(settings.out_dir)
    path = storage.export(name, spec.format, payload, rows, out=spec.out)
    console.print(f"[dim]报告已写入 {path}[/dim]")


def cmd_sample(spec: CommandSpec, settings: Settings) -> int:
    config = RunConfig(
        n=spec.n,
        k=spec.k,
        samples=spec.samples,
        seed=spec.seed,
        threads=spec.threads,
        tail_thresholds=tuple(spec.tails),
    )
    result = run_mc(config, exact_cap=settings.enum_cap)
    m = result.moments

    table = Table(title=f"C_αβ 抽样 n={config.n} k={config.k} ×{config.samples}")
    table.add_column("量")
    table.add_column("抽样值", justify="right")
    table.add_column("渐近值", justify="right")
    asym = {v.name: v.value for v in m.asymptotic_reference}
    table.add_row("均值", f"{m.mean:.6f} ± {m.standard_error_mean:.6f}", f"{asym.get('mean', float('nan')):.6f}")
    for name, value in (("central2", m.central2), ("central3", m.central3), ("central4", m.central4)):
        table.add_row(name, f"{value:.6f}", f"{asym.get(name, float('nan')):.6f}")
    console.print(table)

    tail_table = Table(title="尾频率")
    tail_table.add_column("t", justify="right")
    tail_table.add_column("经验频率", justify="right")
    tail_table.add_column("上界", justify="right")
    for t in result.tails.thresholds:
        tail_table.add_row(str(t), format_decimal(result.tails.empirical[t]), f"{float(result.tails.bound[t]):.6g}")
    console.print(tail_table)
    surface = result.surface
    console.print(f"平均欧拉示性数 {surface.mean_euler_characteristic:.6f}")
    console.print(f"χ 直方图 {surface.euler_histogram}，连通分支直方图 {surface.component_histogram}，总亏格直方图 {surface.genus_histogram}")

    payload = {
        "config": result.config,
        "moments": m,
        "tails": {
            "thresholds": result.tails.thresholds,
            "empirical": result.tails.empirical,
            "bound": result.tails.bound_strings(),
        },
        "surface": surface,
    }
    rows = [{"section": "moments", "key": key, "value": format_decimal(getattr(m, key)), "bound": ""}
            for key in ("mean", "central2", "central3", "central4", "standard_error_mean")]
    rows += [{"section": "tail", "key": r["t"], "value": r["empirical"], "bound": r["bound"]}
             for r in tail_rows(result.tails.thresholds, result.tails.empirical, result.tails.bound)]
    rows += [{"section": "genus", "key": g, "value": c, "bound": ""}
             for g, c in surface.genus_histogram.items()]
    rows += [{"section": "components", "key": c, "value": count, "bound": ""}
             for c, count in surface.component_histogram.items()]
    write_report(settings, spec, f"sample_n{config.n}_k{config.k}", payload, rows, always=True)
    return 0


def _moment_table(title: str, moments) -> Table:
    table = Table(title=title)
    table.add_column("阶", justify="right")
    for col in ("阶乘矩", "原点矩", "中心矩"):
        table.add_column(col, justify="right")
    for m in range(moments.order):
        table.add_row(
            str(m + 1),
            *(f"{format_rational(v[m])} ≈ {float(v[m]):.6f}" for v in (moments.factorial, moments.raw, moments.central)),
        )
    return table


def cmd_exact(spec: CommandSpec, settings: Settings) -> int:
    if spec.l < 1 or spec.l > settings.max_moment_order:
        raise InvalidParams(f"l={spec.l} 必须在 1..{settings.max_moment_order} 之间")
    sigma = moment_set_from_factorial(factorial_moments_sigma(spec.n, spec.l), spec.l)
    console.print(_moment_table(f"C_σ 精确矩 n={spec.n}", sigma))
    tau = moment_set_from_factorial(factorial_moments_tau(spec.n, spec.l), spec.l)
    console.print(_moment_table(f"C_τ 精确矩 n={spec.n}", tau))

    asymptotic = asymptotic_moments(spec.n, spec.l) if spec.n > 1 else []
    for value in asymptotic:
        console.print(f"[cyan]{value.name}[/cyan] ≈ {value.value:.6f}  误差 {value.error_term}")

    payload = {"n": spec.n, "l": spec.l, "sigma": sigma, "tau": tau, "asymptotic": asymptotic}
    write_report(settings, spec, f"exact_n{spec.n}_l{spec.l}", payload,
                 moment_rows("sigma", sigma) + moment_rows("tau", tau))
    return 0


def _oracle(settings: Settings) -> EnumerationOracle:
    return EnumerationOracle(matching_cap=settings.enum_cap, partition_cap=settings.partition_cap)


def _distribution_table(title: str, probs) -> Table:
    table = Table(title=title)
    table.add_column("t", justify="right")
    table.add_column("概率", justify="right")
    table.add_column("十进制", justify="right")
    for row in distribution_rows({t: p for t, p in probs.items() if p}):
        table.add_row(str(row["t"]), row["probability"], row["decimal"])
    return table


def cmd_enumerate(spec: CommandSpec, settings: Settings) -> int:
    oracle = _oracle(settings)
    if spec.k is not None:
        dist, classes = oracle.exact_ab_distribution(spec.n, spec.k)
        console.print(_distribution_table(f"C_αβ 精确分布 n={spec.n} k={spec.k}", dist.probs))
        payload = {"distribution": dist.to_json_dict(), "classes": classes.to_json_dict(spec.k)}
        write_report(settings, spec, f"enumerate_n{spec.n}_k{spec.k}", payload, distribution_rows(dist.probs))
        return 0

    sigma, sigma_classes = oracle.exact_sigma_distribution(spec.n)
    console.print(_distribution_table(f"C_σ 精确分布 n={spec.n}", sigma.probs))
    payload = {"sigma": sigma.to_json_dict(), "sigma_classes": sigma_classes.to_json_dict()}
    rows = [dict(row, group="sigma") for row in distribution_rows(sigma.probs)]
    tau, tau_classes = oracle.exact_tau_distribution(spec.n)
    console.print(_distribution_table(f"C_τ 精确分布 n={spec.n}", tau.probs))
    payload.update(tau=tau.to_json_dict(), tau_classes=tau_classes.to_json_dict())
    rows += [dict(row, group="tau") for row in distribution_rows(tau.probs)]
    write_report(settings, spec, f"enumerate_n{spec.n}", payload, rows)
    return 0


def cmd_tv(spec: CommandSpec, settings: Settings) -> int:
    tv = _oracle(settings).tv_distance(spec.n, spec.k)
    console.print(f"TV(αβ, A_{spec.n}) = [bold]{format_rational(tv)}[/bold] ≈ {float(tv):.10f}")
    payload = {"n": spec.n, "k": spec.k, "tv": tv, "tv_decimal": float(tv)}
    write_report(settings, spec, f"tv_n{spec.n}_k{spec.k}", payload,
                 [{"n": spec.n, "k": spec.k, "tv": format_rational(tv), "decimal": format_decimal(tv)}])
    return 0


def cmd_tails(spec: CommandSpec, settings: Settings) -> int:
    dist, _ = _oracle(settings).exact_ab_distribution(spec.n, spec.k)
    tails = tail_probabilities(dist)
    bounds = {t: tail_bound_ab(spec.n, t) for t in tails}

    table = Table(title=f"Pr[C_αβ ≥ t] n={spec.n} k={spec.k}")
    table.add_column("t", justify="right")
    table.add_column("精确", justify="right")
    table.add_column("上界", justify="right")
    table.add_column("", justify="center")
    for t, p in tails.items():
        ok = p <= bounds[t]
        table.add_row(str(t), format_rational(p), f"{float(bounds[t]):.6g}", "[green]✓[/green]" if ok else "[red]✗[/red]")
    console.print(table)

    rows = tail_rows(list(tails), tails, bounds, observed_key="exact")
    payload = {"n": spec.n, "k": spec.k, "tails": rows}
    write_report(settings, spec, f"tails_n{spec.n}_k{spec.k}", payload, rows)
    return 0


def cmd_verify(spec: CommandSpec, settings: Settings) -> int:
    mode = "quick" if spec.quick else "full"
    verifier = Verifier(VerifyPlanLoader(spec.plan), _oracle(settings))
    results = verifier.run(mode)

    table = Table(title=f"校验结果（{mode}）", show_lines=False)
    table.add_column("族")
    table.add_column("检查")
    table.add_column("结果", justify="center")
    table.add_column("说明")
    for r in results:
        table.add_row(r.family, r.name, "[green]通过[/green]" if r.passed else "[red]失败[/red]", r.detail)
    console.print(table)

    passed, failed = summarize(results)
    write_report(settings, spec, f"verify_{mode}", {"mode": mode, "results": results},
                 [{"family": r.family, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results])
    if failed:
        console.print(f"[red]{failed} 项失败[/red]，{passed} 项通过")
        return 4
    console.print(f"[green]全部 {passed} 项通过[/green]")
    return 0


def cmd_glue(spec: CommandSpec, settings: Settings) -> int:
    summary = run_glue(spec.n, spec.k, spec.samples, seed=spec.seed, head_rule=spec.head_rule)
    table = Table(title=f"粘合过程 n={spec.n} k={spec.k} ×{summary.runs}（{summary.head_rule}）")
    table.add_column("量")
    table.add_column("值", justify="right")
    table.add_row("有趣步均值", f"{summary.mean_interesting:.4f} ± {summary.se_interesting:.4f}")
    table.add_row("伯努利控制均值", f"{summary.domination_mean:.4f}")
    table.add_row("准圈产生均值", f"{summary.mean_quasi:.4f}")
    table.add_row("双重闭合均值", f"{summary.mean_double:.4f}")
    table.add_row("轮换数均值", f"{summary.mean_cycles:.4f}")
    table.add_row("不变量违反", str(summary.violations))
    console.print(table)
    write_report(settings, spec, f"glue_n{spec.n}_k{spec.k}", summary,
                 [{"key": key, "value": value} for key, value in sorted(vars(summary).items())])
    return 4 if summary.violations else 0


COMMANDS = {
    "sample": cmd_sample,
    "exact": cmd_exact,
    "enumerate": cmd_enumerate,
    "tv": cmd_tv,
    "tails": cmd_tails,
    "verify": cmd_verify,
    "glue": cmd_glue,
}


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        settings = load_settings(args)
        spec = CommandSpec.from_args(args, settings)
        return COMMANDS[spec.command](spec, settings)
    except CensusError as e:
        console.print(f"[red]{type(e).__name__}: {e}[/red]")
        return e.exit_code
    except Exception as e:
        console.print(f"[red]意外错误: {e}[/red]")
        logging.getLogger(__name__).debug("异常详情", exc_info=True)
        return 1


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        console.print("\n\n[yellow]已退出[/yellow]")
        sys.exit(0)
