"""
报告存储 - 把分布、矩、尾概率导出为 JSON / CSV
输出不含时间戳，同样的输入逐字节相同
"""
import csv
import dataclasses
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .errors import InvalidParams

FORMATS = ("json", "csv")


def format_rational(value) -> str:
    """有理数写成 "p/q"，分母为 1 时写成 "p" """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value) -> str:
    """最短往返的十进制表示"""
    return repr(float(value))


def to_serializable(obj: Any) -> Any:
    """递归转换为 json 可写的对象；Fraction 一律写成 "p/q" 字符串"""
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_serializable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): to_serializable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_serializable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_serializable(v) for v in obj.tolist()]
    raise TypeError(f"无法序列化的类型: {type(obj).__name__}")


def dumps_json(payload: Any) -> str:
    return json.dumps(to_serializable(payload), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def distribution_rows(probs: Mapping[int, Fraction]) -> List[dict]:
    """分布表：t, probability, decimal"""
    return [
        {"t": t, "probability": format_rational(p), "decimal": format_decimal(p)}
        for t, p in sorted(probs.items())
    ]


def moment_rows(label: str, moments) -> List[dict]:
    """MomentSet → 每阶一行，精确值与十进制并列"""
    rows = []
    for m in range(moments.order):
        rows.append({
            "group": label,
            "order": m + 1,
            "factorial": format_rational(moments.factorial[m]),
            "raw": format_rational(moments.raw[m]),
            "central": format_rational(moments.central[m]),
            "factorial_decimal": format_decimal(moments.factorial[m]),
            "raw_decimal": format_decimal(moments.raw[m]),
            "central_decimal": format_decimal(moments.central[m]),
        })
    return rows


def tail_rows(
    thresholds: Sequence[int],
    observed: Mapping[int, Any],
    bound: Mapping[int, Fraction],
    observed_key: str = "empirical",
) -> List[dict]:
    """尾概率对照表：观测值（频率或精确概率）与上界"""
    rows = []
    for t in thresholds:
        value = observed[t]
        rows.append({
            "t": t,
            observed_key: format_rational(value) if isinstance(value, Fraction) else format_decimal(value),
            "bound": format_rational(bound[t]),
            "bound_decimal": format_decimal(bound[t]),
        })
    return rows


class ReportStorage:
    """报告输出目录管理"""

    def __init__(self, out_dir: str = "reports"):
        self.out_dir = Path(out_dir)

    def resolve(self, name: str, fmt: str, out: Optional[str] = None) -> Path:
        """
        out 带扩展名时视为文件路径，否则视为目录
        """
        if fmt not in FORMATS:
            raise InvalidParams(f"format={fmt!r} 必须是 {FORMATS} 之一")
        if out:
            path = Path(out)
            if path.suffix:
                return path
            return path / f"{name}.{fmt}"
        return self.out_dir / f"{name}.{fmt}"

    def export_json(self, payload: Any, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(dumps_json(payload))
        return path

    def export_csv(self, rows: Iterable[Dict[str, Any]], path: Path, fieldnames: Optional[List[str]] = None) -> Path:
        rows = list(rows)
        if fieldnames is None:
            fieldnames = []
            for row in rows:
                for key in row:
                    if key not in fieldnames:
                        fieldnames.append(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=fieldnames, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: to_serializable(v) for k, v in row.items()})
        return path

    def export(
        self,
        name: str,
        fmt: str,
        payload: Any,
        rows: Iterable[Dict[str, Any]],
        out: Optional[str] = None,
    ) -> Path:
        """按格式导出：json 写完整报告，csv 写扁平表格"""
        path = self.resolve(name, fmt, out)
        if fmt == "json":
            return self.export_json(payload, path)
        return self.export_csv(rows, path)


if __name__ == "__main__":
    print(format_rational(Fraction(25, 12)), format_rational(Fraction(4)), format_decimal(Fraction(1, 3)))
    print(dumps_json({"probs": {1: Fraction(1, 3), 3: Fraction(2, 3)}}), end="")
