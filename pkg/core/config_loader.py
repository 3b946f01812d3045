"""
配置加载 - 默认值 < 环境变量（仅线程数） < 配置文件 < 命令行参数
"""
import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Mapping, Optional

from .enum_oracle import DEFAULT_MATCHING_CAP, DEFAULT_PARTITION_CAP
from .errors import InvalidParams
from .exact_engine import MAX_MOMENT_ORDER
from .storage import FORMATS

logger = logging.getLogger(__name__)

THREADS_ENV = "SURFACE_CENSUS_THREADS"


@dataclass(frozen=True)
class Settings:
    """运行设置，与配置文件中的键一一对应"""
    threads: int = 1
    seed: int = 0
    samples: int = 10000
    enum_cap: int = DEFAULT_MATCHING_CAP
    partition_cap: int = DEFAULT_PARTITION_CAP
    max_moment_order: int = MAX_MOMENT_ORDER
    format: str = "json"
    out_dir: str = "reports"

    def __post_init__(self):
        for name in ("threads", "samples", "enum_cap", "partition_cap", "max_moment_order"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InvalidParams(f"配置项 {name}={value!r} 必须是正整数")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidParams(f"配置项 seed={self.seed!r} 必须是非负整数")
        if self.max_moment_order > MAX_MOMENT_ORDER:
            raise InvalidParams(f"max_moment_order={self.max_moment_order} 不能超过 {MAX_MOMENT_ORDER}")
        if self.format not in FORMATS:
            raise InvalidParams(f"format={self.format!r} 必须是 {FORMATS} 之一")

    def to_dict(self) -> dict:
        return asdict(self)


class ConfigLoader:
    """按优先级合并各来源的设置"""

    KEYS = tuple(f.name for f in fields(Settings))

    def __init__(self, environ: Optional[Mapping[str, str]] = None):
        self.environ = os.environ if environ is None else environ

    def _load_file(self, config_path: str) -> dict:
        """读取 JSON 配置文件，拒绝未知键"""
        path = Path(config_path)
        if not path.exists():
            raise InvalidParams(f"配置文件不存在: {config_path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidParams(f"配置文件 {config_path} 不是合法的 JSON: {e}") from e
        if not isinstance(data, dict):
            raise InvalidParams(f"配置文件 {config_path} 顶层必须是对象")
        unknown = sorted(set(data) - set(self.KEYS))
        if unknown:
            raise InvalidParams(f"配置文件含未知的键: {', '.join(unknown)}")
        return data

    def _env_threads(self) -> Optional[int]:
        raw = self.environ.get(THREADS_ENV)
        if raw is None or raw == "":
            return None
        try:
            return int(raw)
        except ValueError as e:
            raise InvalidParams(f"环境变量 {THREADS_ENV}={raw!r} 不是整数") from e

    def load(self, config_path: Optional[str] = None, overrides: Optional[Mapping[str, object]] = None) -> Settings:
        """
        overrides 为命令行显式给出的值，None 表示未给出
        """
        merged = Settings().to_dict()
        threads = self._env_threads()
        if threads is not None:
            merged["threads"] = threads
        if config_path:
            merged.update(self._load_file(config_path))
            logger.debug("已读取配置文件 %s", config_path)
        for key, value in (overrides or {}).items():
            if key not in self.KEYS:
                raise InvalidParams(f"未知的设置项: {key}")
            if value is not None:
                merged[key] = value
        return Settings(**merged)


if __name__ == "__main__":
    print(ConfigLoader().load())
