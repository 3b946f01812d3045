"""
错误类型 - 各引擎抛出的异常，携带命令行退出码
"""
from typing import Optional


class CensusError(ValueError):
    """所有业务异常的基类"""

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InvalidParams(CensusError):
    """参数不满足前置条件（整除关系、取值范围等）"""

    exit_code = 2


class RegimeMismatch(CensusError):
    """αβ 与 A_N 不在同一陪集上，无法比较分布"""

    exit_code = 2


class CapExceeded(CensusError):
    """穷举规模超过上限"""

    exit_code = 3

    def __init__(self, message: str, required: Optional[int] = None):
        super().__init__(message)
        self.required = required


class InconsistentInvariants(CensusError):
    """顶点数与可定向粘合不相容（χ 为奇数或 χ > 2）"""

    exit_code = 4


class InternalInconsistency(CensusError):
    """粘合过程的计数不变量被破坏，说明实现有错"""

    exit_code = 4
