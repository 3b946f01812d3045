"""
曲面不变量 - 由顶点数（αβ 的轮换数）与连通分支数得到欧拉示性数与亏格，并校验整除前提
"""
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

from .errors import InconsistentInvariants, InvalidParams


@dataclass(frozen=True)
class SurfaceParams:
    """N/k 个 k 边形、N 条边两两粘合"""
    n: int
    k: int
    faces: int
    edges_after: int
    gamburd_regime: bool    # 2·lcm(2,k) | n，此时 sign(αβ) = +1


@dataclass(frozen=True)
class SurfaceInvariants:
    """粘合后曲面的顶点数、欧拉示性数、总亏格与连通分支数"""
    vertices: int
    euler_characteristic: int
    genus: int
    components: int = 1


def validate_params(n: int, k: int) -> SurfaceParams:
    """校验 lcm(2,k) | n 且 k ≥ 3"""
    if k < 3:
        raise InvalidParams(f"k={k} 必须 ≥ 3（多边形至少三条边）")
    base = math.lcm(2, k)
    if n < 1 or n % base:
        raise InvalidParams(f"n 必须被 lcm(2,{k})={base} 整除：lcm(2,{k})={base} ∤ {n}")
    return SurfaceParams(
        n=n,
        k=k,
        faces=n // k,
        edges_after=n // 2,
        gamburd_regime=(n % (2 * base) == 0),
    )


def invariants_from_cycles(params: SurfaceParams, v: int, components: int = 1) -> SurfaceInvariants:
    """
    χ = V − N/2 + N/k；c 个连通分支时 χ 为偶数且 χ ≤ 2c，
    g = (2c − χ)/2 为各分支亏格之和，c = 1 时即通常的亏格
    """
    if v < 1:
        raise InconsistentInvariants(f"顶点数 v={v} 必须 ≥ 1")
    if not 1 <= components <= min(v, params.faces):
        raise InconsistentInvariants(
            f"n={params.n}, k={params.k}, v={v}：连通分支数 {components} 必须在 1..{min(v, params.faces)} 之间"
        )
    chi = v - params.edges_after + params.faces
    if chi > 2 * components or chi % 2:
        raise InconsistentInvariants(
            f"n={params.n}, k={params.k}, v={v}, c={components} 给出 χ={chi}，不是可定向闭曲面的欧拉示性数"
        )
    return SurfaceInvariants(
        vertices=v,
        euler_characteristic=chi,
        genus=(2 * components - chi) // 2,
        components=components,
    )


def euler_histogram(params: SurfaceParams, cycle_counts: Mapping[int, int]) -> Dict[int, int]:
    """轮换数直方图 → χ 直方图；χ 只依赖顶点数"""
    hist: Dict[int, int] = {}
    for v, count in sorted(cycle_counts.items()):
        if count:
            chi = v - params.edges_after + params.faces
            hist[chi] = hist.get(chi, 0) + count
    return hist


def genus_histogram(params: SurfaceParams, counts: Mapping[Tuple[int, int], int]) -> Dict[int, int]:
    """(顶点数, 连通分支数) 的联合直方图换算为总亏格直方图"""
    hist: Dict[int, int] = {}
    for (v, c), count in sorted(counts.items()):
        if not count:
            continue
        g = invariants_from_cycles(params, v, c).genus
        hist[g] = hist.get(g, 0) + count
    return hist


if __name__ == "__main__":
    params = validate_params(12, 3)
    for v, c in ((2, 1), (4, 1), (6, 2)):
        inv = invariants_from_cycles(params, v, c)
        print(f"v={v}, c={c}: χ={inv.euler_characteristic}, 亏格={inv.genus}")
