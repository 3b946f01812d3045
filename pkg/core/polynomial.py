"""
有理系数一元多项式 - 用于展开 G_σ、G_τ、F 等生成函数
"""
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

Number = Union[int, Fraction]


def _normalize(coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """去掉最高次的零系数"""
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


class UnivariatePolynomial:
    """
    coefficients[t] 为 x^t 的系数；零多项式的系数元组为空
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[Number] = ()):
        self.coefficients = _normalize([Fraction(c) for c in coefficients])

    @classmethod
    def rising_factorial(cls, n: int, shift: Number = 0, scale: Number = 1) -> "UnivariatePolynomial":
        """
        Π_{j<n} (scale·x + shift + j)，逐个乘以一次因子，O(n²) 次系数更新
        """
        coeffs: List[Fraction] = [Fraction(1)]
        scale = Fraction(scale)
        for j in range(n):
            const = Fraction(shift) + j
            nxt = [Fraction(0)] * (len(coeffs) + 1)
            for t, c in enumerate(coeffs):
                nxt[t] += c * const
                nxt[t + 1] += c * scale
            coeffs = nxt
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, t: int) -> Fraction:
        if 0 <= t < len(self.coefficients):
            return self.coefficients[t]
        return Fraction(0)

    def __call__(self, x: Number) -> Fraction:
        """Horner 求值"""
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other: "UnivariatePolynomial") -> "UnivariatePolynomial":
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        res = list(a)
        for i, c in enumerate(b):
            res[i] += c
        return UnivariatePolynomial(res)

    def __mul__(self, other: Union["UnivariatePolynomial", Number]) -> "UnivariatePolynomial":
        if not isinstance(other, UnivariatePolynomial):
            return UnivariatePolynomial(c * other for c in self.coefficients)
        if not self.coefficients or not other.coefficients:
            return UnivariatePolynomial()
        res = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                res[i + j] += a * b
        return UnivariatePolynomial(res)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnivariatePolynomial):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        terms = [f"{c}·x^{t}" for t, c in enumerate(self.coefficients) if c]
        return "UnivariatePolynomial(" + (" + ".join(terms) or "0") + ")"

    def negate_argument(self) -> "UnivariatePolynomial":
        """p(−x)"""
        return UnivariatePolynomial(c if t % 2 == 0 else -c for t, c in enumerate(self.coefficients))

    def derivative(self, order: int = 1) -> "UnivariatePolynomial":
        coeffs = list(self.coefficients)
        for _ in range(order):
            coeffs = [c * t for t, c in enumerate(coeffs)][1:]
        return UnivariatePolynomial(coeffs)

    def coefficient_sum(self) -> Fraction:
        return sum(self.coefficients, Fraction(0))
