"""
Q 处的完备化 E

局部元素写作 α + βρ，α、β 为 s = 1/t 的 Laurent 级数，ρ² = s·u(s)。
数位按赋值排序的基 {s^j（赋值 2j），s^j·ρ（赋值 2j+1）} 编号：
第 n 位在 n 为偶数时是 α 的 s^{n/2} 系数，奇数时是 β 的 s^{(n−1)/2} 系数。
"""

from typing import Dict, List, Tuple

from ..algebra.global_field import EllElem, ExtensionContext
from ..algebra.polynomials import VAL_INF, RatF
from ..utils.errors import FieldMismatchError, PrecisionExhausted, PreconditionError


def _split(n: int) -> Tuple[int, int]:
    """数位编号 → (分量 0/1, s 的幂次)"""
    j, odd = divmod(n, 2)
    return odd, j


def _series_mul(fq, x: Dict[int, int], y: Dict[int, int], upto: int) -> Dict[int, int]:
    """s 的 Laurent 级数相乘，只保留指数 < upto 的项"""
    mul, add = fq.mul_table, fq.add_table
    out: Dict[int, int] = {}
    for i, a in x.items():
        row = mul[a]
        for j, b in y.items():
            k = i + j
            if k < upto:
                out[k] = add[out.get(k, 0)][row[b]]
    return {k: c for k, c in out.items() if c}


class LocalElem:
    """
    截断的局部元素

    Args:
        ext: 二次扩张上下文
        digits: 数位编号 → F_q 编码（仅非零项，编号 < prec）
        prec: 编号 ≥ prec 的数位未知
    """

    __slots__ = ("ext", "digits", "prec")

    def __init__(self, ext: ExtensionContext, digits: Dict[int, int], prec: int):
        self.ext = ext
        self.digits = {n: c for n, c in digits.items() if c and n < prec}
        self.prec = prec

    @property
    def val(self):
        """最低非零数位；全部已知数位为零时返回 prec"""
        return min(self.digits) if self.digits else self.prec

    def is_zero_mod_prec(self) -> bool:
        return not self.digits

    def _check(self, other: "LocalElem"):
        if other.ext != self.ext:
            raise FieldMismatchError("局部元素属于不同的扩张")

    def components(self) -> Tuple[Dict[int, int], Dict[int, int]]:
        """拆回 (α, β) 的 s 展开"""
        alpha: Dict[int, int] = {}
        beta: Dict[int, int] = {}
        for n, c in self.digits.items():
            part, j = _split(n)
            (beta if part else alpha)[j] = c
        return alpha, beta

    @classmethod
    def from_components(cls, ext: ExtensionContext, alpha: Dict[int, int], beta: Dict[int, int], prec: int) -> "LocalElem":
        digits = {2 * j: c for j, c in alpha.items()}
        digits.update({2 * j + 1: c for j, c in beta.items()})
        return cls(ext, digits, prec)

    def __add__(self, other: "LocalElem") -> "LocalElem":
        self._check(other)
        add = self.ext.fq.add_table
        out = dict(self.digits)
        for n, c in other.digits.items():
            out[n] = add[out.get(n, 0)][c]
        return LocalElem(self.ext, out, min(self.prec, other.prec))

    def __neg__(self) -> "LocalElem":
        neg = self.ext.fq.neg_table
        return LocalElem(self.ext, {n: neg[c] for n, c in self.digits.items()}, self.prec)

    def __sub__(self, other: "LocalElem") -> "LocalElem":
        return self + (-other)

    def __mul__(self, other: "LocalElem") -> "LocalElem":
        self._check(other)
        ext = self.ext
        fq = ext.fq
        prec = min(self.val + other.prec, other.val + self.prec)
        a1, b1 = self.components()
        a2, b2 = other.components()
        a_upto, b_upto = (prec + 1) // 2, prec // 2
        # ρ² = s·u(s)，u 的 s^k 系数为 D_{d−k}
        d = ext.d
        rho_sq = {k + 1: ext.D.coeff(d - k) for k in range(d + 1) if ext.D.coeff(d - k)}
        alpha = _series_mul(fq, a1, a2, a_upto)
        bb = _series_mul(fq, _series_mul(fq, b1, b2, a_upto), rho_sq, a_upto)
        add = fq.add_table
        for k, c in bb.items():
            alpha[k] = add[alpha.get(k, 0)][c]
        beta = _series_mul(fq, a1, b2, b_upto)
        for k, c in _series_mul(fq, b1, a2, b_upto).items():
            beta[k] = add[beta.get(k, 0)][c]
        return LocalElem.from_components(ext, alpha, beta, prec)

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalElem) and self.prec == other.prec and self.digits == other.digits

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}·ρ^{n}" for n, c in sorted(self.digits.items()))
        return f"LocalElem({terms or '0'} + O(ρ^{self.prec}))"

    def to_json(self) -> Dict:
        return {"prec": self.prec, "digits": [[n, c] for n, c in sorted(self.digits.items())]}


def embed_local(x: EllElem, prec: int) -> LocalElem:
    """
    x 在 Q 处的展开，保留数位编号 < prec

    Raises:
        PrecisionExhausted: x ≠ 0 且 prec ≤ val_Q(x)
    """
    ext = x.ext
    v = x.val_Q()
    if v != VAL_INF and prec <= v:
        raise PrecisionExhausted(f"精度 {prec} 不超过赋值 {v}，展开不含任何信息")
    alpha = x.a.s_digits(upto=(prec + 1) // 2)
    beta = (x.b * ext.beta_factor()).s_digits(upto=prec // 2)
    return LocalElem.from_components(ext, alpha, beta, prec)


def truncate(x: EllElem, e: int) -> EllElem:
    """
    保留赋值 < e 的项，结果仍是 ℓ 中元素（s 的有限 Laurent 多项式）

    两个元素模 μ_e·O_E 同余当且仅当截断相同。
    """
    ext = x.ext
    fq = ext.fq
    alpha = x.a.s_digits(upto=(e + 1) // 2)
    beta = (x.b * ext.beta_factor()).s_digits(upto=e // 2)
    a = RatF.from_s_digits(fq, alpha)
    b = RatF.from_s_digits(fq, beta) * ext.rho_inverse_factor()
    return EllElem(ext, a, b)


def residue(x: EllElem) -> int:
    """O_E 中元素模 ρ 的剩余（F_q 编码）"""
    v = x.val_Q()
    if v < 0:
        raise PreconditionError(f"赋值 {v} < 0，元素不在 O_E 中")
    if v > 0:
        return 0
    return x.a.s_digits(upto=1).get(0, 0)


def local_digits(x: EllElem, prec: int) -> List[List[int]]:
    """序列化用的数位列表"""
    if x.is_zero():
        return []
    return embed_local(x, prec).to_json()["digits"]


def serialize_precision(entries, prec: int, policy: str = "doubling") -> int:
    """使全部非零元素可展开的精度（按倍增策略）"""
    top = max((x.val_Q() for x in entries if not x.is_zero()), default=None)
    if top is None:
        return prec
    while prec <= top:
        if policy != "doubling":
            raise PrecisionExhausted(f"精度 {prec} 不足以展开赋值 {top} 的元素")
        prec = max(2 * prec, 1)
    return prec
