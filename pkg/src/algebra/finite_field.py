"""
有限域 F_q 运算

F_q = F_p[x]/(m(x))，元素以整数编码：编码 k 的 p 进制各位即幂基坐标（小端），
因此 0 编码为 0，1 编码为 1。加法、乘法、取负、求逆全部预先制表，
q 受配置上限约束（默认 q ≤ 9），表很小。
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..utils.errors import FieldMismatchError, PreconditionError


def is_prime(n: int) -> bool:
    """试除法素性判定"""
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_mod_p(a: List[int], m: List[int], p: int) -> List[int]:
    """F_p 上多项式取余（小端系数，m 首一）"""
    a = [c % p for c in a]
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            shift = i - dm
            for j, mj in enumerate(m):
                a[shift + j] = (a[shift + j] - c * mj) % p
    a = a[:dm]
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible_mod_p(m: Sequence[int], p: int) -> bool:
    """
    判断 F_p 上首一多项式 m 是否不可约

    逐一检查次数不超过 deg(m)/2 的首一多项式是否整除 m。
    """
    m = [c % p for c in m]
    while m and m[-1] == 0:
        m.pop()
    r = len(m) - 1
    if r < 1 or m[-1] != 1:
        return False
    if r == 1:
        return True
    for dg in range(1, r // 2 + 1):
        for low in product(range(p), repeat=dg):
            f = list(low) + [1]
            if not _poly_mod_p(m, f, p):
                return False
    return True


def smallest_irreducible(p: int, r: int) -> Tuple[int, ...]:
    """按字典序搜索最小的 r 次首一不可约多项式"""
    for low in product(range(p), repeat=r):
        cand = list(low) + [1]
        if is_irreducible_mod_p(cand, p):
            return tuple(cand)
    raise PreconditionError(f"找不到 {r} 次不可约多项式 (p={p})")


class FqContext:
    """
    有限域上下文

    Args:
        p: 奇素数
        r: 扩张次数
        modulus: 模多项式系数（小端，首一），r > 1 时缺省则自动选取
    """

    def __init__(self, p: int, r: int = 1, modulus: Optional[Sequence[int]] = None):
        if not is_prime(p):
            raise PreconditionError(f"p={p} 不是素数")
        if p == 2:
            raise PreconditionError("特征不能为 2")
        if r < 1:
            raise PreconditionError(f"扩张次数 r={r} 必须为正")

        if modulus is None:
            modulus = (0, 1) if r == 1 else smallest_irreducible(p, r)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) - 1 != r or not is_irreducible_mod_p(modulus, p):
            raise PreconditionError(f"模多项式 {list(modulus)} 不是 {r} 次不可约多项式")

        self.p = p
        self.r = r
        self.q = p ** r
        self.modulus = modulus

        self._build_tables()
        logger.debug(f"F_{self.q} 初始化完成, modulus={list(modulus)}")

    def _digits(self, k: int) -> Tuple[int, ...]:
        out = []
        for _ in range(self.r):
            out.append(k % self.p)
            k //= self.p
        return tuple(out)

    def _code(self, digits: Sequence[int]) -> int:
        k = 0
        for c in reversed(list(digits)):
            k = k * self.p + c % self.p
        return k

    def _build_tables(self):
        """预计算加法、乘法、取负与逆元表"""
        q, p, r = self.q, self.p, self.r
        digits = [self._digits(k) for k in range(q)]
        self.add_table: List[List[int]] = [
            [self._code([(x + y) % p for x, y in zip(digits[i], digits[j])]) for j in range(q)]
            for i in range(q)
        ]
        self.neg_table: List[int] = [self._code([(-x) % p for x in digits[i]]) for i in range(q)]
        self.sub_table: List[List[int]] = [
            [self.add_table[i][self.neg_table[j]] for j in range(q)] for i in range(q)
        ]

        mod = list(self.modulus)
        self.mul_table: List[List[int]] = [[0] * q for _ in range(q)]
        for i in range(q):
            for j in range(i, q):
                prod_ = [0] * (2 * r - 1)
                for a, x in enumerate(digits[i]):
                    if x:
                        for b, y in enumerate(digits[j]):
                            prod_[a + b] = (prod_[a + b] + x * y) % p
                red = _poly_mod_p(prod_, mod, p) if r > 1 else [prod_[0] % p]
                code = self._code(red + [0] * (r - len(red)))
                self.mul_table[i][j] = code
                self.mul_table[j][i] = code

        self.inv_table: List[int] = [0] * q
        for i in range(1, q):
            for j in range(1, q):
                if self.mul_table[i][j] == 1:
                    self.inv_table[i] = j
                    break

        # 平方根表：None 表示非平方
        self.sqrt_table: List[Optional[int]] = [None] * q
        for i in range(q):
            sq = self.mul_table[i][i]
            if self.sqrt_table[sq] is None or i < self.sqrt_table[sq]:
                self.sqrt_table[sq] = i
        self.half = self.inv_table[self.from_int(2)]

    @property
    def key(self) -> Tuple[int, int, Tuple[int, ...]]:
        return (self.p, self.r, self.modulus)

    def __eq__(self, other) -> bool:
        return self is other or (isinstance(other, FqContext) and self.key == other.key)

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"FqContext(p={self.p}, r={self.r}, modulus={list(self.modulus)})"

    def from_int(self, n: int) -> int:
        """整数嵌入素域，返回编码"""
        return n % self.p

    def digits(self, code: int) -> Tuple[int, ...]:
        return self._digits(code)

    def power(self, code: int, e: int) -> int:
        if e < 0:
            if code == 0:
                raise ZeroDivisionError("F_q 中 0 不可逆")
            code, e = self.inv_table[code], -e
        result = 1
        base = code
        while e:
            if e & 1:
                result = self.mul_table[result][base]
            base = self.mul_table[base][base]
            e >>= 1
        return result

    def elem(self, code: int) -> "FqElem":
        return FqElem(self, code % self.q)

    def elem_from_coeffs(self, coeffs: Sequence[int]) -> "FqElem":
        return FqElem(self, self._code(coeffs))

    def generator(self) -> int:
        """乘法群生成元（编码）"""
        for g in range(1, self.q):
            x, order = g, 1
            while x != 1:
                x = self.mul_table[x][g]
                order += 1
            if order == self.q - 1:
                return g
        raise PreconditionError("找不到乘法生成元")


@dataclass(frozen=True)
class FqElem:
    """F_q 元素（规范编码，相等即坐标相等）"""
    ctx: FqContext
    index: int

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return self.ctx.digits(self.index)

    def _check(self, other: "FqElem"):
        if not isinstance(other, FqElem) or other.ctx != self.ctx:
            raise FieldMismatchError(f"域不一致: {self.ctx} vs {getattr(other, 'ctx', None)}")

    def __add__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return FqElem(self.ctx, self.ctx.add_table[self.index][other.index])

    def __sub__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return FqElem(self.ctx, self.ctx.sub_table[self.index][other.index])

    def __mul__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return FqElem(self.ctx, self.ctx.mul_table[self.index][other.index])

    def __neg__(self) -> "FqElem":
        return FqElem(self.ctx, self.ctx.neg_table[self.index])

    def __pow__(self, e: int) -> "FqElem":
        return FqElem(self.ctx, self.ctx.power(self.index, e))

    def is_zero(self) -> bool:
        return self.index == 0

    def __repr__(self) -> str:
        return f"Fq{self.ctx.q}({list(self.coeffs)})"


_OPS = {
    "add": FqElem.__add__,
    "sub": FqElem.__sub__,
    "mul": FqElem.__mul__,
}


def fq_arith(op: str, a: FqElem, b: FqElem) -> FqElem:
    """
    F_q 四则运算（add/sub/mul）

    Raises:
        FieldMismatchError: a、b 不在同一个域
    """
    if op not in _OPS:
        raise PreconditionError(f"未知运算: {op}")
    return _OPS[op](a, b)


def fq_inv(a: FqElem) -> FqElem:
    """求逆元，a = 0 时抛出 ZeroDivisionError"""
    if a.is_zero():
        raise ZeroDivisionError("F_q 中 0 不可逆")
    return FqElem(a.ctx, a.ctx.inv_table[a.index])


def fq_enumerate(ctx: FqContext) -> List[FqElem]:
    """按编码顺序列出全部 q 个元素，首元素为 0"""
    return [FqElem(ctx, k) for k in range(ctx.q)]


_CONTEXT_CACHE: Dict[Tuple, FqContext] = {}


def get_fq(p: int, r: int = 1, modulus: Optional[Sequence[int]] = None) -> FqContext:
    """带缓存的上下文构造"""
    key = (p, r, tuple(modulus) if modulus is not None else None)
    if key not in _CONTEXT_CACHE:
        _CONTEXT_CACHE[key] = FqContext(p, r, modulus)
    return _CONTEXT_CACHE[key]
