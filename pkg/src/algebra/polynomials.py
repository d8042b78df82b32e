"""
多项式环 A = F_q[t] 与有理函数域 k = F_q(t)

系数以 F_q 编码（int）存储，运算查 FqContext 的预计算表。
"""

from typing import Dict, List, Optional, Sequence, Tuple

from .finite_field import FqContext, FqElem
from ..utils.errors import FieldMismatchError

# 零多项式的次数
NEG_INF = float("-inf")
# 零元素的赋值
VAL_INF = float("inf")


def _strip(c: List[int]) -> List[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


class Poly:
    """
    F_q[t] 中的多项式（小端系数，无尾零，规范表示）
    """

    __slots__ = ("ctx", "c", "_hash")

    def __init__(self, ctx: FqContext, coeffs: Sequence[int] = ()):
        self.ctx = ctx
        self.c: Tuple[int, ...] = tuple(_strip(list(coeffs)))
        self._hash: Optional[int] = None

    # ---------- 构造 ----------

    @classmethod
    def zero(cls, ctx: FqContext) -> "Poly":
        return cls(ctx, ())

    @classmethod
    def one(cls, ctx: FqContext) -> "Poly":
        return cls(ctx, (1,))

    @classmethod
    def t(cls, ctx: FqContext) -> "Poly":
        return cls(ctx, (0, 1))

    @classmethod
    def const(cls, ctx: FqContext, code: int) -> "Poly":
        return cls(ctx, (code,))

    @classmethod
    def monomial(cls, ctx: FqContext, k: int, code: int = 1) -> "Poly":
        return cls(ctx, [0] * k + [code])

    @classmethod
    def from_ints(cls, ctx: FqContext, ints: Sequence[int]) -> "Poly":
        """整数系数列表（小端）约化到素域"""
        return cls(ctx, [ctx.from_int(int(n)) for n in ints])

    # ---------- 基本属性 ----------

    @property
    def deg(self):
        return len(self.c) - 1 if self.c else NEG_INF

    @property
    def lc(self) -> int:
        return self.c[-1] if self.c else 0

    def is_zero(self) -> bool:
        return not self.c

    def is_one(self) -> bool:
        return self.c == (1,)

    def is_monomial(self) -> bool:
        """c·t^k（c ≠ 0）"""
        return bool(self.c) and not any(self.c[:-1])

    def ord_t(self) -> int:
        """t 的重数（零多项式无定义）"""
        return next(i for i, x in enumerate(self.c) if x)

    def coefficients(self) -> List[FqElem]:
        return [FqElem(self.ctx, x) for x in self.c]

    def coeff(self, k: int) -> int:
        return self.c[k] if 0 <= k < len(self.c) else 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.c == other.c and self.ctx == other.ctx

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("P", self.c))
        return self._hash

    def sort_key(self) -> Tuple:
        return (len(self.c), tuple(reversed(self.c)))

    def __repr__(self) -> str:
        if not self.c:
            return "0"
        terms = []
        for k in range(len(self.c) - 1, -1, -1):
            x = self.c[k]
            if not x:
                continue
            coef = "".join(map(str, reversed(self.ctx.digits(x)))) if self.ctx.r > 1 else str(x)
            if k == 0:
                terms.append(coef)
            else:
                mono = "t" if k == 1 else f"t^{k}"
                terms.append(mono if x == 1 else f"{coef}{mono}")
        return "+".join(terms)

    def _check(self, other: "Poly"):
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise FieldMismatchError("多项式的系数域不一致")

    # ---------- 环运算 ----------

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        add = self.ctx.add_table
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = add[out[i]][y]
        return Poly(self.ctx, out)

    def __neg__(self) -> "Poly":
        neg = self.ctx.neg_table
        return Poly(self.ctx, [neg[x] for x in self.c])

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        sub = self.ctx.sub_table
        n = max(len(self.c), len(other.c))
        a = self.c + (0,) * (n - len(self.c))
        b = other.c + (0,) * (n - len(other.c))
        return Poly(self.ctx, [sub[x][y] for x, y in zip(a, b)])

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self.c, other.c
        if not a or not b:
            return Poly(self.ctx, ())
        mul, add = self.ctx.mul_table, self.ctx.add_table
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            row = mul[x]
            for j, y in enumerate(b):
                if y:
                    out[i + j] = add[out[i + j]][row[y]]
        return Poly(self.ctx, out)

    def scale(self, code: int) -> "Poly":
        row = self.ctx.mul_table[code]
        return Poly(self.ctx, [row[x] for x in self.c])

    def shift(self, k: int) -> "Poly":
        """乘以 t^k（k ≥ 0）"""
        if not self.c:
            return self
        return Poly(self.ctx, [0] * k + list(self.c))

    def __pow__(self, e: int) -> "Poly":
        result = Poly.one(self.ctx)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        """带余除法"""
        self._check(other)
        if not other.c:
            raise ZeroDivisionError("多项式除以零")
        ctx = self.ctx
        mul, sub = ctx.mul_table, ctx.sub_table
        r = list(self.c)
        db = len(other.c) - 1
        inv_lc = ctx.inv_table[other.c[-1]]
        if len(r) - 1 < db:
            return Poly(ctx, ()), self
        if other.is_monomial():
            row = mul[inv_lc]
            return Poly(ctx, [row[x] for x in r[db:]]), Poly(ctx, r[:db])
        qc = [0] * (len(r) - db)
        for i in range(len(r) - 1, db - 1, -1):
            x = r[i]
            if not x:
                continue
            f = mul[x][inv_lc]
            qc[i - db] = f
            row = mul[f]
            for j, y in enumerate(other.c):
                if y:
                    r[i - db + j] = sub[r[i - db + j]][row[y]]
        return Poly(ctx, qc), Poly(ctx, r[:db])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if not self.c or self.c[-1] == 1:
            return self
        return self.scale(self.ctx.inv_table[self.c[-1]])

    def gcd(self, other: "Poly") -> "Poly":
        """首一最大公因式"""
        if self.is_monomial() and other.c:
            return Poly.monomial(self.ctx, min(len(self.c) - 1, other.ord_t()))
        if other.is_monomial() and self.c:
            return Poly.monomial(self.ctx, min(len(other.c) - 1, self.ord_t()))
        a, b = self, other
        while b.c:
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other: "Poly") -> Tuple["Poly", "Poly", "Poly"]:
        """扩展欧几里得：返回 (g, x, y)，g = x·self + y·other 首一"""
        ctx = self.ctx
        r0, r1 = self, other
        s0, s1 = Poly.one(ctx), Poly.zero(ctx)
        t0, t1 = Poly.zero(ctx), Poly.one(ctx)
        while r1.c:
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if not r0.c:
            return r0, s0, t0
        inv = ctx.inv_table[r0.lc]
        return r0.scale(inv), s0.scale(inv), t0.scale(inv)

    def derivative(self) -> "Poly":
        ctx = self.ctx
        mul = ctx.mul_table
        return Poly(ctx, [mul[x][ctx.from_int(k)] for k, x in enumerate(self.c)][1:])

    def is_squarefree(self) -> bool:
        if not self.c:
            return False
        d = self.derivative()
        if not d.c:
            return len(self.c) == 1
        return self.gcd(d).is_one()

    def eval(self, code: int) -> int:
        mul, add = self.ctx.mul_table, self.ctx.add_table
        acc = 0
        for x in reversed(self.c):
            acc = add[mul[acc][code]][x]
        return acc

    def to_json(self) -> List[int]:
        return list(self.c)


class RatF:
    """
    有理函数 num/den（den 首一非零，gcd = 1）
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Optional[Poly] = None, normalized: bool = False):
        if den is None:
            den = Poly.one(num.ctx)
        if not normalized and not den.is_one():
            if den.is_zero():
                raise ZeroDivisionError("有理函数分母为零")
            if num.is_zero():
                den = Poly.one(num.ctx)
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num, den = num // g, den // g
                lc = den.lc
                if lc != 1:
                    inv = num.ctx.inv_table[lc]
                    num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den
        self._hash: Optional[int] = None

    @classmethod
    def zero(cls, ctx: FqContext) -> "RatF":
        return cls(Poly.zero(ctx), normalized=True)

    @classmethod
    def one(cls, ctx: FqContext) -> "RatF":
        return cls(Poly.one(ctx), normalized=True)

    @classmethod
    def const(cls, ctx: FqContext, code: int) -> "RatF":
        return cls(Poly.const(ctx, code), normalized=True)

    @classmethod
    def from_poly(cls, p: Poly) -> "RatF":
        return cls(p, normalized=True)

    @property
    def ctx(self) -> FqContext:
        return self.num.ctx

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_one()

    def __eq__(self, other) -> bool:
        return isinstance(other, RatF) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num.c, self.den.c))
        return self._hash

    def sort_key(self) -> Tuple:
        return (self.den.sort_key(), self.num.sort_key())

    def __repr__(self) -> str:
        if self.den.is_one():
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"

    def _add(self, c: Poly, d: Poly) -> "RatF":
        """a/b + c/d，只在分母公因子 g = gcd(b, d) 上做约分"""
        a, b = self.num, self.den
        ctx = a.ctx
        if b.is_one() and d.is_one():
            return RatF(a + c, b, normalized=True)
        if c.is_zero():
            return self
        if a.is_zero():
            return RatF(c, d, normalized=True)
        if b.is_one():
            return RatF(a * d + c, d, normalized=True)
        if d.is_one():
            return RatF(a + c * b, b, normalized=True)
        g = b.gcd(d)
        if g.is_one():
            return RatF(a * d + c * b, b * d, normalized=True)
        b1, d1 = b // g, d // g
        num = a * d1 + c * b1
        if num.is_zero():
            return RatF.zero(ctx)
        g2 = num.gcd(g)
        if g2.is_one():
            return RatF(num, b1 * d, normalized=True)
        return RatF(num // g2, b1 * (d // g2), normalized=True)

    def __add__(self, other: "RatF") -> "RatF":
        return self._add(other.num, other.den)

    def __sub__(self, other: "RatF") -> "RatF":
        return self._add(-other.num, other.den)

    def __neg__(self) -> "RatF":
        return RatF(-self.num, self.den, normalized=True)

    def __mul__(self, other: "RatF") -> "RatF":
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.is_one() and d.is_one():
            return RatF(a * c, b, normalized=True)
        if a.is_zero() or c.is_zero():
            return RatF.zero(a.ctx)
        # 交叉约分后分子分母已互素
        if not d.is_one():
            g = a.gcd(d)
            if not g.is_one():
                a, d = a // g, d // g
        if not b.is_one():
            g = c.gcd(b)
            if not g.is_one():
                c, b = c // g, b // g
        return RatF(a * c, b * d, normalized=True)

    def scale(self, code: int) -> "RatF":
        return RatF(self.num.scale(code), self.den, normalized=True)

    def inverse(self) -> "RatF":
        if self.num.is_zero():
            raise ZeroDivisionError("有理函数 0 不可逆")
        return RatF(self.den, self.num)

    def __truediv__(self, other: "RatF") -> "RatF":
        return self * other.inverse()

    def __pow__(self, e: int) -> "RatF":
        if e < 0:
            return self.inverse() ** (-e)
        return RatF(self.num ** e, self.den ** e, normalized=True)

    def val_P(self):
        """无穷远处赋值 ν(f/g) = deg g − deg f"""
        if self.num.is_zero():
            return VAL_INF
        return (len(self.den.c) - 1) - (len(self.num.c) - 1)

    def s_digits(self, upto: int) -> Dict[int, int]:
        """
        在 s = 1/t 处的 Laurent 展开

        Args:
            upto: 只保留 s 指数 < upto 的项

        Returns:
            Dict[int, int]: 指数 → 系数编码（仅非零项）
        """
        if self.num.is_zero():
            return {}
        ctx = self.ctx
        mul, sub = ctx.mul_table, ctx.sub_table
        f = list(reversed(self.num.c))
        g = list(reversed(self.den.c))
        v = self.val_P()
        n = upto - v
        if n <= 0:
            return {}
        inv_g0 = ctx.inv_table[g[0]]
        h: List[int] = []
        for k in range(n):
            acc = f[k] if k < len(f) else 0
            for i in range(1, min(k, len(g) - 1) + 1):
                if g[i] and h[k - i]:
                    acc = sub[acc][mul[g[i]][h[k - i]]]
            h.append(mul[acc][inv_g0])
        return {v + k: x for k, x in enumerate(h) if x}

    @classmethod
    def from_s_digits(cls, ctx: FqContext, digits: Dict[int, int]) -> "RatF":
        """由 s 的 Laurent 多项式还原为 k 中元素"""
        if not digits:
            return cls.zero(ctx)
        top = max(0, max(digits))
        coeffs = [0] * (top - min(digits) + 1)
        for j, x in digits.items():
            coeffs[top - j] = x
        return cls(Poly(ctx, coeffs), Poly.monomial(ctx, top))

    def to_json(self) -> Dict[str, List[int]]:
        return {"num": self.num.to_json(), "den": self.den.to_json()}
