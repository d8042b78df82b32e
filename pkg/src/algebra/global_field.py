"""
整体域：A = F_q[t]，k = F_q(t)，二次扩张 ℓ = k(ω)，ω² = D(t)，B = A[ω]

P 为 k 的无穷远点。deg D 为奇数时 P 在 ℓ 中分歧，其上唯一的点记为 Q。
赋值统一取整数：val_Q 限制在 k 上等于 2·val_P，val_Q(ω) = −deg D。
"""

from typing import Dict, Optional, Sequence, Tuple

from .finite_field import FqContext
from .polynomials import NEG_INF, VAL_INF, Poly, RatF
from ..utils.errors import FieldMismatchError, PreconditionError


class ExtensionContext:
    """
    二次扩张上下文

    Args:
        fq: 常数域
        D: 无平方因子、奇数次的多项式
    """

    def __init__(self, fq: FqContext, D: Poly):
        if D.is_zero() or D.deg < 1:
            raise PreconditionError("D 的次数必须 ≥ 1")
        if D.deg % 2 == 0:
            raise PreconditionError(f"deg D = {D.deg} 为偶数（P 惰性），不在支持范围内")
        if not D.is_squarefree():
            raise PreconditionError(f"D = {D!r} 不是无平方因子多项式")
        self.fq = fq
        self.D = D
        self.d: int = int(D.deg)
        self.D_rat = RatF.from_poly(D)
        # ρ = ω · t^{-(d+1)/2}
        self.rho_shift: int = (self.d + 1) // 2
        self._t_pow_neg = RatF(Poly.one(fq), Poly.monomial(fq, self.rho_shift))

    @property
    def key(self) -> Tuple:
        return (self.fq.key, self.D.c)

    def __eq__(self, other) -> bool:
        return self is other or (isinstance(other, ExtensionContext) and self.key == other.key)

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"ExtensionContext(q={self.fq.q}, D={self.D!r})"

    # ---------- 常用元素 ----------

    def elem(self, a: RatF, b: Optional[RatF] = None) -> "EllElem":
        if b is None:
            b = RatF.zero(self.fq)
        return EllElem(self, a, b)

    def from_polys(self, a: Poly, b: Optional[Poly] = None) -> "EllElem":
        return EllElem(
            self,
            RatF.from_poly(a),
            RatF.from_poly(b) if b is not None else RatF.zero(self.fq),
        )

    def from_ints(self, a: Sequence[int], b: Sequence[int] = ()) -> "EllElem":
        """由整数系数列表构造 a + bω（a、b ∈ A）"""
        return self.from_polys(Poly.from_ints(self.fq, a), Poly.from_ints(self.fq, b))

    def const(self, code: int) -> "EllElem":
        return self.elem(RatF.const(self.fq, code))

    @property
    def zero(self) -> "EllElem":
        return self.elem(RatF.zero(self.fq))

    @property
    def one(self) -> "EllElem":
        return self.elem(RatF.one(self.fq))

    @property
    def omega(self) -> "EllElem":
        return self.elem(RatF.zero(self.fq), RatF.one(self.fq))

    @property
    def t(self) -> "EllElem":
        return self.from_polys(Poly.t(self.fq))

    @property
    def s(self) -> "EllElem":
        """k 在 P 处的单值化元 s = 1/t"""
        return self.elem(RatF(Poly.one(self.fq), Poly.t(self.fq)))

    @property
    def rho(self) -> "EllElem":
        """ℓ 在 Q 处的单值化元 ρ = ω·t^{-(d+1)/2}，满足 ρ̄ = −ρ"""
        return self.elem(RatF.zero(self.fq), self._t_pow_neg)

    def mu(self, e: int) -> "EllElem":
        """规范对角元 μ_e = s^{⌊e/2⌋}·ρ^{e mod 2}，val_Q(μ_e) = e"""
        j, odd = divmod(e, 2)
        s_pow = RatF(Poly.one(self.fq), Poly.t(self.fq)) ** j
        if odd:
            return self.elem(RatF.zero(self.fq), s_pow * self._t_pow_neg)
        return self.elem(s_pow)

    def beta_factor(self) -> RatF:
        """t^{(d+1)/2}：a + bω = α + βρ 时 β = b·t^{(d+1)/2}"""
        return RatF.from_poly(Poly.monomial(self.fq, self.rho_shift))

    def rho_inverse_factor(self) -> RatF:
        return self._t_pow_neg


class EllElem:
    """
    ℓ 中元素 a + bω（a、b ∈ k）
    """

    __slots__ = ("ext", "a", "b", "_hash")

    def __init__(self, ext: ExtensionContext, a: RatF, b: RatF):
        self.ext = ext
        self.a = a
        self.b = b
        self._hash: Optional[int] = None

    def _check(self, other: "EllElem"):
        if other.ext is not self.ext and other.ext != self.ext:
            raise FieldMismatchError("ℓ 元素属于不同的扩张")

    def __eq__(self, other) -> bool:
        return isinstance(other, EllElem) and self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.a, self.b))
        return self._hash

    def sort_key(self) -> Tuple:
        return (self.a.sort_key(), self.b.sort_key())

    def __repr__(self) -> str:
        if self.b.is_zero():
            return repr(self.a)
        if self.a.is_zero():
            return f"({self.b!r})w"
        return f"{self.a!r} + ({self.b!r})w"

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def is_one(self) -> bool:
        return self.b.is_zero() and self.a.den.is_one() and self.a.num.is_one()

    def __add__(self, other: "EllElem") -> "EllElem":
        self._check(other)
        return EllElem(self.ext, self.a + other.a, self.b + other.b)

    def __sub__(self, other: "EllElem") -> "EllElem":
        self._check(other)
        return EllElem(self.ext, self.a - other.a, self.b - other.b)

    def __neg__(self) -> "EllElem":
        return EllElem(self.ext, -self.a, -self.b)

    def __mul__(self, other: "EllElem") -> "EllElem":
        self._check(other)
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        if b1.is_zero() and b2.is_zero():
            return EllElem(self.ext, a1 * a2, b1)
        if b1.is_zero():
            return EllElem(self.ext, a1 * a2, a1 * b2)
        if b2.is_zero():
            return EllElem(self.ext, a1 * a2, b1 * a2)
        return EllElem(
            self.ext,
            a1 * a2 + b1 * b2 * self.ext.D_rat,
            a1 * b2 + b1 * a2,
        )

    def scale(self, r: RatF) -> "EllElem":
        """乘以 k 中元素"""
        return EllElem(self.ext, self.a * r, self.b * r)

    def scale_code(self, code: int) -> "EllElem":
        return EllElem(self.ext, self.a.scale(code), self.b.scale(code))

    def conj(self) -> "EllElem":
        return EllElem(self.ext, self.a, -self.b)

    def norm(self) -> RatF:
        return self.a * self.a - self.b * self.b * self.ext.D_rat

    def trace(self) -> RatF:
        return self.a + self.a

    def inverse(self) -> "EllElem":
        if self.is_zero():
            raise ZeroDivisionError("ℓ 中 0 不可逆")
        if self.b.is_zero():
            return EllElem(self.ext, self.a.inverse(), self.b)
        n_inv = self.norm().inverse()
        return EllElem(self.ext, self.a * n_inv, -(self.b * n_inv))

    def __truediv__(self, other: "EllElem") -> "EllElem":
        return self * other.inverse()

    def __pow__(self, e: int) -> "EllElem":
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ext.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def in_B(self) -> bool:
        return self.a.is_poly() and self.b.is_poly()

    def val_Q(self):
        return val_Q(self)

    def to_json(self) -> Dict:
        return {"a": self.a.to_json(), "b": self.b.to_json()}


# ---------------------------------------------------------------------------
# 函数式接口
# ---------------------------------------------------------------------------


def ell_conj(x: EllElem) -> EllElem:
    """Galois 共轭 a + bω ↦ a − bω"""
    return x.conj()


def norm_trace(x: EllElem) -> Tuple[RatF, RatF]:
    """返回 (N(x), T(x))，N = a² − b²D，T = 2a"""
    return x.norm(), x.trace()


def hpair_check(u: EllElem, v: EllElem, center: bool = False) -> bool:
    """
    判断 (u, v) ∈ H(ℓ,k)，即 N(u) + T(v) = 0

    Args:
        center: 为 True 时检查 H(ℓ,k)⁰：u = 0 且 T(v) = 0
    """
    if center:
        return u.is_zero() and v.trace().is_zero()
    return (u.norm() + v.trace()).is_zero()


def val_P(x: RatF):
    """ν_P(f/g) = deg g − deg f，ν(0) = +∞"""
    return x.val_P()


def val_Q(x: EllElem):
    """
    Q 处整数赋值：val_Q(a + bω) = min(2·ν(a), 2·ν(b) − deg D)

    两项奇偶性不同，不会出现相消。
    """
    va = 2 * x.a.val_P() if not x.a.is_zero() else VAL_INF
    vb = 2 * x.b.val_P() - x.ext.d if not x.b.is_zero() else VAL_INF
    return min(va, vb)


def in_B(x: EllElem) -> bool:
    """x ∈ B = A[ω]（D 无平方因子且 p 奇时即整闭包）"""
    return x.in_B()


def b_degrees(x: EllElem) -> Tuple:
    """B 中元素的坐标次数 (deg a, deg b)"""
    return (x.a.num.deg, x.b.num.deg)


def deg_norm(x: EllElem):
    """B 中元素范数的次数：max(2 deg a, 2 deg b + deg D)，无相消"""
    da, db = b_degrees(x)
    return max(2 * da, 2 * db + x.ext.d) if not x.is_zero() else NEG_INF
