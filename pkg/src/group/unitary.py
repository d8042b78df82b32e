"""
特殊酉群 𝒢(k) = SU(h)(k) 的显式 3×3 矩阵模型

埃尔米特形式 h(x, y) = x₀ȳ₂ + x₁ȳ₁ + x₂ȳ₀，Gram 矩阵 H 为反对角单位阵，
g ∈ 𝒢(k) 当且仅当 det g = 1 且 g*·H·g = H。
"""

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..algebra.global_field import EllElem, ExtensionContext, hpair_check
from ..algebra.matrices import (
    Mat,
    antidiagonal,
    conj_transpose,
    det3,
    diagonal,
    hermitian_form,
    identity,
    is_identity,
    is_upper_triangular,
    kernel,
    mat_key,
    mat_mul,
    mat_sub,
    mat_vec,
)
from ..algebra.polynomials import Poly, RatF
from ..utils.errors import InvariantViolation, PreconditionError


def gram(ext: ExtensionContext) -> Mat:
    return antidiagonal(ext, [ext.one] * 3)


def is_unitary(g: Mat) -> bool:
    """det g = 1 且 conj(g)ᵗ·H·g = H"""
    ext = g[0][0].ext
    if not det3(g).is_one():
        return False
    H = gram(ext)
    return mat_mul(mat_mul(conj_transpose(g), H), g) == H


class UMatrix:
    """
    𝒢(k) 中元素

    Args:
        rows: 3×3 元素
        check: 构造时是否验证酉性（内部乘积可跳过）
    """

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Mat, check: bool = True):
        rows = tuple(tuple(r) for r in rows)
        if check and not is_unitary(rows):
            raise PreconditionError("矩阵不满足 det = 1 与 g*Hg = H")
        self.rows: Mat = rows
        self._hash: Optional[int] = None

    @property
    def ext(self) -> ExtensionContext:
        return self.rows[0][0].ext

    def __getitem__(self, ij: Tuple[int, int]) -> EllElem:
        return self.rows[ij[0]][ij[1]]

    def __eq__(self, other) -> bool:
        return isinstance(other, UMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(mat_key(self.rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(", ".join(repr(x) for x in row) for row in self.rows)
        return f"UMatrix[{body}]"

    def __mul__(self, other: "UMatrix") -> "UMatrix":
        return UMatrix(mat_mul(self.rows, other.rows), check=False)

    def inverse(self) -> "UMatrix":
        """g^{-1} = H·g*·H"""
        H = gram(self.ext)
        return UMatrix(mat_mul(mat_mul(H, conj_transpose(self.rows)), H), check=False)

    def conjugate_by(self, h: "UMatrix") -> "UMatrix":
        """h·g·h^{-1}"""
        return h * self * h.inverse()

    def apply(self, v: Sequence[EllElem]) -> Tuple[EllElem, ...]:
        return mat_vec(self.rows, v)

    def is_identity(self) -> bool:
        return is_identity(self.rows)

    def is_integral_B(self) -> bool:
        return all(x.in_B() for row in self.rows for x in row)

    def sort_key(self) -> Tuple:
        return tuple(x.sort_key() for row in self.rows for x in row)

    def to_json(self) -> List:
        return [[x.to_json() for x in row] for row in self.rows]


# ---------------------------------------------------------------------------
# 构造
# ---------------------------------------------------------------------------


def mk_identity(ext: ExtensionContext) -> UMatrix:
    return UMatrix(identity(ext), check=False)


def mk_ua(u: EllElem, v: EllElem) -> UMatrix:
    """u_a(u, v) = [[1, −ū, v], [0, 1, u], [0, 0, 1]]，要求 N(u) + T(v) = 0"""
    if not hpair_check(u, v):
        raise PreconditionError(f"(u, v) = ({u!r}, {v!r}) 不满足 N(u) + T(v) = 0")
    ext = u.ext
    z, o = ext.zero, ext.one
    return UMatrix(((o, -u.conj(), v), (z, o, u), (z, z, o)), check=False)


def mk_torus(t: EllElem) -> UMatrix:
    """ã(t) = diag(t, t̄/t, 1/t̄)"""
    if t.is_zero():
        raise PreconditionError("环面参数不能为 0")
    tb = t.conj()
    return UMatrix(diagonal(t.ext, [t, tb / t, tb.inverse()]), check=False)


def mk_s(ext: ExtensionContext) -> UMatrix:
    """s = antidiag(−1, −1, −1)"""
    m = -ext.one
    return UMatrix(antidiagonal(ext, [m, m, m]), check=False)


# ---------------------------------------------------------------------------
# 边界点
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BPoint:
    """边界点：∞ 或 (u, v) ∈ H(ℓ,k)"""
    u: Optional[EllElem] = None
    v: Optional[EllElem] = None

    def __post_init__(self):
        if (self.u is None) != (self.v is None):
            raise PreconditionError("有限边界点必须同时给出 u 与 v")
        if self.u is not None and not hpair_check(self.u, self.v):
            raise PreconditionError(f"({self.u!r}, {self.v!r}) 不在 H(ℓ,k) 中")

    @classmethod
    def infinity(cls) -> "BPoint":
        return cls()

    @property
    def is_infinity(self) -> bool:
        return self.u is None

    def __repr__(self) -> str:
        return "∞" if self.is_infinity else f"({self.u!r}, {self.v!r})"

    def to_json(self):
        if self.is_infinity:
            return "inf"
        return {"u": self.u.to_json(), "v": self.v.to_json()}


def mk_guv(pt: BPoint, ext: ExtensionContext) -> UMatrix:
    """g_{u,v} = s·u_a(u, v)；g_∞ = 单位阵"""
    if pt.is_infinity:
        return mk_identity(ext)
    return mk_s(ext) * mk_ua(pt.u, pt.v)


@dataclass
class BruhatForm:
    """g = b（epsilon = 0）或 g = u_a(x, y)·s·b（epsilon = 1）"""
    epsilon: int
    b: UMatrix
    x: Optional[EllElem] = None
    y: Optional[EllElem] = None

    def recompose(self) -> UMatrix:
        if self.epsilon == 0:
            return self.b
        return mk_ua(self.x, self.y) * mk_s(self.b.ext) * self.b


def bruhat_decompose(g: UMatrix) -> BruhatForm:
    """
    Bruhat 分解 𝒢(k) = ℬ(k) ⊔ 𝒰_a(k)·s·ℬ(k)

    左下角元素 g₃₁ 为零时 g 稳定直线 (1,0,0)，从而上三角；否则
    x = g₂₁/g₃₁，y = g₁₁/g₃₁，b = s·u_a(−x, ȳ)·g。
    """
    rows = g.rows
    if rows[2][0].is_zero():
        if not is_upper_triangular(rows):
            raise InvariantViolation("g₃₁ = 0 但 g 不是上三角，输入不是酉矩阵")
        return BruhatForm(epsilon=0, b=g)
    g31 = rows[2][0]
    x = rows[1][0] / g31
    y = rows[0][0] / g31
    b = mk_s(g.ext) * mk_ua(-x, y.conj()) * g
    if not is_upper_triangular(b.rows):
        raise InvariantViolation("Bruhat 分解得到的 b 不是上三角")
    return BruhatForm(epsilon=1, b=b, x=x, y=y)


def boundary_act(g: UMatrix, xi: BPoint) -> BPoint:
    """g·ξ：m = g·g_ξ^{-1}，m ∈ ℬ 给出 ∞，m = u_a(x,y)·s·b 给出 (−x, ȳ)"""
    m = g * mk_guv(xi, g.ext).inverse()
    form = bruhat_decompose(m)
    if form.epsilon == 0:
        return BPoint.infinity()
    return BPoint(-form.x, form.y.conj())


@dataclass(frozen=True)
class IsoLine:
    """ℓ³ 中的迷向直线，代表元首个非零坐标为 1"""
    rep: Tuple[EllElem, EllElem, EllElem]

    @classmethod
    def from_vector(cls, v: Sequence[EllElem]) -> "IsoLine":
        lead = next((x for x in v if not x.is_zero()), None)
        if lead is None:
            raise PreconditionError("零向量不定义直线")
        inv = lead.inverse()
        rep = tuple(x * inv for x in v)
        if not hermitian_form(rep, rep).is_zero():
            raise PreconditionError(f"向量 {rep!r} 不是迷向向量")
        return cls(rep)

    def to_json(self) -> List:
        return [x.to_json() for x in self.rep]


def boundary_line(xi: BPoint, ext: ExtensionContext) -> IsoLine:
    """∞ ↦ (1,0,0)；(u, v) ↦ (v̄, −u, 1) 所在直线"""
    if xi.is_infinity:
        return IsoLine((ext.one, ext.zero, ext.zero))
    return IsoLine.from_vector((xi.v.conj(), -xi.u, ext.one))


def line_boundary(L: IsoLine) -> BPoint:
    a, b, c = L.rep
    if not hermitian_form(L.rep, L.rep).is_zero():
        raise PreconditionError("直线不是迷向的")
    if c.is_zero():
        return BPoint.infinity()
    inv = c.inverse()
    a, b = a * inv, b * inv
    return BPoint(-b, a.conj())


def is_unipotent(g: UMatrix) -> bool:
    """(g − I)³ = 0"""
    n = mat_sub(g.rows, identity(g.ext))
    n3 = mat_mul(mat_mul(n, n), n)
    return all(x.is_zero() for row in n3 for x in row)


# ---------------------------------------------------------------------------
# 有限 p-群的不动边界点
# ---------------------------------------------------------------------------


def group_closure(gens: Sequence[UMatrix], bound: int) -> List[UMatrix]:
    """
    生成元的有限闭包（右乘 BFS）

    Raises:
        PreconditionError: 阶超过 bound（不是允许阶的有限群）
    """
    if not gens:
        raise PreconditionError("生成元列表为空")
    one = mk_identity(gens[0].ext)
    seen = {one}
    order = [one]
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x * g
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
                if len(seen) > bound:
                    raise PreconditionError(f"生成的群阶超过上限 {bound}")
    return order


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def fixed_boundary_point(gens: Sequence[UMatrix], bound: Optional[int] = None) -> BPoint:
    """
    有限 p-子群的唯一不动边界点

    先求公共不动子空间 F = ∩ ker(g − I)；dim F = 1 时 F 本身须迷向，
    dim F = 2 时取 h 在 F 上的根基（p-群的迷向不动直线与 F 正交）。

    Raises:
        PreconditionError: 闭包过大、阶不是 p 的幂、或找不到唯一迷向不动直线
    """
    if not gens:
        raise PreconditionError("生成元列表为空")
    ext = gens[0].ext
    p = ext.fq.p
    bound = bound if bound is not None else p ** 4
    elements = group_closure(gens, bound)
    if not _is_power_of(len(elements), p):
        raise PreconditionError(f"群阶 {len(elements)} 不是 {p} 的幂")

    I = identity(ext)
    rows = []
    for g in gens:
        rows.extend(mat_sub(g.rows, I))
    F = kernel(rows)
    logger.debug(f"公共不动子空间维数 {len(F)}, 群阶 {len(elements)}")

    if len(F) == 1:
        vec = F[0]
        if not hermitian_form(vec, vec).is_zero():
            raise PreconditionError("唯一不动直线不是迷向的")
    elif len(F) == 2:
        f0, f1 = F
        gm = [[hermitian_form(a, b) for b in (f0, f1)] for a in (f0, f1)]
        det = gm[0][0] * gm[1][1] - gm[0][1] * gm[1][0]
        if not det.is_zero():
            raise PreconditionError("不动平面上 h 非退化，不存在唯一迷向不动直线")
        # 根基 = {c0 f0 + c1 f1 : h(c0 f0 + c1 f1, f_j) = 0}
        rad = kernel([[gm[0][0], gm[1][0]], [gm[0][1], gm[1][1]]])
        if len(rad) != 1:
            raise PreconditionError("不动平面上 h 的根基维数不是 1")
        c0, c1 = rad[0]
        vec = tuple(c0 * a + c1 * b for a, b in zip(f0, f1))
    else:
        raise PreconditionError(f"公共不动子空间维数为 {len(F)}，无法确定唯一不动点")

    xi = line_boundary(IsoLine.from_vector(vec))
    for g in gens:
        if boundary_act(g, xi) != xi:
            raise InvariantViolation(f"求得的边界点 {xi!r} 不被生成元固定")
    return xi


def scan_boundary_points(ext: ExtensionContext, degree: int):
    """
    枚举 ∞ 与全部 B-整的 (u, v) ∈ H(ℓ,k)，坐标次数 ≤ degree

    v = −N(u)/2 + wω，w ∈ A。
    """
    fq = ext.fq
    yield BPoint.infinity()
    for u, real in _scan_u(ext, degree):
        for w in _scan_polys(fq, degree):
            yield BPoint(u, ext.elem(real, RatF.from_poly(w)))


def _scan_polys(fq, degree: int) -> List[Poly]:
    return [Poly(fq, cs) for cs in product(range(fq.q), repeat=degree + 1)]


def _scan_u(ext: ExtensionContext, degree: int):
    """扫描范围内的 u 及其实部 −N(u)/2（须为多项式）"""
    fq = ext.fq
    polys = _scan_polys(fq, degree)
    half = RatF.const(fq, fq.neg_table[fq.half])
    for a in polys:
        for b in polys:
            u = ext.from_polys(a, b)
            real = u.norm() * half
            if real.is_poly():
                yield u, real


def _line_candidates(g: UMatrix, y: EllElem) -> Optional[List[EllElem]]:
    """
    g 固定直线 (x, y, 1) 时 x 的候选

    由第 1、0 行的特征方程解出 x；返回 None 表示方程不能确定 x。
    """
    m = g.rows
    lam_y = m[2][1] * y + m[2][2]
    coef = m[1][0] - m[2][0] * y
    rhs = (lam_y - m[1][1]) * y - m[1][2]
    if not coef.is_zero():
        return [rhs / coef]
    if not rhs.is_zero():
        return []
    if not m[2][0].is_zero():
        return None
    lin = lam_y - m[0][0]
    const = m[0][1] * y + m[0][2]
    if not lin.is_zero():
        return [const / lin]
    return [] if not const.is_zero() else None


def fixes_boundary_point(g: UMatrix, xi: BPoint) -> bool:
    return _fixes_line(g, boundary_line(xi, g.ext).rep)


def fixed_points_in_scan(gens: Sequence[UMatrix], degree: int, exhaustive: bool = False) -> List[BPoint]:
    """
    扫描范围内被全部生成元固定的边界点（唯一性旁证）

    对每个 u 先由不动直线方程解出 v 的候选，只有方程退化时才枚举 w；
    exhaustive=True 时逐点检查全部扫描点。
    """
    ext = gens[0].ext
    if exhaustive:
        return [xi for xi in scan_boundary_points(ext, degree) if all(fixes_boundary_point(g, xi) for g in gens)]

    out = []
    if all(fixes_boundary_point(g, BPoint.infinity()) for g in gens):
        out.append(BPoint.infinity())
    for u, real in _scan_u(ext, degree):
        candidates = None
        for g in gens:
            candidates = _line_candidates(g, -u)
            if candidates is not None:
                break
        if candidates is None:
            points = [BPoint(u, ext.elem(real, RatF.from_poly(w))) for w in _scan_polys(ext.fq, degree)]
        else:
            points = []
            for x in candidates:
                v = x.conj()
                if v.a != real or not v.b.is_poly() or v.b.num.deg > degree:
                    continue
                points.append(BPoint(u, v))
        out.extend(xi for xi in points if all(fixes_boundary_point(g, xi) for g in gens))
    logger.debug(f"扫描次数 ≤ {degree}: {len(out)} 个不动点")
    return out


def _fixes_line(g: UMatrix, rep: Sequence[EllElem]) -> bool:
    w = g.apply(rep)
    # rep 的某个坐标为 1
    k = next(i for i, x in enumerate(rep) if not x.is_zero())
    lam = w[k] / rep[k]
    return all((wi - lam * ri).is_zero() for wi, ri in zip(w, rep))


def commutator(g: UMatrix, h: UMatrix) -> UMatrix:
    return g * h * g.inverse() * h.inverse()


def matrix_order(g: UMatrix, bound: int) -> Optional[int]:
    """元素的阶（≤ bound），超过时返回 None"""
    x = g
    for n in range(1, bound + 1):
        if x.is_identity():
            return n
        x = x * g
    return None
