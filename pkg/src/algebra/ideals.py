"""
B = A[ω] 的理想与理想类群

理想作为秩 2 的 A-模存储为 Hermite 形式
    J = A·a + A·(b + cω)，a、c 首一，deg b < deg a，
于是 |B/J| = q^{deg a + deg c}，约化与判等都是结构化的。
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from .global_field import EllElem, ExtensionContext
from .polynomials import Poly, RatF
from ..utils.errors import PreconditionError


def _hermite_basis(ext: ExtensionContext, vectors: List[Tuple[Poly, Poly]]) -> Tuple[Poly, Poly, Poly]:
    """A² 中向量组生成模的 Hermite 基，返回 (a, b, c)"""
    fq = ext.fq
    vecs = [(x, y) for x, y in vectors if not (x.is_zero() and y.is_zero())]
    while True:
        with_y = [v for v in vecs if not v[1].is_zero()]
        if len(with_y) <= 1:
            break
        pivot = min(with_y, key=lambda v: v[1].deg)
        new = [pivot]
        for v in vecs:
            if v is pivot:
                continue
            if v[1].is_zero():
                new.append(v)
                continue
            q, r = v[1].divmod(pivot[1])
            new.append((v[0] - q * pivot[0], r))
        vecs = [v for v in new if not (v[0].is_zero() and v[1].is_zero())]

    with_y = [v for v in vecs if not v[1].is_zero()]
    if not with_y:
        raise PreconditionError("理想不是满秩 A-模（零理想？）")
    b, c = with_y[0]
    a = Poly.zero(fq)
    for x, y in vecs:
        if y.is_zero():
            a = x if a.is_zero() else a.gcd(x)
    if a.is_zero():
        raise PreconditionError("理想与 A 的交为零")
    a = a.monic()
    lc_inv = fq.inv_table[c.lc]
    b, c = b.scale(lc_inv), c.scale(lc_inv)
    b = b % a
    return a, b, c


class BIdeal:
    """
    B 的非零理想

    Args:
        ext: 二次扩张上下文
        generators: B 中生成元
    """

    def __init__(self, ext: ExtensionContext, generators: Sequence[EllElem]):
        gens = [g for g in generators if not g.is_zero()]
        if not gens:
            raise PreconditionError("理想至少需要一个非零生成元")
        for g in gens:
            if not g.in_B():
                raise PreconditionError(f"生成元 {g!r} 不在 B 中")
        self.ext = ext
        self.generators: Tuple[EllElem, ...] = tuple(gens)

        D = ext.D
        vectors = []
        for g in gens:
            x, y = g.a.num, g.b.num
            vectors.append((x, y))
            # ω·(x + yω) = yD + xω
            vectors.append((y * D, x))
        self.a, self.b, self.c = _hermite_basis(ext, vectors)

    @classmethod
    def from_hnf(cls, ext: ExtensionContext, a: Poly, b: Poly, c: Poly) -> "BIdeal":
        return cls(ext, [ext.from_polys(a), ext.from_polys(b, c)])

    @classmethod
    def unit(cls, ext: ExtensionContext) -> "BIdeal":
        return cls(ext, [ext.one])

    # ---------- 基本属性 ----------

    @property
    def key(self) -> Tuple:
        return (self.a.c, self.b.c, self.c.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, BIdeal) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"BIdeal(a={self.a!r}, b={self.b!r}, c={self.c!r})"

    @property
    def norm_degree(self) -> int:
        """log_q |B/J|"""
        return int(self.a.deg + self.c.deg)

    @property
    def index(self) -> int:
        return self.ext.fq.q ** self.norm_degree

    def is_unit(self) -> bool:
        return self.norm_degree == 0

    def is_primitive(self) -> bool:
        """不被 A 中非单位元整除（c = 1）"""
        return self.c.is_one()

    def hnf_elements(self) -> Tuple[EllElem, EllElem]:
        return self.ext.from_polys(self.a), self.ext.from_polys(self.b, self.c)

    # ---------- 约化 ----------

    def reduce_pair(self, x: Poly, y: Poly) -> Tuple[Poly, Poly]:
        """x + yω 模 J 的规范代表：deg y < deg c，deg x < deg a"""
        q, r = y.divmod(self.c)
        x = x - q * self.b
        return x % self.a, r

    def reduce(self, z: EllElem) -> EllElem:
        if not z.in_B():
            raise PreconditionError(f"{z!r} 不在 B 中，无法模 J 约化")
        x, y = self.reduce_pair(z.a.num, z.b.num)
        return self.ext.from_polys(x, y)

    def residue_vector(self, z: EllElem) -> List[int]:
        """规范代表在基 (t^i, i<deg a; t^j ω, j<deg c) 下的 F_q 坐标"""
        x, y = self.reduce_pair(z.a.num, z.b.num)
        da, dc = int(self.a.deg), int(self.c.deg)
        return [x.coeff(i) for i in range(da)] + [y.coeff(j) for j in range(dc)]

    def contains(self, z: EllElem) -> bool:
        if z.is_zero():
            return True
        if not z.in_B():
            return False
        x, y = self.reduce_pair(z.a.num, z.b.num)
        return x.is_zero() and y.is_zero()

    # ---------- 理想运算 ----------

    def __mul__(self, other: "BIdeal") -> "BIdeal":
        gens = [x * y for x in self.hnf_elements() for y in other.hnf_elements()]
        return BIdeal(self.ext, gens)

    def conj(self) -> "BIdeal":
        return BIdeal(self.ext, [g.conj() for g in self.hnf_elements()])

    def power(self, e: int) -> "BIdeal":
        result = BIdeal.unit(self.ext)
        for _ in range(e):
            result = result * self
        return result

    def to_json(self) -> Dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "c": self.c.to_json()}


# ---------------------------------------------------------------------------
# 主理想判定与类群
# ---------------------------------------------------------------------------


def _polys_up_to(ext: ExtensionContext, deg: int) -> List[Poly]:
    if deg < 0:
        return [Poly.zero(ext.fq)]
    return [Poly(ext.fq, cs) for cs in product(range(ext.fq.q), repeat=deg + 1)]


def principal_generator(K: BIdeal) -> Optional[EllElem]:
    """
    若 K 为主理想返回一个生成元，否则返回 None

    x ∈ K 生成 K 当且仅当 deg N(x) = log_q|B/K|；在 K 的 A-基下按次数箱搜索。
    """
    ext = K.ext
    n = K.norm_degree
    d = ext.d
    if n == 0:
        return ext.one
    # x = f·a + g·(b + cω)，β = g·c，2 deg β + d ≤ n，2 deg α ≤ n
    g_deg = (n - d) // 2 - int(K.c.deg) if n >= d else -1
    f_room = n // 2 - int(K.a.deg)
    for g in _polys_up_to(ext, g_deg):
        base_f = -((g * K.b) // K.a)
        for h in _polys_up_to(ext, f_room):
            f = base_f + h
            alpha = f * K.a + g * K.b
            beta = g * K.c
            if alpha.is_zero() and beta.is_zero():
                continue
            dn = max(2 * alpha.deg, 2 * beta.deg + d)
            if dn == n:
                return ext.from_polys(alpha, beta)
    return None


def is_principal(K: BIdeal) -> bool:
    return principal_generator(K) is not None


def ideals_equivalent(I: BIdeal, J: BIdeal) -> bool:
    """I ~ J 当且仅当 I·conj(J) 为主理想（conj(J) 与 J^{-1} 同类）"""
    return is_principal(I * J.conj())


def primitive_ideals(ext: ExtensionContext, max_degree: int) -> List[BIdeal]:
    """全部本原理想 (a, b + ω)，a | b² − D，deg a ≤ max_degree"""
    out = [BIdeal.unit(ext)]
    D = ext.D
    for da in range(1, max_degree + 1):
        for low in product(range(ext.fq.q), repeat=da):
            a = Poly(ext.fq, list(low) + [1])
            for b in _polys_up_to(ext, da - 1):
                if ((b * b - D) % a).is_zero():
                    out.append(BIdeal.from_hnf(ext, a, b, Poly.one(ext.fq)))
    return out


@dataclass
class ClassGroupData:
    """理想类群 Pic(B)"""
    order: int
    representatives: List[BIdeal] = field(default_factory=list)
    norm_degree_bound: int = 0

    def to_dict(self) -> Dict:
        return {
            "order": self.order,
            "norm_degree_bound": self.norm_degree_bound,
            "representatives": [I.to_json() for I in self.representatives],
        }


def class_group(ext: ExtensionContext, norm_degree_bound: Optional[int] = None, max_deg_D: int = 3) -> ClassGroupData:
    """
    暴力计算 Pic(B)

    每个理想类含一个本原理想且范数次数不超过亏格 g = (deg D − 1)/2，
    在该范围内枚举本原理想并两两做等价判定。

    Raises:
        PreconditionError: deg D 超过配置上限
    """
    if ext.d > max_deg_D:
        raise PreconditionError(f"deg D = {ext.d} 超过类群暴力计算上限 {max_deg_D}")
    genus = (ext.d - 1) // 2
    bound = genus if norm_degree_bound is None else norm_degree_bound
    candidates = primitive_ideals(ext, bound)
    logger.info(f"类群计算: 亏格 {genus}, 范数次数上限 {bound}, 候选本原理想 {len(candidates)} 个")

    reps: List[BIdeal] = []
    for I in candidates:
        if not any(ideals_equivalent(I, R) for R in reps):
            reps.append(I)
    logger.info(f"类群阶 = {len(reps)}")
    return ClassGroupData(order=len(reps), representatives=reps, norm_degree_bound=bound)


def curve_point_count(ext: ExtensionContext) -> int:
    """y² = D(x) 光滑模型的 F_q 点数（奇次时无穷远处一个点）"""
    fq = ext.fq
    count = 1
    for x in range(fq.q):
        v = ext.D.eval(x)
        if v == 0:
            count += 1
        elif fq.sqrt_table[v] is not None:
            count += 2
    return count
