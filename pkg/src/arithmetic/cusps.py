"""
尖点稳定子 U_ξ = g_ξ^{-1}·𝒰_a(k)·g_ξ ∩ G 的窗口截断

X(x, y) = g_ξ^{-1}·u_a(x, y)·g_ξ = I + x·C₁ + x̄·C₂ + y·C₃，各元素对 (x, x̄, y) 线性。
y = X[2][0] ∈ B，迹条件 N(x) + T(y) = 0 给出 y = −N(x)/2 + wω（w ∈ A）；
x·δ ∈ B，δ 为 u 的分母。

求解分两步：
  1. 把 x、y 的实部、w 都当自由变量解线性条件（B-整性 / 模 J 同余 / 锚点整性），
     得到 x 的候选子空间；
  2. 对每个候选 x 固定 y 的实部 −N(x)/2，再对 w 解一次线性方程。
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..algebra.global_field import EllElem, ExtensionContext
from ..algebra.ideals import BIdeal
from ..algebra.linear import (
    AffineSpace,
    LinearSystem,
    fp_dimension,
    ideal_observables,
    polar_observables,
    rank_fq,
    subspace_key,
)
from ..algebra.matrices import Mat, inverse3, mat_add, mat_mul, mat_scale, min_val
from ..algebra.polynomials import Poly, RatF
from ..group.unitary import BPoint, UMatrix, matrix_order, mk_guv, mk_ua
from ..tree.building import fixes_vertex
from ..tree.lattice import Vertex
from ..utils.errors import InvariantViolation, WindowExhausted
from .search import DEFAULT_MAX_ENUMERATION, enumerate_members
from .subgroups import SubgroupSpec, is_member

Observables = Dict


def _lcm(a: Poly, b: Poly) -> Poly:
    return (a * b // a.gcd(b)).monic()


def _unit(ext: ExtensionContext, i: int, j: int) -> Mat:
    return tuple(tuple(ext.one if (r, c) == (i, j) else ext.zero for c in range(3)) for r in range(3))


def _combine(fq, parts: Sequence[Tuple[int, Observables]]) -> Observables:
    """Σ c·obs（F_q 线性组合）"""
    add, mul = fq.add_table, fq.mul_table
    out: Observables = {}
    for c, obs in parts:
        if not c:
            continue
        row = mul[c]
        for k, v in obs.items():
            out[k] = add[out.get(k, 0)][row[v]]
    return {k: v for k, v in out.items() if v}


@dataclass
class CuspFiltration:
    """
    窗口内的 U_ξ

    Attributes:
        pairs: 全部 (x, y)
        u_gens: U_ξ 的生成元（x-像的 F_p 基提升 + 中心基）
        u0_gens: U_ξ⁰ 的生成元（x = 0）
        quotient_basis: 每个不同 x 取一个 (x, y)
        dims: x-像、中心、换位子群的 F_p 维数
        anchored: 是否以锚点顶点截断（此时窗口元素构成群）
    """
    point: BPoint
    spec: SubgroupSpec
    window: int
    pairs: List[Tuple[EllElem, EllElem]]
    u_gens: List[UMatrix] = field(default_factory=list)
    u0_gens: List[UMatrix] = field(default_factory=list)
    quotient_basis: List[Tuple[EllElem, EllElem]] = field(default_factory=list)
    dims: Dict[str, int] = field(default_factory=dict)
    anchored: bool = False

    @property
    def order(self) -> int:
        return len(self.pairs)

    @property
    def p_rank(self) -> int:
        """H^{ab} 的 F_p 秩 = dim x-像 + dim 中心 − dim [H, H]"""
        return self.dims["x_image"] + self.dims["center"] - self.dims["commutator"]

    def elements(self) -> List[UMatrix]:
        return [cusp_element(self.point, x, y) for x, y in self.pairs]

    def to_dict(self) -> Dict:
        return {
            "point": self.point.to_json(),
            "subgroup": self.spec.to_dict(),
            "window": self.window,
            "anchored": self.anchored,
            "order": self.order,
            "p_rank": self.p_rank,
            "dims": self.dims,
            "u_gens": [g.to_json() for g in self.u_gens],
            "u0_gens": [g.to_json() for g in self.u0_gens],
            "quotient_basis": [{"x": x.to_json(), "y": y.to_json()} for x, y in self.quotient_basis],
        }


def cusp_element(xi: BPoint, x: EllElem, y: EllElem) -> UMatrix:
    ext = x.ext
    g = mk_guv(xi, ext)
    return g.inverse() * mk_ua(x, y) * g


def anchor_window(xi: BPoint, anchor: Vertex) -> int:
    """
    固定 anchor 的 g_ξ^{-1}u_a(x,y)g_ξ 满足 val x, val y ≥ −n：
    u_a = g·M·(M^{-1}XM)·M^{-1}·g^{-1}
    """
    g = mk_guv(xi, anchor.ext)
    M = anchor.basis
    total = min_val(g.rows) + min_val(g.inverse().rows) + min_val(M) + min_val(inverse3(M))
    return max(0, -int(total))


class _CuspSystem:
    """两步线性求解的变量与观测量"""

    def __init__(self, xi: BPoint, spec: SubgroupSpec, n: int, anchor: Optional[Vertex]):
        ext = spec.ext
        fq = ext.fq
        self.ext, self.fq, self.xi, self.spec, self.n = ext, fq, xi, spec, n
        d = ext.d
        g = mk_guv(xi, ext)
        ginv = g.inverse()
        # X − I = x·C₁ + x̄·C₂ + y·C₃
        C1 = mat_mul(mat_mul(ginv.rows, _unit(ext, 1, 2)), g.rows)
        C2 = mat_scale(mat_mul(mat_mul(ginv.rows, _unit(ext, 0, 1)), g.rows), -ext.one)
        C3 = mat_mul(mat_mul(ginv.rows, _unit(ext, 0, 2)), g.rows)
        self.C = (C1, C2, C3)

        one = Poly.one(fq)
        self.delta = one if xi.is_infinity else _lcm(xi.u.a.den, xi.u.b.den)
        self.inv_delta = RatF(one, self.delta)
        nx = n + 2 * int(self.delta.deg)
        self.x_monos = [ext.from_polys(Poly.monomial(fq, i)) for i in range(nx // 2 + 1)]
        self.x_monos += [ext.from_polys(Poly.zero(fq), Poly.monomial(fq, i)) for i in range((nx - d) // 2 + 1)]
        self.ya_deg = n // 2
        self.ya_monos = [ext.from_polys(Poly.monomial(fq, i)) for i in range(self.ya_deg + 1)]
        self.w_monos = [ext.from_polys(Poly.zero(fq), Poly.monomial(fq, i)) for i in range((n - d) // 2 + 1)]

        mats = [self._x_matrix(m) for m in self.x_monos]
        mats += [mat_scale(C3, m) for m in self.ya_monos]
        mats += [mat_scale(C3, m) for m in self.w_monos]

        L = one
        for A in mats:
            for row in A:
                for z in row:
                    L = _lcm(_lcm(L, z.a.den), z.b.den)
        L_e = ext.from_polys(L)
        if spec.is_congruence:
            target = BIdeal(ext, [L_e * h for h in spec.J.hnf_elements()])
        else:
            target = BIdeal(ext, [L_e])
        Minv = inverse3(anchor.basis) if anchor is not None else None
        M = anchor.basis if anchor is not None else None

        self.obs: List[Observables] = []
        for A in mats:
            o: Observables = {}
            for i in range(3):
                for j in range(3):
                    z = A[i][j]
                    if not z.is_zero():
                        o.update(ideal_observables(target, z * L_e, tag=("m", i, j)))
            if Minv is not None:
                N = mat_mul(mat_mul(Minv, A), M)
                for i in range(3):
                    for j in range(3):
                        if not N[i][j].is_zero():
                            o.update(polar_observables(N[i][j], tag=("an", i, j)))
            self.obs.append(o)
        self.nx, self.nya, self.nw = len(self.x_monos), len(self.ya_monos), len(self.w_monos)

    def _x_matrix(self, m: EllElem) -> Mat:
        x = m.scale(self.inv_delta)
        C1, C2, _ = self.C
        return mat_add(mat_scale(C1, x), mat_scale(C2, x.conj()))

    def x_of(self, coords: Sequence[int]) -> EllElem:
        x = self.ext.zero
        for c, m in zip(coords, self.x_monos):
            if c:
                x = x + m.scale_code(c)
        return x.scale(self.inv_delta)

    def x_candidates(self) -> AffineSpace:
        """第一步：x 坐标可能取值的子空间"""
        system = LinearSystem(self.fq, len(self.obs))
        system.add_images(self.obs)
        space = system.solve()
        proj = [b[: self.nx] for b in space.basis]
        basis = [list(r) for r in subspace_key(self.fq, proj)] if proj else []
        return AffineSpace(self.fq, [0] * self.nx, basis)

    def real_part(self, x: EllElem) -> Optional[List[int]]:
        """y 的实部 −N(x)/2 的坐标，不满足窗口时为 None"""
        fq = self.fq
        ya = x.norm().scale(fq.neg_table[fq.half])
        if not ya.is_poly():
            return None
        if not ya.is_zero() and ya.num.deg > self.ya_deg:
            return None
        return [ya.num.coeff(i) for i in range(self.nya)]

    def w_space(self, xc: Sequence[int], yc: Sequence[int]) -> Optional[AffineSpace]:
        """第二步：固定 x 与 y 实部后 w 的解空间"""
        base = self.nx + self.nya
        const = _combine(self.fq, list(zip(xc, self.obs[: self.nx])) + list(zip(yc, self.obs[self.nx: base])))
        system = LinearSystem(self.fq, self.nw)
        system.add_images(self.obs[base:], const)
        return system.solve()

    def y_of(self, yc: Sequence[int], wc: Sequence[int]) -> EllElem:
        y = self.ext.zero
        for c, m in zip(list(yc) + list(wc), self.ya_monos + self.w_monos):
            if c:
                y = y + m.scale_code(c)
        return y


def _greedy_fp_basis(fq, vectors: Sequence[Sequence[int]], target: int) -> List[int]:
    """按顺序挑出 F_p 线性无关的向量下标，直到达到 target 维"""
    chosen: List[int] = []
    rows: List[Sequence[int]] = []
    for i, v in enumerate(vectors):
        if len(chosen) >= target:
            break
        if fp_dimension(fq, rows + [v]) > len(rows):
            rows.append(v)
            chosen.append(i)
    return chosen


def _pad(vectors: List[List[int]]) -> List[List[int]]:
    n = max((len(v) for v in vectors), default=0)
    return [list(v) + [0] * (n - len(v)) for v in vectors]


def cusp_filtration(
    xi: BPoint,
    spec: SubgroupSpec,
    window: Optional[int] = None,
    anchor: Optional[Vertex] = None,
    cap: int = DEFAULT_MAX_ENUMERATION,
) -> CuspFiltration:
    """
    U_ξ ∩ G 在窗口内的元素与生成元

    Args:
        window: val_Q(x), val_Q(y) ≥ −window
        anchor: 另要求元素固定该顶点；未给 window 时由锚点推出

    Raises:
        WindowExhausted: 纯窗口模式下找不到非中心元素，或枚举超过 cap
    """
    if window is None and anchor is None:
        raise ValueError("必须给出 window 或 anchor")
    n = window if window is not None else anchor_window(xi, anchor)
    ext = spec.ext
    fq = ext.fq
    sys_ = _CuspSystem(xi, spec, n, anchor)
    cands = sys_.x_candidates()
    cands.check_size(cap, "尖点 x 候选")

    pairs: List[Tuple[EllElem, EllElem]] = []
    x_vecs: List[List[int]] = []
    first_by_x: Dict[Tuple[int, ...], int] = {}
    center_vecs: List[List[int]] = []
    center_idx: List[int] = []
    for xc in cands:
        x = sys_.x_of(xc)
        yc = sys_.real_part(x)
        if yc is None:
            continue
        ws = sys_.w_space(xc, yc)
        if ws is None:
            continue
        ws.check_size(cap, "尖点 w 解")
        for wc in ws:
            pairs.append((x, sys_.y_of(yc, wc)))
            key = tuple(xc)
            if key not in first_by_x:
                first_by_x[key] = len(pairs) - 1
                x_vecs.append(list(xc))
            if not any(xc):
                center_vecs.append(list(wc))
                center_idx.append(len(pairs) - 1)

    dim_x = fp_dimension(fq, x_vecs)
    dim_c = fp_dimension(fq, center_vecs)
    x_keys = list(first_by_x)
    x_basis = [first_by_x[x_keys[i]] for i in _greedy_fp_basis(fq, x_vecs, dim_x)]
    c_basis = [center_idx[i] for i in _greedy_fp_basis(fq, center_vecs, dim_c)]

    # [H, H] 由 x-像基两两的 u·x̄ − ū·x 张成，δ²·(·) 的 ω 系数
    d2 = ext.from_polys(sys_.delta * sys_.delta)
    comm_vecs: List[List[int]] = []
    for a in range(len(x_basis)):
        for b in range(a + 1, len(x_basis)):
            u, x = pairs[x_basis[a]][0], pairs[x_basis[b]][0]
            c = (u * x.conj() - u.conj() * x) * d2
            if not c.is_zero():
                comm_vecs.append(list(c.b.num.c))
    dim_comm = fp_dimension(fq, _pad(comm_vecs))

    if not anchor and dim_x == 0:
        raise WindowExhausted(f"窗口 {n} 内没有非中心元素")

    out = CuspFiltration(
        point=xi,
        spec=spec,
        window=n,
        pairs=pairs,
        quotient_basis=[pairs[first_by_x[k]] for k in x_keys],
        dims={"x_image": dim_x, "center": dim_c, "commutator": dim_comm},
        anchored=anchor is not None,
    )
    out.u_gens = [cusp_element(xi, *pairs[i]) for i in x_basis + c_basis]
    out.u0_gens = [cusp_element(xi, *pairs[i]) for i in c_basis]
    for g in out.u_gens:
        if not is_member(g, spec):
            raise InvariantViolation(f"尖点生成元不属于 {spec.label}")
        if anchor is not None and not fixes_vertex(g, anchor):
            raise InvariantViolation("尖点生成元不固定锚点顶点")
    logger.info(f"尖点 {xi!r} 窗口 {n}: {len(pairs)} 个元素, p-秩 {out.p_rank} ({out.dims})")
    return out


def cusp_index(xi: BPoint, spec: SubgroupSpec, window: int, cap: int = DEFAULT_MAX_ENUMERATION) -> Fraction:
    """窗口内 |U_ξ ∩ Γ| / |U_ξ ∩ G|"""
    full = cusp_filtration(xi, SubgroupSpec.gamma(spec.ext), window=window, cap=cap)
    sub = full if not spec.is_congruence else cusp_filtration(xi, spec, window=window, cap=cap)
    return Fraction(full.order, sub.order)


def ideal_window_rank(J: BIdeal, bound: int) -> int:
    """J ∩ {val_Q ≥ −bound} 的 F_p 维数"""
    ext = J.ext
    fq = ext.fq
    d = ext.d
    monos = [ext.from_polys(Poly.monomial(fq, i)) for i in range(bound // 2 + 1)]
    monos += [ext.from_polys(Poly.zero(fq), Poly.monomial(fq, i)) for i in range((bound - d) // 2 + 1)]
    images = [J.residue_vector(m) for m in monos]
    rank = rank_fq(fq, images) if images and images[0] else 0
    return fq.r * (len(monos) - rank)


def finite_order_census(spec: SubgroupSpec, degbound: int, orderbound: int,
                        cap: int = DEFAULT_MAX_ENUMERATION) -> List[Tuple[int, int]]:
    """次数窗口内有限阶元素的阶分布 [(阶, 个数)]"""
    counts: Counter = Counter()
    beyond = 0
    for g in enumerate_members(spec, degbound, cap):
        n = matrix_order(g, orderbound)
        if n is None:
            beyond += 1
        else:
            counts[n] += 1
    if beyond:
        logger.info(f"{beyond} 个元素的阶超过 {orderbound}（或无限）")
    return sorted(counts.items())


def is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1
