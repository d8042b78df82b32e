"""
逐列结构化搜索：枚举、稳定子、转运元

X ∈ SL₃(B) 按列 X₀、X₁、X₂ 求解。给定前面的列，下列条件都是当前列
F_q 坐标上的仿射线性方程：
    格条件   M_w^{-1}(μ_{e_j}·X_j + Σ_{i<j} X_i·M_v[i][j]) ∈ O_E³
    同余条件 X_j[k] ≡ δ_{jk} (mod J)
    埃尔米特 h(X_j, X_i) = H_{ij}（i < j）
剩下的二次条件 h(X₀,X₀) = 0、h(X₁,X₁) = 1 靠枚举过滤；第三列的解空间方向
都是 X₀ 的倍数（X₀ 迷向且与 X₁ 正交），h(X₂,X₂) = 0 因而化为线性条件。
"""

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from ..algebra.global_field import EllElem, ExtensionContext, val_Q
from ..algebra.linear import (
    LinearSystem,
    coeff_observables,
    ideal_observables,
    polar_observables,
)
from ..algebra.matrices import det3, from_columns, hermitian_form, inverse3, mat_vec
from ..algebra.polynomials import VAL_INF, Poly
from ..group.unitary import UMatrix, is_unitary, mk_identity
from ..tree.lattice import Vertex
from ..utils.errors import InvariantViolation
from .subgroups import FiniteSubgroup, SubgroupSpec

# 条目次数框：(deg a 上限, deg b 上限)，负数表示该分量恒为零
Box = Tuple[int, int]

DEFAULT_MAX_ENUMERATION = 200_000


def _box_from_val(lower, d: int) -> Box:
    """B 中满足 val_Q ≥ lower 的元素的坐标次数上限"""
    if lower == VAL_INF:
        return (-1, -1)
    n = -int(lower)
    return (n // 2, (n - d) // 2)


class ColumnSearch:
    """
    把 src 映到 dst 的子群元素搜索（两者缺省时为不带格条件的次数窗口枚举）

    Args:
        spec: 子群描述
        src, dst: 源、目标顶点（同类型）
        degbound: 坐标次数上限；None 时完全由格条件定界
        cap: 单个仿射解空间的规模上限
    """

    def __init__(
        self,
        spec: SubgroupSpec,
        src: Optional[Vertex] = None,
        dst: Optional[Vertex] = None,
        degbound: Optional[int] = None,
        cap: int = DEFAULT_MAX_ENUMERATION,
    ):
        if (src is None) != (dst is None):
            raise ValueError("src 与 dst 必须同时给出")
        if src is None and degbound is None:
            raise ValueError("不带格条件的枚举必须给出 degbound")
        self.spec = spec
        self.ext: ExtensionContext = spec.ext
        self.fq = self.ext.fq
        self.src = src
        self.dst = dst
        self.degbound = degbound
        self.cap = cap
        self.enumerated = 0
        if src is not None:
            self.Mv = src.basis
            self.Mw_inv = inverse3(dst.basis)
            self.exps = src.lat.exps
            self.row_min = [min(
                (val_Q(x) for x in row if not x.is_zero()), default=VAL_INF) for row in dst.basis]

    # ---------- 变量布局 ----------

    def _boxes(self, j: int, off: Sequence[EllElem]) -> List[Box]:
        d = self.ext.d
        boxes = []
        for k in range(3):
            if self.src is None:
                box = (self.degbound, self.degbound)
            else:
                v_off = val_Q(off[k]) if not off[k].is_zero() else VAL_INF
                lower = min(self.row_min[k], v_off)
                if lower != VAL_INF:
                    lower = lower - self.exps[j]
                box = _box_from_val(lower, d)
                if self.degbound is not None:
                    box = (min(box[0], self.degbound), min(box[1], self.degbound))
            boxes.append(box)
        return boxes

    def _variables(self, boxes: List[Box]) -> List[Tuple[int, EllElem]]:
        """[(行 k, 单项式元素)]"""
        ext, fq = self.ext, self.fq
        out = []
        for k, (da, db) in enumerate(boxes):
            for i in range(da + 1):
                out.append((k, ext.from_polys(Poly.monomial(fq, i))))
            for i in range(db + 1):
                out.append((k, ext.from_polys(Poly.zero(fq), Poly.monomial(fq, i))))
        return out

    def _column(self, variables: List[Tuple[int, EllElem]], coords: Sequence[int]) -> Tuple[EllElem, ...]:
        col = [self.ext.zero] * 3
        for (k, mono), c in zip(variables, coords):
            if c:
                col[k] = col[k] + mono.scale_code(c)
        return tuple(col)

    # ---------- 线性约束 ----------

    def _solve_column(self, j: int, prev: List[Tuple[EllElem, ...]]):
        ext = self.ext
        zero = ext.zero
        off = [zero] * 3
        if self.src is not None:
            for i, Xi in enumerate(prev):
                m = self.Mv[i][j]
                if not m.is_zero():
                    off = [a + x * m for a, x in zip(off, Xi)]
        boxes = self._boxes(j, off)
        variables = self._variables(boxes)
        system = LinearSystem(self.fq, len(variables))

        if self.src is not None:
            mu = ext.mu(self.exps[j])
            A = [[self.Mw_inv[r][k] * mu for k in range(3)] for r in range(3)]
            images = []
            for k, mono in variables:
                img: Dict = {}
                for r in range(3):
                    if not A[r][k].is_zero():
                        img.update(polar_observables(A[r][k] * mono, tag=("lat", r)))
                images.append(img)
            const: Dict = {}
            z = mat_vec(self.Mw_inv, off)
            for r in range(3):
                const.update(polar_observables(z[r], tag=("lat", r)))
            system.add_images(images, const)

        if self.spec.is_congruence:
            J = self.spec.J
            images = [ideal_observables(J, mono, tag=("J", k)) for k, mono in variables]
            target = ideal_observables(J, ext.one, tag=("J", j))
            system.add_images(images, target=target)

        for i, Xi in enumerate(prev):
            images = []
            for k, mono in variables:
                y = Xi[2 - k]
                images.append(coeff_observables(mono * y.conj(), tag=("h", i)) if not y.is_zero() else {})
            target = coeff_observables(ext.one, tag=("h", i)) if i + j == 2 else {}
            system.add_images(images, target=target)

        return variables, system.solve()

    # ---------- 主循环 ----------

    def _iterate(self, space, what: str):
        space.check_size(self.cap, what)
        self.enumerated += space.size
        return iter(space)

    def solutions(self) -> Iterator[UMatrix]:
        vars0, space0 = self._solve_column(0, [])
        if space0 is None:
            return
        for coords0 in self._iterate(space0, "第 0 列"):
            X0 = self._column(vars0, coords0)
            if all(x.is_zero() for x in X0) or not hermitian_form(X0, X0).is_zero():
                continue
            vars1, space1 = self._solve_column(1, [X0])
            if space1 is None:
                continue
            for coords1 in self._iterate(space1, "第 1 列"):
                X1 = self._column(vars1, coords1)
                if not hermitian_form(X1, X1).is_one():
                    continue
                yield from self._third_column(X0, X1)

    def _third_column(self, X0, X1) -> Iterator[UMatrix]:
        vars2, space2 = self._solve_column(2, [X0, X1])
        if space2 is None:
            return
        base = self._column(vars2, space2.particular)
        if not det3(from_columns([X0, X1, base])).is_one():
            return
        dirs = [self._column(vars2, b) for b in space2.basis]
        # h(X⁰ + Σ y_k d_k, ·) = h(X⁰, X⁰) + Σ y_k·T(h(d_k, X⁰))
        quad = LinearSystem(self.fq, len(dirs))
        images = [coeff_observables(hermitian_form(dk, base) + hermitian_form(base, dk), tag="q") for dk in dirs]
        quad.add_images(images, const=coeff_observables(hermitian_form(base, base), tag="q"))
        ys = quad.solve()
        if ys is None:
            return
        for y in self._iterate(ys, "第 2 列"):
            X2 = list(base)
            for c, dk in zip(y, dirs):
                if c:
                    X2 = [a + b.scale_code(c) for a, b in zip(X2, dk)]
            rows = from_columns([X0, X1, tuple(X2)])
            if not is_unitary(rows):
                raise InvariantViolation("逐列搜索得到的矩阵不是酉矩阵")
            yield UMatrix(rows, check=False)


# ---------------------------------------------------------------------------
# 对外接口
# ---------------------------------------------------------------------------


def enumerate_members(spec: SubgroupSpec, degbound: int, cap: int = DEFAULT_MAX_ENUMERATION) -> List[UMatrix]:
    """
    坐标次数 ≤ degbound 的全部子群元素（确定顺序、无重复）

    Raises:
        WindowExhausted: 解空间超过 cap
    """
    search = ColumnSearch(spec, degbound=degbound, cap=cap)
    out = sorted(set(search.solutions()), key=UMatrix.sort_key)
    logger.info(f"{spec.label} 次数窗口 {degbound}: {len(out)} 个元素 (枚举 {search.enumerated} 个候选)")
    return out


def _stabilizer_elements(v: Vertex, spec: SubgroupSpec, degbound: Optional[int], cap: int) -> List[UMatrix]:
    return list(ColumnSearch(spec, v, v, degbound=degbound, cap=cap).solutions())


def stabilizer(v: Vertex, spec: SubgroupSpec, degbound: Optional[int] = None,
               cap: int = DEFAULT_MAX_ENUMERATION) -> FiniteSubgroup:
    """
    Stab_G(v)

    不给 degbound 时格条件本身给出完整的次数界（lattice-exact）；
    给定 d 时在 d 与 d + 1 各算一次：相同则 stable-at-d，否则 window-d。
    """
    elems = _stabilizer_elements(v, spec, degbound, cap)
    if degbound is None:
        cert = "lattice-exact"
    else:
        more = _stabilizer_elements(v, spec, degbound + 1, cap)
        cert = f"stable-at-{degbound}" if len(more) == len(elems) else f"window-{degbound}"
        if cert.startswith("window"):
            logger.warning(f"稳定子在次数 {degbound} 与 {degbound + 1} 处不一致: {len(elems)} vs {len(more)}")
    group = FiniteSubgroup.from_elements(elems, cert, degbound)
    logger.debug(f"稳定子 {v!r}: 阶 {group.order} ({cert})")
    return group


def transporter(v: Vertex, w: Vertex, spec: SubgroupSpec, degbound: Optional[int] = None,
                cap: int = DEFAULT_MAX_ENUMERATION) -> Optional[UMatrix]:
    """满足 γ·v = w 的第一个 γ，不存在时返回 None"""
    if v.type_parity != w.type_parity:
        return None
    if v == w:
        return mk_identity(v.ext)
    for g in ColumnSearch(spec, v, w, degbound=degbound, cap=cap).solutions():
        return g
    return None
