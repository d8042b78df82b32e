"""
F_q 上的线性代数与仿射约束

结构化搜索把"矩阵元素属于某格 / 属于 B / 模 J 同余 / 埃尔米特内积取定值"
全部写成未知系数（F_q 坐标）上的线性方程。每个约束以"观测量"字典表示：
键为观测位置（行、分量、幂次等），值为 F_q 编码。
"""

from itertools import product
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .finite_field import FqContext
from .global_field import EllElem
from ..utils.errors import WindowExhausted

Observables = Dict[Hashable, int]


# ---------------------------------------------------------------------------
# 行化简
# ---------------------------------------------------------------------------


def row_reduce(fq: FqContext, rows: Sequence[Sequence[int]], ncols: int) -> Tuple[List[List[int]], List[int], bool]:
    """
    约化行阶梯形（只在前 ncols 列选主元，其余列视为增广列）

    Returns:
        (非零行, 主元列, 是否相容)
    """
    mul, sub, inv = fq.mul_table, fq.sub_table, fq.inv_table
    work = [list(r) for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        lead = work[r][c]
        if lead != 1:
            row_inv = mul[inv[lead]]
            work[r] = [row_inv[x] for x in work[r]]
        pivot_row = work[r]
        for i in range(len(work)):
            if i != r:
                f = work[i][c]
                if f:
                    mf = mul[f]
                    work[i] = [sub[x][mf[y]] for x, y in zip(work[i], pivot_row)]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    consistent = all(not any(row[ncols:]) for row in work[r:])
    return work[:r], pivots, consistent


def rank_fq(fq: FqContext, vectors: Sequence[Sequence[int]]) -> int:
    if not vectors:
        return 0
    ncols = len(vectors[0])
    reduced, _, _ = row_reduce(fq, vectors, ncols)
    return len(reduced)


def subspace_key(fq: FqContext, vectors: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    """子空间的规范键：行简化阶梯形"""
    if not vectors:
        return ()
    reduced, _, _ = row_reduce(fq, vectors, len(vectors[0]))
    return tuple(tuple(r) for r in reduced)


def fq_to_fp_vector(fq: FqContext, vec: Sequence[int]) -> List[int]:
    """F_q 向量按幂基展开为 F_p 向量"""
    out: List[int] = []
    for x in vec:
        out.extend(fq.digits(x))
    return out


def rank_mod_p(vectors: Sequence[Sequence[int]], p: int) -> int:
    """F_p 上的秩（numpy 整数消元）"""
    if not vectors:
        return 0
    m = np.array(vectors, dtype=np.int64) % p
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        nz = np.nonzero(m[rank:, c])[0]
        if nz.size == 0:
            continue
        pr = rank + int(nz[0])
        if pr != rank:
            m[[rank, pr]] = m[[pr, rank]]
        inv = pow(int(m[rank, c]), p - 2, p)
        m[rank] = (m[rank] * inv) % p
        others = np.nonzero(m[:, c])[0]
        for i in others:
            if i != rank:
                m[i] = (m[i] - m[i, c] * m[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


def fp_dimension(fq: FqContext, vectors: Sequence[Sequence[int]]) -> int:
    """F_q 向量组张成的 F_p 子空间维数"""
    return rank_mod_p([fq_to_fp_vector(fq, v) for v in vectors], fq.p) if vectors else 0


# ---------------------------------------------------------------------------
# 射影空间（邻点的剩余域描述）
# ---------------------------------------------------------------------------


def projective_points(fq: FqContext, n: int) -> List[Tuple[int, ...]]:
    """F_q^n 中全部直线的规范代表（首个非零坐标为 1）"""
    points = []
    for lead in range(n):
        for tail in product(range(fq.q), repeat=n - lead - 1):
            points.append((0,) * lead + (1,) + tail)
    return points


def subspaces(fq: FqContext, n: int, dim: int) -> List[List[Tuple[int, ...]]]:
    """F_q^n 中全部 dim 维子空间（以基表示，按规范键去重）"""
    if dim == 1:
        return [[v] for v in projective_points(fq, n)]
    if dim == n - 1:
        out = []
        for phi in projective_points(fq, n):
            basis = nullspace(fq, [list(phi)], n)
            out.append([tuple(b) for b in basis])
        return out
    raise ValueError(f"暂不支持 {dim} 维子空间枚举 (n={n})")


# ---------------------------------------------------------------------------
# 线性方程组与仿射解空间
# ---------------------------------------------------------------------------


def nullspace(fq: FqContext, rows: Sequence[Sequence[int]], ncols: int) -> List[List[int]]:
    reduced, pivots, _ = row_reduce(fq, rows, ncols) if rows else ([], [], True)
    neg = fq.neg_table
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(reduced, pivots):
            v[pc] = neg[row[f]]
        basis.append(v)
    return basis


class AffineSpace:
    """
    F_q 上的仿射解空间 particular + span(basis)
    """

    def __init__(self, fq: FqContext, particular: List[int], basis: List[List[int]]):
        self.fq = fq
        self.particular = particular
        self.basis = basis

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.fq.q ** self.dim

    def check_size(self, cap: int, what: str = "解空间"):
        if self.size > cap:
            raise WindowExhausted(f"{what}规模 q^{self.dim} = {self.size} 超过上限 {cap}")

    def point(self, coords: Sequence[int]) -> List[int]:
        add, mul = self.fq.add_table, self.fq.mul_table
        x = list(self.particular)
        for y, b in zip(coords, self.basis):
            if y:
                my = mul[y]
                x = [add[xi][my[bi]] for xi, bi in zip(x, b)]
        return x

    def __iter__(self) -> Iterator[List[int]]:
        for coords in product(range(self.fq.q), repeat=self.dim):
            yield self.point(coords)


class LinearSystem:
    """
    以观测量描述的线性方程组 Σ_v x_v·images[v] + const = target
    """

    def __init__(self, fq: FqContext, nvars: int):
        self.fq = fq
        self.nvars = nvars
        self.rows: List[List[int]] = []
        self.inconsistent = False

    def add_row(self, coeffs: Sequence[int], rhs: int):
        if not any(coeffs):
            if rhs:
                self.inconsistent = True
            return
        self.rows.append(list(coeffs) + [rhs])

    def add_images(
        self,
        images: Sequence[Observables],
        const: Optional[Observables] = None,
        target: Optional[Observables] = None,
    ):
        const = const or {}
        target = target or {}
        sub = self.fq.sub_table
        keys: Dict[Hashable, None] = {}
        for img in images:
            keys.update(dict.fromkeys(img))
        keys.update(dict.fromkeys(const))
        keys.update(dict.fromkeys(target))
        for key in keys:
            coeffs = [img.get(key, 0) for img in images]
            rhs = sub[target.get(key, 0)][const.get(key, 0)]
            self.add_row(coeffs, rhs)

    def solve(self) -> Optional[AffineSpace]:
        if self.inconsistent:
            return None
        if not self.rows:
            basis = [[1 if i == j else 0 for i in range(self.nvars)] for j in range(self.nvars)]
            return AffineSpace(self.fq, [0] * self.nvars, basis)
        reduced, pivots, consistent = row_reduce(self.fq, self.rows, self.nvars)
        if not consistent:
            return None
        particular = [0] * self.nvars
        for row, pc in zip(reduced, pivots):
            particular[pc] = row[-1]
        coeff_rows = [row[: self.nvars] for row in reduced]
        basis = nullspace(self.fq, coeff_rows, self.nvars)
        return AffineSpace(self.fq, particular, basis)


# ---------------------------------------------------------------------------
# ℓ 元素的观测量
# ---------------------------------------------------------------------------


def polar_observables(z: EllElem, tag: Hashable = None) -> Observables:
    """
    z = α + βρ 在 Q 处的极部系数

    z ∈ O_E 当且仅当 α、β 在 s 展开中没有负幂项，即 α、β 的多项式商部
    （次数 ≥ 1 的项）为零。键为 (tag, "a"|"b", m)，m ≥ 1。
    """
    out: Observables = {}
    ext = z.ext
    if not z.a.is_zero():
        q_a = z.a.num // z.a.den
        for m, c in enumerate(q_a.c):
            if m >= 1 and c:
                out[(tag, "a", m)] = c
    if not z.b.is_zero():
        q_b = z.b.num.shift(ext.rho_shift) // z.b.den
        for m, c in enumerate(q_b.c):
            if m >= 1 and c:
                out[(tag, "b", m)] = c
    return out


def coeff_observables(x: EllElem, tag: Hashable = None) -> Observables:
    """B 中元素的全部坐标系数，键为 (tag, "a"|"b", i)"""
    out: Observables = {}
    for i, c in enumerate(x.a.num.c):
        if c:
            out[(tag, "a", i)] = c
    for i, c in enumerate(x.b.num.c):
        if c:
            out[(tag, "b", i)] = c
    return out


def ideal_observables(J, x: EllElem, tag: Hashable = None) -> Observables:
    """x 模 J 的规范代表坐标，键为 (tag, i)"""
    return {(tag, i): c for i, c in enumerate(J.residue_vector(x)) if c}


def fq_mat_vec(fq: FqContext, A: Sequence[Sequence[int]], v: Sequence[int]) -> Tuple[int, ...]:
    add, mul = fq.add_table, fq.mul_table
    out = []
    for row in A:
        acc = 0
        for a, x in zip(row, v):
            if a and x:
                acc = add[acc][mul[a][x]]
        out.append(acc)
    return tuple(out)


def act_on_subspace(fq: FqContext, A: Sequence[Sequence[int]], key: Tuple[Tuple[int, ...], ...]) -> Tuple[Tuple[int, ...], ...]:
    """F_q 矩阵作用在子空间规范键上"""
    return subspace_key(fq, [fq_mat_vec(fq, A, v) for v in key])
