"""
群图基本群的阿贝尔化（Smith 标准形）

生成元：各顶点群的生成元 + 生成树外每条边一个；
关系：顶点群的 Schreier 关系，以及每个边群生成元 h 的融合关系
vec_u(c_u·h·c_u^{-1}) − vec_w(c_w·h·c_w^{-1})。树外边的生成元在阿贝尔化后不出现在任何关系中。
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from sympy import ZZ, Matrix
from sympy.matrices.normalforms import invariant_factors

from .graph_of_groups import GraphOfGroups


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


class RelationLattice:
    """
    ℤ^n 中关系子格的增量行阶梯形

    每个主元列至多一行；新向量用扩展欧几里得的幺模组合逐列消去。
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: Dict[int, List[int]] = {}
        self.added = 0

    def add(self, vec: Sequence[int]) -> bool:
        """加入一条关系；秩增加时返回 True"""
        if len(vec) != self.ncols:
            raise ValueError(f"关系长度 {len(vec)} ≠ {self.ncols}")
        self.added += 1
        v = list(vec)
        for c in range(self.ncols):
            if not v[c]:
                continue
            row = self.pivots.get(c)
            if row is None:
                self.pivots[c] = [-x for x in v] if v[c] < 0 else v
                return True
            g, a, b = _xgcd(row[c], v[c])
            rc, vc = row[c] // g, v[c] // g
            self.pivots[c] = [a * x + b * y for x, y in zip(row, v)]
            v = [rc * y - vc * x for x, y in zip(row, v)]
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def rows(self) -> List[List[int]]:
        return [self.pivots[c] for c in sorted(self.pivots)]


def _presolve(rows: List[List[int]], ncols: int) -> np.ndarray:
    """消去 ±1 主元：该生成元可由其余生成元表出，余核不变"""
    M = np.array(rows, dtype=object).reshape(len(rows), ncols)
    while M.size:
        hits = np.argwhere((M == 1) | (M == -1))
        if not len(hits):
            break
        r, c = hits[0]
        pivot = M[r, c]
        col = M[:, c].copy()
        for i in np.nonzero(col)[0]:
            if i != r:
                M[i] = M[i] - col[i] * pivot * M[r]
        M = np.delete(np.delete(M, r, axis=0), c, axis=1)
    if M.size:
        M = M[[i for i in range(M.shape[0]) if any(M[i])]]
    return M


def abelian_invariants(rows: Sequence[Sequence[int]], ncols: int) -> Tuple[List[int], int]:
    """
    ℤ^ncols / ⟨rows⟩ 的 (挠因子, 自由秩)

    挠因子为大于 1 的不变因子，依整除顺序排列。
    """
    lattice = RelationLattice(ncols)
    for r in rows:
        lattice.add(r)
    M = _presolve(lattice.rows(), ncols)
    if M.shape[0] == 0:
        return [], M.shape[1]
    factors = [abs(int(d)) for d in invariant_factors(Matrix(M.tolist()), domain=ZZ)]
    nonzero = [d for d in factors if d]
    divisors = sorted(d for d in nonzero if d > 1)
    return divisors, M.shape[1] - len(nonzero)


@dataclass
class AbelianInvariants:
    divisors: List[int]
    free_rank: int
    radius: int
    source: str
    provisional: bool = False
    ngens: int = 0
    nrelations: int = 0
    killed: List[int] = field(default_factory=list)

    def p_rank(self, p: int) -> int:
        """挠部分的 p-秩"""
        return sum(1 for d in self.divisors if d % p == 0)

    def is_p_torsion(self, p: int) -> bool:
        for d in self.divisors:
            while d % p == 0:
                d //= p
            if d != 1:
                return False
        return True

    def to_dict(self) -> Dict:
        return {
            "radius": self.radius,
            "source": self.source,
            "provisional": self.provisional,
            "torsion_divisors": self.divisors,
            "free_rank": self.free_rank,
            "generators": self.ngens,
            "relations": self.nrelations,
            "killed_vertices": self.killed,
        }


def relation_rows(gog: GraphOfGroups, kill: Iterable[int] = ()) -> Tuple[List[List[int]], int]:
    """
    Args:
        kill: 生成元被额外置零的顶点群（相对同调用）
    """
    qg = gog.quotient
    offsets = gog.offsets
    ncols = gog.ngens
    rows: List[List[int]] = []

    def embed(v: int, vec: Sequence[int], sign: int = 1, into: Optional[List[int]] = None) -> List[int]:
        row = into if into is not None else [0] * ncols
        for i, x in enumerate(vec):
            row[offsets[v] + i] += sign * x
        return row

    for v, table in enumerate(gog.words):
        for rel in table.relations:
            rows.append(embed(v, rel))
    for e in qg.edges:
        for h in e.group.gens:
            a, b = gog.edge_images(e.index, h)
            row = embed(e.inner, gog.words[e.inner].vector(a))
            rows.append(embed(e.outer, gog.words[e.outer].vector(b), -1, row))
    for v in kill:
        for i in range(gog.words[v].ngens):
            row = [0] * ncols
            row[offsets[v] + i] = 1
            rows.append(row)
    return rows, ncols


def abelianization(gog: GraphOfGroups, kill: Iterable[int] = ()) -> AbelianInvariants:
    kill = sorted(set(kill))
    rows, ncols = relation_rows(gog, kill)
    divisors, free = abelian_invariants(rows, ncols)
    qg = gog.quotient
    inv = AbelianInvariants(divisors, free, qg.radius, qg.source, qg.provisional, ncols, len(rows), kill)
    logger.info(f"阿贝尔化: {ncols} 个生成元, {len(rows)} 条关系 → 自由秩 {free}, 挠因子 {divisors}")
    return inv
