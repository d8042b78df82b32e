"""
模 J 约化：B/J 与 SL₃(B/J) 中的像群
"""

from collections import deque
from typing import Dict, Iterable, List, Sequence, Tuple

from loguru import logger

from ..algebra.global_field import EllElem
from ..algebra.ideals import BIdeal
from ..algebra.polynomials import Poly
from ..group.unitary import UMatrix
from ..utils.errors import PreconditionError, WindowExhausted

# SL₃(B/J) 元素：9 个剩余编码（行优先）
RMat = Tuple[int, ...]


class QuotientRing:
    """
    B/J，元素按规范代表的坐标编码为 0..|B/J|−1

    乘法结果按需缓存；加法直接逐坐标计算。
    """

    def __init__(self, J: BIdeal):
        if J.is_unit():
            raise PreconditionError("J = B 时商环为零环")
        self.J = J
        self.ext = J.ext
        self.fq = self.ext.fq
        self.da = int(J.a.deg)
        self.dc = int(J.c.deg)
        self.dim = self.da + self.dc
        self.size = J.index
        self._mul: Dict[Tuple[int, int], int] = {}
        self.zero = 0
        self.one = self.encode(J.residue_vector(self.ext.one))

    def encode(self, vec: Sequence[int]) -> int:
        q = self.fq.q
        code = 0
        for c in reversed(vec):
            code = code * q + c
        return code

    def decode(self, code: int) -> List[int]:
        q = self.fq.q
        out = []
        for _ in range(self.dim):
            code, c = divmod(code, q)
            out.append(c)
        return out

    def lift(self, code: int) -> EllElem:
        vec = self.decode(code)
        a = Poly(self.fq, vec[: self.da])
        b = Poly(self.fq, vec[self.da:])
        return self.ext.from_polys(a, b)

    def reduce(self, x: EllElem) -> int:
        return self.encode(self.J.residue_vector(x))

    def add(self, x: int, y: int) -> int:
        add = self.fq.add_table
        return self.encode([add[a][b] for a, b in zip(self.decode(x), self.decode(y))])

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        if x == self.one:
            return y
        if y == self.one:
            return x
        key = (x, y) if x <= y else (y, x)
        out = self._mul.get(key)
        if out is None:
            out = self.reduce(self.lift(x) * self.lift(y))
            self._mul[key] = out
        return out


class ReducedGroup:
    """
    SL₃(B/J) 中由若干像生成的有限子群

    Attributes:
        ring: 商环
        elements: 元素列表（BFS 顺序，首个为单位元）
    """

    def __init__(self, ring: QuotientRing, elements: List[RMat]):
        self.ring = ring
        self.elements = elements
        self.index: Dict[RMat, int] = {x: i for i, x in enumerate(elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: RMat) -> bool:
        return x in self.index

    def mul(self, x: RMat, y: RMat) -> RMat:
        return rmat_mul(self.ring, x, y)

    def left_coset(self, c: RMat, sub: Iterable[RMat]) -> frozenset:
        return frozenset(self.mul(c, h) for h in sub)

    def cosets(self, sub: Sequence[RMat]) -> List[RMat]:
        """左陪集 c·sub 的代表（每个陪集取 BFS 序最先出现者）"""
        seen = set()
        reps = []
        for c in self.elements:
            if c in seen:
                continue
            reps.append(c)
            seen.update(self.left_coset(c, sub))
        return reps


def rmat_identity(ring: QuotientRing) -> RMat:
    one = ring.one
    return tuple(one if i in (0, 4, 8) else 0 for i in range(9))


def rmat_mul(ring: QuotientRing, x: RMat, y: RMat) -> RMat:
    out = []
    for i in range(3):
        for j in range(3):
            acc = 0
            for k in range(3):
                a, b = x[3 * i + k], y[3 * k + j]
                if a and b:
                    acc = ring.add(acc, ring.mul(a, b))
            out.append(acc)
    return tuple(out)


def reduce_matrix(ring: QuotientRing, g: UMatrix) -> RMat:
    """π(g)，g 的元素须属于 B"""
    return tuple(ring.reduce(x) for row in g.rows for x in row)


def image_group(ring: QuotientRing, gens: Sequence[UMatrix], max_order: int) -> ReducedGroup:
    """
    π(gens) 在 SL₃(B/J) 中生成的子群

    Raises:
        WindowExhausted: 群阶超过 max_order
    """
    images = sorted({reduce_matrix(ring, g) for g in gens})
    one = rmat_identity(ring)
    images = [x for x in images if x != one]
    seen = {one}
    order = [one]
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for g in images:
            y = rmat_mul(ring, x, g)
            if y in seen:
                continue
            seen.add(y)
            order.append(y)
            queue.append(y)
            if len(seen) > max_order:
                raise WindowExhausted(f"像群阶超过上限 {max_order}")
    logger.info(f"模 J 像群: 阶 {len(order)}, 生成元 {len(images)} 个")
    return ReducedGroup(ring, order)

