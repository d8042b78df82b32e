"""
商图上的群图（Bass–Serre 数据）

顶点/边轨道带稳定子群；边群经 x ↦ c·x·c^{-1} 嵌入两端点群。
阿贝尔化需要的"群元素 → 生成元指数向量"由生成元上的 Cayley BFS 给出，
BFS 树外的每条 Cayley 边产生一条关系 vec(x) + e_g − vec(x·g)。
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx
from loguru import logger

from ..arithmetic.subgroups import FiniteSubgroup, SubgroupSpec
from ..group.unitary import UMatrix
from ..quotient.graph import QuotientGraph
from ..utils.errors import InvariantViolation, PreconditionError

Vector = Tuple[int, ...]


@dataclass
class WordTable:
    """有限群的 Cayley 表示：元素的生成元指数向量与 Schreier 关系"""
    gens: List[UMatrix]
    vectors: Dict[UMatrix, Vector]
    relations: List[Vector] = field(default_factory=list)

    @property
    def ngens(self) -> int:
        return len(self.gens)

    def vector(self, g: UMatrix) -> Vector:
        try:
            return self.vectors[g]
        except KeyError:
            raise InvariantViolation("元素不在该有限群中") from None


def word_table(group: FiniteSubgroup) -> WordTable:
    gens = list(group.gens)
    n = len(gens)
    one = next(g for g in group.elements if g.is_identity())
    vectors: Dict[UMatrix, Vector] = {one: (0,) * n}
    relations: List[Vector] = []
    queue = deque([one])
    while queue:
        x = queue.popleft()
        vx = vectors[x]
        for i, g in enumerate(gens):
            y = x * g
            step = list(vx)
            step[i] += 1
            if y not in vectors:
                vectors[y] = tuple(step)
                queue.append(y)
                continue
            rel = tuple(a - b for a, b in zip(step, vectors[y]))
            if any(rel):
                relations.append(rel)
    if len(vectors) != group.order:
        raise InvariantViolation(f"Cayley BFS 到达 {len(vectors)} 个元素，群阶 {group.order}")
    return WordTable(gens, vectors, relations)


@dataclass
class GraphOfGroups:
    """
    Attributes:
        words: 顶点群的 Cayley 表示（与商图顶点同序）
        tree_edges: BFS 生成树的边下标
        loop_edges: 生成树外的边下标，每条贡献一个自由生成元
    """
    quotient: QuotientGraph
    words: List[WordTable]
    tree_edges: List[int]
    loop_edges: List[int]

    @property
    def offsets(self) -> List[int]:
        out, pos = [], 0
        for w in self.words:
            out.append(pos)
            pos += w.ngens
        return out

    @property
    def ngens(self) -> int:
        return sum(w.ngens for w in self.words) + len(self.loop_edges)

    def edge_images(self, e_idx: int, h: UMatrix) -> Tuple[UMatrix, UMatrix]:
        e = self.quotient.edges[e_idx]
        return (e.inner_conj * h * e.inner_conj.inverse(), e.outer_conj * h * e.outer_conj.inverse())

    def to_dict(self) -> Dict:
        qg = self.quotient
        return {
            "radius": qg.radius,
            "source": qg.source,
            "vertex_groups": [
                {"id": v.index, "order": v.stab_order, "generators": self.words[v.index].ngens}
                for v in qg.vertices
            ],
            "edge_groups": [
                {"id": e.index, "inner": e.inner, "outer": e.outer, "order": e.stab_order,
                 "generators": len(e.group.gens)}
                for e in qg.edges
            ],
            "tree_edges": self.tree_edges,
            "loop_edges": self.loop_edges,
        }


def spanning_tree(qg: QuotientGraph, root: int = 0) -> List[int]:
    """按 BFS（邻点升序）选取生成树；每个连通分支从最小下标出发，root 所在分支优先"""
    g = qg.graph()
    if not g.number_of_nodes():
        return []
    comps = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: (root not in c, c[0]))
    by_pair: Dict[Tuple[int, int], List[int]] = {}
    for e in sorted(qg.edges, key=lambda e: e.index):
        by_pair.setdefault(tuple(sorted((e.inner, e.outer))), []).append(e.index)
    tree = []
    for comp in comps:
        start = root if root in comp else comp[0]
        for a, b in nx.bfs_edges(g, start, sort_neighbors=sorted):
            tree.append(by_pair[tuple(sorted((a, b)))][0])
    return sorted(tree)


def graph_of_groups(qg: QuotientGraph, spec: Optional[SubgroupSpec] = None, root: int = 0) -> GraphOfGroups:
    """
    Raises:
        PreconditionError: 缺少稳定子群或嵌入数据，或 spec 与商图不一致
        InvariantViolation: 边群阶不整除端点群阶，或嵌入像不在端点群内
    """
    if spec is not None and spec != qg.spec:
        raise PreconditionError(f"商图属于 {qg.spec.label}，而不是 {spec.label}")
    for v in qg.vertices:
        if v.group is None:
            raise PreconditionError(f"顶点轨道 #{v.index} 缺少稳定子群")
    words = [word_table(v.group) for v in qg.vertices]

    for e in qg.edges:
        if e.group is None or e.inner_conj is None or e.outer_conj is None:
            raise PreconditionError(f"边轨道 #{e.index} 缺少边群或嵌入数据")
        for end in (e.inner, e.outer):
            if qg.vertices[end].stab_order % e.stab_order:
                raise InvariantViolation(
                    f"边 #{e.index} 的群阶 {e.stab_order} 不整除端点 #{end} 的群阶 {qg.vertices[end].stab_order}")
    tree = spanning_tree(qg, root)
    in_tree = set(tree)
    gog = GraphOfGroups(qg, words, tree, [e.index for e in qg.edges if e.index not in in_tree])

    for e in qg.edges:
        K_in = qg.vertices[e.inner].group
        K_out = qg.vertices[e.outer].group
        for h in e.group.gens:
            a, b = gog.edge_images(e.index, h)
            if a not in K_in or b not in K_out:
                raise InvariantViolation(f"边 #{e.index} 的群没有嵌入端点群")
    logger.info(f"群图: {len(qg.vertices)} 个顶点群, {len(qg.edges)} 个边群, "
                f"生成树外 {len(gog.loop_edges)} 条边, 生成元 {gog.ngens} 个")
    return gog
