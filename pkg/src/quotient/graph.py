"""
商图数据模型、尖点射线检测、稳定性分类与球投影
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx
from loguru import logger

from ..arithmetic.reduction import QuotientRing, reduce_matrix, rmat_mul
from ..arithmetic.subgroups import FiniteSubgroup, SubgroupSpec
from ..group.unitary import UMatrix, mk_identity
from ..tree.building import Ball, tree_act
from ..tree.lattice import Vertex
from ..utils.errors import InvariantViolation, PreconditionError
from .cover import CongruenceCover, kernel_subgroup
from .walk import GammaWalk


@dataclass
class OrbitVertex:
    index: int
    depth: int
    type_parity: int
    stab_order: int
    rep: Vertex
    label: str
    group: Optional[FiniteSubgroup] = None
    stable: bool = False


@dataclass
class OrbitEdge:
    """
    内端点 inner（深度小）到外端点 outer 的边轨道

    边群到端点群的嵌入为 x ↦ c·x·c^{-1}，c 分别为 inner_conj、outer_conj
    """
    index: int
    inner: int
    outer: int
    stab_order: int
    group: Optional[FiniteSubgroup] = None
    inner_conj: Optional[UMatrix] = None
    outer_conj: Optional[UMatrix] = None
    stable: bool = False


@dataclass
class CuspRay:
    """由内向外的轨道路径与稳定子阶剖面"""
    vertices: List[int]
    profile: List[int]
    certified: bool

    def to_dict(self) -> Dict:
        return {"vertices": self.vertices, "profile": self.profile, "certified": self.certified}


@dataclass
class QuotientGraph:
    spec: SubgroupSpec
    radius: int
    vertices: List[OrbitVertex] = field(default_factory=list)
    edges: List[OrbitEdge] = field(default_factory=list)
    source: str = "walk"
    provisional: bool = False
    rays: List[CuspRay] = field(default_factory=list)

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(v.index for v in self.vertices)
        for e in self.edges:
            g.add_edge(e.inner, e.outer, key=e.index)
        return g

    def restrict(self, depth: int) -> "QuotientGraph":
        """深度 ≤ depth 的子图（下标重新编号）"""
        keep = [v for v in self.vertices if v.depth <= depth]
        remap = {v.index: i for i, v in enumerate(keep)}
        vs = [OrbitVertex(remap[v.index], v.depth, v.type_parity, v.stab_order, v.rep, v.label, v.group, v.stable)
              for v in keep]
        es = [OrbitEdge(i, remap[e.inner], remap[e.outer], e.stab_order, e.group, e.inner_conj, e.outer_conj, e.stable)
              for i, e in enumerate(x for x in self.edges if x.outer in remap and x.inner in remap)]
        return QuotientGraph(self.spec, depth, vs, es, self.source, self.provisional)

    def is_tree(self) -> bool:
        g = self.graph()
        return nx.is_connected(g) and g.number_of_edges() == g.number_of_nodes() - 1

    def cycle_rank(self) -> int:
        g = self.graph()
        return g.number_of_edges() - g.number_of_nodes() + nx.number_connected_components(g)

    def out_edges(self, idx: int) -> List[OrbitEdge]:
        return [e for e in self.edges if e.inner == idx]

    def in_edges(self, idx: int) -> List[OrbitEdge]:
        return [e for e in self.edges if e.outer == idx]

    def origin(self, e: OrbitEdge) -> int:
        """定向：起点为类型 0 的端点"""
        return e.inner if self.vertices[e.inner].type_parity == 0 else e.outer

    def to_json(self) -> Dict:
        return {
            "subgroup": self.spec.to_dict(),
            "radius": self.radius,
            "source": self.source,
            "provisional": self.provisional,
            "orbits": [
                {"id": v.index, "label": v.label, "depth": v.depth, "type_parity": v.type_parity,
                 "stabilizer_order": v.stab_order, "stable": v.stable}
                for v in self.vertices
            ],
            "edges": [
                {"id": e.index, "inner": e.inner, "outer": e.outer, "origin": self.origin(e),
                 "stabilizer_order": e.stab_order, "stable": e.stable}
                for e in self.edges
            ],
            "stabilizer_orders": [v.stab_order for v in self.vertices],
            "stable_flags": [v.stable for v in self.vertices],
            "cusp_rays": [r.to_dict() for r in self.rays],
        }

    def to_dot(self) -> str:
        lines = ["graph quotient {", "  node [shape=circle];"]
        for v in self.vertices:
            style = "" if v.stable else ", style=filled, fillcolor=lightgray"
            lines.append(f'  {v.index} [label="{v.label}\\n|St|={v.stab_order}"{style}];')
        for e in self.edges:
            lines.append(f'  {e.inner} -- {e.outer} [label="{e.stab_order}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# 构造
# ---------------------------------------------------------------------------


def graph_from_walk(walk: GammaWalk) -> QuotientGraph:
    qg = QuotientGraph(walk.spec, walk.radius, source="walk")
    for v in walk.vertices:
        qg.vertices.append(OrbitVertex(v.index, v.depth, v.type_parity, v.stab.order, v.vertex, f"v{v.index}", v.stab))
    one = mk_identity(walk.spec.ext)
    for e in walk.edges:
        qg.edges.append(OrbitEdge(e.index, e.inner, e.outer, e.stab.order, e.stab, one, e.tau.inverse()))
    return classify_stable(qg)


def graph_from_cover(cover: CongruenceCover) -> QuotientGraph:
    walk = cover.walk
    qg = QuotientGraph(cover.spec, walk.radius, source="cover")
    for v in cover.vertices:
        w = walk.vertices[v.base]
        qg.vertices.append(OrbitVertex(v.index, w.depth, w.type_parity, v.group.order, w.vertex,
                                       f"v{v.base}.{v.index}", v.group))
    for e in cover.edges:
        qg.edges.append(OrbitEdge(e.index, e.inner, e.outer, e.group.order, e.group, e.inner_conj, e.outer_conj))
    return classify_stable(qg)


def classify_stable(qg: QuotientGraph) -> QuotientGraph:
    """稳定 ⇔ 稳定子平凡"""
    for v in qg.vertices:
        v.stable = v.stab_order == 1
    for e in qg.edges:
        e.stable = e.stab_order == 1
    return qg


def unstable_components(qg: QuotientGraph) -> int:
    g = nx.Graph()
    g.add_nodes_from(v.index for v in qg.vertices if not v.stable)
    g.add_edges_from((e.inner, e.outer) for e in qg.edges if not e.stable)
    return nx.number_connected_components(g) if g.number_of_nodes() else 0


def detect_cusp_rays(qg: QuotientGraph, min_run: int = 3) -> List[CuspRay]:
    """
    从每个边界轨道（深度 = radius）沿唯一入边向内回溯，直到遇到分叉；
    剖面最后 min_run 个阶严格递增时认证

    Raises:
        PreconditionError: 半径小于 min_run
    """
    if qg.radius < min_run:
        raise PreconditionError(f"半径 {qg.radius} < {min_run}，无法分离尖点射线")
    rays = []
    for b in sorted((v for v in qg.vertices if v.depth == qg.radius), key=lambda v: v.index):
        path = [b.index]
        cur = b.index
        while True:
            ins = qg.in_edges(cur)
            if len(ins) != 1:
                break
            prev = ins[0].inner
            if len(qg.out_edges(prev)) != 1 or len(qg.in_edges(prev)) > 1:
                path.append(prev)
                break
            path.append(prev)
            cur = prev
        path.reverse()
        profile = [qg.vertices[i].stab_order for i in path]
        tail = profile[-min_run:]
        certified = len(tail) == min_run and all(a < b for a, b in zip(tail, tail[1:]))
        rays.append(CuspRay(path, profile, certified))
    qg.rays = rays
    logger.info(f"尖点射线: {sum(r.certified for r in rays)} 条已认证 / {len(rays)} 条候选")
    return rays


# ---------------------------------------------------------------------------
# 球投影
# ---------------------------------------------------------------------------


@dataclass
class BallLabel:
    """球顶点 x = gamma·rep(orbit)"""
    orbit: int
    gamma: UMatrix


def project_ball(ball: Ball, walk: GammaWalk) -> Dict[Tuple, BallLabel]:
    """
    每个球顶点的 G-轨道及把代表送到它的群元素

    Raises:
        InvariantViolation: 标签与实际顶点不符
    """
    if ball.base.key != walk.vertices[0].vertex.key:
        raise PreconditionError("球中心必须是游走的基顶点")
    labels: Dict[Tuple, BallLabel] = {ball.base.key: BallLabel(0, mk_identity(walk.spec.ext))}
    order = sorted(ball.vertices, key=lambda k: ball.depth[k])
    for k in order:
        lab = labels[k]
        rep = walk.vertices[lab.orbit]
        if not rep.expanded:
            continue
        ginv = lab.gamma.inverse()
        for nk in ball.graph.neighbors(k):
            if nk in labels:
                continue
            local = tree_act(ginv, ball.vertices[nk])
            entry = rep.table.get(local.key)
            if entry is None:
                raise InvariantViolation("球顶点拉回后不是代表的邻点")
            labels[nk] = BallLabel(entry.orbit, lab.gamma * entry.carrier)
    for k, lab in labels.items():
        if tree_act(lab.gamma, walk.vertices[lab.orbit].vertex).key != k:
            raise InvariantViolation("球投影标签与顶点不符")
    return labels


def check_morphism(ball: Ball, qg: QuotientGraph, labels: Dict[Tuple, BallLabel]) -> bool:
    """每条球边都映到商图中连接两端轨道的边"""
    pairs = {(e.inner, e.outer) for e in qg.edges} | {(e.outer, e.inner) for e in qg.edges}
    for a, b in ball.graph.edges:
        if a in labels and b in labels and (labels[a].orbit, labels[b].orbit) not in pairs:
            return False
    return True


def _coset_key(ring: QuotientRing, gamma: UMatrix, sub: List[Tuple]) -> Tuple:
    c = reduce_matrix(ring, gamma)
    return min(rmat_mul(ring, c, h) for h in sub)


def projection_quotient(ball: Ball, walk: GammaWalk, spec: SubgroupSpec,
                        labels: Optional[Dict[Tuple, BallLabel]] = None) -> QuotientGraph:
    """
    只用球内顶点的 Γ_J 商图（π(Γ) 过大时的退路，结果标记为 provisional）

    x = γ·rep(w) 与 y = γ'·rep(w) 同属 Γ_J-轨道 ⇔ π(γ)·π(S_w) = π(γ')·π(S_w)。
    """
    labels = labels or project_ball(ball, walk)
    ring = QuotientRing(spec.J)
    v_sub = {v.index: sorted({reduce_matrix(ring, g) for g in v.stab}) for v in walk.vertices}
    v_ker = {v.index: kernel_subgroup(ring, v.stab) for v in walk.vertices}
    e_sub = {e.index: sorted({reduce_matrix(ring, g) for g in e.stab}) for e in walk.edges}
    e_ker = {e.index: kernel_subgroup(ring, e.stab) for e in walk.edges}

    qg = QuotientGraph(spec, ball.radius, source="projection", provisional=True)
    v_index: Dict[Tuple, int] = {}
    for k in sorted(labels, key=lambda k: (ball.depth[k], ball.vertices[k].sort_key())):
        lab = labels[k]
        ck = (lab.orbit, _coset_key(ring, lab.gamma, v_sub[lab.orbit]))
        if ck not in v_index:
            w = walk.vertices[lab.orbit]
            v_index[ck] = len(qg.vertices)
            qg.vertices.append(OrbitVertex(len(qg.vertices), w.depth, w.type_parity, v_ker[lab.orbit].order,
                                           w.vertex, f"v{lab.orbit}.{len(qg.vertices)}", v_ker[lab.orbit]))
    e_index: Dict[Tuple, int] = {}
    for a, b in ball.graph.edges:
        for x, y in ((a, b), (b, a)):
            lab = labels[x]
            rep = walk.vertices[lab.orbit]
            if not rep.expanded:
                continue
            local = tree_act(lab.gamma.inverse(), ball.vertices[y])
            entry = rep.table[local.key]
            if entry.edge is None:
                continue
            g = lab.gamma * entry.sigma
            ek = (entry.edge, _coset_key(ring, g, e_sub[entry.edge]))
            if ek in e_index:
                break
            inner = v_index[(lab.orbit, _coset_key(ring, lab.gamma, v_sub[lab.orbit]))]
            outer = v_index[(entry.orbit, _coset_key(ring, labels[y].gamma, v_sub[entry.orbit]))]
            e_index[ek] = len(qg.edges)
            qg.edges.append(OrbitEdge(len(qg.edges), inner, outer, e_ker[entry.edge].order, e_ker[entry.edge]))
            break
    logger.info(f"球投影商图: {len(qg.vertices)} 个顶点轨道, {len(qg.edges)} 个边轨道（provisional）")
    return classify_stable(qg)
