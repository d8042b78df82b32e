"""
G\\X 的局部游走

从基顶点出发逐层展开代表元：对深度 i 的代表 u，把 u 的 q+1 个邻点按 Stab(u)
在 L_u/ρL_u 上诱导的作用分成轨道，每条轨道取代表 n₀ 并识别为深度 i±1 的已知
代表（转运元搜索）或新的深度 i+1 代表。边轨道只从内端点记录。
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from loguru import logger
from tqdm import tqdm

from ..algebra.linear import act_on_subspace
from ..arithmetic.search import DEFAULT_MAX_ENUMERATION, stabilizer, transporter
from ..arithmetic.subgroups import FiniteSubgroup, SubgroupSpec
from ..group.unitary import UMatrix, mk_identity
from ..tree.building import base_vertex, local_action, neighbor_subspace, neighbors
from ..tree.lattice import Vertex
from ..utils.errors import InvariantViolation


@dataclass
class NeighborEntry:
    """
    代表 u 的一个邻点 n

    n = σ·n₀，n₀ = τ·rep(w)；edge 为 n₀ 向外时对应的边轨道
    """
    orbit: int
    sigma: UMatrix
    tau: UMatrix
    edge: Optional[int] = None

    @property
    def carrier(self) -> UMatrix:
        """g·rep(w) = n"""
        return self.sigma * self.tau


@dataclass
class WalkVertex:
    index: int
    vertex: Vertex
    depth: int
    stab: FiniteSubgroup
    table: Dict[Tuple, NeighborEntry] = field(default_factory=dict)
    expanded: bool = False

    @property
    def type_parity(self) -> int:
        return self.vertex.type_parity


@dataclass
class WalkEdge:
    """
    边轨道 (u, n₀)，u 为内端点，τ·rep(outer) = n₀

    Stab(e) ⊆ Stab(u)；到外端点群的嵌入为 x ↦ τ^{-1}·x·τ
    """
    index: int
    inner: int
    outer: int
    n0: Vertex
    tau: UMatrix
    stab: FiniteSubgroup


@dataclass
class GammaWalk:
    spec: SubgroupSpec
    radius: int
    vertices: List[WalkVertex] = field(default_factory=list)
    edges: List[WalkEdge] = field(default_factory=list)

    def layer(self, i: int) -> List[WalkVertex]:
        return [v for v in self.vertices if v.depth == i]

    def edges_into(self, idx: int) -> List[WalkEdge]:
        return [e for e in self.edges if e.outer == idx]


class _Walker:
    def __init__(self, spec: SubgroupSpec, radius: int, base: Vertex, degbound: Optional[int], cap: int):
        self.spec = spec
        self.ext = spec.ext
        self.fq = self.ext.fq
        self.degbound = degbound
        self.cap = cap
        self.walk = GammaWalk(spec, radius)
        self.by_key: Dict[Tuple, int] = {}
        self._add_rep(base, 0, self._stab(base))

    def _stab(self, v: Vertex) -> FiniteSubgroup:
        return stabilizer(v, self.spec, self.degbound, self.cap)

    def _add_rep(self, v: Vertex, depth: int, stab: FiniteSubgroup) -> int:
        idx = len(self.walk.vertices)
        self.walk.vertices.append(WalkVertex(idx, v, depth, stab))
        self.by_key[v.key] = idx
        logger.debug(f"新代表 #{idx}: 深度 {depth}, 类型 {v.type_parity}, |Stab| = {stab.order}")
        return idx

    # ---------- 邻点轨道 ----------

    def _orbits(self, u: WalkVertex, nbrs: List[Vertex]):
        """[(成员列表, 子空间键映射)]，按成员最小排序键排序"""
        keys = {n.key: neighbor_subspace(u.vertex, n) for n in nbrs}
        by_space = {w: n for n, w in zip(nbrs, (keys[n.key] for n in nbrs))}
        if len(by_space) != len(nbrs):
            raise InvariantViolation("不同邻点对应了相同的剩余子空间")
        mats = [local_action(u.vertex, g) for g in u.stab.gens]
        seen = set()
        orbits = []
        for n in nbrs:
            if n.key in seen:
                continue
            members = [n]
            seen.add(n.key)
            stack = [keys[n.key]]
            while stack:
                W = stack.pop()
                for A in mats:
                    W2 = act_on_subspace(self.fq, A, W)
                    m = by_space.get(W2)
                    if m is None:
                        raise InvariantViolation("稳定子把邻点映到了非邻点")
                    if m.key not in seen:
                        seen.add(m.key)
                        members.append(m)
                        stack.append(W2)
            orbits.append(sorted(members, key=Vertex.sort_key))
        orbits.sort(key=lambda ms: ms[0].sort_key())
        return orbits, keys, by_space, mats

    def _sigmas(self, u: WalkVertex, n0: Vertex, keys, by_space, mats) -> Dict[Tuple, UMatrix]:
        """σ_n ∈ Stab(u)，σ_n·n₀ = n"""
        one = mk_identity(self.ext)
        out = {n0.key: one}
        stack = [(keys[n0.key], one)]
        while stack:
            W, sig = stack.pop()
            for g, A in zip(u.stab.gens, mats):
                W2 = act_on_subspace(self.fq, A, W)
                m = by_space[W2]
                if m.key not in out:
                    out[m.key] = g * sig
                    stack.append((W2, out[m.key]))
        return out

    # ---------- 识别 ----------

    def _identify(self, n0: Vertex, depth: int) -> Tuple[int, UMatrix]:
        """(代表下标 w, τ)，τ·rep(w) = n₀"""
        one = mk_identity(self.ext)
        if n0.key in self.by_key:
            return self.by_key[n0.key], one
        stab = self._stab(n0)
        for d in (depth - 1, depth + 1):
            for w in self.walk.layer(d):
                if w.type_parity != n0.type_parity or w.stab.order != stab.order:
                    continue
                tau = transporter(w.vertex, n0, self.spec, self.degbound, self.cap)
                if tau is not None:
                    return w.index, tau
        return self._add_rep(n0, depth + 1, stab), one

    def expand(self, u: WalkVertex):
        nbrs = neighbors(u.vertex)
        orbits, keys, by_space, mats = self._orbits(u, nbrs)
        inward = 0
        for members in orbits:
            known = [m for m in members if m.key in self.by_key]
            n0 = known[0] if known else members[0]
            w_idx, tau = self._identify(n0, u.depth)
            w = self.walk.vertices[w_idx]
            if abs(w.depth - u.depth) != 1:
                raise InvariantViolation(f"边连接了深度 {u.depth} 与 {w.depth}")
            edge = None
            if w.depth == u.depth + 1:
                W0 = keys[n0.key]
                stab_e = u.stab.subgroup(
                    lambda g: act_on_subspace(self.fq, local_action(u.vertex, g), W0) == W0)
                edge = len(self.walk.edges)
                self.walk.edges.append(WalkEdge(edge, u.index, w_idx, n0, tau, stab_e))
            else:
                inward += 1
            for n_key, sig in self._sigmas(u, n0, keys, by_space, mats).items():
                u.table[n_key] = NeighborEntry(w_idx, sig, tau, edge)
        if len(u.table) != len(nbrs):
            raise InvariantViolation(f"邻点表大小 {len(u.table)} ≠ {len(nbrs)}")
        recorded = len(self.walk.edges_into(u.index))
        if u.depth > 0 and inward != recorded:
            raise InvariantViolation(f"代表 #{u.index}: 向内轨道 {inward} 个，已记录的入边 {recorded} 条")
        u.expanded = True


def gamma_walk(
    spec: SubgroupSpec,
    radius: int,
    base: Optional[Vertex] = None,
    degbound: Optional[int] = None,
    cap: int = DEFAULT_MAX_ENUMERATION,
    progress: bool = False,
) -> GammaWalk:
    """
    G\\X 中到基轨道距离 ≤ radius 的部分

    Args:
        degbound: 稳定子与转运元搜索的次数窗口（None 为格条件精确界）
        cap: 单个解空间的枚举上限
    """
    if radius < 0:
        raise ValueError(f"半径必须非负: {radius}")
    walker = _Walker(spec, radius, base or base_vertex(spec.ext), degbound, cap)
    for i in range(radius):
        layer = walker.walk.layer(i)
        for u in tqdm(layer, desc=f"游走深度 {i}", disable=not progress):
            walker.expand(u)
        logger.info(f"{spec.label} 游走深度 {i + 1}: {len(walker.walk.layer(i + 1))} 个代表")
    walk = walker.walk
    logger.info(f"游走完成: {len(walk.vertices)} 个顶点轨道, {len(walk.edges)} 个边轨道")
    return walk
