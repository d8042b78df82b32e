"""
Bruhat–Tits 树：标准公寓、邻点、群作用、球与距离

每个由树机制产生的顶点都带标架 g（v = g·v_type），邻点由固定的步进集合
g·step·v_{1−type} 得到；独立的子格枚举 sublattice_neighbors 作为邻点的对照。
"""

from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import networkx as nx
from loguru import logger
from tqdm import tqdm

from ..algebra.global_field import ExtensionContext
from ..algebra.linear import subspace_key, subspaces
from ..algebra.matrices import columns, mat_mul, mat_scale
from ..group.unitary import UMatrix, mk_identity, mk_s, mk_torus, mk_ua
from ..utils.errors import InvariantViolation, NotFoundInWindow
from ..utils.io import read_json, write_json
from .lattice import (
    Lattice,
    NotAVertex,
    Vertex,
    apartment_lattice,
    dual_lattice,
    lattice_contains,
    relative_basis,
    residue_matrix,
    type_basis,
    vertex_normalize,
)


# ---------------------------------------------------------------------------
# 标准公寓
# ---------------------------------------------------------------------------


def base_vertex(ext: ExtensionContext) -> Vertex:
    return apartment_vertex(ext, 0)


def apartment_vertex(ext: ExtensionContext, i: int) -> Vertex:
    """标准公寓第 i 个顶点，标架为 ã(μ_{−⌊i/2⌋})"""
    frame = mk_torus(ext.mu(-(i // 2)))
    v = vertex_normalize(apartment_lattice(ext, i), frame=frame)
    if v.type_parity != i % 2:
        raise InvariantViolation(f"公寓顶点 {i} 的类型 {v.type_parity} 与奇偶性不符")
    return v


@lru_cache(maxsize=None)
def _steps(ext: ExtensionContext, parity: int) -> Tuple[UMatrix, ...]:
    """
    v_type 的全部邻点为 step·v_{1−type}

    类型 0：单位阵与 u_a(c, −c²/2)·s（c ∈ F_q）；
    类型 1：单位阵、u_a(0, c·ρt)（c ≠ 0）与 ã(ρ^{-1})。
    """
    fq = ext.fq
    one = mk_identity(ext)
    if parity == 0:
        s = mk_s(ext)
        out = [one]
        for c in range(fq.q):
            u = ext.const(c)
            v = (u * u).scale_code(fq.neg_table[fq.half])
            out.append(mk_ua(u, v) * s)
        return tuple(out)
    rho_t = ext.rho * ext.t
    out = [one]
    for c in range(1, fq.q):
        out.append(mk_ua(ext.zero, rho_t.scale_code(c)))
    out.append(mk_torus(ext.rho.inverse()))
    return tuple(out)


def neighbors(v: Vertex) -> List[Vertex]:
    """
    距离为 1 的全部顶点，按规范形排序

    带标架的顶点用步进集合；无标架时退回子格枚举。
    """
    if v.frame is None:
        return sublattice_neighbors(v)
    ext = v.ext
    target = type_basis(ext, 1 - v.type_parity)
    out: Dict[Tuple, Vertex] = {}
    for step in _steps(ext, v.type_parity):
        g = v.frame * step
        w = vertex_normalize(Lattice(mat_mul(g.rows, target)), frame=g, verify=False)
        out.setdefault(w.key, w)
    return sorted(out.values(), key=Vertex.sort_key)


def is_adjacent(v: Vertex, w: Vertex) -> bool:
    """类型 1 的 L₁ 与自对偶 L₀ 相邻当且仅当 L₁ ⊂ L₀ ⊂ L₁^#"""
    if v.type_parity == w.type_parity:
        return False
    a, b = (v, w) if v.type_parity == 1 else (w, v)
    return lattice_contains(b.lat, a.lat) and lattice_contains(dual_lattice(a.lat), b.lat)


def sublattice_neighbors(v: Vertex) -> List[Vertex]:
    """
    子格对照：对 L/ρL 的每条直线与平面 W 取 N = ρL + M·W，
    规范化后保留与 v 相邻者
    """
    ext = v.ext
    fq = ext.fq
    M = v.basis
    cols = columns(M)
    rho_cols = columns(mat_scale(M, ext.rho))
    out: Dict[Tuple, Vertex] = {}
    for dim in (1, 2):
        for W in subspaces(fq, 3, dim):
            gens = list(rho_cols)
            for w in W:
                vec = [ext.zero] * 3
                for coef, col in zip(w, cols):
                    if coef:
                        vec = [a + b.scale_code(coef) for a, b in zip(vec, col)]
                gens.append(tuple(vec))
            basis = tuple(tuple(col[r] for col in gens) for r in range(3))
            try:
                n = vertex_normalize(Lattice(basis))
            except NotAVertex:
                continue
            if is_adjacent(v, n):
                out.setdefault(n.key, n)
    return sorted(out.values(), key=Vertex.sort_key)


def tree_act(g: UMatrix, v: Vertex) -> Vertex:
    """g·v，标架随之左乘"""
    frame = g * v.frame if v.frame is not None else None
    w = vertex_normalize(v.lat.transformed(g.rows), frame=frame, verify=False)
    if w.type_parity != v.type_parity:
        raise InvariantViolation("𝒢(k) 的元素改变了顶点类型")
    return w


def fixes_vertex(g: UMatrix, v: Vertex) -> bool:
    """g·v = v 当且仅当 M_v^{-1}·g·M_v 整"""
    from ..algebra.matrices import is_integral

    return is_integral(relative_basis(v, mat_mul(g.rows, v.basis)))


# ---------------------------------------------------------------------------
# 剩余域上的局部作用
# ---------------------------------------------------------------------------


def neighbor_subspace(u: Vertex, n: Vertex) -> Tuple[Tuple[int, ...], ...]:
    """
    邻点 n 在 L_u/ρL_u 中对应的子空间键

    类型 0 的 u：M_u^{-1}·M_n 模 ρ 的像（平面）；类型 1 的 u：M_u^{-1}·ρM_n 的像（直线）。
    """
    ext = u.ext
    Mn = n.basis if u.type_parity == 0 else mat_scale(n.basis, ext.rho)
    R = residue_matrix(relative_basis(u, Mn))
    return subspace_key(ext.fq, [tuple(col) for col in zip(*R)])


def local_action(u: Vertex, g: UMatrix) -> Tuple[Tuple[int, ...], ...]:
    """Stab(u) 的元素在 L_u/ρL_u 上诱导的 GL₃(F_q) 矩阵"""
    return residue_matrix(relative_basis(u, mat_mul(g.rows, u.basis)))


# ---------------------------------------------------------------------------
# 球
# ---------------------------------------------------------------------------


class Ball:
    """
    以 base 为中心、半径 radius 的球

    Attributes:
        vertices: 键 → 顶点
        depth: 键 → 到中心的距离
        graph: networkx 无向图，节点为顶点键
    """

    def __init__(self, base: Vertex, radius: int):
        self.base = base
        self.radius = radius
        self.vertices: Dict[Tuple, Vertex] = {base.key: base}
        self.depth: Dict[Tuple, int] = {base.key: 0}
        self.graph = nx.Graph()
        self.graph.add_node(base.key)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: Vertex) -> bool:
        return v.key in self.vertices

    def layer(self, i: int) -> List[Vertex]:
        return sorted((self.vertices[k] for k, d in self.depth.items() if d == i), key=Vertex.sort_key)

    def is_tree(self) -> bool:
        return nx.is_tree(self.graph)

    def valences(self) -> Dict[int, List[int]]:
        """内部顶点（深度 < radius）按类型分组的度数"""
        out: Dict[int, List[int]] = {0: [], 1: []}
        for k, d in self.depth.items():
            if d < self.radius:
                out[self.vertices[k].type_parity].append(self.graph.degree[k])
        return out

    def measured_valence(self) -> Dict[int, Optional[int]]:
        """
        两类内部顶点的实测度数；半径为 0 或某类尚无内部顶点时为 None

        Raises:
            InvariantViolation: 同一类型的内部顶点度数不一致
        """
        out: Dict[int, Optional[int]] = {}
        for parity, degrees in self.valences().items():
            seen = set(degrees)
            if len(seen) > 1:
                raise InvariantViolation(f"类型 {parity} 的内部顶点度数不一致: {sorted(seen)}")
            out[parity] = seen.pop() if seen else None
        return out

    def to_json(self, prec: int = 8) -> Dict:
        keys = sorted(self.vertices, key=lambda k: (self.depth[k], self.vertices[k].sort_key()))
        index = {k: i for i, k in enumerate(keys)}
        return {
            "radius": self.radius,
            "base": index[self.base.key],
            "vertices": [
                {"id": index[k], "depth": self.depth[k], **self.vertices[k].to_json(prec)} for k in keys
            ],
            "edges": sorted(tuple(sorted((index[a], index[b]))) for a, b in self.graph.edges),
            "valence": {str(t): d for t, d in self.measured_valence().items()},
        }


def build_ball(ext: ExtensionContext, R: int, base: Optional[Vertex] = None, progress: bool = False) -> Ball:
    """
    半径 R 的球，含球内全部邻接关系

    Args:
        R: 半径（≥ 0）
        base: 中心，缺省为标准公寓第 0 个顶点
        progress: 是否显示进度条
    """
    if R < 0:
        raise ValueError(f"半径必须非负: {R}")
    base = base or base_vertex(ext)
    ball = Ball(base, R)
    frontier = [base]
    for i in range(R):
        nxt: List[Vertex] = []
        for v in tqdm(frontier, desc=f"球第 {i + 1} 层", disable=not progress):
            for w in neighbors(v):
                if w.key not in ball.vertices:
                    ball.vertices[w.key] = w
                    ball.depth[w.key] = i + 1
                    nxt.append(w)
                ball.graph.add_edge(v.key, w.key)
        frontier = sorted(nxt, key=Vertex.sort_key)
        logger.info(f"球第 {i + 1} 层: {len(frontier)} 个顶点")
    return ball


def distance(v: Vertex, w: Vertex, ball: Ball) -> int:
    """
    球内图距离

    Raises:
        NotFoundInWindow: 顶点不在球内
    """
    for x in (v, w):
        if x.key not in ball.vertices:
            raise NotFoundInWindow(f"顶点 {x!r} 不在半径 {ball.radius} 的球内")
    return nx.shortest_path_length(ball.graph, v.key, w.key)


# ---------------------------------------------------------------------------
# 度数回归记录
# ---------------------------------------------------------------------------


def valence_record_key(ext: ExtensionContext) -> str:
    fq = ext.fq
    return f"p={fq.p},r={fq.r},D={ext.D.to_json()}"


def regress_valence(path: Path, ext: ExtensionContext, valence: Dict[int, Optional[int]]) -> Dict[str, int]:
    """
    首次运行写入实测度数，之后的运行与记录比较

    记录文件按 (p, r, D) 分键；某类型此前未测到时补记。

    Returns:
        比较后的记录 {类型: 度数}

    Raises:
        InvariantViolation: 实测度数与记录不符
    """
    path = Path(path)
    record = read_json(path) if path.exists() else {}
    key = valence_record_key(ext)
    stored: Dict[str, int] = record.get(key, {})
    measured = {str(t): d for t, d in valence.items() if d is not None}
    for t, d in measured.items():
        if t in stored and stored[t] != d:
            raise InvariantViolation(f"{key} 类型 {t} 的度数 {d} 与记录值 {stored[t]} 不符")
    merged = {**stored, **measured}
    if merged != stored:
        record[key] = merged
        write_json(path, record, timestamp=False)
        logger.info(f"记录度数 {key}: {merged}")
    return merged
