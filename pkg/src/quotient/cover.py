"""
Γ_J\\X 作为 Γ\\X 的覆盖

Q = π(Γ) ⊆ SL₃(B/J) 由全部 π(Stab_Γ(v)) 与 π(τ_e) 生成。
[v] 上方的 Γ_J 顶点轨道 ↔ Q/π(S_v)，边轨道 ↔ Q/π(S_e)；
顶点群 K_v = S_v ∩ Γ_J = ker(π|S_v)。

陪集 c 对应的边：内端点陪集 c·π(S_u)，外端点陪集 c·π(τ)·π(S_w)。
边群嵌入：内侧 x ↦ s·x·s^{-1}，π(s) = c_r^{-1}·c，s ∈ S_u；
外侧 x ↦ s'·τ^{-1}·x·τ·s'^{-1}，π(s') = c'_r^{-1}·c·π(τ)，s' ∈ S_w。
"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from loguru import logger

from ..arithmetic.reduction import QuotientRing, ReducedGroup, RMat, image_group, reduce_matrix, rmat_identity, rmat_mul
from ..arithmetic.subgroups import FiniteSubgroup, SubgroupSpec
from ..group.unitary import UMatrix
from ..utils.errors import InvariantViolation, PreconditionError
from .walk import GammaWalk


@dataclass
class CoverVertex:
    index: int
    base: int          # Γ-代表下标
    coset: RMat        # 陪集代表 c_r
    group: FiniteSubgroup


@dataclass
class CoverEdge:
    index: int
    base: int          # Γ-边轨道下标
    coset: RMat
    inner: int
    outer: int
    group: FiniteSubgroup
    inner_conj: UMatrix
    outer_conj: UMatrix


@dataclass
class CongruenceCover:
    spec: SubgroupSpec
    walk: GammaWalk
    image: ReducedGroup
    vertices: List[CoverVertex] = field(default_factory=list)
    edges: List[CoverEdge] = field(default_factory=list)

    @property
    def index(self) -> int:
        """[Γ : Γ_J] = |π(Γ)|"""
        return self.image.order


def rmat_inverse(ring: QuotientRing, x: RMat) -> RMat:
    one = rmat_identity(ring)
    prev, y = x, rmat_mul(ring, x, x)
    if x == one:
        return one
    while y != one:
        prev, y = y, rmat_mul(ring, y, x)
    return prev


def kernel_subgroup(ring: QuotientRing, group: FiniteSubgroup) -> FiniteSubgroup:
    one = rmat_identity(ring)
    return group.subgroup(lambda g: reduce_matrix(ring, g) == one)


def _lifts(ring: QuotientRing, group: FiniteSubgroup) -> Dict[RMat, UMatrix]:
    """π 像 → 第一个原像"""
    out: Dict[RMat, UMatrix] = {}
    for g in group.elements:
        out.setdefault(reduce_matrix(ring, g), g)
    return out


def congruence_cover(walk: GammaWalk, spec: SubgroupSpec, max_image_order: int) -> CongruenceCover:
    """
    Raises:
        PreconditionError: walk 不是 Γ 的游走或 spec 不是同余子群
        WindowExhausted: |π(Γ)| 超过 max_image_order
    """
    if walk.spec.is_congruence or not spec.is_congruence:
        raise PreconditionError("覆盖需要 Γ 的游走与同余子群")
    ring = QuotientRing(spec.J)
    gens: List[UMatrix] = []
    for v in walk.vertices:
        gens.extend(v.stab.gens)
    gens.extend(e.tau for e in walk.edges)
    Q = image_group(ring, gens, max_image_order)
    cover = CongruenceCover(spec, walk, Q)

    v_images = {v.index: sorted(_lifts(ring, v.stab)) for v in walk.vertices}
    v_lifts = {v.index: _lifts(ring, v.stab) for v in walk.vertices}
    # (Γ-代表, Q 元素) → 顶点下标
    coset_of: Dict[Tuple[int, RMat], int] = {}
    for v in walk.vertices:
        K = kernel_subgroup(ring, v.stab)
        if K.order * len(v_images[v.index]) != v.stab.order:
            raise InvariantViolation(f"|K| · |π(S)| ≠ |S| (代表 #{v.index})")
        for c in Q.cosets(v_images[v.index]):
            idx = len(cover.vertices)
            cover.vertices.append(CoverVertex(idx, v.index, c, K))
            for h in v_images[v.index]:
                coset_of[(v.index, rmat_mul(ring, c, h))] = idx

    for e in walk.edges:
        e_images = sorted(_lifts(ring, e.stab))
        K_e = kernel_subgroup(ring, e.stab)
        tau_bar = reduce_matrix(ring, e.tau)
        for c in Q.cosets(e_images):
            inner = coset_of[(e.inner, c)]
            c_out = rmat_mul(ring, c, tau_bar)
            outer = coset_of[(e.outer, c_out)]
            cr = cover.vertices[inner].coset
            s = v_lifts[e.inner][rmat_mul(ring, rmat_inverse(ring, cr), c)]
            cr_out = cover.vertices[outer].coset
            s_out = v_lifts[e.outer][rmat_mul(ring, rmat_inverse(ring, cr_out), c_out)]
            idx = len(cover.edges)
            cover.edges.append(CoverEdge(idx, e.index, c, inner, outer, K_e, s, s_out * e.tau.inverse()))
    _check_inclusions(cover)
    logger.info(f"同余覆盖: [Γ:Γ_J] = {Q.order}, {len(cover.vertices)} 个顶点轨道, {len(cover.edges)} 个边轨道")
    return cover


def _check_inclusions(cover: CongruenceCover):
    for e in cover.edges:
        K_in = cover.vertices[e.inner].group
        K_out = cover.vertices[e.outer].group
        for h in e.group.gens:
            if e.inner_conj * h * e.inner_conj.inverse() not in K_in:
                raise InvariantViolation(f"边 #{e.index} 的群不在内端点群中")
            if e.outer_conj * h * e.outer_conj.inverse() not in K_out:
                raise InvariantViolation(f"边 #{e.index} 的群不在外端点群中")
