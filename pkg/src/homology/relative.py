"""
相对同调与阿贝尔化的窗口检验

在半径 R 的 Γ_J 商图上同时计算：
  - 群图基本群的阿贝尔化（自由秩、挠因子）；
  - 每条已认证尖点射线最外端顶点群的尖点滤过 p-秩；
  - Steinberg 秩 l₁ − l₀ 与相对同调 H₁(G mod {G_σ}) 的秩。
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from loguru import logger

from ..arithmetic.cusps import cusp_filtration
from ..arithmetic.subgroups import SubgroupSpec
from ..group.unitary import fixed_boundary_point
from ..pipeline.quotients import QuotientOptions, QuotientRun, euler_for
from ..quotient.euler import EulerReport
from ..quotient.graph import QuotientGraph
from ..utils.errors import PreconditionError
from .graph_of_groups import graph_of_groups
from .smith import AbelianInvariants, abelianization


@dataclass
class CuspRank:
    ray: int
    vertex: int
    order: int
    filtration_order: int
    p_rank: int

    def to_dict(self) -> Dict:
        return {
            "ray": self.ray,
            "vertex": self.vertex,
            "order": self.order,
            "filtration_order": self.filtration_order,
            "p_rank": self.p_rank,
        }


@dataclass
class RelHomReport:
    radius: int
    chi: int
    steinberg_rank: int
    h1_rel_rank: int
    consistency: bool
    abelian: AbelianInvariants
    cycle_rank: int
    cusps: List[CuspRank] = field(default_factory=list)
    checks: Dict[str, Dict] = field(default_factory=dict)
    stability: str = "stable"
    provisional: bool = False

    @property
    def cusp_p_rank(self) -> int:
        return sum(c.p_rank for c in self.cusps)

    def to_dict(self) -> Dict:
        return {
            "radius": self.radius,
            "chi": self.chi,
            "steinberg_rank": self.steinberg_rank,
            "h1_rel_rank": self.h1_rel_rank,
            "consistency": self.consistency,
            "stability": self.stability,
            "provisional": self.provisional,
            "cycle_rank": self.cycle_rank,
            "abelianization": self.abelian.to_dict(),
            "cusp_p_rank": self.cusp_p_rank,
            "cusps": [c.to_dict() for c in self.cusps],
            "checks": self.checks,
        }


def cusp_ranks(qg: QuotientGraph) -> List[CuspRank]:
    """每条已认证射线：最外端顶点群 → 唯一不动边界点 → 锚定在该顶点的尖点滤过"""
    out = []
    for i, ray in enumerate(qg.rays):
        if not ray.certified:
            continue
        v = qg.vertices[ray.vertices[-1]]
        xi = fixed_boundary_point(v.group.gens, bound=v.group.order)
        filt = cusp_filtration(xi, qg.spec, anchor=v.rep)
        out.append(CuspRank(i, v.index, v.stab_order, filt.order, filt.p_rank))
        logger.debug(f"射线 {i}: 顶点 #{v.index}, |K| = {v.stab_order}, 尖点 p-秩 {filt.p_rank}")
    return out


def _check(ok: bool, **values) -> Dict:
    return {"ok": bool(ok), **values}


def relative_report(run: QuotientRun, euler: EulerReport) -> RelHomReport:
    """
    Raises:
        PreconditionError: 子群不是同余子群（Γ 含 p'-挠）
    """
    qg = run.graph
    spec = run.spec
    if not spec.is_congruence:
        raise PreconditionError("相对同调检验只对无 p'-挠的同余子群进行")
    p = spec.ext.fq.p

    gog = graph_of_groups(qg, spec)
    ab = abelianization(gog)
    cycle = qg.cycle_rank()
    chi = euler.chi
    steinberg = euler.l1 - euler.l0

    cusps = cusp_ranks(qg)
    certified = [r for r in qg.rays if r.certified]
    killed = sorted({i for r in certified for i in r.vertices})
    rel = abelianization(gog, kill=killed)
    h1_rel = rel.free_rank + max(len(certified) - 1, 0)

    cusp_p = sum(c.p_rank for c in cusps)
    checks = {
        "free_rank_equals_cycle_rank": _check(ab.free_rank == cycle, free_rank=ab.free_rank, cycle_rank=cycle),
        "free_rank_bounded_by_minus_chi": _check(ab.free_rank <= -chi, free_rank=ab.free_rank, minus_chi=-chi),
        "steinberg_rank": _check(steinberg == -chi, steinberg_rank=steinberg, minus_chi=-chi),
        "torsion_is_p_group": _check(ab.is_p_torsion(p), divisors=ab.divisors),
        "torsion_matches_cusps": _check(ab.p_rank(p) == cusp_p, torsion_p_rank=ab.p_rank(p), cusp_p_rank=cusp_p),
        "cusp_groups_match_vertex_groups": _check(all(c.order == c.filtration_order for c in cusps),
                                                  orders=[[c.order, c.filtration_order] for c in cusps]),
        "relative_rank": _check(h1_rel == -chi, h1_rel_rank=h1_rel, minus_chi=-chi),
        "rays_certified": _check(bool(certified) and len(certified) == len(qg.rays),
                                 certified=len(certified), rays=len(qg.rays)),
    }
    provisional = qg.provisional or euler.stability != "stable"
    consistency = all(c["ok"] for c in checks.values()) and not provisional
    for name, c in checks.items():
        if not c["ok"]:
            logger.warning(f"检验未通过: {name} {c}")

    report = RelHomReport(
        radius=qg.radius,
        chi=chi,
        steinberg_rank=steinberg,
        h1_rel_rank=h1_rel,
        consistency=consistency,
        abelian=ab,
        cycle_rank=cycle,
        cusps=cusps,
        checks=checks,
        stability=euler.stability,
        provisional=provisional,
    )
    logger.info(f"相对同调 R={qg.radius}: χ={chi}, St 秩 {steinberg}, H₁ 相对秩 {h1_rel}, "
                f"自由秩 {ab.free_rank}, 挠 p-秩 {ab.p_rank(p)} / 尖点 {cusp_p}, 一致: {consistency}")
    return report


def check_relative_homology(spec: SubgroupSpec, radius: int, options: Optional[QuotientOptions] = None) -> RelHomReport:
    euler, run = euler_for(spec, radius, options)
    return relative_report(run, euler)
