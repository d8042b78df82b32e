"""
欧拉–庞加莱特征：χ(G) = l₀ − l₁ 与分式部分和

l₀、l₁ 为稳定（稳定子平凡）顶点轨道、边轨道的个数；
部分和 Σ_v 1/|St(v)| − Σ_e 1/|St(e)| 的不稳定部分按"内部顶点 ↔ 同阶外向边"
成对抵消，剩余只来自最外层。
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from loguru import logger

from ..arithmetic.cusps import is_p_power
from ..utils.errors import PreconditionError
from .graph import QuotientGraph


@dataclass
class EulerReport:
    radius: int
    l0: int
    l1: int
    chi: int
    eq1_partial: Fraction
    cancellation_residual: Fraction
    outer_sphere_mass: Fraction
    matched: bool
    stability: str
    provisional: bool = False

    def to_dict(self) -> Dict:
        def frac(x: Fraction) -> Dict[str, str]:
            return {"num": str(x.numerator), "den": str(x.denominator)}

        return {
            "radius": self.radius,
            "l0": self.l0,
            "l1": self.l1,
            "chi": self.chi,
            "eq1_partial": frac(self.eq1_partial),
            "cancellation_residual": frac(self.cancellation_residual),
            "outer_sphere_mass": frac(self.outer_sphere_mass),
            "matched": self.matched,
            "stability": self.stability,
            "provisional": self.provisional,
        }


def stable_counts(qg: QuotientGraph):
    l0 = sum(1 for v in qg.vertices if v.stable)
    l1 = sum(1 for e in qg.edges if e.stable)
    return l0, l1


def partial_sum(qg: QuotientGraph) -> Fraction:
    total = sum((Fraction(1, v.stab_order) for v in qg.vertices), Fraction(0))
    return total - sum((Fraction(1, e.stab_order) for e in qg.edges), Fraction(0))


def matched_pairs(qg: QuotientGraph) -> Optional[List[int]]:
    """
    内部不稳定顶点 → 同阶外向不稳定边；某个顶点无法配对时返回 None
    """
    used = set()
    out = []
    for v in qg.vertices:
        if v.stable or v.depth >= qg.radius:
            continue
        cand = [e for e in qg.out_edges(v.index) if not e.stable and e.stab_order == v.stab_order and e.index not in used]
        if not cand:
            return None
        used.add(cand[0].index)
        out.append(cand[0].index)
    return out


def euler_report(qg: QuotientGraph, allow_torsion: bool = False) -> EulerReport:
    """
    Args:
        qg: 半径 R 的商图（R ≥ 1）；R − 1 的数据取其深度截断
        allow_torsion: 对 Γ 强制给出 l₀ − l₁（存在 p'-挠时拒绝）

    Raises:
        PreconditionError: 非同余子群且未允许，或允许后观察到 p'-挠
    """
    if qg.radius < 1:
        raise PreconditionError("欧拉报告需要半径 ≥ 1")
    p = qg.spec.ext.fq.p
    if not qg.spec.is_congruence:
        if not allow_torsion:
            raise PreconditionError("l₀ − l₁ 只对无 p'-挠的子群成立，Γ 需要显式允许")
        bad = [v.stab_order for v in qg.vertices if not is_p_power(v.stab_order, p)]
        if bad:
            raise PreconditionError(f"观察到 p'-挠（稳定子阶 {bad[:5]}），拒绝给出 l₀ − l₁")

    l0, l1 = stable_counts(qg)
    prev = stable_counts(qg.restrict(qg.radius - 1))
    eq1 = partial_sum(qg)
    residual = eq1 - (l0 - l1)

    matches = matched_pairs(qg)
    if matches is None:
        outer = residual
        matched = False
    else:
        used = set(matches)
        outer = sum((Fraction(1, v.stab_order) for v in qg.vertices if not v.stable and v.depth >= qg.radius), Fraction(0))
        outer -= sum((Fraction(1, e.stab_order) for e in qg.edges if not e.stable and e.index not in used), Fraction(0))
        matched = outer == residual

    report = EulerReport(
        radius=qg.radius,
        l0=l0,
        l1=l1,
        chi=l0 - l1,
        eq1_partial=eq1,
        cancellation_residual=residual,
        outer_sphere_mass=outer,
        matched=matched,
        stability="stable" if prev == (l0, l1) else "unstable-at-radius",
        provisional=qg.provisional,
    )
    logger.info(f"欧拉报告 R={qg.radius}: l0={l0}, l1={l1}, χ={report.chi}, 部分和 {eq1}, {report.stability}")
    return report
