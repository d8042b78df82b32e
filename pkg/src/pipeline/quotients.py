"""
商图计算流程

Γ\\X：从基顶点出发的局部游走；
Γ_J\\X：在 Γ 的游走上做陪集覆盖，像群过大时退回到球投影（结果标记为 provisional）。
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from loguru import logger

from ..algebra.ideals import ClassGroupData
from ..arithmetic.reduction import QuotientRing, image_group
from ..arithmetic.search import DEFAULT_MAX_ENUMERATION
from ..arithmetic.subgroups import SubgroupSpec
from ..config.settings import Config
from ..quotient.cover import CongruenceCover, congruence_cover
from ..quotient.euler import EulerReport, euler_report
from ..quotient.graph import (
    QuotientGraph,
    check_morphism,
    detect_cusp_rays,
    graph_from_cover,
    graph_from_walk,
    project_ball,
    projection_quotient,
    unstable_components,
)
from ..quotient.walk import GammaWalk, gamma_walk
from ..tree.building import Ball, build_ball
from ..utils.errors import InvariantViolation, PreconditionError, WindowExhausted


@dataclass
class QuotientOptions:
    """商图计算参数"""
    degbound: Optional[int] = None
    cap: int = DEFAULT_MAX_ENUMERATION
    max_image_order: int = 100_000
    min_run: int = 3
    progress: bool = False

    @classmethod
    def from_config(cls, config: Config, progress: bool = False) -> "QuotientOptions":
        return cls(
            degbound=config.search.deg_bound,
            cap=config.search.max_enumeration,
            max_image_order=config.search.max_image_order,
            min_run=config.search.min_run,
            progress=progress,
        )


@dataclass
class QuotientRun:
    spec: SubgroupSpec
    radius: int
    graph: QuotientGraph
    walk: GammaWalk
    cover: Optional[CongruenceCover] = None
    ball: Optional[Ball] = None
    notes: Dict[str, str] = field(default_factory=dict)

    @property
    def index(self) -> Optional[int]:
        """[Γ : Γ_J]（仅覆盖成功时）"""
        return self.cover.index if self.cover is not None else None

    def summary(self) -> Dict:
        qg = self.graph
        return {
            "subgroup": self.spec.label,
            "radius": self.radius,
            "source": qg.source,
            "provisional": qg.provisional,
            "orbits": len(qg.vertices),
            "edges": len(qg.edges),
            "is_tree": qg.is_tree(),
            "cycle_rank": qg.cycle_rank(),
            "unstable_components": unstable_components(qg),
            "cusp_rays": len(qg.rays),
            "certified_rays": sum(r.certified for r in qg.rays),
            "index": self.index,
        }


def _walk(spec: SubgroupSpec, radius: int, options: QuotientOptions, ball: Optional[Ball] = None) -> GammaWalk:
    gamma = SubgroupSpec.gamma(spec.ext)
    return gamma_walk(gamma, radius, base=ball.base if ball is not None else None,
                      degbound=options.degbound, cap=options.cap, progress=options.progress)


def _finish(run: QuotientRun, options: QuotientOptions) -> QuotientRun:
    if run.radius >= options.min_run:
        detect_cusp_rays(run.graph, options.min_run)
    else:
        run.notes["cusp_rays"] = f"半径 {run.radius} < {options.min_run}，未检测尖点射线"
    return run


def quotient_for(spec: SubgroupSpec, radius: int, options: Optional[QuotientOptions] = None) -> QuotientRun:
    """
    半径 radius 的 G\\X 窗口

    Raises:
        WindowExhausted: 稳定子或转运元搜索超出上限
    """
    options = options or QuotientOptions()
    walk = _walk(spec, radius, options)
    if not spec.is_congruence:
        return _finish(QuotientRun(spec, radius, graph_from_walk(walk), walk), options)
    try:
        cover = congruence_cover(walk, spec, options.max_image_order)
    except WindowExhausted as e:
        logger.warning(f"覆盖失败（{e}），改用球投影")
        ball = build_ball(spec.ext, radius, base=walk.vertices[0].vertex, progress=options.progress)
        run = QuotientRun(spec, radius, projection_quotient(ball, walk, spec), walk, ball=ball)
        run.notes["source"] = f"像群超过 {options.max_image_order}，球投影结果为 provisional"
        return _finish(run, options)
    return _finish(QuotientRun(spec, radius, graph_from_cover(cover), walk, cover), options)


def quotient_ball(ball: Ball, spec: SubgroupSpec, options: Optional[QuotientOptions] = None) -> QuotientRun:
    """
    球 ball 的商图，并验证投影是图态射

    Raises:
        InvariantViolation: 投影不是图态射
    """
    options = options or QuotientOptions()
    walk = _walk(spec, ball.radius, options, ball)
    labels = project_ball(ball, walk)
    base_graph = graph_from_walk(walk)
    if not check_morphism(ball, base_graph, labels):
        raise InvariantViolation("球到 Γ 商图的投影不是图态射")
    if not spec.is_congruence:
        return _finish(QuotientRun(spec, ball.radius, base_graph, walk, ball=ball), options)
    try:
        cover = congruence_cover(walk, spec, options.max_image_order)
        qg = graph_from_cover(cover)
    except WindowExhausted as e:
        logger.warning(f"覆盖失败（{e}），改用球投影")
        cover = None
        qg = projection_quotient(ball, walk, spec, labels)
    return _finish(QuotientRun(spec, ball.radius, qg, walk, cover, ball), options)


def euler_for(spec: SubgroupSpec, radius: int, options: Optional[QuotientOptions] = None,
              allow_torsion: bool = False) -> Tuple[EulerReport, QuotientRun]:
    run = quotient_for(spec, radius, options)
    return euler_report(run.graph, allow_torsion=allow_torsion), run


def congruence_index(walk: GammaWalk, spec: SubgroupSpec, max_order: int) -> int:
    """[Γ : Γ_J] = |π_J(Γ)|，由 Γ 游走窗口内的生成元计算"""
    if not spec.is_congruence:
        return 1
    if walk.spec.is_congruence:
        raise PreconditionError("需要 Γ 的游走")
    gens = [g for v in walk.vertices for g in v.stab.gens] + [e.tau for e in walk.edges]
    return image_group(QuotientRing(spec.J), gens, max_order).order


def nested_index(walk: GammaWalk, outer: SubgroupSpec, inner: SubgroupSpec, max_order: int) -> int:
    """
    [Γ_J : Γ_J'] = |π_J'(Γ)| / |π_J(Γ)|（J' ⊆ J）

    Raises:
        PreconditionError: J' 不包含于 J
    """
    if not all(outer.J.contains(g) for g in inner.J.hnf_elements()):
        raise PreconditionError("J' 必须包含于 J")
    big = congruence_index(walk, inner, max_order)
    small = congruence_index(walk, outer, max_order)
    if big % small:
        raise InvariantViolation(f"|π_J'(Γ)| = {big} 不是 |π_J(Γ)| = {small} 的倍数")
    return big // small


def cusp_census(run: QuotientRun, pic: ClassGroupData) -> Dict:
    """尖点射线计数与 Pic(B) 的比较：Γ 时相等，Γ_J 时不超过 [Γ:Γ_J]·#Pic(B)"""
    certified = sum(r.certified for r in run.graph.rays)
    out = {
        "rays": len(run.graph.rays),
        "certified_rays": certified,
        "pic_order": pic.order,
    }
    if run.spec.is_congruence:
        bound = run.index * pic.order if run.index is not None else None
        out["bound"] = bound
        out["consistent"] = bound is None or certified <= bound
    else:
        out["consistent"] = certified == pic.order
    if not out["consistent"]:
        logger.warning(f"尖点射线数 {certified} 与类群阶 {pic.order} 不一致")
    return out
