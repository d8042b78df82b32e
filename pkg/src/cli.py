#!/usr/bin/env python3
"""
命令行入口

用法:
    python -m src.cli quotient --config config.yaml --radius 4
    python -m src.cli euler --out outputs/results/run1

退出码: 0 成功；2 配置或前置条件错误；3 窗口/精度不足（产物标记 provisional）；
1 内部不变量失败。
"""

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from loguru import logger

from .algebra.ideals import class_group, curve_point_count
from .arithmetic.cusps import cusp_filtration, cusp_index, finite_order_census, ideal_window_rank, is_p_power
from .arithmetic.search import stabilizer
from .config.settings import PROJECT_ROOT, RunConfig, load_config
from .group.unitary import BPoint, fixed_boundary_point, fixed_points_in_scan
from .homology.graph_of_groups import graph_of_groups
from .homology.relative import relative_report
from .homology.smith import abelianization
from .pipeline.quotients import QuotientOptions, cusp_census, euler_for, quotient_for
from .quotient.euler import euler_report
from .tree.building import apartment_vertex, build_ball, regress_valence
from .utils.errors import ConfigError, InvariantViolation, LabError, PreconditionError, WindowExhausted
from .utils.io import write_json, write_summary, write_text

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_WINDOW = 3


class Provisional(Exception):
    """产物已写出，但来自未稳定的窗口"""


def _setup_logging(run: RunConfig):
    cfg = run.config.logging
    log_file = Path(cfg.file)
    if not log_file.is_absolute():
        log_file = PROJECT_ROOT / log_file
    log_file.parent.mkdir(parents=True, exist_ok=True)
    logger.add(log_file, rotation=cfg.rotation, retention=cfg.retention, level=cfg.level)


def _header(run: RunConfig, command: str) -> Dict:
    cfg = run.config
    return {
        "command": command,
        "project": cfg.project.model_dump(),
        "field": cfg.field.model_dump(),
        "extension": cfg.extension.model_dump(),
        "subgroup": cfg.spec().to_dict(),
        "radius": cfg.tree.radius,
        "deg_bound": cfg.search.deg_bound,
        "seed": run.seed,
    }


def _save(run: RunConfig, name: str, data: Dict) -> Path:
    return write_json(run.out_dir / name, data, timestamp=run.config.output.timestamp)


# ---------------------------------------------------------------------------
# 子命令
# ---------------------------------------------------------------------------


def cmd_tree_ball(run: RunConfig, args) -> None:
    cfg = run.config
    ball = build_ball(cfg.ext(), cfg.tree.radius)
    val = ball.valences()
    recorded = regress_valence(PROJECT_ROOT / cfg.tree.valence_record, cfg.ext(), ball.measured_valence())
    rows = [[i, len(ball.layer(i))] for i in range(cfg.tree.radius + 1)]
    _save(run, "tree_ball.json", {**_header(run, "tree-ball"), "is_tree": ball.is_tree(),
                                  "valence_record": recorded, "ball": ball.to_json(cfg.tree.precision)})
    write_summary(run.out_dir / "summary.txt", "tree-ball", [
        {"title": "各层顶点数", "headers": ["深度", "顶点数"], "rows": rows},
        {"title": "内部顶点度数", "headers": ["类型", "度数", "记录值"],
         "rows": [[t, sorted(set(ds)), recorded.get(str(t))] for t, ds in val.items()]},
    ])


def cmd_quotient(run: RunConfig, args) -> None:
    cfg = run.config
    res = quotient_for(cfg.spec(), cfg.tree.radius, QuotientOptions.from_config(cfg, progress=args.progress))
    qg = res.graph
    data = {**_header(run, "quotient"), **qg.to_json(), "summary": res.summary(), "notes": res.notes}
    if cfg.ext().d <= cfg.class_group.max_deg_D:
        pic = class_group(cfg.ext(), cfg.class_group.norm_degree_bound, cfg.class_group.max_deg_D)
        data["cusp_census"] = cusp_census(res, pic)
    _save(run, "quotient.json", data)
    write_text(run.out_dir / "quotient.dot", qg.to_dot())
    write_summary(run.out_dir / "summary.txt", "quotient", [
        {"title": "商图", "headers": ["项目", "值"], "rows": list(res.summary().items())},
        {"title": "尖点射线", "headers": ["顶点", "稳定子阶", "已认证"],
         "rows": [[r.vertices, r.profile, r.certified] for r in qg.rays]},
    ])
    if qg.provisional:
        raise Provisional("商图来自球投影")


def cmd_euler(run: RunConfig, args) -> None:
    cfg = run.config
    report, res = euler_for(cfg.spec(), cfg.tree.radius, QuotientOptions.from_config(cfg, args.progress),
                            allow_torsion=args.allow_torsion)
    _save(run, "euler.json", {**_header(run, "euler"), "euler": report.to_dict(), "quotient": res.summary()})
    write_summary(run.out_dir / "summary.txt", "euler", [
        {"title": "欧拉–庞加莱特征", "headers": ["项目", "值"],
         "rows": [[k, v] for k, v in report.to_dict().items() if not isinstance(v, dict)]
                 + [["eq1_partial", str(report.eq1_partial)],
                    ["cancellation_residual", str(report.cancellation_residual)]]},
    ])
    if report.stability != "stable" or report.provisional:
        raise Provisional(f"欧拉报告未稳定（{report.stability}）")


def cmd_cusps(run: RunConfig, args) -> None:
    cfg = run.config
    spec = cfg.spec()
    ext = cfg.ext()
    xi = BPoint.infinity()
    anchor = apartment_vertex(ext, args.anchor) if args.anchor is not None else None
    window = args.window if args.window is not None else (None if anchor is not None else cfg.tree.radius)
    filt = cusp_filtration(xi, spec, window=window, anchor=anchor, cap=cfg.search.max_enumeration)
    data = {**_header(run, "cusps"), "filtration": filt.to_dict()}
    if window is not None:
        data["index"] = cusp_index(xi, spec, window, cfg.search.max_enumeration)
        if spec.is_congruence:
            data["ideal_window_rank"] = ideal_window_rank(spec.J, window // 2)
    _save(run, "cusps.json", data)
    write_summary(run.out_dir / "summary.txt", "cusps", [
        {"title": "尖点滤过", "headers": ["窗口", "阶", "p-秩", "维数"],
         "rows": [[filt.window, filt.order, filt.p_rank, filt.dims]]},
    ])


def cmd_stabilizer(run: RunConfig, args) -> None:
    cfg = run.config
    v = apartment_vertex(cfg.ext(), args.vertex)
    group = stabilizer(v, cfg.spec(), cfg.search.deg_bound, cfg.search.max_enumeration)
    _save(run, "stabilizer.json", {**_header(run, "stabilizer"), "vertex": args.vertex,
                                   "stabilizer": group.to_dict(with_elements=args.elements)})
    write_summary(run.out_dir / "summary.txt", "stabilizer", [
        {"title": "稳定子", "headers": ["顶点", "阶", "生成元", "认证"],
         "rows": [[args.vertex, group.order, len(group.gens), group.certification]]},
    ])
    if group.certification.startswith("window"):
        raise Provisional(f"稳定子在次数窗口 {group.degbound} 处未稳定")


def cmd_abelianization(run: RunConfig, args) -> None:
    cfg = run.config
    spec = cfg.spec()
    options = QuotientOptions.from_config(cfg, args.progress)
    res = quotient_for(spec, cfg.tree.radius, options)
    gog = graph_of_groups(res.graph, spec)
    ab = abelianization(gog)
    data = {**_header(run, "abelianization"), "graph_of_groups": gog.to_dict(), "abelianization": ab.to_dict()}
    rows = [["free_rank", ab.free_rank], ["torsion", ab.divisors], ["cycle_rank", res.graph.cycle_rank()]]
    provisional = res.graph.provisional
    if spec.is_congruence:
        rel = relative_report(res, euler_report(res.graph))
        data["relative_homology"] = rel.to_dict()
        rows += [["chi", rel.chi], ["steinberg_rank", rel.steinberg_rank], ["h1_rel_rank", rel.h1_rel_rank],
                 ["consistency", rel.consistency]]
        provisional = provisional or rel.provisional
    _save(run, "abelianization.json", data)
    write_summary(run.out_dir / "summary.txt", "abelianization", [
        {"title": "阿贝尔化", "headers": ["项目", "值"], "rows": rows},
    ])
    if provisional:
        raise Provisional("阿贝尔化来自未稳定的窗口")


def cmd_fixed_point(run: RunConfig, args) -> None:
    cfg = run.config
    v = apartment_vertex(cfg.ext(), args.vertex)
    group = stabilizer(v, cfg.spec(), cfg.search.deg_bound, cfg.search.max_enumeration)
    p = cfg.field.p
    if not is_p_power(group.order, p) or group.is_trivial():
        raise PreconditionError(f"顶点 {args.vertex} 的稳定子阶 {group.order} 不是非平凡 p-群")
    xi = fixed_boundary_point(group.gens, bound=group.order)
    scan = fixed_points_in_scan(group.gens, cfg.search.boundary_scan_degree)
    unique = all(x == xi for x in scan)
    _save(run, "fixed_point.json", {**_header(run, "fixed-point"), "vertex": args.vertex,
                                    "group_order": group.order, "point": xi.to_json(),
                                    "scan_degree": cfg.search.boundary_scan_degree,
                                    "scan_hits": [x.to_json() for x in scan], "unique_in_scan": unique})
    if not unique:
        raise InvariantViolation(f"扫描找到 {len(scan)} 个不动边界点")


def cmd_class_group(run: RunConfig, args) -> None:
    cfg = run.config
    ext = cfg.ext()
    pic = class_group(ext, cfg.class_group.norm_degree_bound, cfg.class_group.max_deg_D)
    data = {**_header(run, "class-group"), "class_group": pic.to_dict()}
    rows = [["ideal_classes", pic.order]]
    if ext.d == 3:
        n = curve_point_count(ext)
        data["curve_point_count"] = n
        rows.append(["curve_point_count", n])
        if n != pic.order:
            raise InvariantViolation(f"类群阶 {pic.order} ≠ 曲线点数 {n}")
    _save(run, "class_group.json", data)
    write_summary(run.out_dir / "summary.txt", "class-group", [
        {"title": "Pic(B)", "headers": ["项目", "值"], "rows": rows},
    ])


def cmd_census(run: RunConfig, args) -> None:
    cfg = run.config
    degbound = cfg.search.deg_bound if cfg.search.deg_bound is not None else 0
    census = finite_order_census(cfg.spec(), degbound, cfg.search.order_bound, cfg.search.max_enumeration)
    p = cfg.field.p
    _save(run, "census.json", {**_header(run, "census"), "deg_bound": degbound,
                               "orders": [{"order": n, "count": c} for n, c in census],
                               "p_prime_torsion": any(not is_p_power(n, p) for n, _ in census)})
    write_summary(run.out_dir / "summary.txt", "census", [
        {"title": "有限阶元素", "headers": ["阶", "个数"], "rows": census},
    ])


COMMANDS: Dict[str, Callable] = {
    "tree-ball": cmd_tree_ball,
    "quotient": cmd_quotient,
    "euler": cmd_euler,
    "cusps": cmd_cusps,
    "stabilizer": cmd_stabilizer,
    "abelianization": cmd_abelianization,
    "fixed-point": cmd_fixed_point,
    "class-group": cmd_class_group,
    "census": cmd_census,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="SU(3) 函数域实验室")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="配置文件路径（默认项目根目录 config.yaml）")
    common.add_argument("--out", type=str, default=None, help="输出目录")
    common.add_argument("--radius", type=int, default=None, help="覆盖 tree.radius")
    common.add_argument("--deg-bound", type=int, default=None, help="覆盖 search.deg_bound")
    common.add_argument("--seed", type=int, default=None, help="随机种子（仅性质测试使用）")
    common.add_argument("--progress", action="store_true", help="显示进度条")

    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "euler":
            p.add_argument("--allow-torsion", action="store_true", help="对 Γ 强制给出 l₀ − l₁")
        elif name == "cusps":
            p.add_argument("--window", type=int, default=None, help="窗口 n（缺省为半径）")
            p.add_argument("--anchor", type=int, default=None, help="锚点：标准公寓第 n 个顶点")
        elif name in ("stabilizer", "fixed-point"):
            p.add_argument("--vertex", type=int, default=0 if name == "stabilizer" else 2,
                           help="标准公寓顶点下标")
            if name == "stabilizer":
                p.add_argument("--elements", action="store_true", help="输出全部元素")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = RunConfig.from_overrides(load_config(args.config), radius=args.radius, deg_bound=args.deg_bound,
                                       out=args.out, seed=args.seed)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG

    _setup_logging(run)
    logger.info("=" * 50)
    logger.info(f"命令 {args.command}: {run.config.spec().label}, R = {run.config.tree.radius}")
    logger.info("=" * 50)

    try:
        COMMANDS[args.command](run, args)
    except Provisional as e:
        logger.warning(f"产物为 provisional: {e}")
        return EXIT_WINDOW
    except WindowExhausted as e:
        logger.error(f"窗口不足: {e}")
        return EXIT_WINDOW
    except InvariantViolation as e:
        logger.error(f"不变量失败: {e}")
        return EXIT_INVARIANT
    except LabError as e:
        logger.error(f"前置条件错误: {e}")
        return EXIT_CONFIG
    except ValueError as e:
        logger.error(f"参数错误: {e}")
        return EXIT_CONFIG
    logger.info(f"完成，结果保存在 {run.out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
