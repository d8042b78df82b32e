#!/usr/bin/env python3
"""
商图脚本

1. Γ\\X：尖点射线计数与 Pic(B) 比较；
2. Γ_J\\X：逐半径的欧拉报告（l₀、l₁、χ、部分和、配对抵消）；
3. 乘法性：χ(Γ_{J²}) 与 [Γ_J : Γ_{J²}]·χ(Γ_J)。
"""

import sys
from pathlib import Path

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from loguru import logger
from tabulate import tabulate

from src.algebra.ideals import class_group
from src.arithmetic.subgroups import SubgroupSpec
from src.config.settings import PROJECT_ROOT, get_config
from src.pipeline.quotients import QuotientOptions, cusp_census, euler_for, nested_index, quotient_for
from src.utils.errors import WindowExhausted
from src.utils.io import write_json, write_text


def gamma_quotient(config, options: QuotientOptions) -> dict:
    """Γ 的商图与尖点普查"""
    ext = config.ext()
    R = max(config.tree.radius, options.min_run)
    logger.info("=" * 50)
    logger.info(f"Γ\\X, R = {R}")
    logger.info("=" * 50)
    run = quotient_for(SubgroupSpec.gamma(ext), R, options)
    pic = class_group(ext, config.class_group.norm_degree_bound, config.class_group.max_deg_D)
    write_text(PROJECT_ROOT / config.output.dir / "gamma_quotient.dot", run.graph.to_dot())
    return {"summary": run.summary(), "cusp_census": cusp_census(run, pic),
            "stabilizer_orders": [v.stab_order for v in run.graph.vertices]}


def euler_series(spec: SubgroupSpec, radius: int, options: QuotientOptions) -> list:
    """半径 1..R 的欧拉报告"""
    rows = []
    for R in range(1, radius + 1):
        logger.info("=" * 50)
        logger.info(f"{spec.label} 欧拉报告, R = {R}")
        logger.info("=" * 50)
        report, run = euler_for(spec, R, options)
        rows.append({**report.to_dict(), "index": run.index, "is_tree": run.graph.is_tree()})
    return rows


def multiplicativity(config, options: QuotientOptions, radius: int) -> dict:
    """χ(Γ_{J²}) = [Γ_J : Γ_{J²}]·χ(Γ_J)"""
    spec = config.spec()
    square = SubgroupSpec.congruence(spec.J * spec.J)
    chi_J, run = euler_for(spec, radius, options)
    try:
        chi_J2, _ = euler_for(square, radius, options)
        index = nested_index(run.walk, spec, square, options.max_image_order)
    except WindowExhausted as e:
        logger.warning(f"J² 的计算超出窗口: {e}")
        return {"radius": radius, "skipped": str(e)}
    return {
        "radius": radius,
        "chi_J": chi_J.chi,
        "chi_J2": chi_J2.chi,
        "index": index,
        "holds": chi_J2.chi == index * chi_J.chi,
        "stability": [chi_J.stability, chi_J2.stability],
    }


def print_euler_table(rows: list):
    headers = ["R", "l0", "l1", "χ", "部分和", "残差", "配对", "稳定性"]
    table = [[r["radius"], r["l0"], r["l1"], r["chi"],
              f"{r['eq1_partial']['num']}/{r['eq1_partial']['den']}",
              f"{r['cancellation_residual']['num']}/{r['cancellation_residual']['den']}",
              r["matched"], r["stability"]] for r in rows]
    print("\n" + "=" * 80)
    print("欧拉报告")
    print("=" * 80)
    print(tabulate(table, headers=headers, tablefmt="grid"))


def generate_markdown_report(result: dict, output_path: Path):
    """生成 Markdown 报告"""
    lines = ["# 商图报告\n", "## Γ\\X\n"]
    g = result["gamma"]
    for k, v in g["summary"].items():
        lines.append(f"- {k}: {v}")
    lines.append(f"- 尖点普查: {g['cusp_census']}")
    lines.append("\n## Γ_J\\X 欧拉报告\n")
    lines.append("| R | l0 | l1 | χ | 配对 | 稳定性 |")
    lines.append("|--|--|--|--|--|--|")
    for r in result["euler"]:
        lines.append(f"| {r['radius']} | {r['l0']} | {r['l1']} | {r['chi']} | {r['matched']} | {r['stability']} |")
    if result.get("multiplicativity"):
        lines.append("\n## 乘法性\n")
        for k, v in result["multiplicativity"].items():
            lines.append(f"- {k}: {v}")
    write_text(output_path, "\n".join(lines) + "\n")


def main():
    """主函数"""
    config = get_config()

    logger.add(
        config.logging.file,
        rotation=config.logging.rotation,
        retention=config.logging.retention,
        level=config.logging.level
    )

    options = QuotientOptions.from_config(config, progress=True)
    spec = config.spec()
    R = config.tree.radius

    result = {"gamma": gamma_quotient(config, options)}
    if spec.is_congruence:
        result["euler"] = euler_series(spec, R, options)
        print_euler_table(result["euler"])
        result["multiplicativity"] = multiplicativity(config, options, min(R, 3))
    else:
        result["euler"] = []

    write_json(PROJECT_ROOT / config.output.dir / "quotients.json", result)
    generate_markdown_report(result, PROJECT_ROOT / "outputs" / "reports" / "quotients.md")

    logger.info("=" * 50)
    logger.info("商图计算完成！")
    logger.info("=" * 50)


if __name__ == "__main__":
    main()
