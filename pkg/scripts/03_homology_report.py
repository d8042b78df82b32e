#!/usr/bin/env python3
"""
同调报告脚本

对同余子群 Γ_J 在半径 min_run..R 上计算群图阿贝尔化与相对同调检验，
挠 p-秩随半径的增长与尖点滤过 p-秩逐一对照。
"""

import sys
from pathlib import Path

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from loguru import logger
from tabulate import tabulate

from src.config.settings import PROJECT_ROOT, get_config
from src.homology.relative import check_relative_homology
from src.pipeline.quotients import QuotientOptions
from src.utils.io import write_json, write_text


def print_report_table(reports: list):
    headers = ["R", "χ", "St 秩", "H₁ 相对秩", "自由秩", "圈秩", "挠 p-秩", "尖点 p-秩", "一致"]
    rows = [[r["radius"], r["chi"], r["steinberg_rank"], r["h1_rel_rank"], r["abelianization"]["free_rank"],
             r["cycle_rank"], len(r["abelianization"]["torsion_divisors"]), r["cusp_p_rank"], r["consistency"]]
            for r in reports]
    print("\n" + "=" * 80)
    print("相对同调检验")
    print("=" * 80)
    print(tabulate(rows, headers=headers, tablefmt="grid"))


def generate_markdown_report(reports: list, output_path: Path):
    """生成 Markdown 报告"""
    lines = ["# 同调报告\n"]
    lines.append("| R | χ | St 秩 | H₁ 相对秩 | 自由秩 | 挠因子个数 | 尖点 p-秩 | 一致 |")
    lines.append("|--|--|--|--|--|--|--|--|")
    for r in reports:
        lines.append(f"| {r['radius']} | {r['chi']} | {r['steinberg_rank']} | {r['h1_rel_rank']} | "
                     f"{r['abelianization']['free_rank']} | {len(r['abelianization']['torsion_divisors'])} | "
                     f"{r['cusp_p_rank']} | {r['consistency']} |")
    lines.append("\n## 未通过的检验\n")
    failed = [(r["radius"], name, c) for r in reports for name, c in r["checks"].items() if not c["ok"]]
    if not failed:
        lines.append("无")
    for R, name, c in failed:
        lines.append(f"- R = {R}: {name} {c}")
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

    spec = config.spec()
    if not spec.is_congruence:
        logger.error("同调报告需要同余子群（subgroup.kind = congruence）")
        sys.exit(2)

    options = QuotientOptions.from_config(config, progress=True)
    reports = []
    for R in range(options.min_run, config.tree.radius + 1):
        logger.info("=" * 50)
        logger.info(f"{spec.label} 相对同调, R = {R}")
        logger.info("=" * 50)
        reports.append(check_relative_homology(spec, R, options).to_dict())

    print_report_table(reports)
    write_json(PROJECT_ROOT / config.output.dir / "homology.json", {"subgroup": spec.to_dict(), "reports": reports})
    generate_markdown_report(reports, PROJECT_ROOT / "outputs" / "reports" / "homology.md")

    logger.info("=" * 50)
    logger.info("同调报告完成！")
    logger.info("=" * 50)


if __name__ == "__main__":
    main()
