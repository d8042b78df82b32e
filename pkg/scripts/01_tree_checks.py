#!/usr/bin/env python3
"""
树层检查脚本

在配置给出的 F_q、D 上：
  1. 构造半径 0..R 的球，检查连通无圈与各类型顶点的度数；
  2. 检查环面平移、s 翻转在标准公寓上的作用；
  3. 对若干同余稳定子求唯一不动边界点，并用有界扫描做唯一性旁证；
  4. 计算 Pic(B)，与曲线点数比较（亏格 1）。
"""

import sys
from pathlib import Path

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from loguru import logger
from tabulate import tabulate
from tqdm import tqdm

from src.algebra.ideals import class_group, curve_point_count
from src.arithmetic.search import stabilizer
from src.config.settings import PROJECT_ROOT, get_config
from src.group.unitary import fixed_boundary_point, fixed_points_in_scan, mk_s, mk_torus
from src.tree.building import apartment_vertex, build_ball, regress_valence, tree_act
from src.utils.io import write_json, write_text


def ball_checks(ext, radius: int) -> list:
    """各半径的球：顶点数、是否为树、各类型内部顶点的实测度数"""
    rows = []
    for R in range(radius + 1):
        ball = build_ball(ext, R)
        rows.append({
            "radius": R,
            "vertices": len(ball),
            "is_tree": ball.is_tree(),
            "valence": ball.measured_valence(),
        })
    return rows


def apartment_checks(ext, span: int) -> dict:
    """ã(t) 把第 i 个顶点送到 i − 2·val_Q(t)，s 把 i 送到 −i"""
    t = ext.t
    shift = -2 * t.val_Q()
    torus = mk_torus(t)
    s = mk_s(ext)
    bad_torus, bad_flip = [], []
    for i in range(-span, span + 1):
        v = apartment_vertex(ext, i)
        if tree_act(torus, v) != apartment_vertex(ext, i + shift):
            bad_torus.append(i)
        if tree_act(s, v) != apartment_vertex(ext, -i):
            bad_flip.append(i)
    return {"span": span, "torus_shift": shift, "torus_failures": bad_torus, "flip_failures": bad_flip}


def fixed_point_checks(config, vertices: range) -> list:
    """同余子群在标准公寓顶点上的稳定子：唯一不动边界点"""
    spec = config.spec()
    if not spec.is_congruence:
        logger.warning("子群为 Γ，跳过不动点检查（需要 p-群）")
        return []
    ext = config.ext()
    rows = []
    for n in tqdm(vertices, desc="不动点"):
        K = stabilizer(apartment_vertex(ext, n), spec, config.search.deg_bound, config.search.max_enumeration)
        if K.is_trivial():
            continue
        xi = fixed_boundary_point(K.gens, bound=K.order)
        scan = fixed_points_in_scan(K.gens, config.search.boundary_scan_degree)
        rows.append({"vertex": n, "order": K.order, "point": xi.to_json(),
                     "unique_in_scan": all(x == xi for x in scan)})
    return rows


def class_group_check(config) -> dict:
    ext = config.ext()
    pic = class_group(ext, config.class_group.norm_degree_bound, config.class_group.max_deg_D)
    out = {"order": pic.order}
    if ext.d == 3:
        out["curve_point_count"] = curve_point_count(ext)
    return out


def generate_markdown_report(result: dict, output_path: Path):
    """生成 Markdown 报告"""
    lines = ["# 树层检查报告\n", "## 球\n"]
    lines.append(tabulate([[r["radius"], r["vertices"], r["is_tree"], r["valence"][0], r["valence"][1]]
                           for r in result["balls"]],
                          headers=["R", "顶点数", "树", "类型 0 度数", "类型 1 度数"], tablefmt="github"))
    ap = result["apartment"]
    lines.append(f"\n度数记录: {result['valence_record']}\n")
    lines.append("\n## 标准公寓\n")
    lines.append(f"- 环面平移量: {ap['torus_shift']}，失败: {ap['torus_failures'] or '无'}")
    lines.append(f"- s 翻转失败: {ap['flip_failures'] or '无'}")
    lines.append("\n## 不动边界点\n")
    for r in result["fixed_points"]:
        lines.append(f"- 顶点 {r['vertex']}: |K| = {r['order']}, 扫描唯一: {r['unique_in_scan']}")
    lines.append("\n## Pic(B)\n")
    lines.append(f"- 阶: {result['class_group']['order']}")
    if "curve_point_count" in result["class_group"]:
        lines.append(f"- 曲线点数: {result['class_group']['curve_point_count']}")
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

    results_dir = PROJECT_ROOT / config.output.dir
    reports_dir = PROJECT_ROOT / "outputs" / "reports"
    ext = config.ext()
    R = config.tree.radius

    logger.info("=" * 50)
    logger.info(f"树层检查: {ext!r}, R = {R}")
    logger.info("=" * 50)

    balls = ball_checks(ext, R)
    # 首次运行写入，之后与记录比较
    record = regress_valence(PROJECT_ROOT / config.tree.valence_record, ext, balls[-1]["valence"])

    result = {
        "field": config.field.model_dump(),
        "extension": config.extension.model_dump(),
        "balls": balls,
        "valence_record": record,
        "apartment": apartment_checks(ext, 2 * R),
        "fixed_points": fixed_point_checks(config, range(1, R + 1)),
        "class_group": class_group_check(config),
    }

    print(tabulate([[r["radius"], r["vertices"], r["is_tree"]] for r in result["balls"]],
                   headers=["R", "顶点数", "树"], tablefmt="grid"))

    write_json(results_dir / "tree_checks.json", result)
    generate_markdown_report(result, reports_dir / "tree_checks.md")

    logger.info("=" * 50)
    logger.info("树层检查完成！")
    logger.info("=" * 50)


if __name__ == "__main__":
    main()
