"""
结果输出：JSON、DOT 与汇总表
"""

import json
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from loguru import logger
from tabulate import tabulate


def frac_json(x: Fraction) -> Dict[str, str]:
    """精确有理数 → {"num", "den"}"""
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _default(obj):
    if isinstance(obj, Fraction):
        return frac_json(obj)
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"无法序列化的对象: {type(obj).__name__}")


def write_json(path: Path, data: Dict, timestamp: bool = True) -> Path:
    """写出 JSON；timestamp 为唯一的非确定性字段"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = dict(data)
    if timestamp:
        payload["timestamp"] = datetime.now().isoformat(timespec="seconds")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2, default=_default)
    logger.info(f"已保存: {path}")
    return path


def read_json(path: Path) -> Dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"已保存: {path}")
    return path


def summary_table(rows: Sequence[Sequence], headers: Sequence[str]) -> str:
    return tabulate(rows, headers=headers, tablefmt="grid")


def write_summary(path: Path, title: str, sections: List[Dict], extra: Optional[str] = None) -> Path:
    """
    summary.txt：每节一个 {"title", "headers", "rows"} 表格
    """
    lines = [title, "=" * len(title), ""]
    for sec in sections:
        lines.append(f"## {sec['title']}")
        lines.append(summary_table(sec["rows"], sec["headers"]))
        lines.append("")
    if extra:
        lines.append(extra)
    return write_text(path, "\n".join(lines) + "\n")
