"""
配置管理模块
"""

import os
from pathlib import Path
from typing import List, Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..algebra.finite_field import FqContext, get_fq, is_prime
from ..algebra.global_field import ExtensionContext
from ..algebra.ideals import BIdeal
from ..algebra.polynomials import Poly
from ..arithmetic.subgroups import SubgroupSpec
from ..utils.errors import ConfigError

SCHEMA_VERSION = 1


class ProjectConfig(BaseModel):
    """项目信息"""
    name: str = "su3-function-field-lab"
    version: str = "1.0.0"
    schema_version: int = SCHEMA_VERSION


class FieldConfig(BaseModel):
    """常数域 F_q, q = p^r"""
    p: int = 3
    r: int = 1
    modulus: Optional[List[int]] = None  # 小端系数，r > 1 时缺省自动选取

    @field_validator("p")
    @classmethod
    def check_characteristic(cls, p: int) -> int:
        if p == 2:
            raise ValueError("特征不能为 2（p 必须是奇素数）")
        if not is_prime(p):
            raise ValueError(f"p={p} 不是素数")
        return p

    @field_validator("r")
    @classmethod
    def check_degree(cls, r: int) -> int:
        if r < 1:
            raise ValueError(f"扩张次数 r={r} 必须为正")
        return r


class ExtensionConfig(BaseModel):
    """ℓ = k(ω), ω² = D(t)"""
    D: List[int] = Field(default_factory=lambda: [0, 1])  # 小端系数，默认 D = t


class SubgroupConfig(BaseModel):
    """子群：Γ 或主同余子群 Γ_J"""
    kind: Literal["gamma", "congruence"] = "congruence"
    # 每个生成元为 [a 的系数, b 的系数]，表示 a + bω；默认 J = ωB
    J: List[List[List[int]]] = Field(default_factory=lambda: [[[], [1]]])


class TreeConfig(BaseModel):
    """树与商图窗口"""
    radius: int = Field(default=4, ge=0)
    precision: int = Field(default=8, ge=1)
    precision_policy: Literal["doubling"] = "doubling"
    # 实测度数的回归记录（首次运行写入）
    valence_record: str = "outputs/results/valence_record.json"


class SearchConfig(BaseModel):
    """有限搜索的窗口与上限"""
    deg_bound: Optional[int] = Field(default=None, ge=0)
    max_enumeration: int = 200_000
    closure_bound: int = 100_000
    order_bound: int = 60
    max_image_order: int = 100_000
    boundary_scan_degree: int = 3
    min_run: int = 3


class ClassGroupConfig(BaseModel):
    """类群暴力计算"""
    norm_degree_bound: Optional[int] = None
    max_deg_D: int = 3


class LimitsConfig(BaseModel):
    """规模限制"""
    max_q: int = 9


class OutputConfig(BaseModel):
    """输出配置"""
    dir: str = "outputs/results"
    timestamp: bool = True


class LoggingConfig(BaseModel):
    """日志配置"""
    level: str = "INFO"
    file: str = "outputs/logs/app.log"
    rotation: str = "100 MB"
    retention: str = "7 days"


class Config(BaseModel):
    """全局配置"""
    project: ProjectConfig = Field(default_factory=ProjectConfig)
    field: FieldConfig = Field(default_factory=FieldConfig)
    extension: ExtensionConfig = Field(default_factory=ExtensionConfig)
    subgroup: SubgroupConfig = Field(default_factory=SubgroupConfig)
    tree: TreeConfig = Field(default_factory=TreeConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    class_group: ClassGroupConfig = Field(default_factory=ClassGroupConfig)
    limits: LimitsConfig = Field(default_factory=LimitsConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @model_validator(mode="after")
    def check_contexts(self) -> "Config":
        if self.project.schema_version != SCHEMA_VERSION:
            raise ValueError(f"不支持的 schema_version: {self.project.schema_version}")
        q = self.field.p ** self.field.r
        if q > self.limits.max_q:
            raise ValueError(f"q = {q} 超过上限 limits.max_q = {self.limits.max_q}")
        # 模多项式不可约、D 无平方因子且奇数次、J 为真理想，均在构造上下文时校验
        self.spec()
        return self

    # ---------- 领域对象 ----------

    def fq(self) -> FqContext:
        return get_fq(self.field.p, self.field.r, self.field.modulus)

    def ext(self) -> ExtensionContext:
        fq = self.fq()
        return ExtensionContext(fq, Poly.from_ints(fq, self.extension.D))

    def ideal(self) -> BIdeal:
        ext = self.ext()
        return BIdeal(ext, [ext.from_ints(*gen) for gen in self.subgroup.J])

    def spec(self) -> SubgroupSpec:
        if self.subgroup.kind == "gamma":
            return SubgroupSpec.gamma(self.ext())
        return SubgroupSpec.congruence(self.ideal())


class RunConfig(BaseModel):
    """一次命令运行：校验后的配置 + 命令行覆盖项"""
    config: Config
    out_dir: Path
    seed: Optional[int] = None

    @classmethod
    def from_overrides(
        cls,
        config: Config,
        radius: Optional[int] = None,
        deg_bound: Optional[int] = None,
        out: Optional[str] = None,
        seed: Optional[int] = None,
    ) -> "RunConfig":
        data = config.model_dump()
        if radius is not None:
            data["tree"]["radius"] = radius
        if deg_bound is not None:
            data["search"]["deg_bound"] = deg_bound
        try:
            merged = Config(**data)
        except ValidationError as e:
            raise ConfigError(_format_errors(e)) from None
        out_dir = Path(out) if out else PROJECT_ROOT / merged.output.dir
        return cls(config=merged, out_dir=out_dir, seed=seed)


# 项目根目录
PROJECT_ROOT = Path(__file__).parent.parent.parent


def _format_errors(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "config"
        parts.append(f"{loc}: {err['msg']}")
    return "配置校验失败: " + "; ".join(parts)


def load_config(config_path: Optional[str] = None) -> Config:
    """
    加载配置文件

    Args:
        config_path: 配置文件路径，默认为项目根目录下的 config.yaml

    Returns:
        Config: 配置对象

    Raises:
        ConfigError: 文件缺失或校验失败
    """
    # 加载环境变量
    load_dotenv()

    if config_path is None:
        config_path = PROJECT_ROOT / "config.yaml"
    if not Path(config_path).exists():
        raise ConfigError(f"配置文件不存在: {config_path}")

    with open(config_path, "r", encoding="utf-8") as f:
        config_data = yaml.safe_load(f) or {}

    # 替换 ${VAR_NAME} 与 ${VAR_NAME:-默认值} 格式的环境变量
    def replace_env(obj):
        if isinstance(obj, str):
            if obj.startswith("${") and obj.endswith("}"):
                name, sep, default = obj[2:-1].partition(":-")
                return os.getenv(name, default if sep else obj)
            return obj
        elif isinstance(obj, dict):
            return {k: replace_env(v) for k, v in obj.items()}
        elif isinstance(obj, list):
            return [replace_env(item) for item in obj]
        return obj

    config_data = replace_env(config_data)

    try:
        return Config(**config_data)
    except ValidationError as e:
        raise ConfigError(_format_errors(e)) from None


# 全局配置实例
_global_config: Optional[Config] = None


def get_config() -> Config:
    """获取全局配置实例"""
    global _global_config
    if _global_config is None:
        _global_config = load_config()
    return _global_config


if __name__ == "__main__":
    config = get_config()
    print(f"项目: {config.project.name} v{config.project.version}")
    print(f"F_{config.field.p ** config.field.r}, D = {config.extension.D}, 子群 {config.subgroup.kind}")
    print(f"半径 R = {config.tree.radius}")
