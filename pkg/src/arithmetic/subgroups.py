"""
算术群 Γ = 𝒢(A) 与主同余子群 Γ_J
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from loguru import logger

from ..algebra.global_field import ExtensionContext
from ..algebra.ideals import BIdeal
from ..group.unitary import UMatrix, mk_identity
from ..utils.errors import InvariantViolation, PreconditionError

FULL_GAMMA = "gamma"
CONGRUENCE = "congruence"


@dataclass(frozen=True)
class SubgroupSpec:
    """
    子群描述

    Attributes:
        kind: "gamma" 或 "congruence"
        J: 同余理想（仅 congruence）
    """
    ext: ExtensionContext
    kind: str = FULL_GAMMA
    J: Optional[BIdeal] = None

    def __post_init__(self):
        if self.kind not in (FULL_GAMMA, CONGRUENCE):
            raise PreconditionError(f"未知子群类型: {self.kind}")
        if self.kind == CONGRUENCE:
            if self.J is None:
                raise PreconditionError("同余子群必须给出理想 J")
            if self.J.is_unit():
                raise PreconditionError("J = B 不是真理想")
        elif self.J is not None:
            raise PreconditionError("Γ 不带理想参数")

    @classmethod
    def gamma(cls, ext: ExtensionContext) -> "SubgroupSpec":
        return cls(ext, FULL_GAMMA)

    @classmethod
    def congruence(cls, J: BIdeal) -> "SubgroupSpec":
        return cls(J.ext, CONGRUENCE, J)

    @property
    def is_congruence(self) -> bool:
        return self.kind == CONGRUENCE

    @property
    def label(self) -> str:
        if not self.is_congruence:
            return "Gamma"
        return f"Gamma_J(a={self.J.a!r}, b={self.J.b!r}, c={self.J.c!r})"

    def to_dict(self) -> Dict:
        out: Dict = {"kind": self.kind}
        if self.J is not None:
            out["J"] = self.J.to_json()
        return out


def is_member(g: UMatrix, spec: SubgroupSpec) -> bool:
    """Γ：全部元素属于 B；Γ_J：另有 g ≡ I (mod J)"""
    if not g.is_integral_B():
        return False
    if not spec.is_congruence:
        return True
    one = spec.ext.one
    for i, row in enumerate(g.rows):
        for j, x in enumerate(row):
            if not spec.J.contains(x - one if i == j else x):
                return False
    return True


def closure(gens: Sequence[UMatrix], bound: int, within: Optional[set] = None) -> List[UMatrix]:
    """
    右乘 BFS 闭包

    Args:
        bound: 阶上限，超过时抛出 InvariantViolation（调用方应已知群有限）
        within: 已知的全集，闭包跑出该集合时报告不变量失败
    """
    one = mk_identity(gens[0].ext) if gens else None
    if one is None:
        return []
    seen = {one}
    order = [one]
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x * g
            if y in seen:
                continue
            if within is not None and y not in within:
                raise InvariantViolation("元素集合对乘法不封闭")
            seen.add(y)
            order.append(y)
            queue.append(y)
            if len(seen) > bound:
                raise InvariantViolation(f"闭包阶超过 {bound}")
    return order


def greedy_generators(elements: Sequence[UMatrix]) -> List[UMatrix]:
    """
    按确定顺序挑选生成元，并验证元素集合是一个群

    Raises:
        InvariantViolation: 集合不封闭，或生成的群小于集合
    """
    if not elements:
        raise InvariantViolation("空集合不是群")
    pool = set(elements)
    ordered = sorted(elements, key=UMatrix.sort_key)
    gens: List[UMatrix] = []
    span = {mk_identity(ordered[0].ext)}
    if not span <= pool:
        raise InvariantViolation("集合不含单位元")
    for x in ordered:
        if x in span:
            continue
        gens.append(x)
        span = set(closure(gens, len(pool), within=pool))
    if span != pool:
        raise InvariantViolation(f"生成的群阶 {len(span)} ≠ 集合大小 {len(pool)}")
    return gens


@dataclass
class FiniteSubgroup:
    """
    有限子群（元素全集 + 生成元）

    Attributes:
        certification: lattice-exact / stable-at-d / window-d
    """
    elements: List[UMatrix]
    gens: List[UMatrix] = field(default_factory=list)
    certification: str = "lattice-exact"
    degbound: Optional[int] = None

    def __post_init__(self):
        self._set = set(self.elements)

    @classmethod
    def from_elements(cls, elements: Iterable[UMatrix], certification: str = "lattice-exact",
                      degbound: Optional[int] = None) -> "FiniteSubgroup":
        elems = sorted(set(elements), key=UMatrix.sort_key)
        gens = greedy_generators(elems)
        logger.debug(f"有限子群: 阶 {len(elems)}, 生成元 {len(gens)} 个")
        return cls(elems, gens, certification, degbound)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: UMatrix) -> bool:
        return g in self._set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def subgroup(self, predicate) -> "FiniteSubgroup":
        """满足谓词的元素构成的子群（谓词须定义一个子群）"""
        return FiniteSubgroup.from_elements([g for g in self.elements if predicate(g)], self.certification,
                                            self.degbound)

    def to_dict(self, with_elements: bool = False) -> Dict:
        out = {
            "order": self.order,
            "certification": self.certification,
            "degbound": self.degbound,
            "generators": [g.to_json() for g in self.gens],
        }
        if with_elements:
            out["elements"] = [g.to_json() for g in self.elements]
        return out
