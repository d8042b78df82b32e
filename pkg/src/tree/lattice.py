"""
格模型：树的顶点 = 近自对偶格类

格以 ℓ 上的列基精确存储。Hermite 形式以规范对角元 μ_e 为主元，
非对角元约化为其"极部截断"，因此规范形是结构化可比较的。
"""

from typing import Dict, List, Optional, Sequence, Tuple

from ..algebra.global_field import EllElem, ExtensionContext, val_Q
from ..algebra.matrices import (
    Mat,
    antidiagonal,
    columns,
    conj_transpose,
    diagonal,
    from_columns,
    identity,
    inverse3,
    is_integral,
    mat_key,
    mat_mul,
    mat_scale,
)
from ..group.unitary import UMatrix
from ..utils.errors import InvariantViolation, PreconditionError
from .local_field import local_digits, serialize_precision, truncate


class NotAVertex(PreconditionError):
    """格类不是树的顶点（不存在可容许的 ρ 幂缩放）"""


class Lattice:
    """
    O_E-格（列基，可多于 3 列作为生成元组）

    Args:
        basis: 3×n 矩阵（行优先）
    """

    __slots__ = ("basis", "_hnf", "_exps")

    def __init__(self, basis: Mat):
        self.basis: Mat = tuple(tuple(r) for r in basis)
        self._hnf: Optional[Mat] = None
        self._exps: Optional[Tuple[int, int, int]] = None

    @property
    def ext(self) -> ExtensionContext:
        return self.basis[0][0].ext

    def _reduce(self):
        if self._hnf is None:
            self._hnf, self._exps = hermite_form(self.basis)

    @property
    def hnf(self) -> Mat:
        self._reduce()
        return self._hnf

    @property
    def exps(self) -> Tuple[int, int, int]:
        """对角元赋值 (e₀, e₁, e₂)"""
        self._reduce()
        return self._exps

    @property
    def volume(self) -> int:
        """val_Q(det)"""
        return sum(self.exps)

    @property
    def key(self) -> Tuple:
        return mat_key(self.hnf)

    def __eq__(self, other) -> bool:
        return isinstance(other, Lattice) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def scaled(self, c: EllElem) -> "Lattice":
        return Lattice(mat_scale(self.basis, c))

    def transformed(self, g: Mat) -> "Lattice":
        return Lattice(mat_mul(g, self.basis))


def hermite_form(basis: Mat) -> Tuple[Mat, Tuple[int, int, int]]:
    """
    列 Hermite 形式：上三角，对角元 μ_{e_i}，(r, c) 元（r < c）为模 μ_{e_r} 的截断代表

    Raises:
        PreconditionError: 生成元不张成满秩格
    """
    ext = basis[0][0].ext
    cols = [list(c) for c in columns(basis)]
    cols = [c for c in cols if any(not x.is_zero() for x in c)]
    placed: List[Optional[List[EllElem]]] = [None, None, None]
    exps = [0, 0, 0]

    for i in (2, 1, 0):
        cand = [(val_Q(c[i]), k) for k, c in enumerate(cols) if not c[i].is_zero()]
        if not cand:
            raise PreconditionError(f"第 {i} 行没有非零元，生成元不张成满秩格")
        e, k = min(cand)
        pivot = cols.pop(k)
        mu = ext.mu(e)
        scale = mu / pivot[i]
        pivot = [x * scale for x in pivot]
        mu_inv = mu.inverse()
        rest = []
        for c in cols:
            x = c[i]
            if not x.is_zero():
                f = x * mu_inv
                c = [a - f * b for a, b in zip(c, pivot)]
            rest.append(c)
        cols = rest
        placed[i] = pivot
        exps[i] = int(e)

    if any(not x.is_zero() for c in cols for x in c):
        raise InvariantViolation("Hermite 消元后仍有非零剩余列")

    for c in (1, 2):
        for r in range(c - 1, -1, -1):
            x = placed[c][r]
            tr = truncate(x, exps[r])
            if tr != x:
                y = (x - tr) * ext.mu(exps[r]).inverse()
                placed[c] = [a - y * b for a, b in zip(placed[c], placed[r])]
                placed[c][r] = tr
    return from_columns(placed), tuple(exps)


def lattice_hnf(L: Lattice) -> Lattice:
    """规范 Hermite 形式，幂等"""
    out = Lattice(L.hnf)
    out._hnf, out._exps = L.hnf, L.exps
    return out


def dual_lattice(L: Lattice) -> Lattice:
    """L^# = {x : h(x, y) ∈ O_E ∀ y ∈ L}，基为 H·(M*)^{-1}"""
    M = L.hnf
    H = antidiagonal(L.ext, [L.ext.one] * 3)
    return Lattice(mat_mul(H, inverse3(conj_transpose(M))))


def lattice_contains(L: Lattice, N: Lattice) -> bool:
    """N ⊆ L 当且仅当 M_L^{-1}·M_N 整"""
    return is_integral(mat_mul(inverse3(L.hnf), N.hnf))


class Vertex:
    """
    树的顶点：规范缩放后的近自对偶格 ρL^# ⊆ L ⊆ L^#

    Args:
        lat: 规范形格
        type_parity: 0（自对偶）或 1（L^#/L 长度 2）
        frame: 可选的 g ∈ 𝒢(k)，满足 v = g·v_type
    """

    __slots__ = ("lat", "type_parity", "frame")

    def __init__(self, lat: Lattice, type_parity: int, frame: Optional[UMatrix] = None):
        self.lat = lat
        self.type_parity = type_parity
        self.frame = frame

    @property
    def ext(self) -> ExtensionContext:
        return self.lat.ext

    @property
    def key(self) -> Tuple:
        return self.lat.key

    @property
    def basis(self) -> Mat:
        return self.lat.hnf

    def __eq__(self, other) -> bool:
        return isinstance(other, Vertex) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def sort_key(self) -> Tuple:
        return (self.type_parity, self.lat.exps, tuple(x.sort_key() for x in self.key))

    def __repr__(self) -> str:
        return f"Vertex(type={self.type_parity}, exps={self.lat.exps})"

    def to_json(self, prec: int = 8, policy: str = "doubling") -> Dict:
        M = self.basis
        prec = serialize_precision([x for row in M for x in row], prec, policy)
        return {
            "type_parity": self.type_parity,
            "exps": list(self.lat.exps),
            "prec": prec,
            "basis": [[local_digits(x, prec) for x in row] for row in M],
        }


def vertex_normalize(L: Lattice, frame: Optional[UMatrix] = None, verify: bool = True) -> Vertex:
    """
    唯一的缩放规范代表

    vol = Σ e_i。缩放 ρ^{-k} 使 vol 变为 vol − 3k；只有 vol mod 3 ∈ {0, 1} 的类
    可能满足 ρL^# ⊆ L ⊆ L^#。

    Raises:
        NotAVertex: 没有可容许的缩放
    """
    ext = L.ext
    vol = L.volume
    k, parity = divmod(vol, 3)
    if parity == 2:
        raise NotAVertex(f"格体积 {vol} ≡ 2 (mod 3)，不是顶点")
    if k:
        L = L.scaled(ext.rho ** (-k))
        if L.volume != parity:
            raise InvariantViolation(f"缩放后体积 {L.volume} ≠ {parity}")
    else:
        L = lattice_hnf(L)
    if verify:
        D = dual_lattice(L)
        if not (lattice_contains(D, L) and lattice_contains(L, D.scaled(ext.rho))):
            raise NotAVertex(f"格不满足 ρL^# ⊆ L ⊆ L^#（exps={L.exps}）")
    return Vertex(L, parity, frame)


# ---------------------------------------------------------------------------
# 标准公寓
# ---------------------------------------------------------------------------


def type_basis(ext: ExtensionContext, parity: int) -> Mat:
    """v₀ = O_E³，v₁ = diag(1, 1, ρ)"""
    if parity == 0:
        return identity(ext)
    return diagonal(ext, [ext.one, ext.one, ext.rho])


def apartment_lattice(ext: ExtensionContext, i: int) -> Lattice:
    """diag(μ_{−⌊i/2⌋}, 1, μ_{⌈i/2⌉})"""
    lo, hi = -(i // 2), -((-i) // 2)
    return Lattice(diagonal(ext, [ext.mu(lo), ext.one, ext.mu(hi)]))


def residue_matrix(A: Mat) -> Tuple[Tuple[int, ...], ...]:
    """整矩阵模 ρ 的剩余"""
    from .local_field import residue

    return tuple(tuple(residue(x) for x in row) for row in A)


def relative_basis(u: Vertex, g: Sequence[Sequence[EllElem]]) -> Mat:
    """M_u^{-1}·g"""
    return mat_mul(inverse3(u.basis), tuple(tuple(r) for r in g))
