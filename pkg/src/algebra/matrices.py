"""
ℓ 上的小矩阵运算（行优先元组）
"""

from typing import List, Optional, Sequence, Tuple

from .global_field import EllElem, ExtensionContext, val_Q
from .polynomials import VAL_INF

Vec = Tuple[EllElem, ...]
Mat = Tuple[Tuple[EllElem, ...], ...]


def identity(ext: ExtensionContext, n: int = 3) -> Mat:
    z, o = ext.zero, ext.one
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def diagonal(ext: ExtensionContext, entries: Sequence[EllElem]) -> Mat:
    z = ext.zero
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else z for j in range(n)) for i in range(n))


def antidiagonal(ext: ExtensionContext, entries: Sequence[EllElem]) -> Mat:
    """entries[i] 放在 (i, n-1-i)"""
    z = ext.zero
    n = len(entries)
    return tuple(tuple(entries[i] if j == n - 1 - i else z for j in range(n)) for i in range(n))


def mat_mul(A: Mat, B: Mat) -> Mat:
    ncols = len(B[0])
    inner = len(B)
    out = []
    for row in A:
        new_row = []
        for j in range(ncols):
            acc = None
            for k in range(inner):
                x = row[k]
                if x.is_zero():
                    continue
                y = B[k][j]
                if y.is_zero():
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            new_row.append(acc if acc is not None else row[0].ext.zero)
        out.append(tuple(new_row))
    return tuple(out)


def mat_vec(A: Mat, v: Sequence[EllElem]) -> Vec:
    out = []
    for row in A:
        acc = v[0].ext.zero
        for x, y in zip(row, v):
            if not x.is_zero() and not y.is_zero():
                acc = acc + x * y
        out.append(acc)
    return tuple(out)


def mat_add(A: Mat, B: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A: Mat, B: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(A: Mat, c: EllElem) -> Mat:
    return tuple(tuple(x * c for x in row) for row in A)


def conj_transpose(A: Mat) -> Mat:
    return tuple(tuple(x.conj() for x in col) for col in zip(*A))


def columns(A: Mat) -> List[Vec]:
    return [tuple(col) for col in zip(*A)]


def from_columns(cols: Sequence[Sequence[EllElem]]) -> Mat:
    return tuple(zip(*cols))


def det3(A: Mat) -> EllElem:
    (a, b, c), (d, e, f), (g, h, i) = A
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def inverse3(A: Mat) -> Mat:
    """伴随矩阵求逆，不可逆时抛出 ZeroDivisionError"""
    (a, b, c), (d, e, f), (g, h, i) = A
    co = (
        (e * i - f * h, -(d * i - f * g), d * h - e * g),
        (-(b * i - c * h), a * i - c * g, -(a * h - b * g)),
        (b * f - c * e, -(a * f - c * d), a * e - b * d),
    )
    det = a * co[0][0] + b * co[0][1] + c * co[0][2]
    if det.is_zero():
        raise ZeroDivisionError("矩阵不可逆")
    inv_det = det.inverse()
    return tuple(tuple(co[j][i] * inv_det for j in range(3)) for i in range(3))


def is_identity(A: Mat) -> bool:
    return all(
        (A[i][j].is_one() if i == j else A[i][j].is_zero())
        for i in range(len(A))
        for j in range(len(A[0]))
    )


def is_upper_triangular(A: Mat) -> bool:
    return all(A[i][j].is_zero() for i in range(len(A)) for j in range(min(i, len(A[0]))))


def min_val(A: Mat):
    """全部元素的最小 val_Q（零矩阵为 +∞）"""
    return min((val_Q(x) for row in A for x in row if not x.is_zero()), default=VAL_INF)


def is_integral(A: Mat) -> bool:
    """全部元素属于 O_E"""
    return all(x.is_zero() or val_Q(x) >= 0 for row in A for x in row)


def mat_key(A: Mat) -> Tuple:
    return tuple(x for row in A for x in row)


def kernel(rows: Sequence[Sequence[EllElem]]) -> List[Vec]:
    """ℓ 上齐次方程组 rows·x = 0 的解空间基"""
    if not rows:
        raise ValueError("空方程组")
    ncols = len(rows[0])
    ext = rows[0][0].ext
    work = [list(r) for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pr: Optional[int] = next((i for i in range(r, len(work)) if not work[i][c].is_zero()), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = work[r][c].inverse()
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and not work[i][c].is_zero():
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = [ext.zero] * ncols
        v[f] = ext.one
        for row, pc in zip(work[:r], pivots):
            v[pc] = -row[f]
        basis.append(tuple(v))
    return basis


def hermitian_form(x: Sequence[EllElem], y: Sequence[EllElem]) -> EllElem:
    """h(x, y) = Σ x_k · conj(y_{2-k})，Gram 矩阵为反对角单位阵"""
    acc = x[0].ext.zero
    for k in range(3):
        xk, yk = x[k], y[2 - k]
        if not xk.is_zero() and not yk.is_zero():
            acc = acc + xk * yk.conj()
    return acc
