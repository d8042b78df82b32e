"""
SU(3) 矩阵模型：构造、Bruhat 分解、边界作用与不动点
"""

import pytest

from src.algebra.matrices import det3, inverse3
from src.algebra.polynomials import Poly, RatF
from src.group.unitary import (
    BPoint,
    IsoLine,
    UMatrix,
    boundary_act,
    boundary_line,
    bruhat_decompose,
    commutator,
    fixed_boundary_point,
    fixed_points_in_scan,
    fixes_boundary_point,
    group_closure,
    is_unipotent,
    is_unitary,
    line_boundary,
    matrix_order,
    mk_guv,
    mk_identity,
    mk_s,
    mk_torus,
    mk_ua,
)
from src.utils.errors import PreconditionError

from .conftest import random_elem, random_poly


def real_part(ext, u):
    """−N(u)/2，使 (u, −N(u)/2) ∈ H(ℓ,k)"""
    fq = ext.fq
    return ext.elem(u.norm().scale(fq.neg_table[fq.half]))


def random_pair(rng, ext):
    """H(ℓ,k) 中的随机点：v = −N(u)/2 + wω"""
    u = random_elem(rng, ext)
    w = random_elem(rng, ext).a
    return u, real_part(ext, u) + ext.elem(RatF.zero(ext.fq), w)


def random_integral_pair(rng, ext, max_deg=1):
    """B-整的 (u, v) ∈ H(ℓ,k)，排除 (0, 0)"""
    while True:
        u = random_elem(rng, ext, max_deg=max_deg, integral=True)
        w = random_poly(rng, ext.fq, max_deg)
        if not (u.is_zero() and w.is_zero()):
            return u, real_part(ext, u) + ext.from_polys(Poly.zero(ext.fq), w)


def random_integral_unitary(rng, ext, length=3):
    """u_a(B-整)、s 与 ã(t^{±1}) 的随机乘积，分母只含 t 的幂"""
    torus = [mk_torus(ext.t), mk_torus(ext.t).inverse()]
    g = mk_identity(ext)
    for _ in range(length):
        g = g * mk_ua(*random_integral_pair(rng, ext)) * mk_s(ext)
        if rng.random() < 0.5:
            g = g * rng.choice(torus)
    return g


def random_unitary(rng, ext, length=4):
    g = mk_identity(ext)
    for _ in range(length):
        u, v = random_pair(rng, ext)
        g = g * mk_ua(u, v) * mk_s(ext)
        x = random_elem(rng, ext)
        if not x.is_zero():
            g = g * mk_torus(x)
    return g


class TestConstructors:

    def test_generators_are_unitary(self, ext_t, rng):
        u, v = random_pair(rng, ext_t)
        assert is_unitary(mk_ua(u, v).rows)
        assert is_unitary(mk_torus(ext_t.t).rows)
        assert is_unitary(mk_s(ext_t).rows)

    def test_ua_requires_hpair(self, ext_t):
        with pytest.raises(PreconditionError):
            mk_ua(ext_t.one, ext_t.zero)

    def test_non_unitary_rejected(self, ext_t):
        z, o, t = ext_t.zero, ext_t.one, ext_t.t
        with pytest.raises(PreconditionError):
            UMatrix(((t, z, z), (z, o, z), (z, z, o)))

    def test_torus_rejects_zero(self, ext_t):
        with pytest.raises(PreconditionError):
            mk_torus(ext_t.zero)

    def test_products_stay_unitary(self, ext_cubic, rng):
        for _ in range(5):
            g = random_unitary(rng, ext_cubic)
            assert is_unitary(g.rows)
            assert det3(g.rows).is_one()

    def test_inverse(self, ext_t, rng):
        for _ in range(5):
            g = random_unitary(rng, ext_t)
            assert (g * g.inverse()).is_identity()
            assert g.inverse().rows == inverse3(g.rows)

    def test_s_is_involution(self, ext_t):
        s = mk_s(ext_t)
        assert (s * s).is_identity()
        assert matrix_order(s, 4) == 2

    def test_ua_is_unipotent(self, ext_t, rng):
        u, v = random_pair(rng, ext_t)
        assert is_unipotent(mk_ua(u, v))
        assert not is_unipotent(mk_s(ext_t))

    def test_ua_composition(self, ext_t, rng):
        """u_a(u,v)·u_a(u',v') = u_a(u+u', v+v'−ū·u')"""
        u1, v1 = random_pair(rng, ext_t)
        u2, v2 = random_pair(rng, ext_t)
        prod = mk_ua(u1, v1) * mk_ua(u2, v2)
        assert prod == mk_ua(u1 + u2, v1 + v2 - u1.conj() * u2)

    def test_commutator_of_ua_is_central(self, ext_t, rng):
        u1, v1 = random_pair(rng, ext_t)
        u2, v2 = random_pair(rng, ext_t)
        c = commutator(mk_ua(u1, v1), mk_ua(u2, v2))
        assert c[0, 1].is_zero() and c[1, 2].is_zero()
        assert c[0, 2].trace().is_zero()


class TestBruhat:

    def test_recompose(self, ext_t, ext_cubic, rng):
        for ext in (ext_t, ext_cubic):
            for _ in range(5):
                g = random_unitary(rng, ext)
                assert bruhat_decompose(g).recompose() == g

    def test_borel_element(self, ext_t, rng):
        u, v = random_pair(rng, ext_t)
        b = mk_ua(u, v) * mk_torus(ext_t.t)
        form = bruhat_decompose(b)
        assert form.epsilon == 0
        assert form.b == b


class TestBoundary:

    def test_line_roundtrip(self, ext_t, rng):
        for _ in range(10):
            xi = BPoint(*random_pair(rng, ext_t))
            assert line_boundary(boundary_line(xi, ext_t)) == xi
        assert line_boundary(boundary_line(BPoint.infinity(), ext_t)).is_infinity

    def test_point_must_lie_on_h(self, ext_t):
        with pytest.raises(PreconditionError):
            BPoint(ext_t.one, ext_t.zero)

    def test_guv_sends_point_to_infinity(self, ext_t, rng):
        xi = BPoint(*random_pair(rng, ext_t))
        assert boundary_act(mk_guv(xi, ext_t), xi).is_infinity

    def test_action_is_compatible_with_lines(self, ext_cubic, rng):
        for _ in range(5):
            g = random_unitary(rng, ext_cubic, length=2)
            xi = BPoint(*random_pair(rng, ext_cubic))
            w = g.apply(boundary_line(xi, ext_cubic).rep)
            assert boundary_act(g, xi) == line_boundary(IsoLine.from_vector(w))

    def test_action_is_a_group_action(self, ext_t, rng):
        for _ in range(5):
            g, h = random_unitary(rng, ext_t, 2), random_unitary(rng, ext_t, 2)
            xi = BPoint(*random_pair(rng, ext_t))
            assert boundary_act(g * h, xi) == boundary_act(g, boundary_act(h, xi))

    def test_borel_fixes_infinity(self, ext_t, rng):
        u, v = random_pair(rng, ext_t)
        assert boundary_act(mk_ua(u, v) * mk_torus(ext_t.t), BPoint.infinity()).is_infinity
        assert not boundary_act(mk_s(ext_t), BPoint.infinity()).is_infinity


class TestFixedPoint:

    def test_unipotent_center_fixes_infinity(self, ext_t):
        g = mk_ua(ext_t.zero, ext_t.omega)
        assert len(group_closure([g], 10)) == 3
        assert fixed_boundary_point([g]).is_infinity

    def test_conjugated_group(self, ext_t):
        """h·U·h^{-1} 固定 h·∞"""
        h = mk_guv(BPoint(ext_t.one, real_part(ext_t, ext_t.one)), ext_t).inverse()
        gens = [mk_ua(ext_t.zero, ext_t.omega).conjugate_by(h)]
        xi = fixed_boundary_point(gens)
        assert not xi.is_infinity
        assert xi == boundary_act(h, BPoint.infinity())

    def test_non_p_group_rejected(self, ext_t):
        with pytest.raises(PreconditionError):
            fixed_boundary_point([mk_s(ext_t)])

    def test_scan_finds_only_fixed_point(self, ext_t):
        gens = [mk_ua(ext_t.zero, ext_t.omega), mk_ua(ext_t.omega, real_part(ext_t, ext_t.omega))]
        assert fixed_points_in_scan(gens, 1) == [BPoint.infinity()]

    def test_fixes_boundary_point(self, ext_t):
        g = mk_ua(ext_t.zero, ext_t.omega)
        assert fixes_boundary_point(g, BPoint.infinity())
        assert not fixes_boundary_point(g, BPoint(ext_t.one, real_part(ext_t, ext_t.one)))

    @pytest.mark.parametrize("which", ["unipotent", "conjugated", "pair"])
    def test_fast_scan_matches_exhaustive(self, ext_t, which):
        h = mk_guv(BPoint(ext_t.one, real_part(ext_t, ext_t.one)), ext_t).inverse()
        center = mk_ua(ext_t.zero, ext_t.omega)
        gens = {
            "unipotent": [center],
            "conjugated": [center.conjugate_by(h)],
            "pair": [mk_ua(ext_t.one, real_part(ext_t, ext_t.one)).conjugate_by(h), center.conjugate_by(h)],
        }[which]
        fast = fixed_points_in_scan(gens, 1)
        assert fast == fixed_points_in_scan(gens, 1, exhaustive=True)
        assert fast == [fixed_boundary_point(gens)]


# ---------------------------------------------------------------------------
# 全规模随机化
# ---------------------------------------------------------------------------

N_IDENTITIES = 10_000
N_RANDOM = 1_000
N_SUBGROUPS = 20


@pytest.mark.slow
class TestUnipotentLawsFull:

    def test_composition_and_inverse(self, ext_t, rng):
        for _ in range(N_IDENTITIES):
            u, v = random_integral_pair(rng, ext_t, 2)
            x, y = random_integral_pair(rng, ext_t, 2)
            g = mk_ua(u, v)
            assert g * mk_ua(x, y) == mk_ua(u + x, v + y - u.conj() * x)
            assert (g * mk_ua(-u, v.conj())).is_identity()

    def test_commutator_and_order(self, ext_cubic, rng):
        for _ in range(N_RANDOM):
            u, v = random_integral_pair(rng, ext_cubic)
            x, y = random_integral_pair(rng, ext_cubic)
            g, h = mk_ua(u, v), mk_ua(x, y)
            assert commutator(g, h) == mk_ua(ext_cubic.zero, u * x.conj() - u.conj() * x)
            # 特征 3 中 u_a 的阶为 3
            assert matrix_order(g, 3) == 3


@pytest.mark.slow
class TestBruhatFull:

    def test_recompose(self, ext_t, ext_cubic, rng):
        for i in range(N_RANDOM):
            ext = ext_t if i % 2 else ext_cubic
            g = random_integral_unitary(rng, ext)
            form = bruhat_decompose(g)
            assert form.recompose() == g
            assert form.epsilon == (0 if g[2, 0].is_zero() else 1)


@pytest.mark.slow
class TestBoundaryFull:

    def test_action_law(self, ext_t, rng):
        for _ in range(N_RANDOM):
            g = random_integral_unitary(rng, ext_t, 2)
            h = random_integral_unitary(rng, ext_t, 2)
            xi = BPoint(*random_integral_pair(rng, ext_t))
            assert boundary_act(g * h, xi) == boundary_act(g, boundary_act(h, xi))

    def test_line_equivariance(self, ext_cubic, rng):
        for _ in range(N_RANDOM):
            g = random_integral_unitary(rng, ext_cubic, 2)
            xi = BPoint(*random_integral_pair(rng, ext_cubic))
            w = g.apply(boundary_line(xi, ext_cubic).rep)
            assert boundary_act(g, xi) == line_boundary(IsoLine.from_vector(w))


@pytest.mark.slow
class TestFixedPointFull:

    def sample_subgroup(self, rng, ext):
        """1 到 2 个 B-整幺幂生成元，约半数再用 s 与 u_a 的乘积共轭"""
        gens = [mk_ua(*random_integral_pair(rng, ext)) for _ in range(rng.randint(1, 2))]
        if rng.random() < 0.5:
            h = mk_s(ext)
            for _ in range(rng.randint(1, 2)):
                h = h * mk_ua(*random_integral_pair(rng, ext)) * mk_s(ext)
            gens = [g.conjugate_by(h) for g in gens]
        return gens

    def test_unique_fixed_point(self, ext_t, rng):
        for _ in range(N_SUBGROUPS):
            gens = self.sample_subgroup(rng, ext_t)
            xi = fixed_boundary_point(gens)
            assert all(fixes_boundary_point(g, xi) for g in gens)
            scan = fixed_points_in_scan(gens, 3)
            assert scan in ([], [xi])
            if xi.is_infinity:
                assert scan == [xi]
