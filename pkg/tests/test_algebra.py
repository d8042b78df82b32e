"""
有限域、多项式、二次扩张与理想
"""

import pytest

from src.algebra.finite_field import FqElem, fq_arith, fq_enumerate, fq_inv, get_fq
from src.algebra.global_field import ExtensionContext, deg_norm, ell_conj, hpair_check, norm_trace, val_P, val_Q
from src.algebra.ideals import BIdeal, class_group, curve_point_count, ideals_equivalent, is_principal
from src.algebra.polynomials import NEG_INF, VAL_INF, Poly, RatF
from src.utils.errors import FieldMismatchError, PreconditionError

from .conftest import random_elem, random_poly, random_ratf


class TestFiniteField:

    @pytest.mark.parametrize("p,r", [(3, 1), (5, 1), (3, 2), (7, 1)])
    def test_field_axioms(self, p, r):
        fq = get_fq(p, r)
        elems = fq_enumerate(fq)
        assert len(elems) == p ** r
        one = fq.elem(1)
        for a in elems[1:]:
            assert fq_arith("mul", a, fq_inv(a)) == one
            assert fq_arith("add", a, -a).is_zero()

    def test_generator_has_full_order(self, fq9):
        g = fq9.generator()
        orders = [k for k in range(1, fq9.q) if fq9.power(g, k) == 1]
        assert orders[0] == fq9.q - 1

    def test_prime_subfield_embedding(self, fq9):
        assert fq9.elem_from_coeffs([2]) == fq9.elem(fq9.from_int(-1))
        assert fq9.from_int(3) == 0

    def test_characteristic_two_rejected(self):
        with pytest.raises(PreconditionError):
            get_fq(2)

    def test_reducible_modulus_rejected(self):
        # x² − 1 = (x − 1)(x + 1)
        with pytest.raises(PreconditionError):
            get_fq(3, 2, [-1, 0, 1])

    def test_mixing_fields(self, fq3):
        fq5 = get_fq(5)
        with pytest.raises(FieldMismatchError):
            fq_arith("add", fq3.elem(1), fq5.elem(1))

    def test_zero_inverse(self, fq3):
        with pytest.raises(ZeroDivisionError):
            fq_inv(FqElem(fq3, 0))

    def test_unknown_operation(self, fq3):
        with pytest.raises(PreconditionError):
            fq_arith("div", fq3.elem(1), fq3.elem(2))


class TestPolynomials:

    def test_zero_degree(self, fq3):
        assert Poly.zero(fq3).deg == NEG_INF

    def test_division_identity(self, fq3, rng):
        for _ in range(30):
            a = random_poly(rng, fq3, 6)
            b = random_poly(rng, fq3, 3)
            if b.is_zero():
                continue
            q, r = a.divmod(b)
            assert q * b + r == a
            assert r.is_zero() or r.deg < b.deg

    def test_xgcd(self, fq3, rng):
        for _ in range(20):
            a, b = random_poly(rng, fq3, 4), random_poly(rng, fq3, 4)
            if a.is_zero() and b.is_zero():
                continue
            g, x, y = a.xgcd(b)
            assert x * a + y * b == g

    def test_squarefree(self, fq3):
        assert Poly.from_ints(fq3, [0, -1, 0, 1]).is_squarefree()
        assert not Poly.from_ints(fq3, [0, 0, 1]).is_squarefree()

    def test_val_at_infinity(self, fq3):
        t = RatF.from_poly(Poly.t(fq3))
        assert val_P(t) == -1
        assert val_P(t.inverse()) == 1
        assert val_P(RatF.zero(fq3)) == VAL_INF

    def test_monomial_fast_paths(self, fq3, rng):
        for _ in range(30):
            a = random_poly(rng, fq3, 6)
            m = Poly.monomial(fq3, rng.randint(0, 3), rng.randrange(1, 3))
            q, r = a.divmod(m)
            assert q * m + r == a
            assert r.is_zero() or r.deg < m.deg
            if not a.is_zero():
                assert a.gcd(m) == m.gcd(a)
                assert (a // a.gcd(m)).gcd(m // a.gcd(m)).is_one()

    def test_ratf_arithmetic_is_reduced(self, fq3, rng):
        # 与先通分再整体约分的结果逐项比较
        for _ in range(200):
            x, y = random_ratf(rng, fq3, 3), random_ratf(rng, fq3, 3)
            a, b, c, d = x.num, x.den, y.num, y.den
            assert x + y == RatF(a * d + c * b, b * d)
            assert x - y == RatF(a * d - c * b, b * d)
            assert x * y == RatF(a * c, b * d)
            assert (x + y).den.lc == 1 and (x * y).den.lc == 1

    def test_s_digits(self, fq3, rng):
        for _ in range(20):
            x = random_ratf(rng, fq3)
            if x.is_zero():
                continue
            digits = x.s_digits(x.val_P() + 1)
            assert list(digits) == [x.val_P()]


class TestExtension:

    def test_even_degree_rejected(self, fq3):
        with pytest.raises(PreconditionError):
            ExtensionContext(fq3, Poly.from_ints(fq3, [1, 0, 1]))

    def test_non_squarefree_rejected(self, fq3):
        with pytest.raises(PreconditionError):
            ExtensionContext(fq3, Poly.from_ints(fq3, [0, 0, 0, 1]))

    def test_omega_squared(self, ext_t, ext_cubic):
        for ext in (ext_t, ext_cubic):
            assert ext.omega * ext.omega == ext.from_polys(ext.D)

    def test_norm_multiplicative(self, ext_cubic, rng):
        for _ in range(20):
            x, y = random_elem(rng, ext_cubic), random_elem(rng, ext_cubic)
            assert (x * y).norm() == x.norm() * y.norm()
            n, tr = norm_trace(x)
            assert x * x.conj() == ext_cubic.elem(n)
            assert x + x.conj() == ext_cubic.elem(tr)

    def test_conjugation(self, ext_cubic, rng):
        for _ in range(20):
            x, y = random_elem(rng, ext_cubic), random_elem(rng, ext_cubic)
            assert ell_conj(x * y) == ell_conj(x) * ell_conj(y)
            assert ell_conj(x + y) == ell_conj(x) + ell_conj(y)
            assert ell_conj(ell_conj(x)) == x
            assert (ell_conj(x) == x) == x.b.is_zero()

    def test_norm_degree(self, ext_cubic, rng):
        assert deg_norm(ext_cubic.from_ints([1, 1], [1])) == 3
        for _ in range(20):
            x = random_elem(rng, ext_cubic, integral=True)
            if x.is_zero():
                continue
            assert deg_norm(x) == x.norm().num.deg

    def test_inverse(self, ext_t, rng):
        for _ in range(20):
            x = random_elem(rng, ext_t)
            if x.is_zero():
                continue
            assert (x * x.inverse()).is_one()
            assert (x / x).is_one()

    def test_valuation(self, ext_t, ext_cubic, rng):
        assert val_Q(ext_t.omega) == -1
        assert val_Q(ext_cubic.omega) == -3
        assert val_Q(ext_t.t) == -2
        assert val_Q(ext_t.rho) == 1
        for e in range(-4, 5):
            assert ext_t.mu(e).val_Q() == e
        for _ in range(20):
            x, y = random_elem(rng, ext_cubic), random_elem(rng, ext_cubic)
            if x.is_zero() or y.is_zero():
                continue
            assert val_Q(x * y) == val_Q(x) + val_Q(y)

    def test_rho_is_anti_invariant(self, ext_t, ext_cubic):
        for ext in (ext_t, ext_cubic):
            assert ext.rho.conj() == -ext.rho

    def test_hpair(self, ext_t):
        fq = ext_t.fq
        half = RatF.const(fq, fq.half)
        u = ext_t.omega
        v = ext_t.elem(RatF.zero(fq) - u.norm() * half)
        assert hpair_check(u, v)
        assert not hpair_check(u, ext_t.zero)
        assert hpair_check(ext_t.zero, ext_t.omega, center=True)
        assert not hpair_check(ext_t.zero, ext_t.one, center=True)


class TestIdeals:

    def test_omega_ideal(self, ext_t, J_omega):
        assert J_omega.norm_degree == 1
        assert J_omega.index == 3
        assert J_omega.contains(ext_t.omega)
        assert J_omega.contains(ext_t.t)
        assert not J_omega.contains(ext_t.one)
        assert J_omega.conj() == J_omega

    def test_square_is_t(self, ext_t, J_omega):
        assert J_omega * J_omega == BIdeal(ext_t, [ext_t.t])
        assert J_omega.power(2).norm_degree == 2

    def test_generators_must_be_integral(self, ext_t):
        with pytest.raises(PreconditionError):
            BIdeal(ext_t, [ext_t.s])

    def test_membership_of_multiples(self, ext_cubic, rng):
        J = BIdeal(ext_cubic, [ext_cubic.from_ints([1, 1], [1])])
        g = J.generators[0]
        for _ in range(10):
            assert J.contains(g * random_elem(rng, ext_cubic, integral=True))

    def test_principal(self, ext_t, J_omega):
        assert is_principal(J_omega)
        assert ideals_equivalent(J_omega, BIdeal.unit(ext_t))

    def test_class_number_genus_zero(self, ext_t):
        assert class_group(ext_t).order == 1

    def test_class_number_matches_point_count(self, ext_cubic):
        # y² = x³ − x 在 F_3 上：x = 0, ±1 三点加无穷远点
        assert curve_point_count(ext_cubic) == 4
        assert class_group(ext_cubic).order == 4

    def test_class_group_degree_cap(self, fq3):
        ext = ExtensionContext(fq3, Poly.from_ints(fq3, [0, -1, 0, 0, 0, 1]))
        with pytest.raises(PreconditionError):
            class_group(ext, max_deg_D=3)


N_IDENTITIES = 10_000


@pytest.mark.slow
class TestIdentitiesFull:

    def test_field_axioms(self, ext_cubic, rng):
        for _ in range(N_IDENTITIES):
            x, y, z = (random_elem(rng, ext_cubic) for _ in range(3))
            assert x * y == y * x
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z
            assert (x - y) + y == x
            if not x.is_zero():
                assert (x * x.inverse()).is_one()

    def test_conjugation_norm_trace(self, ext_cubic, rng):
        for _ in range(N_IDENTITIES):
            x, y = random_elem(rng, ext_cubic), random_elem(rng, ext_cubic)
            assert ell_conj(x * y) == ell_conj(x) * ell_conj(y)
            assert ell_conj(ell_conj(x)) == x
            assert (x * y).norm() == x.norm() * y.norm()
            n, tr = norm_trace(x)
            assert x * ell_conj(x) == ext_cubic.elem(n)
            assert x + ell_conj(x) == ext_cubic.elem(tr)

    def test_valuation_axioms(self, ext_t, rng):
        for _ in range(N_IDENTITIES):
            x, y = random_elem(rng, ext_t), random_elem(rng, ext_t)
            if x.is_zero() or y.is_zero():
                assert val_Q(x * y) == VAL_INF
                continue
            assert val_Q(x * y) == val_Q(x) + val_Q(y)
            assert val_Q(x + y) >= min(val_Q(x), val_Q(y))
            assert val_Q(ell_conj(x)) == val_Q(x)
