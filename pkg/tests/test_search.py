"""
算术群：成员判定、次数窗口枚举、稳定子、转运元、B/J 约化
"""

import pytest

from src.arithmetic.cusps import finite_order_census, is_p_power
from src.arithmetic.reduction import QuotientRing, image_group, reduce_matrix, rmat_identity, rmat_mul
from src.arithmetic.search import enumerate_members, stabilizer, transporter
from src.arithmetic.subgroups import FiniteSubgroup, SubgroupSpec, is_member
from src.algebra.ideals import BIdeal
from src.group.unitary import mk_identity, mk_s, mk_torus, mk_ua
from src.tree.building import apartment_vertex, fixes_vertex, tree_act
from src.utils.errors import InvariantViolation, PreconditionError

from .conftest import random_elem
from .test_unitary import real_part


class TestSubgroupSpec:

    def test_unit_ideal_rejected(self, ext_t):
        with pytest.raises(PreconditionError):
            SubgroupSpec.congruence(BIdeal.unit(ext_t))

    def test_gamma_takes_no_ideal(self, ext_t, J_omega):
        with pytest.raises(PreconditionError):
            SubgroupSpec(ext_t, "gamma", J_omega)

    def test_membership(self, ext_t, gamma_t, congruence_t):
        s = mk_s(ext_t)
        assert is_member(s, gamma_t)
        assert not is_member(s, congruence_t)
        assert not is_member(mk_torus(ext_t.t), gamma_t)
        g = mk_ua(ext_t.omega, real_part(ext_t, ext_t.omega))
        assert is_member(g, congruence_t)

    def test_closure_check(self, ext_t):
        with pytest.raises(InvariantViolation):
            FiniteSubgroup.from_elements([mk_identity(ext_t), mk_ua(ext_t.zero, ext_t.omega)])


class TestEnumeration:

    def test_degree_zero_census(self, gamma_t, congruence_t):
        census = dict(finite_order_census(gamma_t, 0, 60))
        assert sum(census.values()) == 24
        assert 2 in census
        assert all(is_p_power(n, 3) for n in dict(finite_order_census(congruence_t, 0, 60)))

    def test_members_are_deterministic(self, gamma_t):
        first = enumerate_members(gamma_t, 0)
        assert first == enumerate_members(gamma_t, 0)
        assert len(set(first)) == len(first)
        assert all(is_member(g, gamma_t) for g in first)


class TestStabilizer:

    @pytest.mark.parametrize("n,order", [(0, 24), (1, 18), (2, 54)])
    def test_gamma_orders(self, ext_t, gamma_t, n, order):
        K = stabilizer(apartment_vertex(ext_t, n), gamma_t)
        assert K.order == order
        assert K.certification == "lattice-exact"

    @pytest.mark.slow
    def test_gamma_order_grows(self, ext_t, gamma_t):
        assert stabilizer(apartment_vertex(ext_t, 3), gamma_t).order == 2 * 3 ** 4

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_congruence_orders(self, ext_t, congruence_t, n):
        K = stabilizer(apartment_vertex(ext_t, n), congruence_t)
        assert K.order == 3 ** n

    def test_elements_fix_vertex(self, ext_t, gamma_t):
        v = apartment_vertex(ext_t, 1)
        K = stabilizer(v, gamma_t)
        assert all(fixes_vertex(g, v) for g in K)
        assert all(is_member(g, gamma_t) for g in K)

    def test_degree_window_certification(self, ext_t, gamma_t):
        K = stabilizer(apartment_vertex(ext_t, 0), gamma_t, degbound=0)
        assert K.order == 24
        assert K.certification == "stable-at-0"

    def test_conjugation(self, ext_t, gamma_t):
        v = apartment_vertex(ext_t, 1)
        gamma = mk_ua(ext_t.one, real_part(ext_t, ext_t.one)) * mk_s(ext_t)
        w = tree_act(gamma, v)
        moved = {g.conjugate_by(gamma) for g in stabilizer(v, gamma_t)}
        assert moved == set(stabilizer(w, gamma_t).elements)

    @pytest.mark.slow
    @pytest.mark.parametrize("n,order", [(0, 24), (1, 6), (2, 6), (3, 18), (4, 54)])
    def test_cubic_orders(self, ext_cubic, n, order):
        K = stabilizer(apartment_vertex(ext_cubic, n), SubgroupSpec.gamma(ext_cubic))
        assert K.order == order


class TestTransporter:

    def test_finds_element(self, ext_t, gamma_t):
        v = apartment_vertex(ext_t, 2)
        gamma = mk_ua(ext_t.one, real_part(ext_t, ext_t.one)) * mk_s(ext_t)
        w = tree_act(gamma, v)
        g = transporter(v, w, gamma_t)
        assert g is not None
        assert tree_act(g, v) == w

    def test_type_mismatch(self, ext_t, gamma_t):
        assert transporter(apartment_vertex(ext_t, 0), apartment_vertex(ext_t, 1), gamma_t) is None

    def test_different_orbits(self, ext_t, gamma_t):
        # Γ\X 是一条射线：v₀ 与 v₂ 不在同一轨道
        assert transporter(apartment_vertex(ext_t, 0), apartment_vertex(ext_t, 2), gamma_t) is None


class TestReduction:

    def test_ring_sizes(self, ext_t, J_omega):
        assert QuotientRing(J_omega).size == 3
        assert QuotientRing(J_omega * J_omega).size == 9
        with pytest.raises(PreconditionError):
            QuotientRing(BIdeal.unit(ext_t))

    def test_reduction_is_a_ring_map(self, ext_t, J_omega, rng):
        ring = QuotientRing(J_omega * J_omega)
        for _ in range(20):
            x = random_elem(rng, ext_t, integral=True)
            y = random_elem(rng, ext_t, integral=True)
            assert ring.reduce(x * y) == ring.mul(ring.reduce(x), ring.reduce(y))
            assert ring.reduce(x + y) == ring.add(ring.reduce(x), ring.reduce(y))

    def test_matrix_reduction_is_multiplicative(self, ext_t, gamma_t, J_omega):
        ring = QuotientRing(J_omega)
        K = stabilizer(apartment_vertex(ext_t, 1), gamma_t)
        for g in K.gens:
            for h in K.gens:
                assert reduce_matrix(ring, g * h) == rmat_mul(ring, reduce_matrix(ring, g), reduce_matrix(ring, h))

    def test_base_stabilizer_surjects(self, ext_t, gamma_t, J_omega):
        """Stab_Γ(v₀) 到 π_J(Γ) 的像即全像，阶 24"""
        ring = QuotientRing(J_omega)
        K = stabilizer(apartment_vertex(ext_t, 0), gamma_t)
        image = image_group(ring, K.gens, 1000)
        assert image.order == 24
        assert rmat_identity(ring) in image
