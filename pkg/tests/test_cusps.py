"""
尖点稳定子滤过
"""

from fractions import Fraction

import pytest

from src.arithmetic.cusps import cusp_filtration, cusp_index, ideal_window_rank
from src.arithmetic.search import stabilizer
from src.arithmetic.subgroups import is_member
from src.group.unitary import BPoint, boundary_act, fixed_boundary_point, is_unipotent
from src.tree.building import apartment_vertex, fixes_vertex
from src.utils.errors import WindowExhausted


def anchored(ext, spec, n):
    """顶点 v_n 的同余稳定子及其不动点处的锚定滤过"""
    v = apartment_vertex(ext, n)
    K = stabilizer(v, spec)
    xi = fixed_boundary_point(K.gens, bound=K.order)
    return K, cusp_filtration(xi, spec, anchor=v)


class TestFiltration:

    def test_window_elements(self, ext_t, gamma_t):
        xi = BPoint.infinity()
        filt = cusp_filtration(xi, gamma_t, window=2)
        assert filt.order > 1
        for g in filt.elements():
            assert is_member(g, gamma_t)
            assert is_unipotent(g)
            assert boundary_act(g, xi) == xi

    def test_window_growth(self, gamma_t):
        xi = BPoint.infinity()
        orders = [cusp_filtration(xi, gamma_t, window=n).order for n in (2, 4, 6)]
        assert orders == sorted(orders)
        assert orders[0] < orders[-1]

    def test_center_inside(self, congruence_t):
        filt = cusp_filtration(BPoint.infinity(), congruence_t, window=4)
        assert filt.dims["center"] >= 1
        assert len(filt.u0_gens) == filt.dims["center"]
        assert len(filt.quotient_basis) == len({x for x, _ in filt.pairs})

    def test_window_without_noncentral_elements(self, congruence_t):
        with pytest.raises(WindowExhausted):
            cusp_filtration(BPoint.infinity(), congruence_t, window=0)

    def test_requires_window_or_anchor(self, congruence_t):
        with pytest.raises(ValueError):
            cusp_filtration(BPoint.infinity(), congruence_t)

    def test_index(self, gamma_t, congruence_t):
        assert cusp_index(BPoint.infinity(), congruence_t, 4) > 1
        assert cusp_index(BPoint.infinity(), gamma_t, 4) == Fraction(1)


class TestAnchored:

    @pytest.mark.parametrize("n,rank", [(1, 1), (2, 2), (3, 3)])
    def test_matches_vertex_group(self, ext_t, congruence_t, n, rank):
        K, filt = anchored(ext_t, congruence_t, n)
        assert filt.anchored
        assert filt.order == K.order == 3 ** n
        assert filt.p_rank == rank
        v = apartment_vertex(ext_t, n)
        assert all(fixes_vertex(g, v) for g in filt.u_gens)

    @pytest.mark.slow
    @pytest.mark.parametrize("n,rank", [(4, 3), (5, 4)])
    def test_rank_growth(self, ext_t, congruence_t, n, rank):
        K, filt = anchored(ext_t, congruence_t, n)
        assert filt.order == 3 ** n
        assert filt.p_rank == rank

    def test_serialization(self, ext_t, congruence_t):
        _, filt = anchored(ext_t, congruence_t, 2)
        data = filt.to_dict()
        assert data["order"] == 9
        assert data["anchored"] is True
        assert len(data["u_gens"]) == len(filt.u_gens)


class TestIdealWindow:

    def test_omega_ideal(self, J_omega):
        assert ideal_window_rank(J_omega, 0) == 0
        assert ideal_window_rank(J_omega, 2) == 2
        assert ideal_window_rank(J_omega, 3) == 3

    def test_t_ideal(self, J_omega):
        assert ideal_window_rank(J_omega * J_omega, 2) == 1
