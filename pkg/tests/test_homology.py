"""
群图阿贝尔化与相对同调检验
"""

import pytest

from src.arithmetic.subgroups import FiniteSubgroup
from src.group.unitary import group_closure, mk_ua
from src.homology.graph_of_groups import graph_of_groups, spanning_tree, word_table
from src.homology.relative import check_relative_homology, cusp_ranks, relative_report
from src.homology.smith import RelationLattice, abelian_invariants, abelianization
from src.pipeline.quotients import euler_for, quotient_for
from src.utils.errors import InvariantViolation, PreconditionError

R = 3


@pytest.fixture(scope="module")
def congruence_run(congruence_t):
    return quotient_for(congruence_t, R)


class TestSmith:

    @pytest.mark.parametrize("rows,ncols,expected", [
        ([[2, 0], [0, 3]], 2, ([6], 0)),
        ([[2, 4]], 2, ([2], 1)),
        ([[3, 0, 0], [0, 3, 0]], 3, ([3, 3], 1)),
        ([[1, -1], [1, -1]], 2, ([], 1)),
        ([], 3, ([], 3)),
    ])
    def test_invariants(self, rows, ncols, expected):
        assert abelian_invariants(rows, ncols) == expected

    def test_lattice_rank(self):
        lat = RelationLattice(2)
        assert lat.add([2, 0])
        assert not lat.add([4, 0])
        assert not lat.add([3, 0])
        assert lat.rank == 1
        assert lat.rows() == [[1, 0]]
        assert lat.add([5, 7])
        assert lat.rank == 2

    def test_lattice_length_mismatch(self):
        with pytest.raises(ValueError):
            RelationLattice(2).add([1, 2, 3])


class TestWordTable:

    def test_cyclic_group(self, ext_t):
        g = mk_ua(ext_t.zero, ext_t.omega)
        group = FiniteSubgroup.from_elements(group_closure([g], 10))
        table = word_table(group)
        assert table.ngens == 1
        assert len(table.vectors) == 3
        assert abelian_invariants(table.relations, 1) == ([3], 0)

    def test_foreign_element(self, ext_t):
        g = mk_ua(ext_t.zero, ext_t.omega)
        table = word_table(FiniteSubgroup.from_elements(group_closure([g], 10)))
        with pytest.raises(InvariantViolation):
            table.vector(mk_ua(ext_t.zero, ext_t.omega * ext_t.t))


class TestGraphOfGroups:

    def test_tree_has_no_loops(self, congruence_run, congruence_t):
        gog = graph_of_groups(congruence_run.graph, congruence_t)
        assert gog.loop_edges == []
        assert len(gog.tree_edges) == len(congruence_run.graph.vertices) - 1
        assert spanning_tree(congruence_run.graph) == gog.tree_edges

    def test_spec_mismatch(self, congruence_run, gamma_t):
        with pytest.raises(PreconditionError):
            graph_of_groups(congruence_run.graph, gamma_t)

    def test_gamma_abelianization(self, gamma_t):
        run = quotient_for(gamma_t, 2)
        ab = abelianization(graph_of_groups(run.graph, gamma_t))
        assert ab.free_rank == 0
        assert ab.source == "walk"

    def test_torsion_is_elementary(self, congruence_run, congruence_t):
        ab = abelianization(graph_of_groups(congruence_run.graph, congruence_t))
        assert ab.free_rank == 0
        assert ab.is_p_torsion(3)
        assert set(ab.divisors) == {3}
        assert ab.p_rank(3) == 4 * ((R + 1) // 2 + 1)
        assert ab.to_dict()["torsion_divisors"] == ab.divisors


class TestRelativeHomology:

    def test_cusp_ranks(self, congruence_run):
        cusps = cusp_ranks(congruence_run.graph)
        assert len(cusps) == 4
        assert all(c.order == c.filtration_order == 3 ** R for c in cusps)
        assert all(c.p_rank == (R + 1) // 2 + 1 for c in cusps)

    def test_report(self, congruence_t):
        report = check_relative_homology(congruence_t, R)
        assert report.chi == -3
        assert report.steinberg_rank == 3
        assert report.h1_rel_rank == 3
        assert report.cusp_p_rank == report.abelian.p_rank(3)
        assert all(c["ok"] for c in report.checks.values())
        assert report.consistency
        data = report.to_dict()
        assert data["consistency"] is True
        assert data["abelianization"]["free_rank"] == 0

    def test_refused_for_gamma(self, gamma_t, congruence_t):
        report, _ = euler_for(congruence_t, R)
        with pytest.raises(PreconditionError):
            relative_report(quotient_for(gamma_t, R), report)

    @pytest.mark.slow
    def test_larger_radius(self, congruence_t):
        report = check_relative_homology(congruence_t, R + 1)
        assert report.consistency
        assert report.abelian.p_rank(3) == 4 * ((R + 2) // 2 + 1)
