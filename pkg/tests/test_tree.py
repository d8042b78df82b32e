"""
Q 处局部展开与 Bruhat–Tits 树
"""

import pytest

from src.group.unitary import mk_s, mk_torus, mk_ua
from src.tree.building import (
    apartment_vertex,
    base_vertex,
    build_ball,
    distance,
    fixes_vertex,
    is_adjacent,
    neighbors,
    regress_valence,
    sublattice_neighbors,
    tree_act,
)
from src.tree.local_field import embed_local, residue, serialize_precision, truncate
from src.utils.errors import InvariantViolation, NotFoundInWindow, PrecisionExhausted, PreconditionError
from src.utils.io import read_json

from .conftest import random_elem
from .test_unitary import random_pair, real_part

# 首次测量得到的度数，作为回归基准
RECORDED_VALENCE = {
    "ext_t": {0: 4, 1: 4},
    "ext_cubic": {0: 4, 1: 4},
    "ext9": {0: 10, 1: 10},
}


class TestLocalField:

    def test_truncation(self, ext_t, rng):
        for e in (-3, 0, 4):
            for _ in range(10):
                x = random_elem(rng, ext_t)
                assert (x - truncate(x, e)).val_Q() >= e

    def test_embedding_is_additive(self, ext_cubic, rng):
        for _ in range(10):
            x, y = random_elem(rng, ext_cubic), random_elem(rng, ext_cubic)
            assert embed_local(x, 12) + embed_local(y, 12) == embed_local(x + y, 12)

    def test_embedding_is_multiplicative(self, ext_cubic, rng):
        checked = 0
        for _ in range(20):
            x, y = random_elem(rng, ext_cubic), random_elem(rng, ext_cubic)
            if x.is_zero() or y.is_zero():
                continue
            prod = embed_local(x, 12) * embed_local(y, 12)
            if prod.prec <= (x * y).val_Q():
                continue
            assert prod == embed_local(x * y, prod.prec)
            checked += 1
        assert checked

    def test_precision_exhausted(self, ext_t):
        with pytest.raises(PrecisionExhausted):
            embed_local(ext_t.s, 2)

    def test_residue(self, ext_t):
        assert residue(ext_t.one) == 1
        assert residue(ext_t.rho) == 0
        with pytest.raises(PreconditionError):
            residue(ext_t.t)

    def test_precision_doubling(self, ext_t):
        assert serialize_precision([ext_t.s ** 5], 8) == 16
        with pytest.raises(PrecisionExhausted):
            serialize_precision([ext_t.s ** 5], 8, policy="fixed")


class TestApartment:

    def test_types_alternate(self, ext_t):
        for i in range(-3, 4):
            assert apartment_vertex(ext_t, i).type_parity == i % 2

    def test_consecutive_vertices_adjacent(self, ext_t, ext_cubic):
        for ext in (ext_t, ext_cubic):
            for i in range(-2, 3):
                v, w = apartment_vertex(ext, i), apartment_vertex(ext, i + 1)
                assert is_adjacent(v, w)
                assert w in neighbors(v)

    def test_torus_translation(self, ext_t, ext_cubic):
        for ext in (ext_t, ext_cubic):
            shift = -2 * ext.t.val_Q()
            assert shift == 4
            torus = mk_torus(ext.t)
            for i in range(-3, 4):
                assert tree_act(torus, apartment_vertex(ext, i)) == apartment_vertex(ext, i + shift)

    def test_flip(self, ext_t):
        s = mk_s(ext_t)
        for i in range(-3, 4):
            assert tree_act(s, apartment_vertex(ext_t, i)) == apartment_vertex(ext_t, -i)


class TestNeighbors:

    @pytest.mark.parametrize("i", [0, 1, 2, -1])
    def test_matches_sublattice_enumeration(self, ext_t, i):
        v = apartment_vertex(ext_t, i)
        assert {w.key for w in neighbors(v)} == {w.key for w in sublattice_neighbors(v)}

    @pytest.mark.parametrize("fixture,i", [(f, i) for f in RECORDED_VALENCE for i in (0, 1)])
    def test_valence(self, request, fixture, i):
        ext = request.getfixturevalue(fixture)
        v = apartment_vertex(ext, i)
        measured = len(neighbors(v))
        assert measured == RECORDED_VALENCE[fixture][i]
        assert measured == len(sublattice_neighbors(v))

    def test_neighbors_change_type(self, ext_cubic):
        v = base_vertex(ext_cubic)
        assert all(w.type_parity == 1 for w in neighbors(v))

    def test_action_commutes_with_neighbors(self, ext_t, rng):
        u, v = random_pair(rng, ext_t)
        g = mk_ua(u, v) * mk_s(ext_t)
        x = apartment_vertex(ext_t, 1)
        moved = {tree_act(g, w).key for w in neighbors(x)}
        assert moved == {w.key for w in neighbors(tree_act(g, x))}


class TestBall:

    @pytest.mark.parametrize("R,size", [(0, 1), (1, 5), (2, 17), (3, 53)])
    def test_ball_size(self, ext_t, R, size):
        ball = build_ball(ext_t, R)
        assert len(ball) == size
        assert ball.is_tree()

    def test_biregular(self, ext_cubic):
        ball = build_ball(ext_cubic, 3)
        val = ball.valences()
        assert set(val[0]) == {4}
        assert set(val[1]) == {4}
        assert ball.measured_valence() == RECORDED_VALENCE["ext_cubic"]

    def test_irregular_degrees_detected(self, ext_t):
        ball = build_ball(ext_t, 2)
        assert ball.measured_valence() == {0: 4, 1: 4}
        # 多出一条边的类型 1 顶点与其它类型 1 顶点度数不同
        v = ball.layer(1)[0]
        far = next(w for w in ball.layer(2) if not ball.graph.has_edge(v.key, w.key))
        ball.graph.add_edge(v.key, far.key)
        with pytest.raises(InvariantViolation):
            ball.measured_valence()

    def test_radius_zero_measures_nothing(self, ext_t):
        assert build_ball(ext_t, 0).measured_valence() == {0: None, 1: None}

    def test_layers(self, ext_t):
        ball = build_ball(ext_t, 2)
        assert [len(ball.layer(i)) for i in range(3)] == [1, 4, 12]

    def test_distance(self, ext_t):
        ball = build_ball(ext_t, 3)
        v0 = base_vertex(ext_t)
        for i in range(-3, 4):
            assert distance(v0, apartment_vertex(ext_t, i), ball) == abs(i)
        with pytest.raises(NotFoundInWindow):
            distance(v0, apartment_vertex(ext_t, 5), ball)

    def test_negative_radius(self, ext_t):
        with pytest.raises(ValueError):
            build_ball(ext_t, -1)

    def test_serialization(self, ext_t):
        data = build_ball(ext_t, 1).to_json(prec=8)
        assert len(data["vertices"]) == 5
        assert len(data["edges"]) == 4
        assert data["vertices"][0]["depth"] == 0
        assert data["valence"] == {"0": 4, "1": None}


class TestFixedVertices:

    def test_constant_unipotent_fixes_base(self, ext_t):
        assert not fixes_vertex(mk_ua(ext_t.zero, ext_t.omega), base_vertex(ext_t))
        g = mk_ua(ext_t.one, real_part(ext_t, ext_t.one))
        assert fixes_vertex(g, base_vertex(ext_t))
        assert tree_act(g, base_vertex(ext_t)) == base_vertex(ext_t)

    def test_torus_moves_base(self, ext_t):
        assert not fixes_vertex(mk_torus(ext_t.t), base_vertex(ext_t))


class TestValenceRecord:

    def test_first_run_records(self, ext_t, tmp_path):
        path = tmp_path / "record.json"
        assert regress_valence(path, ext_t, {0: 4, 1: None}) == {"0": 4}
        # 后续运行补记此前未测到的类型
        assert regress_valence(path, ext_t, {0: 4, 1: 4}) == {"0": 4, "1": 4}
        assert list(read_json(path).values()) == [{"0": 4, "1": 4}]

    def test_mismatch_raises(self, ext_t, ext_cubic, tmp_path):
        path = tmp_path / "record.json"
        regress_valence(path, ext_t, {0: 4, 1: 4})
        # 不同的 D 各自记录
        regress_valence(path, ext_cubic, {0: 5, 1: 4})
        with pytest.raises(InvariantViolation):
            regress_valence(path, ext_t, {0: 4, 1: 5})


@pytest.mark.slow
class TestBallFull:

    def test_radius_six(self, ext_t):
        ball = build_ball(ext_t, 6)
        assert [len(ball.layer(i)) for i in range(7)] == [1, 4, 12, 36, 108, 324, 972]
        assert len(ball) == 1457
        assert ball.is_tree()
        assert ball.measured_valence() == RECORDED_VALENCE["ext_t"]
        for i in range(-6, 7):
            assert apartment_vertex(ext_t, i) in ball

    def test_apartment_action(self, ext_t):
        torus, s = mk_torus(ext_t.t), mk_s(ext_t)
        for i in range(-6, 7):
            v = apartment_vertex(ext_t, i)
            assert tree_act(torus, v) == apartment_vertex(ext_t, i + 4)
            assert tree_act(s, v) == apartment_vertex(ext_t, -i)

    def test_action_commutes_with_neighbors(self, ext_t, rng):
        for _ in range(20):
            u, v = random_pair(rng, ext_t)
            g = mk_ua(u, v) * mk_s(ext_t)
            x = apartment_vertex(ext_t, rng.randint(-3, 3))
            moved = {tree_act(g, w).key for w in neighbors(x)}
            assert moved == {w.key for w in neighbors(tree_act(g, x))}
