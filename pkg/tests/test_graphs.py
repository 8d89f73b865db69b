"""Graph layer: balls, Laplacian, energy form, validation, JSON."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlresolvent import (
    ExplicitGraph,
    GraphError,
    VertexFunction,
    ball,
    edge_weight,
    energy,
    graph_from_json,
    graph_to_json,
    laplacian_apply,
    materialization_cap,
    star,
    validate,
    weighted_degree,
)


# --- balls ---------------------------------------------------------------


def test_ball_on_lattice_is_symmetric_interval(lattice):
    for r in (0, 1, 4):
        assert sorted(ball(lattice, 0, r)) == list(range(-r, r + 1))


def test_balls_are_nested_prefixes(lattice):
    b3 = ball(lattice, 0, 3)
    b5 = ball(lattice, 0, 5)
    assert b5[: len(b3)] == b3


def test_ball_starts_at_root(lattice):
    assert ball(lattice, 0, 2)[0] == 0
    assert ball(lattice, 7, 0) == [7]


def test_ball_rejects_negative_radius(lattice):
    with pytest.raises(GraphError):
        ball(lattice, 0, -1)


def test_ball_hits_materialization_cap(lattice):
    with pytest.raises(GraphError):
        ball(lattice, 0, 100, max_vertices=10)


def test_cap_env_override(monkeypatch):
    monkeypatch.setenv("NLRESOLVENT_MAX_VERTICES", "17")
    assert materialization_cap() == 17
    # explicit argument wins over the environment
    assert materialization_cap(5) == 5


# --- Laplacian and energy ------------------------------------------------


def test_laplacian_of_delta_on_pair(pair):
    d0 = VertexFunction.delta(0)
    assert laplacian_apply(pair, d0, 0) == pytest.approx(1.0)
    assert laplacian_apply(pair, d0, 1) == pytest.approx(-1.0)


def test_laplacian_divides_by_measure():
    g = ExplicitGraph.from_edges([(0, 1, 1.0)], measures={0: 2.0, 1: 1.0})
    d0 = VertexFunction.delta(0)
    assert laplacian_apply(g, d0, 0) == pytest.approx(0.5)


def test_laplacian_kills_constants(path3):
    c = VertexFunction({0: 2.5, 1: 2.5, 2: 2.5})
    assert laplacian_apply(path3, c, 1) == 0.0


def test_energy_form_on_pair(pair):
    d0 = VertexFunction.delta(0)
    d1 = VertexFunction.delta(1)
    assert energy(pair, d0, d0) == pytest.approx(1.0)
    assert energy(pair, d0, d1) == pytest.approx(-1.0)


def _small_graphs():
    """Strategy: explicit graph on 2..6 vertices plus two functions."""

    def build(n, edge_bits, weights, measures, uvals, vvals):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        edges = [
            (i, j, w)
            for (i, j), keep, w in zip(pairs, edge_bits, weights)
            if keep
        ]
        g = ExplicitGraph.from_edges(
            edges,
            measures={i: m for i, m in enumerate(measures[:n])},
            vertices=range(n),
        )
        u = VertexFunction({i: uvals[i] for i in range(n)})
        v = VertexFunction({i: vvals[i] for i in range(n)})
        return g, u, v

    finite = st.floats(
        min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False
    )
    wgt = st.floats(min_value=0.1, max_value=3.0)
    msr = st.floats(min_value=0.2, max_value=2.0)
    return st.integers(min_value=2, max_value=6).flatmap(
        lambda n: st.builds(
            build,
            st.just(n),
            st.lists(st.booleans(), min_size=15, max_size=15),
            st.lists(wgt, min_size=15, max_size=15),
            st.lists(msr, min_size=6, max_size=6),
            st.lists(finite, min_size=6, max_size=6),
            st.lists(finite, min_size=6, max_size=6),
        )
    )


@given(_small_graphs())
@settings(max_examples=200, deadline=None)
def test_green_formula(guv):
    # Q(u, v) = sum_x m(x) Lu(x) v(x) for finitely supported functions
    g, u, v = guv
    lhs = energy(g, u, v)
    rhs = math.fsum(
        g.measure(x) * laplacian_apply(g, u, x) * v(x) for x in g.vertices()
    )
    assert lhs == pytest.approx(rhs, abs=1e-10)


@given(_small_graphs())
@settings(max_examples=100, deadline=None)
def test_energy_symmetric_and_nonnegative(guv):
    g, u, v = guv
    assert energy(g, u, v) == pytest.approx(energy(g, v, u), rel=1e-12, abs=1e-12)
    assert energy(g, u, u) >= 0.0


# --- VertexFunction ------------------------------------------------------


def test_vertex_function_drops_zeros():
    u = VertexFunction({0: 1.0, 1: 0.0, 2: -2.0})
    assert u.support == (0, 2)
    assert u(1) == 0.0
    assert u(99) == 0.0


def test_vertex_function_rejects_non_finite():
    with pytest.raises(GraphError):
        VertexFunction({0: math.nan})
    with pytest.raises(GraphError):
        VertexFunction({0: math.inf})


def test_vertex_function_delta_and_norm():
    d = VertexFunction.delta(3, -2.0)
    assert d(3) == -2.0
    assert d.sup_norm() == 2.0
    assert VertexFunction.zero().sup_norm() == 0.0
    assert VertexFunction.zero().support == ()


def test_vertex_function_as_dict_is_a_copy():
    u = VertexFunction({0: 1.0})
    u.as_dict()[0] = 5.0
    assert u(0) == 1.0


# --- degrees and edge weights --------------------------------------------


def test_weighted_degree_and_edge_weight(pair):
    s = star(3)
    assert weighted_degree(s, 0) == pytest.approx(3.0)
    assert weighted_degree(s, 1) == pytest.approx(1.0)
    assert edge_weight(pair, 0, 1) == 1.0
    assert edge_weight(pair, 0, 0) == 0.0


# --- validation -----------------------------------------------------------


def test_validate_accepts_good_graph(path3):
    rep = validate(path3, path3.vertices())
    assert rep.ok
    assert rep.failures == ()


def test_validate_flags_asymmetry():
    g = ExplicitGraph({0: 1.0, 1: 1.0}, {0: {1: 1.0}, 1: {0: 2.0}})
    rep = validate(g, [0, 1])
    assert not rep.ok
    assert any("symmetry at" in f for f in rep.failures)


def test_validate_flags_bad_measure():
    g = ExplicitGraph({0: 0.0, 1: 1.0}, {0: {1: 1.0}, 1: {0: 1.0}})
    rep = validate(g, [0, 1])
    assert not rep.ok
    assert any("measure" in f for f in rep.failures)


def test_validate_flags_negative_weight():
    g = ExplicitGraph({0: 1.0, 1: 1.0}, {0: {1: -1.0}, 1: {0: -1.0}})
    rep = validate(g, [0, 1])
    assert not rep.ok


# --- construction and JSON ------------------------------------------------


def test_from_edges_rejects_self_loop():
    with pytest.raises(GraphError):
        ExplicitGraph.from_edges([(0, 0, 1.0)])


def test_from_edges_rejects_negative_weight():
    with pytest.raises(GraphError):
        ExplicitGraph.from_edges([(0, 1, -0.5)])


def test_from_edges_zero_weight_is_no_edge():
    g = ExplicitGraph.from_edges([(0, 1, 0.0)], vertices=[0, 1])
    assert edge_weight(g, 0, 1) == 0.0
    assert len(g) == 2


def test_empty_graph_rejected():
    with pytest.raises(GraphError):
        ExplicitGraph({}, {})


def test_json_round_trip():
    g = ExplicitGraph.from_edges([(0, 1, 0.5), (1, 2, 2.0)], measures={2: 3.0})
    doc = graph_to_json(g)
    g2 = graph_from_json(doc)
    assert g2.vertices() == g.vertices()
    for x in g.vertices():
        assert g2.measure(x) == g.measure(x)
        assert g2.neighbors(x) == g.neighbors(x)


def test_json_keeps_conflicting_rows_for_validate():
    # a document listing b(0,1) != b(1,0) must stay asymmetric so that
    # validate can report it, rather than being silently repaired
    doc = {
        "vertices": [{"id": 0, "m": 1.0}, {"id": 1, "m": 1.0}],
        "edges": [{"u": 0, "v": 1, "b": 1.0}, {"u": 1, "v": 0, "b": 2.0}],
    }
    g = graph_from_json(doc)
    rep = validate(g, [0, 1])
    assert not rep.ok
    assert any("symmetry" in f for f in rep.failures)
