#!/usr/bin/env python
# -*- coding: utf-8 -*-
import json
import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from cliquesieve.cliques import (
    CliqueBudgetExceeded, CliqueIndex, CliqueQuery, CliqueStats,
    NotAnEdgeException, all_edge_clique_numbers, edge_clique_at_least,
    edge_clique_number, max_clique, uv_clique, write_clique_stats, _bit_count
)
from cliquesieve.graphgen import (
    EdgeLabel, PerturbedGraph, build_rgg, classify_edges, perturb
)
from cliquesieve.oracles import (
    brute_force_clique_number, brute_force_edge_clique_number
)
from cliquesieve.space import PointCloud, make_space, sample_points
from strategies import graphs_with_edges, small_graphs


@pytest.mark.parametrize(
    'bits,expected',
    [(0, 0), (1, 1), (0b1011, 3), ((1 << 200) | 1, 2), ((1 << 64) - 1, 64)]
)
def test_bit_count(bits, expected):
    """
    Arrange/Act: Count the set bits of a bitset.
    Assert: The count is right, including past 64 bits.
    """
    assert _bit_count(bits) == expected


@pytest.fixture(scope='module', name='observed')
def observed_fix() -> PerturbedGraph:
    """
    Get a lightly perturbed graph on 120 torus points.

    :return: the observed graph
    """
    cloud = sample_points(make_space('flat-torus', 2), 120, seed=8)
    return perturb(build_rgg(cloud, 0.15), 0.1, 0.02, seed=3)


@pytest.mark.parametrize(
    'graph,expected',
    [
        (nx.complete_graph(6), 6),
        (nx.complete_graph(5), 5),
        (nx.petersen_graph(), 2),
        (nx.cycle_graph(4), 2),
        (nx.empty_graph(4), 1),
        (nx.empty_graph(0), 0),
    ]
)
def test_max_clique(graph, expected):
    """
    Arrange/Act: Find a maximum clique of a known graph.
    Assert: It has the known size and is a clique.
    """
    clique = max_clique(graph)
    assert len(clique) == expected
    assert all(graph.has_edge(a, b) for a in clique for b in clique if a != b)


@pytest.mark.parametrize(
    'graph,edge,expected',
    [
        (nx.complete_graph(6), (0, 1), 6),
        (nx.petersen_graph(), (0, 1), 2),
        (nx.cycle_graph(4), (0, 1), 2),
        (nx.Graph([(0, 1), (1, 2), (0, 2), (2, 3)]), (2, 3), 2),
        (nx.Graph([(0, 1), (1, 2), (0, 2), (2, 3)]), (0, 2), 3),
    ]
)
def test_edge_clique_number(graph, edge, expected):
    """
    Arrange/Act: Get an edge's clique number in a known graph.
    Assert: It has the known value.
    """
    assert edge_clique_number(graph, *edge) == expected
    assert edge_clique_number(graph, *reversed(edge)) == expected


@settings(max_examples=60, deadline=None)
@given(graph=small_graphs())
def test_max_clique_matches_brute_force(graph):
    """
    Arrange: Draw a small random graph.
    Act: Find a maximum clique.
    Assert: Its size matches subset enumeration.
    """
    assert len(max_clique(graph)) == brute_force_clique_number(graph)


@settings(max_examples=60, deadline=None)
@given(graph=graphs_with_edges())
def test_edge_clique_numbers_match_brute_force(graph):
    """
    Arrange: Draw a small random graph with edges.
    Act: Get every edge's clique number, exactly and by threshold.
    Assert: They match subset enumeration and the threshold answers agree
        with the exact values.
    """
    index = CliqueIndex(graph)
    for u, v in graph.edges:
        omega = edge_clique_number(index, u, v)
        assert omega == brute_force_edge_clique_number(graph, u, v)
        for tau in range(2, omega + 3):
            assert edge_clique_at_least(index, u, v, tau) == (omega >= tau)


def test_uv_clique_contains_the_edge():
    """
    Arrange: Hang a triangle off a 5-clique.
    Act: Get the largest clique through an edge of the 5-clique.
    Assert: It is the 5-clique.
    """
    g = nx.complete_graph(5)
    g.add_edges_from([(4, 5), (5, 6), (4, 6)])
    assert uv_clique(g, 1, 3) == (0, 1, 2, 3, 4)
    assert uv_clique(g, 5, 6) == (4, 5, 6)


def test_threshold_trivial_cases():
    """
    Arrange: Take a single edge and a triangle.
    Act: Ask about thresholds 2 and 3.
    Assert: Every edge reaches 2 and only triangle edges reach 3.
    """
    g = nx.Graph([(0, 1), (2, 3), (3, 4), (2, 4)])
    assert edge_clique_at_least(g, 0, 1, 2)
    assert not edge_clique_at_least(g, 0, 1, 3)
    assert edge_clique_at_least(g, 2, 3, 3)
    with pytest.raises(ValueError):
        edge_clique_at_least(g, 0, 1, 1)


@pytest.mark.parametrize('edge', [(0, 2), (0, 0), (0, 99)])
def test_not_an_edge(edge):
    """
    Arrange: Take a path.
    Act: Ask for the clique number of a pair that isn't an edge.
    Assert: `NotAnEdgeException` is raised, naming the pair.
    """
    g = nx.path_graph(3)
    with pytest.raises(NotAnEdgeException) as exc:
        edge_clique_number(g, *edge)
    assert exc.value.edge == edge


def test_budget_exceeded():
    """
    Arrange: Take K6.
    Act: Search with a budget of one node.
    Assert: `CliqueBudgetExceeded` is raised, carrying the budget and edge.
    """
    g = nx.complete_graph(6)
    with pytest.raises(CliqueBudgetExceeded) as exc:
        edge_clique_number(g, 0, 1, budget=1)
    assert exc.value.budget == 1
    assert exc.value.edge == (0, 1)
    with pytest.raises(CliqueBudgetExceeded):
        max_clique(g, budget=1)
    assert edge_clique_number(g, 0, 1, budget=None) == 6


def test_clique_query():
    """
    Arrange: Build exact and threshold queries on K5.
    Act: Evaluate them.
    Assert: They answer with the value and the comparison.
    """
    g = nx.complete_graph(5)
    assert CliqueQuery(graph=g, edge=(0, 1)).evaluate() == 5
    assert CliqueQuery(graph=g, edge=(0, 1), tau=5).evaluate() is True
    assert CliqueQuery(graph=g, edge=(0, 1), tau=6).evaluate() is False


def test_stats_on_a_triangle():
    """
    Arrange: Observe a hidden triangle unchanged.
    Act: Compute every edge's clique number.
    Assert: Each edge has 3, the good class summarises them and the gap is
        undefined for want of bad edges.
    """
    cloud = PointCloud(
        make_space('unit-cube', 2), np.array([[0.1, 0.1], [0.15, 0.1], [0.1, 0.15]])
    )
    pg = perturb(build_rgg(cloud, 0.1), 0.0, 0.0, seed=0)
    stats = all_edge_clique_numbers(pg, classify_edges(pg))
    assert stats.omega.tolist() == [3, 3, 3]
    summary = stats.summary()
    assert tuple(summary[EdgeLabel.GOOD]) == (3, 3, 3.0, 3)
    assert summary[EdgeLabel.BAD].count == 0
    assert stats.gap is None
    assert stats.max_omega == 3


def test_stats_gap():
    """
    Arrange: Build statistics with good and bad edges by hand.
    Act: Take the gap.
    Assert: It is the least good value less the largest bad one.
    """
    stats = CliqueStats(
        edges=np.array([[0, 1], [0, 2], [1, 2], [2, 3]]),
        labels=[EdgeLabel.GOOD, EdgeLabel.GOOD, EdgeLabel.BAD, EdgeLabel.INDETERMINATE],
        omega=[7, 5, 3, 9]
    )
    assert stats.gap == 2
    assert stats.values(EdgeLabel.GOOD).tolist() == [7, 5]
    assert stats.export()['bad'] == {'min': 3, 'max': 3, 'mean': 3.0, 'count': 1}


def test_workers_agree(observed):
    """
    Arrange: Take the observed graph and its labels.
    Act: Compute clique numbers in this process and in two workers.
    Assert: The results are the same.
    """
    labels = classify_edges(observed)
    serial = all_edge_clique_numbers(observed, labels)
    pooled = all_edge_clique_numbers(observed, labels, workers=2, chunk_size=16)
    assert np.array_equal(serial.omega, pooled.omega)
    assert serial.labels == pooled.labels


def test_workers_report_budget(observed):
    """
    Arrange: Take the observed graph.
    Act: Compute clique numbers in workers with a tiny budget.
    Assert: `CliqueBudgetExceeded` is raised here, naming an edge.
    """
    with pytest.raises(CliqueBudgetExceeded) as exc:
        all_edge_clique_numbers(
            observed, classify_edges(observed), budget=1, workers=2, chunk_size=16
        )
    assert exc.value.edge is not None


def test_write_clique_stats(tmp_path, observed):
    """
    Arrange: Compute the observed graph's statistics.
    Act: Write them.
    Assert: The CSV has a row per edge and the JSON summarises each class.
    """
    stats = all_edge_clique_numbers(observed, classify_edges(observed))
    csv_path, json_path = write_clique_stats(
        stats, tmp_path / 'omega.csv', tmp_path / 'summary.json'
    )
    rows = csv_path.read_text(encoding='utf-8').splitlines()
    assert rows[0] == 'u,v,label,omega'
    assert len(rows) == len(observed.edges) + 1
    summary = json.loads(json_path.read_text(encoding='utf-8'))
    assert set(summary) == {'good', 'bad', 'indeterminate'}
    assert sum(v['count'] for v in summary.values()) == len(observed.edges)
