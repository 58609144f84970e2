#!/usr/bin/env python
# -*- coding: utf-8 -*-
import math
import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from cliquesieve.errors import DimensionMismatchException
from cliquesieve.filtering import clique_filter
from cliquesieve.graphgen import build_rgg, perturb
from cliquesieve.metrics import (
    DistanceMatrix, all_pairs_distances, approximation_factor,
    recovery_stretch, report_as_dict, write_distance_matrix
)
from cliquesieve.oracles import floyd_warshall_hops
from cliquesieve.space import PointCloud, make_space, sample_points
from strategies import small_graphs


def test_path_distances():
    """
    Arrange: Take the path a-b-c.
    Act: Get all-pairs distances.
    Assert: The ends are two hops apart.
    """
    dm = all_pairs_distances(nx.Graph([('a', 'b'), ('b', 'c')]))
    assert dm.nodes == ('a', 'b', 'c')
    assert dm[0, 2] == 2.0
    assert dm[1, 1] == 0.0


def test_components_are_infinitely_far():
    """
    Arrange: Take two disjoint edges.
    Act: Get all-pairs distances.
    Assert: Pairs across the components are at infinity.
    """
    dm = all_pairs_distances(nx.Graph([(0, 1), (2, 3)]))
    assert math.isinf(dm[0, 2])
    assert dm[2, 3] == 1.0


def test_empty_graph_distances():
    """
    Arrange/Act: Get distances on a graph with no nodes.
    Assert: The matrix is empty.
    """
    assert all_pairs_distances(nx.Graph()).n == 0


@settings(max_examples=60, deadline=None)
@given(graph=small_graphs(min_nodes=1))
def test_distances_match_floyd_warshall(graph):
    """
    Arrange: Draw a small random graph.
    Act: Get all-pairs distances.
    Assert: They match Floyd-Warshall relaxation.
    """
    assert np.array_equal(all_pairs_distances(graph).values, floyd_warshall_hops(graph))


@settings(max_examples=60, deadline=None)
@given(graph=small_graphs(min_nodes=1))
def test_distances_form_a_metric(graph):
    """
    Arrange: Draw a small random graph.
    Act: Get all-pairs distances.
    Assert: They are symmetric, zero exactly on the diagonal and obey the
        triangle inequality (with inf for unreachable pairs).
    """
    d = all_pairs_distances(graph).values
    assert np.array_equal(d, d.T)
    assert np.array_equal(d == 0, np.eye(len(d), dtype=bool))
    assert np.all(d[:, np.newaxis, :] <= d[:, :, np.newaxis] + d[np.newaxis, :, :])


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_approximation_factor_properties(data):
    """
    Arrange: Draw two random graphs on the same vertices.
    Act: Compare their metrics both ways, and each with itself.
    Assert: The factor is symmetric, at least 1, and 1 exactly when the
        metrics are identical.
    """
    first = data.draw(small_graphs(min_nodes=1))
    n = first.number_of_nodes()
    second = data.draw(small_graphs(min_nodes=n, max_nodes=n))
    d1, d2 = all_pairs_distances(first), all_pairs_distances(second)
    forward, backward = approximation_factor(d1, d2), approximation_factor(d2, d1)
    assert forward.alpha == backward.alpha
    assert forward.mismatch == backward.mismatch
    assert forward.alpha >= 1.0
    assert (forward.alpha == 1.0) == np.array_equal(d1.values, d2.values)
    assert approximation_factor(d1, d1).alpha == 1.0


def test_distance_matrix_shape():
    """
    Arrange/Act: Build a matrix of the wrong shape.
    Assert: `DimensionMismatchException` is raised.
    """
    with pytest.raises(DimensionMismatchException):
        DistanceMatrix(nodes=[0, 1, 2], values=np.zeros((2, 2)))


def test_approximation_identity():
    """
    Arrange/Act: Compare a metric with itself.
    Assert: The factor is 1.
    """
    dm = all_pairs_distances(nx.petersen_graph())
    report = approximation_factor(dm, dm)
    assert report.alpha == 1.0
    assert report.worst_pair is None
    assert not report.mismatch


def test_approximation_scaled():
    """
    Arrange: Double every distance of a metric.
    Act: Compare the two.
    Assert: The factor is 2 both ways round.
    """
    dm = all_pairs_distances(nx.path_graph(5))
    doubled = DistanceMatrix(dm.nodes, 2.0 * dm.values)
    assert approximation_factor(dm, doubled).alpha == 2.0
    assert approximation_factor(doubled, dm).alpha == 2.0


def test_approximation_chord():
    """
    Arrange: Take C4 and C4 with a chord.
    Act: Compare them.
    Assert: The factor is 2, attained across the chord.
    """
    c4 = nx.cycle_graph(4)
    chorded = c4.copy()
    chorded.add_edge(0, 2)
    report = approximation_factor(all_pairs_distances(c4), all_pairs_distances(chorded))
    assert report.alpha == 2.0
    assert report.worst_pair == (0, 2)


def test_approximation_mismatch():
    """
    Arrange: Take a path and the same vertices with one edge missing.
    Act: Compare them.
    Assert: The factor is infinite and the mismatch is flagged.
    """
    path = all_pairs_distances(nx.path_graph(3))
    split = nx.Graph([(0, 1)])
    split.add_node(2)
    report = approximation_factor(path, all_pairs_distances(split))
    assert math.isinf(report.alpha)
    assert report.mismatch
    assert report_as_dict(report) == {'alpha': math.inf, 'worst_pair': [0, 2], 'mismatch': True}


def test_approximation_needs_one_vertex_set():
    """
    Arrange/Act: Compare metrics on different vertex sets.
    Assert: `DimensionMismatchException` is raised.
    """
    with pytest.raises(DimensionMismatchException):
        approximation_factor(
            all_pairs_distances(nx.path_graph(3)),
            all_pairs_distances(nx.path_graph(4))
        )


def test_recovery_unperturbed():
    """
    Arrange: Observe a hidden graph unchanged.
    Act: Filter with tau = 2 and measure recovery.
    Assert: The metric is recovered exactly and every event holds.
    """
    cloud = sample_points(make_space('flat-torus', 2), 150, seed=6)
    truth = build_rgg(cloud, 0.15)
    fg = clique_filter(perturb(truth, 0.0, 0.0, seed=1), 2)
    report = recovery_stretch(truth, fg)
    assert report.alpha == 1.0
    assert report.events
    assert report.implication_holds


def test_recovery_emptied_graph():
    """
    Arrange: Observe a hidden path unchanged.
    Act: Filter with tau = 3, which removes every edge, and measure recovery.
    Assert: The stretch is infinite, the mismatch is flagged and the kept
        hidden edges were not all kept by the filter.
    """
    cloud = PointCloud(make_space('unit-cube', 1), np.array([[0.1], [0.2], [0.3]]))
    truth = build_rgg(cloud, 0.12)
    fg = clique_filter(perturb(truth, 0.0, 0.0, seed=1), 3)
    assert len(fg.edges) == 0
    report = recovery_stretch(truth, fg)
    assert math.isinf(report.alpha)
    assert report.approx.mismatch
    assert report.e1 and report.e3 and not report.e2
    assert report.implication_holds
    out = report_as_dict(report)
    assert out['e2'] is False and out['implication_holds'] is True


def test_write_distance_matrix(tmp_path):
    """
    Arrange: Take two disjoint edges' distances.
    Act: Write them.
    Assert: Every pair is listed once, with 'inf' across components.
    """
    dm = all_pairs_distances(nx.Graph([(0, 1), (2, 3)]))
    path = write_distance_matrix(dm, tmp_path / 'd.csv')
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines == ['i,j,dist', '0,1,1', '0,2,inf', '0,3,inf', '1,2,inf', '1,3,inf', '2,3,1']
