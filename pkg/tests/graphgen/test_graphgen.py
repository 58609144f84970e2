#!/usr/bin/env python
# -*- coding: utf-8 -*-
import math
import numpy as np
import pytest
from cliquesieve.graphgen import (
    EdgeLabel, PerturbedGraph, Provenance, build_rgg, classify_edges,
    degree_claim_holds, label_counts, occupancy_claim_holds, perturb,
    read_edge_list, write_edge_list
)
from cliquesieve.measure import (
    MassBounds, assumption_a_holds, ball_mass_bounds, radius_for_target_sn
)
from cliquesieve.space import PointCloud, make_space, sample_points


@pytest.fixture(scope='module', name='cloud')
def cloud_fix() -> PointCloud:
    """
    Get 300 uniform points on the flat torus.

    :return: the points
    """
    return sample_points(make_space('flat-torus', 2), 300, seed=11)


@pytest.fixture(scope='module', name='truth')
def truth_fix(cloud):
    """
    Get the hidden graph on the fixture points.

    :return: the graph
    """
    return build_rgg(cloud, 0.1)


def _cloud(kind, points):
    points = np.asarray(points, dtype=float)
    return PointCloud(make_space(kind, points.shape[1]), points)


def test_build_rgg_hand_example():
    """
    Arrange: Put A=(0,0), B=(0.5,0) and C=(0,0.9) in the unit square.
    Act: Build the graph with r = 0.5.
    Assert: AB (at distance exactly r) is the only edge.
    """
    g = build_rgg(_cloud('unit-cube', [[0, 0], [0.5, 0], [0, 0.9]]), 0.5)
    assert g.edges.tolist() == [[0, 1]]
    assert g.has_edge(1, 0)
    assert not g.has_edge(0, 2)


def test_build_rgg_wraps():
    """
    Arrange: Put two points either side of the torus seam.
    Act: Build the graph with r = 0.2.
    Assert: They are joined.
    """
    g = build_rgg(_cloud('flat-torus', [[0.05, 0], [0.95, 0]]), 0.2)
    assert g.edges.tolist() == [[0, 1]]


def test_build_rgg_matches_pairwise_check():
    """
    Arrange: Sample 50 uniform points.
    Act: Build the graph.
    Assert: The edges are exactly the pairs within r by an O(n^2) check.
    """
    cloud = sample_points(make_space('flat-torus', 2), 50, seed=1)
    r = 0.2
    g = build_rgg(cloud, r)
    d = cloud.space.pairwise(cloud.points)
    expected = [[i, j] for i in range(50) for j in range(i + 1, 50) if d[i, j] <= r]
    assert g.edges.tolist() == expected
    assert g.degrees().sum() == 2 * len(expected)


def test_build_rgg_rejects_radius(cloud):
    """
    Arrange/Act: Build with a non-positive radius.
    Assert: `ValueError` is raised.
    """
    with pytest.raises(ValueError):
        build_rgg(cloud, 0.0)


def test_perturb_identity(truth):
    """
    Arrange/Act: Perturb with p = q = 0.
    Assert: The observed graph is the hidden one, every edge kept.
    """
    pg = perturb(truth, 0.0, 0.0, seed=1)
    assert np.array_equal(pg.edges, truth.edges)
    assert not pg.inserted.any()
    assert set(pg.provenance()) == {Provenance.KEPT}


def test_perturb_complement():
    """
    Arrange: Build a small hidden graph.
    Act: Perturb with p = q = 1.
    Assert: The observed graph is the exact complement, every edge inserted.
    """
    cloud = sample_points(make_space('unit-cube', 2), 30, seed=2)
    truth = build_rgg(cloud, 0.3)
    pg = perturb(truth, 1.0, 1.0, seed=5)
    hidden = set(map(tuple, truth.edges.tolist()))
    complement = [
        (i, j) for i in range(30) for j in range(i + 1, 30) if (i, j) not in hidden
    ]
    assert list(map(tuple, pg.edges.tolist())) == complement
    assert pg.inserted.all()


def test_perturb_provenance_is_consistent(truth):
    """
    Arrange/Act: Perturb the hidden graph.
    Assert: Kept edges are hidden edges, inserted edges are not, and the
        edges come out sorted.
    """
    pg = perturb(truth, 0.3, 0.01, seed=9)
    hidden = set(map(tuple, truth.edges.tolist()))
    assert all(tuple(e) in hidden for e in pg.kept_edges().tolist())
    assert not any(tuple(e) in hidden for e in pg.inserted_edges().tolist())
    rows = list(map(tuple, pg.edges.tolist()))
    assert rows == sorted(rows)
    assert all(u < v for u, v in rows)


def test_perturb_is_deterministic(truth):
    """
    Arrange/Act: Perturb twice with the same seed, once with another.
    Assert: The same seed gives the same graph.
    """
    a = perturb(truth, 0.3, 0.01, seed=9)
    b = perturb(truth, 0.3, 0.01, seed=9)
    c = perturb(truth, 0.3, 0.01, seed=10)
    assert np.array_equal(a.edges, b.edges)
    assert np.array_equal(a.inserted, b.inserted)
    assert not np.array_equal(a.edges, c.edges)


def test_perturb_rates():
    """
    Arrange: Build a hidden graph on 500 points.
    Act: Perturb it with p = 0.3, q = 0.01 under 20 seeds.
    Assert: The pooled deletion and insertion fractions are within three
        binomial standard errors of p and q.
    """
    cloud = sample_points(make_space('flat-torus', 2), 500, seed=3)
    truth = build_rgg(cloud, 0.1)
    m = len(truth.edges)
    non_edges = 500 * 499 // 2 - m
    deleted = inserted = 0
    seeds = range(20)
    for seed in seeds:
        pg = perturb(truth, 0.3, 0.01, seed=seed)
        deleted += m - len(pg.kept_edges())
        inserted += len(pg.inserted_edges())
    trials_del, trials_ins = m * len(seeds), non_edges * len(seeds)
    se_del = math.sqrt(0.3 * 0.7 / trials_del)
    se_ins = math.sqrt(0.01 * 0.99 / trials_ins)
    assert abs(deleted / trials_del - 0.3) <= 3 * se_del
    assert abs(inserted / trials_ins - 0.01) <= 3 * se_ins


@pytest.mark.parametrize('p,q', [(-0.1, 0.0), (0.0, 1.5)])
def test_perturb_rejects_probabilities(truth, p, q):
    """
    Arrange/Act: Perturb with a probability outside [0, 1].
    Assert: `ValueError` is raised.
    """
    with pytest.raises(ValueError):
        perturb(truth, p, q, seed=0)


def test_classify_isolated_endpoints_are_bad():
    """
    Arrange: Insert an edge between two vertices with no hidden neighbours.
    Act: Classify it.
    Assert: It is bad.
    """
    truth = build_rgg(_cloud('unit-cube', [[0.1, 0.1], [0.9, 0.9]]), 0.1)
    pg = PerturbedGraph(truth, 0.0, 1.0, None, np.array([[0, 1]]), np.array([True]))
    assert classify_edges(pg) == {(0, 1): EdgeLabel.BAD}


def test_classify_hand_example():
    """
    Arrange: Put u and v 2.5r apart, with a neighbour of each within r of
        the other's neighbour, and insert uv.
    Act: Classify the observed edges.
    Assert: uv is indeterminate and the hidden edges are good.
    """
    # u, x, y, v along a line; r = 0.1
    cloud = _cloud('unit-cube', [[0.1, 0.5], [0.18, 0.5], [0.27, 0.5], [0.35, 0.5]])
    truth = build_rgg(cloud, 0.1)
    assert truth.edges.tolist() == [[0, 1], [1, 2], [2, 3]]
    edges = np.vstack([truth.edges, [[0, 3]]])
    pg = PerturbedGraph(truth, 0.0, 0.0, None, edges, np.array([False, False, False, True]))
    labels = classify_edges(pg)
    assert labels[(0, 3)] == EdgeLabel.INDETERMINATE
    assert labels[(0, 1)] == labels[(1, 2)] == labels[(2, 3)] == EdgeLabel.GOOD


def test_classify_matches_definition(truth):
    """
    Arrange: Perturb the hidden graph heavily.
    Act: Classify the observed edges.
    Assert: Every label agrees with a brute-force reading of the
        definitions, and the classes partition the edges.
    """
    pg = perturb(truth, 0.2, 0.02, seed=4)
    labels = classify_edges(pg)
    d = truth.cloud.space.pairwise(truth.cloud.points)
    r = truth.r
    nbrs = [np.flatnonzero((d[i] <= r) & (np.arange(truth.n) != i)) for i in range(truth.n)]
    for u, v in pg.edges.tolist():
        if d[u, v] <= r:
            expected = EdgeLabel.GOOD
        elif len(nbrs[u]) and len(nbrs[v]) and (d[np.ix_(nbrs[u], nbrs[v])] <= r).any():
            expected = EdgeLabel.INDETERMINATE
        else:
            expected = EdgeLabel.BAD
        assert labels[(u, v)] == expected
    assert sum(label_counts(labels).values()) == len(pg.edges)


def test_claims_hand_example():
    """
    Arrange: Stack three points on top of each other.
    Act: Check the degree and occupancy claims.
    Assert: They hold or fail as the thresholds say.
    """
    truth = build_rgg(_cloud('unit-cube', [[0.5], [0.5], [0.5]]), 0.2)
    assert degree_claim_holds(truth, s=1.0 / 3.0)
    assert not degree_claim_holds(truth, s=3.0)
    assert occupancy_claim_holds(truth, MassBounds(s=1.0 / 3.0, rho=1.0))
    assert not occupancy_claim_holds(truth, MassBounds(s=0.2, rho=1.0))


@pytest.mark.slow
def test_claims_hold_under_assumption_a():
    """
    Arrange: Take n = 600 on the flat torus with sn = 90, which satisfies
        Assumption-A.
    Act: Check the degree and occupancy claims on 100 seeded clouds.
    Assert: Each holds in at least 95 of them.
    """
    space = make_space('flat-torus', 2)
    n = 600
    r = radius_for_target_sn(space, n, 90.0)
    assert r < 0.5
    mass = ball_mass_bounds(space, r)
    assert assumption_a_holds(mass, n)
    degree, occupancy = 0, 0
    for seed in range(100):
        truth = build_rgg(sample_points(space, n, seed=seed), r)
        degree += degree_claim_holds(truth, mass.s)
        occupancy += occupancy_claim_holds(truth, mass)
    assert degree >= 95
    assert occupancy >= 95


def test_write_read_edge_list(tmp_path, truth):
    """
    Arrange: Write a perturbed graph's edge list.
    Act: Read it back against the same points.
    Assert: The edges, provenance and parameters survive.
    """
    pg = perturb(truth, 0.1, 0.005, seed=21)
    labels = classify_edges(pg)
    path = write_edge_list(pg, labels, tmp_path / 'edges.txt')
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[:5] == ['# n=300', '# r=0.1', '# p=0.1', '# q=0.005', '# seed=21']
    u, v = pg.edges[0].tolist()
    assert lines[5] == f"{u} {v} {pg.provenance()[0].value} {labels[(u, v)].value}"
    loaded = read_edge_list(path, truth.cloud)
    assert np.array_equal(loaded.edges, pg.edges)
    assert np.array_equal(loaded.inserted, pg.inserted)
    assert (loaded.p, loaded.q, loaded.seed) == (0.1, 0.005, 21)
    assert np.array_equal(loaded.truth.edges, truth.edges)
