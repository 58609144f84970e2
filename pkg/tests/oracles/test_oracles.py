#!/usr/bin/env python
# -*- coding: utf-8 -*-
import math
import networkx as nx
import numpy as np
import pytest
from cliquesieve.bounds import (
    BlockProfile, er_clique_quantities, expected_uv_cliques,
    expected_uv_cliques_two_balls, janson_bounds
)
from cliquesieve.cliques import NotAnEdgeException
from cliquesieve.oracles import (
    Estimate, brute_force_clique_number, brute_force_edge_clique_number,
    floyd_warshall_hops, simulate_block_cliques, simulate_er_cliques,
    simulate_two_ball_cliques
)


def test_brute_force_clique_number():
    """
    Arrange/Act: Enumerate the clique number of known graphs.
    Assert: K4 gives 4, the Petersen graph 2 and the null graph 0.
    """
    assert brute_force_clique_number(nx.complete_graph(4)) == 4
    assert brute_force_clique_number(nx.petersen_graph()) == 2
    assert brute_force_clique_number(nx.Graph()) == 0


def test_brute_force_edge_clique_number():
    """
    Arrange/Act: Enumerate edge clique numbers in a triangle with a tail.
    Assert: Triangle edges give 3, the tail 2, and a non-edge is refused.
    """
    g = nx.Graph([(0, 1), (1, 2), (0, 2), (2, 3)])
    assert brute_force_edge_clique_number(g, 0, 1) == 3
    assert brute_force_edge_clique_number(g, 3, 2) == 2
    with pytest.raises(NotAnEdgeException):
        brute_force_edge_clique_number(g, 0, 3)


def test_floyd_warshall_hops():
    """
    Arrange/Act: Relax the distances of a path plus an isolated vertex.
    Assert: Path distances are hop counts and the isolated vertex is at
        infinity.
    """
    g = nx.path_graph(3)
    g.add_node(3)
    d = floyd_warshall_hops(g)
    assert d[0, 2] == 2.0
    assert math.isinf(d[0, 3])
    assert np.array_equal(d, d.T)


@pytest.mark.parametrize(
    'estimate,value,expected',
    [
        (Estimate(mean=1.0, stderr=0.1, trials=10), 1.25, True),
        (Estimate(mean=1.0, stderr=0.1, trials=10), 1.35, False),
        (Estimate(mean=0.0, stderr=0.0, trials=10), 0.0, True),
    ]
)
def test_estimate_within(estimate, value, expected):
    """
    Arrange/Act: Compare values to an estimate.
    Assert: Only those within three standard errors are accepted.
    """
    assert estimate.within(value) == expected


def test_block_simulation_matches_formula():
    """
    Arrange: Take one block of 20 vertices, k = 3, q = 0.1.
    Act: Simulate the block model.
    Assert: The mean is within three standard errors of the closed form.
    """
    est = simulate_block_cliques((20,), k=3, q=0.1, trials=10**5, seed=1)
    expected = expected_uv_cliques(BlockProfile(sizes=(20,), k=3, q=0.1)).value
    assert est.within(expected), (est, expected)


def test_block_simulation_with_deletion():
    """
    Arrange: Take two blocks with deletions.
    Act: Simulate the block model.
    Assert: The mean is within three standard errors of the closed form.
    """
    profile = BlockProfile(sizes=(3, 4), k=3, q=0.4, p=0.3)
    est = simulate_block_cliques(profile.sizes, k=3, q=0.4, p=0.3, trials=50000, seed=2)
    assert est.within(expected_uv_cliques(profile).value)


def test_two_ball_simulation_matches_formula():
    """
    Arrange: Take balls of 4 and 3 points, k = 2.
    Act: Simulate the two-ball model.
    Assert: The mean is within three standard errors of the closed form.
    """
    est = simulate_two_ball_cliques(4, 3, k=2, q=0.3, p=0.2, trials=50000, seed=3)
    expected = expected_uv_cliques_two_balls(4, 3, 2, 0.3, 0.2).value
    assert est.within(expected), (est, expected)


def test_er_simulation_matches_formula():
    """
    Arrange: Take G(12, 1/2) and triangles.
    Act: Simulate it.
    Assert: The clique count and dependency sum are within three standard
        errors of the closed forms, and the chance of no triangle respects
        the extended Janson bound.
    """
    er = er_clique_quantities(12, 0.5)
    assert er.k == 3
    sim = simulate_er_cliques(12, 0.5, er.k, trials=20000, seed=4)
    assert sim.cliques.within(er.zeta)
    assert sim.delta_star.within(er.delta_star)
    bound = janson_bounds(er.zeta, er.delta)
    assert sim.no_clique.mean <= bound.extended


def test_simulation_limit():
    """
    Arrange/Act: Ask for a simulation with too many candidate cliques.
    Assert: `ValueError` is raised.
    """
    with pytest.raises(ValueError):
        simulate_er_cliques(60, 0.5, 8, trials=1)


@pytest.mark.slow
def test_block_simulation_million_trials():
    """
    Arrange: Take one block of 20 vertices, k = 3, q = 0.1.
    Act: Simulate the block model a million times.
    Assert: The mean is within three standard errors of the closed form.
    """
    est = simulate_block_cliques((20,), k=3, q=0.1, trials=10**6, seed=21)
    expected = expected_uv_cliques(BlockProfile(sizes=(20,), k=3, q=0.1)).value
    assert est.trials == 10**6
    assert est.within(expected), (est, expected)


@pytest.mark.slow
@pytest.mark.parametrize(
    'N,pbar,k',
    [(12, 0.5, 3), (12, 0.5, 4), (10, 0.3, 3), (14, 0.6, 4)]
)
def test_janson_bounds_hold(N, pbar, k):
    """
    Arrange: Get the clique count and dependency sum for G(N, pbar).
    Act: Estimate the chance of no k-clique by simulation.
    Assert: Neither Janson bound falls more than three standard errors
        below the estimate.
    """
    er = er_clique_quantities(N, pbar, k=k)
    sim = simulate_er_cliques(N, pbar, k, trials=10**5, seed=N + k)
    assert sim.cliques.within(er.zeta)
    bound = janson_bounds(er.zeta, er.delta)
    slack = 3 * sim.no_clique.stderr + 1e-12
    assert sim.no_clique.mean <= bound.plain + slack
    if bound.extended_applicable:
        assert sim.no_clique.mean <= bound.extended + slack
