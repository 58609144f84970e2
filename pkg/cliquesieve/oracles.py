#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.oracles
.. moduleauthor:: cliquesieve developers

Slow but obviously-right references.  The brute-force functions enumerate
vertex subsets and are meant for graphs of a dozen or so vertices; the
simulators sample the random models behind the closed forms in
:py:mod:`cliquesieve.bounds` so the two can be checked against each other.
"""
from itertools import combinations
import logging
import math
from typing import Hashable, List, NamedTuple, Sequence, Tuple
import networkx as nx
import numpy as np
from .cliques import NotAnEdgeException

logger = logging.getLogger(__name__)

#: the most ``k``-subsets a simulator will enumerate
MAX_SUBSETS: int = 10**6

#: the most booleans a simulator batch may materialise
BATCH_CELLS: int = 2**24


class Estimate(NamedTuple):
    """
    A Monte Carlo estimate.
    """
    mean: float  #: the sample mean
    stderr: float  #: the standard error of the mean
    trials: int  #: the number of samples

    def within(self, value: float, sigmas: float = 3.0) -> bool:
        """
        Is a value within some standard errors of the estimate?

        :param value: the value
        :param sigmas: the number of standard errors
        :return: ``True`` if it is
        """
        return abs(self.mean - value) <= sigmas * self.stderr + 1e-12


class ERSimulation(NamedTuple):
    """
    Monte Carlo estimates for ``k``-cliques in ``G(N, pbar)``.
    """
    cliques: Estimate  #: the number of ``k``-cliques
    delta_star: Estimate  #: the number of dependent cliques given one clique
    no_clique: Estimate  #: the probability of no ``k``-clique


def _is_clique(graph: nx.Graph, nodes: Sequence[Hashable]) -> bool:
    return all(graph.has_edge(a, b) for a, b in combinations(nodes, 2))


def brute_force_clique_number(graph: nx.Graph) -> int:
    """
    Get the clique number by trying every vertex subset, largest first.

    :param graph: the graph
    :return: the clique number (``0`` for an empty graph)
    """
    nodes = sorted(graph.nodes)
    for size in range(len(nodes), 0, -1):
        for subset in combinations(nodes, size):
            if _is_clique(graph, subset):
                return size
    return 0


def brute_force_edge_clique_number(graph: nx.Graph, u: Hashable, v: Hashable) -> int:
    """
    Get the edge clique number by trying every subset of the common
    neighbourhood, largest first.

    :param graph: the graph
    :param u: one endpoint
    :param v: the other endpoint
    :return: the edge clique number
    :raises NotAnEdgeException: if ``uv`` isn't an edge
    """
    if u == v or not graph.has_edge(u, v):
        raise NotAnEdgeException(
            message=f"({u!r}, {v!r}) is not an edge.", edge=(u, v)
        )
    common = sorted(set(graph[u]) & set(graph[v]))
    for size in range(len(common), 0, -1):
        for subset in combinations(common, size):
            if _is_clique(graph, subset):
                return size + 2
    return 2


def floyd_warshall_hops(graph: nx.Graph) -> np.ndarray:
    """
    Get all-pairs hop counts by Floyd-Warshall relaxation.

    :param graph: the graph
    :return: the distance matrix in sorted node order (``inf`` between
        components)
    """
    nodes = sorted(graph.nodes)
    ids = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for a, b in graph.edges:
        if a != b:
            d[ids[a], ids[b]] = d[ids[b], ids[a]] = 1.0
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


class _PairTable:
    """
    Indexes the unordered pairs of ``m`` vertices.
    """
    def __init__(self, m: int):
        self.m = m
        self.size = m * (m - 1) // 2

    def index(self, i: int, j: int) -> int:
        a, b = (i, j) if i < j else (j, i)
        return a * self.m - a * (a + 1) // 2 + (b - a - 1)


def _subset_count(m: int, k: int):
    count = math.comb(m, k)
    if count > MAX_SUBSETS:
        raise ValueError(
            f"Simulating {count} candidate cliques exceeds the limit of "
            f"{MAX_SUBSETS}."
        )
    return count


def _required_pairs(table: _PairTable, subsets: List[Tuple[int, ...]]) -> np.ndarray:
    return np.array(
        [[table.index(a, b) for a, b in combinations(s, 2)] for s in subsets],
        dtype=np.int64
    )


def _count_cliques(
        rng: np.random.Generator,
        probs: np.ndarray,
        required: np.ndarray,
        trials: int
) -> np.ndarray:
    """
    Sample independent pair presences and count, per sample, the candidate
    subsets whose required pairs are all present.
    """
    counts = np.empty(trials, dtype=np.int64)
    if required.size == 0:
        counts[:] = len(required)
        return counts
    per_trial = max(1, required.shape[0] * required.shape[1])
    batch = max(1, min(trials, BATCH_CELLS // per_trial))
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        present = rng.random((size, len(probs))) < probs
        counts[done:done + size] = np.all(present[:, required], axis=2).sum(axis=1)
        done += size
    return counts


def _estimate(samples: np.ndarray) -> Estimate:
    samples = np.asarray(samples, dtype=float)
    n = len(samples)
    stderr = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return Estimate(mean=float(samples.mean()), stderr=stderr, trials=n)


def simulate_block_cliques(
        sizes: Sequence[int],
        k: int,
        q: float,
        p: float = 0.0,
        trials: int = 10**5,
        seed: int = 0
) -> Estimate:
    """
    Estimate the number of ``uv``-cliques of size ``k + 2`` in the block
    model: the vertices around ``uv`` form blocks (each a ``G(N_i, 1-p)``),
    every other pair (``u`` and ``v`` to every block vertex included) is
    present with probability ``q``.

    :param sizes: the block sizes
    :param k: the number of clique vertices besides ``u`` and ``v``
    :param q: the insertion probability
    :param p: the deletion probability
    :param trials: the number of samples
    :param seed: the seed
    :return: the estimate
    """
    block = np.repeat(np.arange(len(sizes)), sizes)
    m = len(block)
    # Vertices 0 and 1 are u and v; block vertices follow.
    table = _PairTable(m + 2)
    probs = np.empty(table.size)
    for i in range(m + 2):
        for j in range(i + 1, m + 2):
            if i < 2:
                prob = 1.0 if j == 1 else q
            else:
                prob = (1.0 - p) if block[i - 2] == block[j - 2] else q
            probs[table.index(i, j)] = prob
    _subset_count(m, k)
    subsets = [(0, 1) + tuple(x + 2 for x in s) for s in combinations(range(m), k)]
    required = _required_pairs(table, subsets)
    counts = _count_cliques(np.random.default_rng(seed), probs, required, trials)
    return _estimate(counts)


def simulate_two_ball_cliques(
        nu: int,
        nv: int,
        k: int,
        q: float,
        p: float = 0.0,
        trials: int = 10**5,
        seed: int = 0
) -> Estimate:
    """
    Estimate the number of ``uv``-cliques of size ``k + 2`` in the two-ball
    model: ``u`` has ``nu - 1`` ball mates and ``v`` has ``nv - 1``; pairs in
    one ball are present with probability ``1 - p`` and pairs across the
    balls with probability ``q``.

    :param nu: the size of ``u``'s ball (``u`` included)
    :param nv: the size of ``v``'s ball (``v`` included)
    :param k: the number of clique vertices besides ``u`` and ``v``
    :param q: the insertion probability
    :param p: the deletion probability
    :param trials: the number of samples
    :param seed: the seed
    :return: the estimate
    """
    # Vertices 0 and 1 are u and v, then u's mates, then v's.
    side = np.r_[0, 1, np.zeros(nu - 1, dtype=int), np.ones(nv - 1, dtype=int)]
    m = len(side)
    table = _PairTable(m)
    probs = np.empty(table.size)
    for i in range(m):
        for j in range(i + 1, m):
            if (i, j) == (0, 1):
                prob = 1.0
            else:
                prob = (1.0 - p) if side[i] == side[j] else q
            probs[table.index(i, j)] = prob
    _subset_count(m - 2, k)
    subsets = [(0, 1) + s for s in combinations(range(2, m), k)]
    required = _required_pairs(table, subsets)
    counts = _count_cliques(np.random.default_rng(seed), probs, required, trials)
    return _estimate(counts)


def simulate_er_cliques(
        N: int,
        pbar: float,
        k: int,
        trials: int = 10**5,
        seed: int = 0
) -> ERSimulation:
    """
    Estimate, for ``G(N, pbar)``, the expected number of ``k``-cliques, the
    probability that there is none, and the expected number of other
    ``k``-cliques sharing at least two vertices with a given clique (by
    planting the clique on the first ``k`` vertices).

    :param N: the number of vertices
    :param pbar: the edge probability
    :param k: the clique size
    :param trials: the number of samples
    :param seed: the seed
    :return: the estimates
    """
    _subset_count(N, k)
    table = _PairTable(N)
    subsets = list(combinations(range(N), k))
    required = _required_pairs(table, subsets)
    rng = np.random.default_rng(seed)
    probs = np.full(table.size, pbar)
    counts = _count_cliques(rng, probs, required, trials)
    planted = tuple(range(k))
    dependent = [
        s for s in subsets
        if 2 <= len(set(s) & set(planted)) < k
    ]
    planted_probs = probs.copy()
    planted_probs[[table.index(a, b) for a, b in combinations(planted, 2)]] = 1.0
    dep_counts = _count_cliques(
        rng, planted_probs, _required_pairs(table, dependent), trials
    )
    return ERSimulation(
        cliques=_estimate(counts),
        delta_star=_estimate(dep_counts),
        no_clique=_estimate(counts == 0)
    )
