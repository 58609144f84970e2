#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.metrics
.. moduleauthor:: cliquesieve developers

Hop-count metrics and the ways we compare them.
"""
import logging
import math
from pathlib import Path
from typing import Any, Hashable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union
import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from .errors import DimensionMismatchException
from .filtering import FilteredGraph
from .graphgen import EdgeLabel, GeometricGraph, classify_edges

logger = logging.getLogger(__name__)


class DistanceMatrix:
    """
    All-pairs hop counts (``inf`` between components).
    """
    __slots__ = ['_nodes', '_values']

    def __init__(self, nodes: Sequence[Hashable], values: np.ndarray):
        _values = np.asarray(values, dtype=float)
        if _values.shape != (len(nodes), len(nodes)):
            raise DimensionMismatchException(
                message=(
                    f"{len(nodes)} nodes need a {len(nodes)}x{len(nodes)} "
                    f"matrix, not {_values.shape}."
                )
            )
        _values.setflags(write=False)
        self._nodes = tuple(nodes)
        self._values = _values

    @property
    def nodes(self) -> Tuple[Hashable, ...]:
        """
        Get the nodes, in row order.
        """
        return self._nodes

    @property
    def values(self) -> np.ndarray:
        """
        Get the (read-only) distance matrix.
        """
        return self._values

    @property
    def n(self) -> int:
        """
        Get the number of nodes.
        """
        return len(self._nodes)

    def __getitem__(self, item):
        return self._values[item]

    def __repr__(self):
        return f"{self.__class__.__name__}(n={self.n})"


def all_pairs_distances(graph: nx.Graph) -> DistanceMatrix:
    """
    Get the unweighted shortest-path distance between every pair of nodes.

    :param graph: the graph
    :return: the distances, with rows in sorted node order
    """
    nodes = sorted(graph.nodes)
    ids = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    if n == 0:
        return DistanceMatrix(nodes=nodes, values=np.empty((0, 0)))
    rows, cols = [], []
    for a, b in graph.edges:
        if a != b:
            rows.append(ids[a])
            cols.append(ids[b])
    adjacency = csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(n, n)
    )
    dist = shortest_path(adjacency, directed=False, unweighted=True)
    return DistanceMatrix(nodes=nodes, values=dist)


class ApproxReport(NamedTuple):
    """
    How well one metric approximates another: the smallest ``alpha`` with
    ``d2 / alpha <= d1 <= alpha * d2`` on every pair.
    """
    alpha: float  #: the factor (``inf`` when the components differ)
    worst_pair: Optional[Tuple[int, int]]  #: a pair attaining ``alpha``
    mismatch: bool  #: do the two metrics disagree about which pairs connect?


def approximation_factor(d1: DistanceMatrix, d2: DistanceMatrix) -> ApproxReport:
    """
    Compare two metrics on the same vertex set.  The factor is the largest
    ratio ``max(d1/d2, d2/d1)`` over pairs that are finite in both; if one
    metric connects a pair the other doesn't, the factor is ``inf``.

    :param d1: one metric
    :param d2: the other metric
    :return: the report
    :raises DimensionMismatchException: if the vertex sets differ
    """
    if d1.nodes != d2.nodes:
        raise DimensionMismatchException(
            message=(
                f"The metrics are on different vertex sets "
                f"({d1.n} and {d2.n} nodes)."
            )
        )
    if d1.n < 2:
        return ApproxReport(alpha=1.0, worst_pair=None, mismatch=False)
    iu, ju = np.triu_indices(d1.n, k=1)
    a, b = d1.values[iu, ju], d2.values[iu, ju]
    fa, fb = np.isfinite(a), np.isfinite(b)
    differ = fa != fb
    if np.any(differ):
        k = int(np.flatnonzero(differ)[0])
        return ApproxReport(
            alpha=math.inf,
            worst_pair=(int(iu[k]), int(ju[k])),
            mismatch=True
        )
    both = fa & fb & (a > 0) & (b > 0)
    if not np.any(both):
        return ApproxReport(alpha=1.0, worst_pair=None, mismatch=False)
    ratio = np.ones_like(a)
    ratio[both] = np.maximum(a[both] / b[both], b[both] / a[both])
    k = int(np.argmax(ratio))
    alpha = float(ratio[k])
    return ApproxReport(
        alpha=alpha,
        worst_pair=None if alpha == 1.0 else (int(iu[k]), int(ju[k])),
        mismatch=False
    )


class RecoveryReport(NamedTuple):
    """
    The stretch between the filtered graph's metric and the hidden one,
    with the three events the 3-approximation argument rests on.
    """
    approx: ApproxReport  #: the filtered metric against the hidden one
    e1: bool  #: the kept hidden edges alone stretch no distance past 2x
    e2: bool  #: the filter kept every surviving hidden edge
    e3: bool  #: the filter removed every bad edge

    @property
    def alpha(self) -> float:
        """
        Get the stretch factor.
        """
        return self.approx.alpha

    @property
    def events(self) -> bool:
        """
        Did all three events occur?
        """
        return self.e1 and self.e2 and self.e3

    @property
    def implication_holds(self) -> bool:
        """
        Does the trial respect "all three events imply a stretch of at most
        ``3``"?
        """
        return not self.events or self.alpha <= 3.0


def _graph_on(n: int, edges: np.ndarray) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(np.asarray(edges).reshape(-1, 2).tolist())
    return g


def recovery_stretch(
        truth: GeometricGraph,
        filtered: FilteredGraph,
        labels: Optional[Mapping[Tuple[int, int], EdgeLabel]] = None,
        truth_distances: Optional[DistanceMatrix] = None
) -> RecoveryReport:
    """
    Measure how well the filtered graph's metric recovers the hidden one.

    :param truth: the hidden graph
    :param filtered: the filtered graph
    :param labels: the observed edges' labels (computed if missing)
    :param truth_distances: the hidden metric (computed if missing)
    :return: the report
    :raises DimensionMismatchException: if the vertex sets differ
    """
    if truth.n != filtered.n:
        raise DimensionMismatchException(
            message=f"The hidden graph has {truth.n} nodes; the filtered "
                    f"graph has {filtered.n}."
        )
    pg = filtered.source
    _labels = classify_edges(pg) if labels is None else labels
    d_truth = (
        all_pairs_distances(truth.graph())
        if truth_distances is None else truth_distances
    )
    d_filtered = all_pairs_distances(filtered.graph())
    approx = approximation_factor(d_filtered, d_truth)
    # E1: the kept hidden edges stretch hidden distances by at most 2.
    d_kept = all_pairs_distances(_graph_on(truth.n, pg.kept_edges()))
    finite = np.isfinite(d_truth.values)
    e1 = bool(np.all(d_kept.values[finite] <= 2.0 * d_truth.values[finite]))
    # E2: every kept hidden edge survives the filter.
    e2 = bool(np.all(filtered.kept[~pg.inserted]))
    # E3: no bad edge survives the filter.
    survivors = pg.edges[filtered.kept].tolist()
    e3 = all(_labels[(u, v)] != EdgeLabel.BAD for u, v in survivors)
    report = RecoveryReport(approx=approx, e1=e1, e2=e2, e3=e3)
    if not report.implication_holds:
        logger.error(
            "All three recovery events held but alpha = %s.", report.alpha
        )
    return report


def write_distance_matrix(dm: DistanceMatrix, path: Union[str, Path]) -> Path:
    """
    Write a distance matrix as CSV: ``i,j,dist`` for every ``i < j``, with
    ``inf`` for unreachable pairs.

    :param dm: the distances
    :param path: the destination path
    :return: the path that was written
    """
    _path = Path(path)
    _path.parent.mkdir(parents=True, exist_ok=True)
    lines: List[str] = ['i,j,dist']
    values = dm.values
    for i in range(dm.n):
        for j in range(i + 1, dm.n):
            d = values[i, j]
            lines.append(f"{dm.nodes[i]},{dm.nodes[j]},{'inf' if math.isinf(d) else int(d)}")
    _path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return _path


def report_as_dict(report: Union[ApproxReport, RecoveryReport]) -> Mapping[str, Any]:
    """
    Get a report as a mapping of simple types.

    :param report: the report
    :return: the mapping
    """
    if isinstance(report, RecoveryReport):
        out = dict(report_as_dict(report.approx))
        out.update(
            e1=report.e1, e2=report.e2, e3=report.e3,
            implication_holds=report.implication_holds
        )
        return out
    return {
        'alpha': report.alpha,
        'worst_pair': None if report.worst_pair is None else list(report.worst_pair),
        'mismatch': report.mismatch
    }
