#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.graphgen
.. moduleauthor:: cliquesieve developers

This module builds the hidden ``r``-neighbourhood graph, perturbs it by
independent edge deletion and insertion, and labels every observed edge as
good, bad or indeterminate against the hidden geometry.

Edges are stored as ``(m, 2)`` integer arrays with ``u < v`` in each row and
rows sorted lexicographically.  :py:meth:`GeometricGraph.graph` and
:py:meth:`PerturbedGraph.graph` hand out :py:class:`networkx.Graph` views for
the clique, filter and metric layers.
"""
from enum import Enum
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union
import networkx as nx
import numpy as np
from .measure import MassBounds
from .rand import pair_keys, pair_uniforms
from .space import PointCloud

logger = logging.getLogger(__name__)

#: the number of candidate pairs examined per insertion batch
PAIR_BATCH: int = 2**20


class Provenance(Enum):
    """
    Where did an observed edge come from?
    """
    KEPT = 'kept-original'  #: a hidden edge that survived deletion
    INSERTED = 'inserted'  #: a hidden non-edge that was inserted


class EdgeLabel(Enum):
    """
    How does an observed edge relate to the hidden geometry?
    """
    GOOD = 'good'  #: the endpoints are within ``r``
    BAD = 'bad'  #: no neighbours of the endpoints are within ``r``
    INDETERMINATE = 'indeterminate'  #: neither good nor bad


def _sorted_edges(edges: np.ndarray) -> np.ndarray:
    _edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(_edges) == 0:
        return np.empty((0, 2), dtype=np.int64)
    _edges = np.sort(_edges, axis=1)
    _edges = _edges[np.lexsort((_edges[:, 1], _edges[:, 0]))]
    _edges.setflags(write=False)
    return _edges


def adjacency_bits(n: int, edges: np.ndarray) -> List[int]:
    """
    Get the adjacency of a graph as one bitset (a Python ``int``) per vertex.

    :param n: the number of vertices
    :param edges: the ``(m, 2)`` edge array
    :return: the bitsets
    """
    bits = [0] * n
    for u, v in edges.tolist():
        bits[u] |= 1 << v
        bits[v] |= 1 << u
    return bits


class GeometricGraph:
    """
    The hidden graph: an edge joins every pair of points within distance
    ``r`` of each other.
    """
    __slots__ = ['_cloud', '_r', '_edges', '_bits']

    def __init__(self, cloud: PointCloud, r: float, edges: np.ndarray):
        self._cloud = cloud  #: the point cloud
        self._r = float(r)  #: the connection radius
        self._edges = _sorted_edges(edges)  #: the sorted edge array
        self._bits: Optional[List[int]] = None

    @property
    def cloud(self) -> PointCloud:
        """
        Get the points the graph is built on.
        """
        return self._cloud

    @property
    def r(self) -> float:
        """
        Get the connection radius.
        """
        return self._r

    @property
    def n(self) -> int:
        """
        Get the number of vertices.
        """
        return self._cloud.n

    @property
    def edges(self) -> np.ndarray:
        """
        Get the (read-only) sorted ``(m, 2)`` edge array.
        """
        return self._edges

    @property
    def bits(self) -> List[int]:
        """
        Get the adjacency bitsets.
        """
        if self._bits is None:
            self._bits = adjacency_bits(self.n, self._edges)
        return self._bits

    def has_edge(self, u: int, v: int) -> bool:
        """
        Is there an edge between two vertices?
        """
        return u != v and bool((self.bits[u] >> v) & 1)

    def degrees(self) -> np.ndarray:
        """
        Get the degree of every vertex.
        """
        return np.bincount(self._edges.reshape(-1), minlength=self.n)

    def graph(self) -> nx.Graph:
        """
        Get a :py:class:`networkx.Graph` with the same vertices and edges.
        """
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self._edges.tolist())
        return g

    def __repr__(self):
        return (
            f"{self.__class__.__name__}("
            f"n={self.n}, r={self._r!r}, edges={len(self._edges)})"
        )


def build_rgg(cloud: PointCloud, r: float) -> GeometricGraph:
    """
    Build the ``r``-neighbourhood graph on a point cloud.  A pair at distance
    exactly ``r`` is an edge.

    :param cloud: the points
    :param r: the connection radius
    :return: the graph
    :raises ValueError: if ``r`` isn't positive
    """
    if r <= 0:
        raise ValueError("'r' must be positive.")
    edges = cloud.space.pairs_within(cloud.points, r)
    logger.debug("Built an RGG with %d nodes and %d edges.", cloud.n, len(edges))
    return GeometricGraph(cloud=cloud, r=r, edges=edges)


class PerturbedGraph:
    """
    The observed graph: the hidden graph after independent deletions and
    insertions, with the provenance of every surviving edge.
    """
    __slots__ = ['_truth', '_p', '_q', '_seed', '_edges', '_inserted', '_bits']

    def __init__(
            self,
            truth: GeometricGraph,
            p: float,
            q: float,
            seed: Optional[int],
            edges: np.ndarray,
            inserted: np.ndarray
    ):
        _edges = np.sort(np.asarray(edges, dtype=np.int64).reshape(-1, 2), axis=1)
        _inserted = np.asarray(inserted, dtype=bool).reshape(-1)
        if len(_edges) != len(_inserted):
            raise ValueError("Every edge needs exactly one provenance flag.")
        order = np.lexsort((_edges[:, 1], _edges[:, 0]))
        self._truth = truth  #: the hidden graph
        self._p = float(p)  #: the deletion probability
        self._q = float(q)  #: the insertion probability
        self._seed = seed  #: the perturbation seed
        self._edges = _sorted_edges(_edges[order])  #: the observed edges
        self._inserted = _inserted[order]  #: the provenance flags
        self._inserted.setflags(write=False)
        self._bits: Optional[List[int]] = None

    @property
    def truth(self) -> GeometricGraph:
        """
        Get the hidden graph.
        """
        return self._truth

    @property
    def cloud(self) -> PointCloud:
        """
        Get the hidden points.
        """
        return self._truth.cloud

    @property
    def n(self) -> int:
        """
        Get the number of vertices.
        """
        return self._truth.n

    @property
    def p(self) -> float:
        """
        Get the deletion probability.
        """
        return self._p

    @property
    def q(self) -> float:
        """
        Get the insertion probability.
        """
        return self._q

    @property
    def seed(self) -> Optional[int]:
        """
        Get the perturbation seed.
        """
        return self._seed

    @property
    def edges(self) -> np.ndarray:
        """
        Get the (read-only) sorted ``(m, 2)`` observed edge array.
        """
        return self._edges

    @property
    def inserted(self) -> np.ndarray:
        """
        Get the per-edge flags that are ``True`` for inserted edges.
        """
        return self._inserted

    @property
    def bits(self) -> List[int]:
        """
        Get the observed adjacency bitsets.
        """
        if self._bits is None:
            self._bits = adjacency_bits(self.n, self._edges)
        return self._bits

    def provenance(self) -> List[Provenance]:
        """
        Get the provenance of every observed edge (in edge order).
        """
        return [
            Provenance.INSERTED if flag else Provenance.KEPT
            for flag in self._inserted.tolist()
        ]

    def kept_edges(self) -> np.ndarray:
        """
        Get the observed edges that are also hidden edges.
        """
        return self._edges[~self._inserted]

    def inserted_edges(self) -> np.ndarray:
        """
        Get the observed edges that were inserted.
        """
        return self._edges[self._inserted]

    def graph(self) -> nx.Graph:
        """
        Get a :py:class:`networkx.Graph` of the observed edges.
        """
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self._edges.tolist())
        return g

    def __repr__(self):
        return (
            f"{self.__class__.__name__}("
            f"n={self.n}, p={self._p!r}, q={self._q!r}, seed={self._seed!r}, "
            f"kept={int((~self._inserted).sum())}, "
            f"inserted={int(self._inserted.sum())})"
        )


def _non_edge_batches(
        n: int,
        truth_keys: np.ndarray
) -> Iterable[Tuple[np.ndarray, np.ndarray]]:
    """
    Yield every hidden non-edge ``(u, v)``, ``u < v``, in sorted order and in
    row batches of roughly :py:data:`PAIR_BATCH` pairs.
    """
    rows_u: List[np.ndarray] = []
    rows_v: List[np.ndarray] = []
    count = 0
    for u in range(n - 1):
        rows_u.append(np.full(n - u - 1, u, dtype=np.int64))
        rows_v.append(np.arange(u + 1, n, dtype=np.int64))
        count += n - u - 1
        if count >= PAIR_BATCH or u == n - 2:
            us = np.concatenate(rows_u)
            vs = np.concatenate(rows_v)
            hidden = np.isin(pair_keys(us, vs), truth_keys)
            yield us[~hidden], vs[~hidden]
            rows_u, rows_v, count = [], [], 0


def perturb(
        g: GeometricGraph,
        p: float,
        q: float,
        seed: int
) -> PerturbedGraph:
    """
    Perturb a hidden graph: delete each of its edges with probability ``p``
    and insert each of its non-edges with probability ``q``, independently.

    Every pair ``(u, v)`` gets exactly one uniform draw ``U`` keyed by
    ``(seed, u, v)``; a hidden edge survives when ``U >= p`` and a non-edge
    is inserted when ``U < q``.

    :param g: the hidden graph
    :param p: the deletion probability
    :param q: the insertion probability
    :param seed: the perturbation seed
    :return: the observed graph
    :raises ValueError: if ``p`` or ``q`` isn't in ``[0, 1]``
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("'p' must be in [0, 1].")
    if not 0.0 <= q <= 1.0:
        raise ValueError("'q' must be in [0, 1].")
    truth = g.edges
    draws = pair_uniforms(seed, truth[:, 0], truth[:, 1])
    kept = truth[draws >= p]
    inserted = [np.empty((0, 2), dtype=np.int64)]
    if q > 0:
        truth_keys = np.sort(pair_keys(truth[:, 0], truth[:, 1]))
        for us, vs in _non_edge_batches(g.n, truth_keys):
            hit = pair_uniforms(seed, us, vs) < q
            inserted.append(np.column_stack((us[hit], vs[hit])))
    added = np.concatenate(inserted)
    edges = np.concatenate((kept, added))
    flags = np.r_[np.zeros(len(kept), dtype=bool), np.ones(len(added), dtype=bool)]
    logger.debug(
        "Perturbed %d hidden edges (p=%s, q=%s): kept %d, inserted %d.",
        len(truth), p, q, len(kept), len(added)
    )
    return PerturbedGraph(
        truth=g, p=p, q=q, seed=seed, edges=edges, inserted=flags
    )


def classify_edges(pg: PerturbedGraph) -> Dict[Tuple[int, int], EdgeLabel]:
    """
    Label every observed edge.  An edge is good when its endpoints are
    within ``r``; it is bad when no hidden neighbour of ``u`` is within ``r``
    of a hidden neighbour of ``v`` (a shared neighbour counts, being at
    distance ``0`` from itself); otherwise it's indeterminate.  Vertices are
    not their own neighbours.  Any edge longer than ``3r`` is bad.

    :param pg: the observed graph
    :return: the labels, keyed by ``(u, v)`` in edge order
    """
    truth = pg.truth
    r = truth.r
    d = pg.cloud.distances(pg.edges)
    bits = truth.bits
    reach: Dict[int, int] = {}

    def _reach(x: int) -> int:
        # Everything within r of some hidden neighbour of x (neighbours
        # included).
        if x not in reach:
            acc = 0
            nbrs = bits[x]
            while nbrs:
                low = nbrs & -nbrs
                y = low.bit_length() - 1
                acc |= bits[y] | low
                nbrs ^= low
            reach[x] = acc
        return reach[x]

    labels: Dict[Tuple[int, int], EdgeLabel] = {}
    for (u, v), duv in zip(pg.edges.tolist(), d.tolist()):
        if duv <= r:
            labels[(u, v)] = EdgeLabel.GOOD
        elif duv > 3.0 * r:
            labels[(u, v)] = EdgeLabel.BAD
        elif _reach(u) & bits[v]:
            labels[(u, v)] = EdgeLabel.INDETERMINATE
        else:
            labels[(u, v)] = EdgeLabel.BAD
    return labels


def label_counts(
        labels: Mapping[Tuple[int, int], EdgeLabel]
) -> Dict[EdgeLabel, int]:
    """
    Count the edges in each label class.

    :param labels: the edge labels
    :return: the count for every class (zero included)
    """
    counts = {label: 0 for label in EdgeLabel}
    for label in labels.values():
        counts[label] += 1
    return counts


def degree_claim_holds(truth: GeometricGraph, s: float) -> bool:
    """
    Does every vertex of the hidden graph have at least ``sn/4``
    neighbours?

    :param truth: the hidden graph
    :param s: the Assumption-A mass lower bound
    :return: ``True`` if the claim holds
    """
    return bool(np.all(truth.degrees() >= s * truth.n / 4.0))


def occupancy_claim_holds(truth: GeometricGraph, mass: MassBounds) -> bool:
    """
    Does every ``r/2``-ball centred at a vertex hold at most
    ``3 rho s n`` points (its centre included)?

    :param truth: the hidden graph
    :param mass: the ball-mass bounds
    :return: ``True`` if the claim holds
    """
    cloud = truth.cloud
    close = cloud.space.pairs_within(cloud.points, truth.r / 2.0)
    occupancy = 1 + np.bincount(close.reshape(-1), minlength=cloud.n)
    return bool(np.all(occupancy <= 3.0 * mass.rho * mass.s * cloud.n))


def write_edge_list(
        pg: PerturbedGraph,
        labels: Mapping[Tuple[int, int], EdgeLabel],
        path: Union[str, Path]
) -> Path:
    """
    Write the observed edges as text: ``# key=value`` header lines for
    ``n``, ``r``, ``p``, ``q`` and ``seed``, then one ``u v provenance label``
    line per edge in sorted order.

    :param pg: the observed graph
    :param labels: the edge labels
    :param path: the destination path
    :return: the path that was written
    """
    _path = Path(path)
    _path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"# n={pg.n}",
        f"# r={pg.truth.r!r}",
        f"# p={pg.p!r}",
        f"# q={pg.q!r}",
        f"# seed={'none' if pg.seed is None else pg.seed}"
    ]
    for (u, v), prov in zip(pg.edges.tolist(), pg.provenance()):
        lines.append(f"{u} {v} {prov.value} {labels[(u, v)].value}")
    _path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return _path


def read_edge_list(path: Union[str, Path], cloud: PointCloud) -> PerturbedGraph:
    """
    Read an observed graph written by :py:func:`write_edge_list`.  The hidden
    graph is rebuilt from the points and the recorded radius; stored labels
    are ignored (call :py:func:`classify_edges` to recompute them).

    :param path: the source path
    :param cloud: the points the graph was built on
    :return: the observed graph
    :raises ValueError: if the file is malformed or doesn't match the points
    """
    meta: Dict[str, str] = {}
    rows: List[Tuple[int, int]] = []
    flags: List[bool] = []
    for ln in Path(path).read_text(encoding='utf-8').splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith('#'):
            key, _, value = ln.lstrip('#').strip().partition('=')
            meta[key] = value
            continue
        u, v, prov = ln.split()[:3]
        rows.append((int(u), int(v)))
        flags.append(Provenance(prov) == Provenance.INSERTED)
    try:
        n, r, p, q = int(meta['n']), float(meta['r']), float(meta['p']), float(meta['q'])
    except KeyError as kex:
        raise ValueError(f"{path}: the header lacks {kex}.") from kex
    if n != cloud.n:
        raise ValueError(f"{path}: {n} nodes, but the point cloud has {cloud.n}.")
    seed = None if meta.get('seed', 'none') == 'none' else int(meta['seed'])
    return PerturbedGraph(
        truth=build_rgg(cloud, r),
        p=p,
        q=q,
        seed=seed,
        edges=np.asarray(rows, dtype=np.int64).reshape(-1, 2),
        inserted=np.asarray(flags, dtype=bool)
    )
