#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.cliques
.. moduleauthor:: cliquesieve developers

Exact edge clique numbers.  The edge clique number of ``uv`` is ``2`` plus
the size of a maximum clique in the subgraph induced by the common
neighbourhood of ``u`` and ``v``; we find it with a bitset branch-and-bound
search bounded by greedy colouring.

Vertices are renumbered once per graph (see :py:class:`CliqueIndex`) so that
position ``0`` holds the vertex removed last by a smallest-last
(degeneracy) peel.  The colouring visits low positions first, so colour
classes are seeded largest-degree-first, and the search branches in reverse
colouring order.  Ties always go to the lowest vertex.
"""
import heapq
import json
import logging
from multiprocessing import Pool
from pathlib import Path
from typing import (
    Any, Dict, Hashable, Iterable, List, Mapping, NamedTuple, Optional,
    Sequence, Tuple, Union
)
import networkx as nx
import numpy as np
from .errors import CliqueSieveException
from .graphgen import EdgeLabel, PerturbedGraph

logger = logging.getLogger(__name__)

#: the default number of search nodes one query may expand
DEFAULT_BUDGET: int = 10**7

Edge = Tuple[Hashable, Hashable]


class NotAnEdgeException(CliqueSieveException):
    """
    Raised when an edge query names a pair that isn't an edge.
    """
    def __init__(self, message: str, edge: Edge = None, inner: Exception = None):
        """

        :param message: the exception message
        :param edge: the pair that isn't an edge
        :param inner: the exception that caused this exception
        """
        super().__init__(message=message, inner=inner)
        self._edge = edge

    @property
    def edge(self) -> Optional[Edge]:
        """
        Get the pair that isn't an edge.
        """
        return self._edge


class CliqueBudgetExceeded(CliqueSieveException):
    """
    Raised when a maximum-clique search expands more nodes than its budget
    allows.  Raise the budget or shrink the instance; there is no
    approximate fallback.
    """
    def __init__(
            self,
            message: str,
            budget: int,
            edge: Edge = None,
            inner: Exception = None
    ):
        """

        :param message: the exception message
        :param budget: the budget that was exceeded
        :param edge: the edge being evaluated (if any)
        :param inner: the exception that caused this exception
        """
        super().__init__(message=message, inner=inner)
        self._budget = budget
        self._edge = edge

    @property
    def budget(self) -> int:
        """
        Get the budget that was exceeded.
        """
        return self._budget

    @property
    def edge(self) -> Optional[Edge]:
        """
        Get the edge whose search ran over budget.
        """
        return self._edge


def _lsb(x: int) -> int:
    return (x & -x).bit_length() - 1


if hasattr(int, 'bit_count'):
    def _bit_count(x: int) -> int:
        return x.bit_count()
else:  # Python < 3.10
    def _bit_count(x: int) -> int:
        return bin(x).count('1')


def _color_sort(candidates: int, adj: Sequence[int]) -> Tuple[List[int], List[int]]:
    """
    Greedily colour the candidate set (lowest position first).

    :return: the vertices in colouring order and each one's colour, which is
        an upper bound on the clique size among it and its predecessors
    """
    order: List[int] = []
    colors: List[int] = []
    color = 0
    uncolored = candidates
    while uncolored:
        color += 1
        available = uncolored
        while available:
            v = _lsb(available)
            bit = 1 << v
            order.append(v)
            colors.append(color)
            uncolored &= ~bit
            available &= ~bit & ~adj[v]
    return order, colors


def degeneracy_order(adj: Sequence[int]) -> List[int]:
    """
    Get the smallest-last order of a graph's vertices: repeatedly remove the
    vertex of smallest remaining degree (lowest id on ties).

    :param adj: the adjacency bitsets
    :return: the vertices in removal order
    """
    n = len(adj)
    degree = [_bit_count(a) for a in adj]
    heap = [(d, v) for v, d in enumerate(degree)]
    heapq.heapify(heap)
    removed = [False] * n
    order: List[int] = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != degree[v]:
            continue
        removed[v] = True
        order.append(v)
        nbrs = adj[v]
        while nbrs:
            w = _lsb(nbrs)
            nbrs &= nbrs - 1
            if not removed[w]:
                degree[w] -= 1
                heapq.heappush(heap, (degree[w], w))
    return order


class CliqueIndex:
    """
    A graph renumbered for clique search: adjacency bitsets over search
    positions, and the maps between positions and vertices.
    """
    __slots__ = ['_vertices', '_position', '_adj']

    def __init__(self, graph: nx.Graph):
        nodes = sorted(graph.nodes)
        ids = {v: i for i, v in enumerate(nodes)}
        natural = [0] * len(nodes)
        for a, b in graph.edges:
            if a == b:
                continue
            natural[ids[a]] |= 1 << ids[b]
            natural[ids[b]] |= 1 << ids[a]
        # Position 0 is the vertex peeled last.
        peel = degeneracy_order(natural)[::-1]
        position = [0] * len(nodes)
        for pos, i in enumerate(peel):
            position[i] = pos
        adj = [0] * len(nodes)
        for i, bits in enumerate(natural):
            acc = 0
            while bits:
                j = _lsb(bits)
                bits &= bits - 1
                acc |= 1 << position[j]
            adj[position[i]] = acc
        self._vertices = [nodes[i] for i in peel]  #: position -> vertex
        self._position = {nodes[i]: position[i] for i in range(len(nodes))}
        self._adj = adj  #: adjacency bitsets by position

    @property
    def n(self) -> int:
        """
        Get the number of vertices.
        """
        return len(self._vertices)

    @property
    def adj(self) -> List[int]:
        """
        Get the adjacency bitsets (by search position).
        """
        return self._adj

    def position(self, v: Hashable) -> int:
        """
        Get a vertex's search position.
        """
        return self._position[v]

    def vertices(self, bits: int) -> Tuple[Hashable, ...]:
        """
        Get the vertices in a position bitset, sorted.
        """
        out = []
        while bits:
            out.append(self._vertices[_lsb(bits)])
            bits &= bits - 1
        return tuple(sorted(out))

    def common(self, u: Hashable, v: Hashable) -> int:
        """
        Get the common neighbourhood of an edge as a position bitset.

        :param u: one endpoint
        :param v: the other endpoint
        :return: the bitset
        :raises NotAnEdgeException: if ``uv`` isn't an edge
        """
        try:
            pu, pv = self._position[u], self._position[v]
        except KeyError as kex:
            raise NotAnEdgeException(
                message=f"{kex} is not a vertex of the graph.",
                edge=(u, v),
                inner=kex
            )
        if pu == pv or not (self._adj[pu] >> pv) & 1:
            raise NotAnEdgeException(
                message=f"({u!r}, {v!r}) is not an edge.", edge=(u, v)
            )
        return self._adj[pu] & self._adj[pv]


class _Search:
    """
    Branch-and-bound state for one query.
    """
    __slots__ = ['adj', 'budget', 'target', 'expanded', 'best_size', 'best_bits']

    def __init__(self, adj: Sequence[int], budget: Optional[int], target: Optional[int]):
        self.adj = adj
        self.budget = budget
        self.target = target
        self.expanded = 0
        self.best_size = 0
        self.best_bits = 0

    def run(self, candidates: int):
        if candidates:
            self._expand(0, 0, candidates)

    def _expand(self, size: int, chosen: int, candidates: int) -> bool:
        order, colors = _color_sort(candidates, self.adj)
        for i in range(len(order) - 1, -1, -1):
            if size + colors[i] <= self.best_size:
                return False
            v = order[i]
            bit = 1 << v
            self.expanded += 1
            if self.budget is not None and self.expanded > self.budget:
                raise CliqueBudgetExceeded(
                    message=(
                        f"The maximum-clique search expanded more than "
                        f"{self.budget} nodes."
                    ),
                    budget=self.budget
                )
            grown = chosen | bit
            rest = candidates & self.adj[v]
            if size + 1 > self.best_size:
                self.best_size = size + 1
                self.best_bits = grown
                if self.target is not None and self.best_size >= self.target:
                    return True
            if rest and self._expand(size + 1, grown, rest):
                return True
            candidates &= ~bit
        return False


def _as_index(graph: Union[nx.Graph, CliqueIndex]) -> CliqueIndex:
    return graph if isinstance(graph, CliqueIndex) else CliqueIndex(graph)


def max_clique(
        graph: Union[nx.Graph, CliqueIndex],
        budget: Optional[int] = DEFAULT_BUDGET
) -> Tuple[Hashable, ...]:
    """
    Find a maximum clique.

    :param graph: the graph (or its clique index)
    :param budget: the most search nodes to expand (``None`` for no limit)
    :return: the clique's vertices, sorted (empty for an empty graph)
    :raises CliqueBudgetExceeded: if the search runs over budget
    """
    index = _as_index(graph)
    search = _Search(index.adj, budget=budget, target=None)
    search.run((1 << index.n) - 1)
    return index.vertices(search.best_bits)


def _common_max_clique(
        index: CliqueIndex,
        u: Hashable,
        v: Hashable,
        budget: Optional[int]
) -> _Search:
    candidates = index.common(u, v)
    search = _Search(index.adj, budget=budget, target=None)
    try:
        search.run(candidates)
    except CliqueBudgetExceeded as cbe:
        raise CliqueBudgetExceeded(
            message=f"Edge ({u!r}, {v!r}): {cbe.message}",
            budget=cbe.budget,
            edge=(u, v),
            inner=cbe
        )
    return search


def edge_clique_number(
        graph: Union[nx.Graph, CliqueIndex],
        u: Hashable,
        v: Hashable,
        budget: Optional[int] = DEFAULT_BUDGET
) -> int:
    """
    Get the size of the largest clique containing the edge ``uv``.

    :param graph: the graph (or its clique index)
    :param u: one endpoint
    :param v: the other endpoint
    :param budget: the most search nodes to expand (``None`` for no limit)
    :return: the edge clique number
    :raises NotAnEdgeException: if ``uv`` isn't an edge
    :raises CliqueBudgetExceeded: if the search runs over budget
    """
    return 2 + _common_max_clique(_as_index(graph), u, v, budget).best_size


def uv_clique(
        graph: Union[nx.Graph, CliqueIndex],
        u: Hashable,
        v: Hashable,
        budget: Optional[int] = DEFAULT_BUDGET
) -> Tuple[Hashable, ...]:
    """
    Get a largest clique containing the edge ``uv``.

    :param graph: the graph (or its clique index)
    :param u: one endpoint
    :param v: the other endpoint
    :param budget: the most search nodes to expand (``None`` for no limit)
    :return: the clique's vertices (``u`` and ``v`` included), sorted
    :raises NotAnEdgeException: if ``uv`` isn't an edge
    :raises CliqueBudgetExceeded: if the search runs over budget
    """
    index = _as_index(graph)
    search = _common_max_clique(index, u, v, budget)
    return tuple(sorted(index.vertices(search.best_bits) + (u, v)))


def edge_clique_at_least(
        graph: Union[nx.Graph, CliqueIndex],
        u: Hashable,
        v: Hashable,
        tau: int
) -> bool:
    """
    Is the edge ``uv`` in a clique of at least ``tau`` vertices?  The search
    stops at the first witness.

    :param graph: the graph (or its clique index)
    :param u: one endpoint
    :param v: the other endpoint
    :param tau: the threshold
    :return: ``True`` if the edge clique number is at least ``tau``
    :raises ValueError: if ``tau`` is less than ``2``
    :raises NotAnEdgeException: if ``uv`` isn't an edge
    """
    if tau < 2:
        raise ValueError("'tau' must be at least 2.")
    index = _as_index(graph)
    candidates = index.common(u, v)
    target = tau - 2
    if target == 0:
        return True
    if _bit_count(candidates) < target:
        return False
    # Anything short of the target is as good as nothing, so the bound
    # starts just below it.
    search = _Search(index.adj, budget=None, target=target)
    search.best_size = target - 1
    search.run(candidates)
    return search.best_size >= target


class CliqueQuery(NamedTuple):
    """
    One edge clique question: the exact number, or (given a threshold)
    whether it reaches the threshold.
    """
    graph: Union[nx.Graph, CliqueIndex]  #: the graph (or its clique index)
    edge: Edge  #: the edge
    tau: Optional[int] = None  #: the threshold (``None`` for the exact value)
    budget: Optional[int] = DEFAULT_BUDGET  #: the search budget

    def evaluate(self) -> Union[int, bool]:
        """
        Answer the query.

        :return: the edge clique number, or whether it reaches ``tau``
        """
        u, v = self.edge
        if self.tau is None:
            return edge_clique_number(self.graph, u, v, budget=self.budget)
        return edge_clique_at_least(self.graph, u, v, self.tau)


class ClassSummary(NamedTuple):
    """
    Summary statistics of edge clique numbers over one class of edges.
    """
    min: Optional[int]  #: the smallest value (``None`` for no edges)
    max: Optional[int]  #: the largest value (``None`` for no edges)
    mean: Optional[float]  #: the mean value (``None`` for no edges)
    count: int  #: the number of edges

    @classmethod
    def of(cls, values: np.ndarray) -> 'ClassSummary':
        """
        Summarise an array of values.
        """
        if len(values) == 0:
            return cls(min=None, max=None, mean=None, count=0)
        return cls(
            min=int(values.min()),
            max=int(values.max()),
            mean=float(values.mean()),
            count=int(len(values))
        )


class CliqueStats:
    """
    Edge clique numbers for every observed edge, with per-label summaries.
    """
    __slots__ = ['_edges', '_labels', '_omega']

    def __init__(
            self,
            edges: np.ndarray,
            labels: Sequence[EdgeLabel],
            omega: Sequence[int]
    ):
        self._edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self._labels = list(labels)
        self._omega = np.asarray(omega, dtype=np.int64)

    @property
    def edges(self) -> np.ndarray:
        """
        Get the edges, in sorted order.
        """
        return self._edges

    @property
    def labels(self) -> List[EdgeLabel]:
        """
        Get each edge's label.
        """
        return self._labels

    @property
    def omega(self) -> np.ndarray:
        """
        Get each edge's clique number.
        """
        return self._omega

    def values(self, label: EdgeLabel) -> np.ndarray:
        """
        Get the clique numbers of one class of edges.
        """
        mask = np.array([lb == label for lb in self._labels], dtype=bool)
        return self._omega[mask] if len(mask) else self._omega[:0]

    def summary(self) -> Dict[EdgeLabel, ClassSummary]:
        """
        Summarise every label class.
        """
        return {label: ClassSummary.of(self.values(label)) for label in EdgeLabel}

    @property
    def max_omega(self) -> Optional[int]:
        """
        Get the largest edge clique number (the clique number of the graph
        restricted to its edges).
        """
        return int(self._omega.max()) if len(self._omega) else None

    @property
    def gap(self) -> Optional[int]:
        """
        Get the smallest good-edge value less the largest bad-edge value
        (``None`` if either class is empty).
        """
        summary = self.summary()
        good, bad = summary[EdgeLabel.GOOD], summary[EdgeLabel.BAD]
        if good.count == 0 or bad.count == 0:
            return None
        return good.min - bad.max

    def export(self) -> Mapping[str, Any]:
        """
        Export the per-class summaries as a mapping of simple types.
        """
        return {
            label.value: dict(stats._asdict())
            for label, stats in self.summary().items()
        }


_WORKER_INDEX: Optional[CliqueIndex] = None


def _init_worker(index: CliqueIndex):
    global _WORKER_INDEX
    _WORKER_INDEX = index


def _omega_chunk(args: Tuple[List[Tuple[int, int]], Optional[int]]) -> List[Any]:
    edges, budget = args
    out: List[Any] = []
    for u, v in edges:
        try:
            out.append(edge_clique_number(_WORKER_INDEX, u, v, budget=budget))
        except CliqueBudgetExceeded:
            # Exceptions with extra fields don't survive the trip home.
            out.append(('budget', u, v))
    return out


def _chunks(items: List[Any], size: int) -> Iterable[List[Any]]:
    for i in range(0, len(items), size):
        yield items[i:i + size]


def all_edge_clique_numbers(
        pg: PerturbedGraph,
        labels: Mapping[Tuple[int, int], EdgeLabel],
        budget: Optional[int] = DEFAULT_BUDGET,
        workers: int = 1,
        chunk_size: int = 256
) -> CliqueStats:
    """
    Compute the edge clique number of every observed edge.

    :param pg: the observed graph
    :param labels: the edge labels
    :param budget: the search budget per edge
    :param workers: the number of worker processes (``1`` to stay in this
        process)
    :param chunk_size: the number of edges handed to a worker at a time
    :return: the statistics, in sorted edge order
    :raises CliqueBudgetExceeded: if any edge's search runs over budget
    """
    index = CliqueIndex(pg.graph())
    edges = [tuple(e) for e in pg.edges.tolist()]
    if workers <= 1 or len(edges) <= chunk_size:
        omega = [edge_clique_number(index, u, v, budget=budget) for u, v in edges]
    else:
        with Pool(
                processes=workers,
                initializer=_init_worker,
                initargs=(index,)
        ) as pool:
            omega = [
                value
                for chunk in pool.imap(
                    _omega_chunk,
                    ((chunk, budget) for chunk in _chunks(edges, chunk_size))
                )
                for value in chunk
            ]
        for value in omega:
            if isinstance(value, tuple):
                _, u, v = value
                raise CliqueBudgetExceeded(
                    message=(
                        f"Edge ({u}, {v}): the maximum-clique search expanded "
                        f"more than {budget} nodes."
                    ),
                    budget=budget,
                    edge=(u, v)
                )
    logger.debug("Computed clique numbers for %d edges.", len(edges))
    return CliqueStats(
        edges=pg.edges,
        labels=[labels[e] for e in edges],
        omega=omega
    )


def write_clique_stats(
        stats: CliqueStats,
        csv_path: Union[str, Path],
        json_path: Union[str, Path]
) -> Tuple[Path, Path]:
    """
    Write per-edge clique numbers as CSV (``u,v,label,omega``) and the
    per-class summary as JSON.

    :param stats: the statistics
    :param csv_path: the CSV destination
    :param json_path: the JSON destination
    :return: the paths that were written
    """
    _csv, _json = Path(csv_path), Path(json_path)
    for path in (_csv, _json):
        path.parent.mkdir(parents=True, exist_ok=True)
    rows = ['u,v,label,omega']
    for (u, v), label, omega in zip(
            stats.edges.tolist(), stats.labels, stats.omega.tolist()
    ):
        rows.append(f"{u},{v},{label.value},{omega}")
    _csv.write_text('\n'.join(rows) + '\n', encoding='utf-8')
    _json.write_text(
        json.dumps(stats.export(), indent=2, sort_keys=True) + '\n',
        encoding='utf-8'
    )
    return _csv, _json
