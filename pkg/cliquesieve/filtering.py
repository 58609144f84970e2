#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.filtering
.. moduleauthor:: cliquesieve developers

Denoising filters.  Each one keeps or removes every observed edge on the
strength of a local score computed on the observed graph (never on a
partially filtered one), in a single pass, over the same vertex set.

- ``clique``: keep ``uv`` when its edge clique number is at least ``tau``.
- ``jaccard``: keep ``uv`` when
  ``|N(u) & N(v)| / |(N(u) | N(v)) - {u, v}|`` is at least the threshold
  (the index is ``0`` when the denominator is).
"""
from dataclasses import dataclass
from enum import Enum
import logging
import math
from pathlib import Path
from typing import Any, Hashable, Mapping, Optional, Union
import networkx as nx
import numpy as np
from .cliques import (
    CliqueIndex, DEFAULT_BUDGET, NotAnEdgeException, edge_clique_at_least,
    edge_clique_number
)
from .graphgen import PerturbedGraph
from .xchg import Exportable

logger = logging.getLogger(__name__)

#: the Jaccard convention, as recorded in file headers
JACCARD_CONVENTION: str = '|N(u)&N(v)|/|(N(u)|N(v))-{u,v}|, 0 if empty'


class FilterMethod(Enum):
    """
    These are the supported filters.
    """
    CLIQUE = 'clique'  #: edge clique number threshold
    JACCARD = 'jaccard'  #: Jaccard index threshold


@dataclass(frozen=True)
class FilterConfig(Exportable):
    """
    A filter and its threshold.
    """
    method: FilterMethod  #: the filter
    threshold: float  #: ``tau`` (an integer >= 2) or a Jaccard level in [0, 1]

    def __post_init__(self):
        if not isinstance(self.method, FilterMethod):
            object.__setattr__(self, 'method', FilterMethod(self.method))
        if self.method == FilterMethod.CLIQUE:
            if int(self.threshold) != self.threshold or self.threshold < 2:
                raise ValueError("The clique threshold must be an integer >= 2.")
            object.__setattr__(self, 'threshold', int(self.threshold))
        elif not 0.0 <= self.threshold <= 1.0:
            raise ValueError("The Jaccard threshold must be in [0, 1].")

    def export(self) -> Mapping[str, Any]:
        """
        Export the instance as a mapping of simple types.

        :return: the mapping
        """
        return {'method': self.method.value, 'threshold': self.threshold}

    @classmethod
    def load(cls, data: Mapping[str, Any]) -> 'FilterConfig':
        """
        Create an instance from a mapping.

        :param data: the data
        :return: the instance
        """
        return cls(method=FilterMethod(data['method']), threshold=data['threshold'])


class FilteredGraph:
    """
    The outcome of filtering an observed graph: every observed edge, whether
    it was kept, and (where computed) its score.
    """
    __slots__ = ['_source', '_config', '_kept', '_scores']

    def __init__(
            self,
            source: PerturbedGraph,
            config: FilterConfig,
            kept: np.ndarray,
            scores: Optional[np.ndarray] = None
    ):
        self._source = source
        self._config = config
        self._kept = np.asarray(kept, dtype=bool)
        self._kept.setflags(write=False)
        self._scores = None if scores is None else np.asarray(scores, dtype=float)

    @property
    def source(self) -> PerturbedGraph:
        """
        Get the observed graph that was filtered.
        """
        return self._source

    @property
    def config(self) -> FilterConfig:
        """
        Get the filter that was applied.
        """
        return self._config

    @property
    def n(self) -> int:
        """
        Get the number of vertices.
        """
        return self._source.n

    @property
    def kept(self) -> np.ndarray:
        """
        Get the per-edge flags that are ``True`` for surviving edges (in the
        observed graph's edge order).
        """
        return self._kept

    @property
    def scores(self) -> Optional[np.ndarray]:
        """
        Get the per-edge scores (``None`` if they weren't computed).
        """
        return self._scores

    @property
    def edges(self) -> np.ndarray:
        """
        Get the surviving edges.
        """
        return self._source.edges[self._kept]

    @property
    def removed(self) -> np.ndarray:
        """
        Get the removed edges.
        """
        return self._source.edges[~self._kept]

    def graph(self) -> nx.Graph:
        """
        Get a :py:class:`networkx.Graph` of the surviving edges, on every
        vertex of the observed graph.
        """
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges.tolist())
        return g

    def __repr__(self):
        return (
            f"{self.__class__.__name__}("
            f"method={self._config.method.value}, "
            f"threshold={self._config.threshold!r}, "
            f"kept={int(self._kept.sum())}, removed={int((~self._kept).sum())})"
        )


def clique_filter(
        pg: PerturbedGraph,
        tau: int,
        scores: bool = False,
        budget: Optional[int] = DEFAULT_BUDGET
) -> FilteredGraph:
    """
    Keep the observed edges whose edge clique number (in the observed
    graph) is at least ``tau``.

    :param pg: the observed graph
    :param tau: the threshold
    :param scores: ``True`` to compute exact clique numbers as scores
    :param budget: the search budget per edge (exact scores only)
    :return: the filtered graph
    :raises ValueError: if ``tau`` is less than ``2``
    :raises CliqueBudgetExceeded: if an exact search runs over budget
    """
    config = FilterConfig(method=FilterMethod.CLIQUE, threshold=tau)
    index = CliqueIndex(pg.graph())
    edges = pg.edges.tolist()
    if scores:
        omega = np.array(
            [edge_clique_number(index, u, v, budget=budget) for u, v in edges],
            dtype=float
        )
        kept = omega >= config.threshold
    else:
        omega = None
        kept = np.array(
            [edge_clique_at_least(index, u, v, config.threshold) for u, v in edges],
            dtype=bool
        )
    logger.debug(
        "The clique filter (tau=%d) kept %d of %d edges.",
        config.threshold, int(np.sum(kept)), len(edges)
    )
    return FilteredGraph(source=pg, config=config, kept=kept, scores=omega)


def jaccard_index(graph: nx.Graph, u: Hashable, v: Hashable) -> float:
    """
    Get the Jaccard index of an edge:
    ``|N(u) & N(v)| / |(N(u) | N(v)) - {u, v}|`` (``0`` when the denominator
    is ``0``).

    :param graph: the graph
    :param u: one endpoint
    :param v: the other endpoint
    :return: the index
    :raises NotAnEdgeException: if ``uv`` isn't an edge
    """
    if u == v or not graph.has_edge(u, v):
        raise NotAnEdgeException(
            message=f"({u!r}, {v!r}) is not an edge.", edge=(u, v)
        )
    nu, nv = set(graph[u]), set(graph[v])
    union = (nu | nv) - {u, v}
    if not union:
        return 0.0
    return len(nu & nv) / len(union)


def jaccard_filter(pg: PerturbedGraph, threshold: float) -> FilteredGraph:
    """
    Keep the observed edges whose Jaccard index is at least the threshold.

    :param pg: the observed graph
    :param threshold: the threshold
    :return: the filtered graph
    :raises ValueError: if the threshold isn't in ``[0, 1]``
    """
    config = FilterConfig(method=FilterMethod.JACCARD, threshold=threshold)
    graph = pg.graph()
    index = np.array(
        [jaccard_index(graph, u, v) for u, v in pg.edges.tolist()], dtype=float
    )
    kept = index >= config.threshold
    logger.debug(
        "The Jaccard filter (threshold=%s) kept %d of %d edges.",
        threshold, int(kept.sum()), len(kept)
    )
    return FilteredGraph(source=pg, config=config, kept=kept, scores=index)


def apply_filter(
        pg: PerturbedGraph,
        config: FilterConfig,
        scores: bool = False,
        budget: Optional[int] = DEFAULT_BUDGET
) -> FilteredGraph:
    """
    Apply a configured filter.

    :param pg: the observed graph
    :param config: the filter
    :param scores: ``True`` to compute exact clique scores (clique filter)
    :param budget: the search budget per edge (exact scores only)
    :return: the filtered graph
    """
    if config.method == FilterMethod.CLIQUE:
        return clique_filter(pg, int(config.threshold), scores=scores, budget=budget)
    return jaccard_filter(pg, config.threshold)


def write_filtered_graph(
        fg: FilteredGraph,
        path: Union[str, Path],
        lineage: Optional[Mapping[str, Any]] = None
) -> Path:
    """
    Write a filtered graph as text: ``# key=value`` header lines for the
    method, threshold and seed lineage, then one ``u v kept|removed score``
    line per observed edge in sorted order (``na`` for missing scores).

    :param fg: the filtered graph
    :param path: the destination path
    :param lineage: extra header values (e.g. trial and perturbation seeds)
    :return: the path that was written
    """
    _path = Path(path)
    _path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"# method={fg.config.method.value}",
        f"# threshold={fg.config.threshold!r}",
        f"# seed={'none' if fg.source.seed is None else fg.source.seed}"
    ]
    if fg.config.method == FilterMethod.JACCARD:
        lines.append(f"# jaccard={JACCARD_CONVENTION}")
    for key, value in (lineage or {}).items():
        lines.append(f"# {key}={value}")
    scores = fg.scores
    for i, ((u, v), kept) in enumerate(zip(fg.source.edges.tolist(), fg.kept.tolist())):
        score = 'na' if scores is None else _format_score(scores[i])
        lines.append(f"{u} {v} {'kept' if kept else 'removed'} {score}")
    _path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return _path


def _format_score(value: float) -> str:
    if math.isfinite(value) and value == int(value):
        return str(int(value))
    return repr(float(value))
