#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.partitions
.. moduleauthor:: cliquesieve developers

Well-separated clique-partition families: covers of the vertex set by parts,
each part a disjoint union of cliques that sit inside ``r/2``-balls and lie
more than ``r`` apart from one another.

Families are built in two levels.  A family of ``r/2``-packings covers the
vertices; each packing's centres are split again into ``r``-packings, and
the ``r/2``-balls around each ``r``-packing's centres make up one part.
Packings come from greedy colouring of a conflict graph (two centres
conflict when their ``delta``-balls could meet), taken in vertex-id order.
"""
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union
import networkx as nx
import numpy as np
from .graphgen import GeometricGraph
from .space import PointCloud
from .xchg import Exportable, dump_json, load_json

logger = logging.getLogger(__name__)


def _in_id_order(graph: nx.Graph, colors: Mapping) -> Iterable:
    return sorted(graph)


class PackingFamily(NamedTuple):
    """
    A family of ``delta``-packings: sets of centres whose ``delta``-balls
    are pairwise disjoint (centres more than ``2 delta`` apart).
    """
    delta: float  #: the ball radius
    packings: Tuple[Tuple[int, ...], ...]  #: the centre ids of each packing
    max_conflicts: int  #: the largest degree in the conflict graph

    @property
    def size_bound(self) -> int:
        """
        Get the greedy-colouring bound on the number of packings.
        """
        return 1 + self.max_conflicts


def packing_cover(
        cloud: PointCloud,
        subset: Sequence[int],
        delta: float
) -> PackingFamily:
    """
    Split a set of vertices into ``delta``-packings.  Every vertex is a
    centre in exactly one packing, so the packings' balls cover the set.

    :param cloud: the points
    :param subset: the vertex ids to pack
    :param delta: the ball radius
    :return: the packing family
    :raises ValueError: if ``delta`` isn't positive
    """
    if delta <= 0:
        raise ValueError("'delta' must be positive.")
    ids = np.unique(np.asarray(list(subset), dtype=np.int64))
    conflicts = nx.Graph()
    conflicts.add_nodes_from(ids.tolist())
    close = cloud.space.pairs_within(cloud.points[ids], 2.0 * delta)
    conflicts.add_edges_from(ids[close].tolist())
    coloring = nx.coloring.greedy_color(conflicts, strategy=_in_id_order)
    classes: Dict[int, List[int]] = {}
    for v in sorted(coloring):
        classes.setdefault(coloring[v], []).append(v)
    packings = tuple(tuple(classes[c]) for c in sorted(classes))
    max_conflicts = max((d for _, d in conflicts.degree), default=0)
    logger.debug(
        "Packed %d vertices into %d %s-packings.", len(ids), len(packings), delta
    )
    return PackingFamily(delta=delta, packings=packings, max_conflicts=max_conflicts)


class WSPPart(NamedTuple):
    """
    One part of a well-separated family: disjoint cliques, each with the
    centre of the ``r/2``-ball that holds it.
    """
    cliques: Tuple[Tuple[int, ...], ...]  #: the cliques' vertex ids
    centers: Tuple[int, ...]  #: each clique's centre

    @property
    def vertices(self) -> Tuple[int, ...]:
        """
        Get every vertex in the part, sorted.
        """
        return tuple(sorted(v for clique in self.cliques for v in clique))


class WSPFamily(Exportable):
    """
    A well-separated clique-partitions family.
    """
    __slots__ = ['_parts', '_size_bound']

    def __init__(self, parts: Iterable[WSPPart], size_bound: Optional[int] = None):
        self._parts = tuple(parts)
        self._size_bound = size_bound

    @property
    def parts(self) -> Tuple[WSPPart, ...]:
        """
        Get the parts.
        """
        return self._parts

    @property
    def size_bound(self) -> Optional[int]:
        """
        Get the bound ``(1 + D1)(1 + D2)`` on the number of parts, where the
        ``D``s are the largest conflict degrees at the two levels (``None``
        for families that weren't built here).
        """
        return self._size_bound

    def __len__(self):
        return len(self._parts)

    def export(self) -> Mapping[str, Any]:
        """
        Export the instance as a mapping of simple types.

        :return: the mapping
        """
        return {
            'parts': [
                {
                    'cliques': [list(c) for c in part.cliques],
                    'centers': list(part.centers)
                } for part in self._parts
            ]
        }

    @classmethod
    def load(cls, data: Mapping[str, Any]) -> 'WSPFamily':
        """
        Create an instance from a mapping.

        :param data: the data
        :return: the instance
        """
        return cls(
            parts=[
                WSPPart(
                    cliques=tuple(tuple(int(v) for v in c) for c in part['cliques']),
                    centers=tuple(int(v) for v in part['centers'])
                ) for part in data['parts']
            ]
        )

    def __eq__(self, other):
        return isinstance(other, WSPFamily) and self._parts == other._parts

    def __repr__(self):
        return f"{self.__class__.__name__}(parts={len(self._parts)})"


def build_wsp(cloud: PointCloud, r: float) -> WSPFamily:
    """
    Build a well-separated clique-partitions family.  A point that falls in
    more than one ball of a part joins the lowest-indexed clique.

    :param cloud: the points
    :param r: the connection radius
    :return: the family
    :raises ValueError: if the cloud is empty or ``r`` isn't positive
    """
    if cloud.n < 1:
        raise ValueError("The point cloud is empty.")
    if r <= 0:
        raise ValueError("'r' must be positive.")
    space = cloud.space
    level1 = packing_cover(cloud, range(cloud.n), r / 2.0)
    tree = space.kdtree(cloud.points)
    parts: List[WSPPart] = []
    worst2 = 0
    for centers1 in level1.packings:
        level2 = packing_cover(cloud, centers1, r)
        worst2 = max(worst2, level2.max_conflicts)
        for centers in level2.packings:
            taken: set = set()
            cliques = []
            for c in centers:
                near = np.asarray(
                    tree.query_ball_point(
                        cloud.points[c],
                        r=(r / 2.0) * (1.0 + 1e-9)
                    ),
                    dtype=np.int64
                )
                near = near[space.distance(cloud.points[near], cloud.points[c]) <= r / 2.0]
                members = sorted(v for v in near.tolist() if v not in taken)
                taken.update(members)
                cliques.append(tuple(members))
            parts.append(WSPPart(cliques=tuple(cliques), centers=tuple(centers)))
    bound = level1.size_bound * (1 + worst2)
    logger.debug("Built a WSP family of %d parts (bound %d).", len(parts), bound)
    return WSPFamily(parts=parts, size_bound=bound)


class WSPReport(NamedTuple):
    """
    The outcome of validating a well-separated family.
    """
    ok: bool  #: did every check pass?
    violation: Optional[str] = None  #: the first violation found
    #: are the offending cliques more than ``r`` apart in Hausdorff distance?
    hausdorff_only: bool = False


def _hausdorff(space, a: np.ndarray, b: np.ndarray) -> float:
    d = space.distance(a[:, np.newaxis, :], b[np.newaxis, :, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def validate_wsp(
        wsp: WSPFamily,
        cloud: PointCloud,
        r: float,
        truth: GeometricGraph
) -> WSPReport:
    """
    Check a family's defining properties: the parts cover the vertices;
    within a part the cliques are disjoint, each lies in the ``r/2``-ball
    around its centre, is complete in the hidden graph, and lies more than
    ``r`` (minimum pairwise distance) from every other clique, with no
    hidden edge between them.

    Two cliques closer than that fail the check.  When they are
    nevertheless more than ``r`` apart in Hausdorff distance the report
    says so (``hausdorff_only``), but the family still fails: two points
    within ``r`` share a hidden edge, so Hausdorff separation alone does not
    keep the parts free of crossing edges.

    :param wsp: the family
    :param cloud: the points
    :param r: the connection radius
    :param truth: the hidden graph
    :return: the report
    """
    space = cloud.space
    points = cloud.points
    covered = np.zeros(cloud.n, dtype=bool)
    for pi, part in enumerate(wsp.parts):
        if len(part.cliques) != len(part.centers):
            return WSPReport(
                ok=False,
                violation=f"part {pi}: {len(part.cliques)} cliques but "
                          f"{len(part.centers)} centers"
            )
        owner = {}
        for ci, (clique, center) in enumerate(zip(part.cliques, part.centers)):
            for v in clique:
                if v in owner:
                    return WSPReport(
                        ok=False,
                        violation=f"part {pi}: vertex {v} is in cliques "
                                  f"{owner[v]} and {ci}"
                    )
                owner[v] = ci
            if not clique:
                continue
            ids = np.asarray(clique, dtype=np.int64)
            covered[ids] = True
            far = space.distance(points[ids], points[center]) > r / 2.0
            if np.any(far):
                return WSPReport(
                    ok=False,
                    violation=f"part {pi}, clique {ci}: vertex "
                              f"{int(ids[far][0])} lies outside the r/2-ball "
                              f"around {center}"
                )
            for i, a in enumerate(clique):
                for b in clique[i + 1:]:
                    if not truth.has_edge(a, b):
                        return WSPReport(
                            ok=False,
                            violation=f"part {pi}, clique {ci}: ({a}, {b}) "
                                      f"is not a hidden edge"
                        )
        members = np.asarray(sorted(owner), dtype=np.int64)
        if len(members) < 2:
            continue
        close = members[space.pairs_within(points[members], r)]
        for a, b in close.tolist():
            ca, cb = owner[a], owner[b]
            if ca == cb:
                continue
            hausdorff_only = _hausdorff(
                space,
                points[list(part.cliques[ca])],
                points[list(part.cliques[cb])]
            ) > r
            if hausdorff_only:
                logger.warning(
                    "Part %d: cliques %d and %d are within r but more than r "
                    "apart in Hausdorff distance.", pi, ca, cb
                )
            return WSPReport(
                ok=False,
                violation=f"part {pi}: cliques {ca} and {cb} are within r "
                          f"at ({a}, {b})",
                hausdorff_only=hausdorff_only
            )
        masks = [sum(1 << v for v in clique) for clique in part.cliques]
        whole = sum(masks)
        bits = truth.bits
        for a in members.tolist():
            crossing = bits[a] & whole & ~masks[owner[a]]
            if crossing:
                b = (crossing & -crossing).bit_length() - 1
                return WSPReport(
                    ok=False,
                    violation=f"part {pi}: hidden edge ({a}, {b}) crosses "
                              f"cliques {owner[a]} and {owner[b]}"
                )
    if not np.all(covered):
        return WSPReport(
            ok=False,
            violation=f"vertex {int(np.flatnonzero(~covered)[0])} is in no part"
        )
    return WSPReport(ok=True)


def write_wsp(wsp: WSPFamily, path: Union[str, Path]) -> Path:
    """
    Write a family as JSON.

    :param wsp: the family
    :param path: the destination path
    :return: the path that was written
    """
    return dump_json(wsp, path)


def read_wsp(path: Union[str, Path]) -> WSPFamily:
    """
    Read a family written by :py:func:`write_wsp`.

    :param path: the source path
    :return: the family
    """
    return load_json(WSPFamily, path)
