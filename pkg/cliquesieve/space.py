#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.space
.. moduleauthor:: cliquesieve developers

If you're dealing with the spaces graph nodes are sampled from, look in here!
The built-in spaces are the unit cube and the flat unit torus (side length
``1``) in any dimension, each carrying the uniform measure.
"""
from enum import Enum
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, NamedTuple, Optional, Union
import numpy as np
from scipy.spatial import cKDTree
from .errors import CliqueSieveException
from .xchg import Exportable

logger = logging.getLogger(__name__)


class InvalidSpaceException(CliqueSieveException):
    """
    Raised in response to attempts to create or use an invalid metric space.
    """


class SpaceKind(Enum):
    """
    These are the built-in space kinds.
    """
    UNIT_CUBE = 'unit-cube'  #: the unit cube with Euclidean distance
    FLAT_TORUS = 'flat-torus'  #: the unit cube with opposite faces glued


class MetricSpace(NamedTuple):
    """
    Represents a sampled metric space: a kind and a dimension.
    """
    kind: SpaceKind  #: the kind of space
    dim: int  #: the dimension

    @property
    def periodic(self) -> bool:
        """
        Is the space a torus?
        """
        return self.kind == SpaceKind.FLAT_TORUS

    def displacement(self, a, b) -> np.ndarray:
        """
        Get the per-coordinate absolute displacement between points (or
        arrays of points).

        :param a: a point (or an array of points)
        :param b: another point (or an array of points)
        :return: the absolute per-coordinate displacements
        """
        delta = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
        if self.periodic:
            delta = np.minimum(delta, 1.0 - delta)
        return delta

    def distance(self, a, b) -> Union[float, np.ndarray]:
        """
        Get the geodesic distance between two points (or between matching
        rows of two point arrays).

        :param a: a point (or an array of points)
        :param b: another point (or an array of points)
        :return: the distance(s)
        """
        d = np.sqrt(np.sum(np.square(self.displacement(a, b)), axis=-1))
        return float(d) if np.ndim(d) == 0 else d

    def pairwise(self, points: np.ndarray) -> np.ndarray:
        """
        Get the full matrix of pairwise distances.

        :param points: an ``(n, dim)`` array of points
        :return: an ``(n, n)`` distance matrix
        """
        pts = np.asarray(points, dtype=float)
        return self.distance(pts[:, np.newaxis, :], pts[np.newaxis, :, :])

    def pairs_within(self, points: np.ndarray, radius: float) -> np.ndarray:
        """
        Find every pair of points whose distance is at most ``radius``.

        :param points: an ``(n, dim)`` array of points
        :param radius: the (inclusive) distance threshold
        :return: an ``(m, 2)`` array of index pairs ``i < j``, sorted
            lexicographically
        """
        pts = np.asarray(points, dtype=float)
        if len(pts) < 2:
            return np.empty((0, 2), dtype=np.int64)
        tree = self.kdtree(pts)
        # The tree's arithmetic isn't ours, so we over-query a hair and let
        # our own distance function have the final word.
        candidates = tree.query_pairs(
            r=radius * (1.0 + 1e-9), output_type='ndarray'
        ).astype(np.int64)
        if len(candidates) == 0:
            return np.empty((0, 2), dtype=np.int64)
        candidates.sort(axis=1)
        d = self.distance(pts[candidates[:, 0]], pts[candidates[:, 1]])
        pairs = candidates[d <= radius]
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return pairs[order]

    def kdtree(self, points: np.ndarray) -> cKDTree:
        """
        Get a KD-tree over a set of points that respects the space's
        topology.

        :param points: an ``(n, dim)`` array of points
        :return: the tree
        """
        pts = np.asarray(points, dtype=float)
        if self.periodic:
            # The periodic tree wants coordinates in [0, 1).
            return cKDTree(np.mod(pts, 1.0), boxsize=1.0)
        return cKDTree(pts)

    def contains(self, points: np.ndarray) -> bool:
        """
        Do all the points lie in the space's fundamental domain?

        :param points: an ``(n, dim)`` array of points
        :return: ``True`` if every coordinate is in range
        """
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            return True
        upper_ok = (pts < 1.0) if self.periodic else (pts <= 1.0)
        return bool(np.all(pts >= 0.0) and np.all(upper_ok))

    def __str__(self):
        return f"{self.kind.value}-{self.dim}"


def make_space(kind: Union[SpaceKind, str], dim: int) -> MetricSpace:
    """
    Get a metric space.

    :param kind: the kind of space (or its name, e.g. ``'flat-torus'``)
    :param dim: the dimension
    :return: the space
    :raises InvalidSpaceException: if the kind is unknown or the dimension
        isn't a positive integer
    """
    try:
        _kind = kind if isinstance(kind, SpaceKind) else SpaceKind(kind)
    except ValueError as vex:
        raise InvalidSpaceException(
            message=f"Unknown space kind: {kind!r}",
            inner=vex
        )
    if int(dim) != dim or dim < 1:
        raise InvalidSpaceException(
            message=f"'dim' must be a positive integer (got {dim!r})."
        )
    return MetricSpace(kind=_kind, dim=int(dim))


class PointCloud(Exportable):
    """
    A set of points sampled from a metric space.
    """
    __slots__ = ['_space', '_points', '_seed']

    def __init__(
            self,
            space: MetricSpace,
            points: np.ndarray,
            seed: Optional[int] = None
    ):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != space.dim:
            raise InvalidSpaceException(
                message=(
                    f"Expected points of shape (n, {space.dim}), "
                    f"got {pts.shape}."
                )
            )
        if not space.contains(pts):
            raise InvalidSpaceException(
                message=f"Some points lie outside the {space} domain."
            )
        pts.setflags(write=False)
        self._space = space  #: the space
        self._points = pts  #: the coordinates
        self._seed = seed  #: the sampling seed (if there was one)

    @property
    def space(self) -> MetricSpace:
        """
        Get the space the points live in.
        """
        return self._space

    @property
    def points(self) -> np.ndarray:
        """
        Get the (read-only) ``(n, dim)`` coordinate array.
        """
        return self._points

    @property
    def seed(self) -> Optional[int]:
        """
        Get the seed the points were sampled with.
        """
        return self._seed

    @property
    def n(self) -> int:
        """
        Get the number of points.
        """
        return len(self._points)

    def distance(self, i: int, j: int) -> float:
        """
        Get the distance between two points of the cloud.

        :param i: the first point's id
        :param j: the second point's id
        :return: the distance
        """
        return self._space.distance(self._points[i], self._points[j])

    def distances(self, pairs: np.ndarray) -> np.ndarray:
        """
        Get the distances for an array of index pairs.

        :param pairs: an ``(m, 2)`` array of point ids
        :return: the ``m`` distances
        """
        _pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if len(_pairs) == 0:
            return np.empty(0, dtype=float)
        return self._space.distance(
            self._points[_pairs[:, 0]], self._points[_pairs[:, 1]]
        )

    def subset(self, ids: Iterable[int]) -> np.ndarray:
        """
        Get the coordinates of some of the points.

        :param ids: the point ids
        :return: the coordinates
        """
        return self._points[np.asarray(list(ids), dtype=np.int64)]

    def export(self) -> Mapping[str, Any]:
        """
        Export the instance as a mapping of simple types.

        :return: the mapping
        """
        return {
            'space': {'kind': self._space.kind.value, 'dim': self._space.dim},
            'points': self._points.tolist(),
            'seed': self._seed
        }

    @classmethod
    def load(cls, data: Mapping[str, Any]) -> 'PointCloud':
        """
        Create an instance from a mapping.

        :param data: the data
        :return: the instance
        """
        space = make_space(**data['space'])
        points = np.asarray(data['points'], dtype=float).reshape(-1, space.dim)
        return cls(space=space, points=points, seed=data.get('seed'))

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return False
        return (
            self._space == other._space
            and self._seed == other._seed
            and np.array_equal(self._points, other._points)
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return (
            f"{self.__class__.__name__}("
            f"space={self._space!r}, n={self.n}, seed={self._seed!r})"
        )


def sample_points(space: MetricSpace, n: int, seed: int) -> PointCloud:
    """
    Sample ``n`` points i.i.d. from the uniform measure on a space.

    :param space: the space
    :param n: the number of points
    :param seed: the seed
    :return: the point cloud
    :raises ValueError: if ``n`` is less than ``1``
    """
    if n < 1:
        raise ValueError("'n' must be at least 1.")
    rng = np.random.default_rng(seed)
    points = rng.random((n, space.dim))
    logger.debug("Sampled %d points on %s (seed=%s).", n, space, seed)
    return PointCloud(space=space, points=points, seed=seed)


def write_point_cloud(cloud: PointCloud, path: Union[str, Path]) -> Path:
    """
    Write a point cloud as CSV: a ``# space=... dim=... seed=...`` comment
    line, an ``id,x0,...`` header, then one row per point with coordinates
    printed to 17 significant digits.

    :param cloud: the point cloud
    :param path: the destination path
    :return: the path that was written
    """
    _path = Path(path)
    _path.parent.mkdir(parents=True, exist_ok=True)
    header = ','.join(['id'] + [f'x{i}' for i in range(cloud.space.dim)])
    lines = [
        f"# space={cloud.space.kind.value} dim={cloud.space.dim} "
        f"seed={'none' if cloud.seed is None else cloud.seed}",
        header
    ]
    for i, row in enumerate(cloud.points):
        lines.append(','.join([str(i)] + [f'{x:.17g}' for x in row]))
    _path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return _path


def read_point_cloud(path: Union[str, Path]) -> PointCloud:
    """
    Read a point cloud written by :py:func:`write_point_cloud`.

    :param path: the source path
    :return: the point cloud
    :raises InvalidSpaceException: if the file is malformed
    """
    lines = [
        ln.strip() for ln in
        Path(path).read_text(encoding='utf-8').splitlines() if ln.strip()
    ]
    if not lines or not lines[0].startswith('#'):
        raise InvalidSpaceException(
            message=f"{path}: missing '# space=... dim=... seed=...' line."
        )
    meta = dict(
        token.split('=', 1) for token in lines[0].lstrip('#').split()
        if '=' in token
    )
    try:
        space = make_space(meta['space'], int(meta['dim']))
    except KeyError as kex:
        raise InvalidSpaceException(
            message=f"{path}: the comment line lacks {kex}.",
            inner=kex
        )
    seed = None if meta.get('seed', 'none') == 'none' else int(meta['seed'])
    rows = [ln.split(',') for ln in lines[2:]]
    points = np.array(
        [[float(x) for x in row[1:]] for row in rows], dtype=float
    ).reshape(-1, space.dim)
    return PointCloud(space=space, points=points, seed=seed)
