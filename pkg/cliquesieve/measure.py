#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.measure
.. moduleauthor:: cliquesieve developers

How much of the space does a ball hold?  This module answers that for the
built-in spaces (under the uniform measure) and gates experiments on
Assumption-A: every ``r/2``-ball has mass in ``[s, rho * s]`` with
``s >= 13 ln(n) / n``.
"""
import logging
import math
from typing import NamedTuple, Sequence
import numpy as np
from scipy.special import gamma
from shapely.geometry import Point, box
from .bounds import assumption_a_s_min
from .errors import CliqueSieveException
from .space import InvalidSpaceException, MetricSpace

logger = logging.getLogger(__name__)

#: the number of Monte Carlo samples used for ball masses with no closed form
MC_SAMPLES: int = 10**6

#: the number of segments shapely uses per quarter circle for clipped disks
DISK_RESOLUTION: int = 512


class AssumptionViolatedException(CliqueSieveException):
    """
    Raised when a configuration violates Assumption-A and nobody asked us to
    look the other way.
    """
    def __init__(
            self,
            message: str,
            s: float,
            threshold: float,
            inner: Exception = None
    ):
        """

        :param message: the exception message
        :param s: the ball-mass lower bound that was offered
        :param threshold: the bound Assumption-A asks for
        :param inner: the exception that caused this exception
        """
        super().__init__(message=message, inner=inner)
        self._s = s
        self._threshold = threshold

    @property
    def s(self) -> float:
        """
        Get the ball-mass lower bound that was offered.
        """
        return self._s

    @property
    def threshold(self) -> float:
        """
        Get the threshold ``13 ln(n) / n``.
        """
        return self._threshold

    @property
    def satisfiable(self) -> bool:
        """
        Could any probability mass satisfy the threshold?
        """
        return self._threshold <= 1.0


class MassBounds(NamedTuple):
    """
    Bounds on the mass of ``r/2``-balls: every such ball has mass in
    ``[s, rho * s]``.
    """
    s: float  #: the smallest ball mass
    rho: float  #: the ratio of the largest to the smallest ball mass

    @property
    def s_max(self) -> float:
        """
        Get the largest ball mass.
        """
        return self.s * self.rho


class BallMass(NamedTuple):
    """
    The mass of one ball, with the standard error of the estimate (``0`` when
    the mass is computed rather than sampled).
    """
    mass: float  #: the mass
    stderr: float = 0.0  #: the standard error


def unit_ball_volume(dim: int) -> float:
    """
    Get the volume of the Euclidean unit ball: ``pi^(d/2) / Gamma(d/2 + 1)``.

    :param dim: the dimension
    :return: the volume
    """
    return float(math.pi ** (dim / 2.0) / gamma(dim / 2.0 + 1.0))


def _check_radius(r: float):
    if not 0.0 < r <= 1.0:
        raise InvalidSpaceException(
            message=f"'r' must be in (0, 1] so that r/2 <= 1/2 (got {r})."
        )


def ball_mass_bounds(space: MetricSpace, r: float) -> MassBounds:
    """
    Get the exact Assumption-A bounds for ``r/2``-balls in a built-in space.

    On the torus every ball is a translate of every other, so
    ``s = V_d (r/2)^d`` and ``rho = 1``.  In the cube the smallest ball sits
    in a corner (one ``2^-d`` orthant survives the clip) and the largest sits
    in the middle, so ``s = V_d (r/2)^d / 2^d`` and ``rho = 2^d``.

    :param space: the space
    :param r: the connection radius
    :return: the bounds
    :raises InvalidSpaceException: if ``r`` isn't in ``(0, 1]``
    """
    _check_radius(r)
    volume = unit_ball_volume(space.dim) * (r / 2.0) ** space.dim
    if space.periodic:
        return MassBounds(s=volume, rho=1.0)
    corners = 2.0 ** space.dim
    return MassBounds(s=volume / corners, rho=corners)


def _monte_carlo_mass(
        space: MetricSpace,
        center: np.ndarray,
        radius: float,
        samples: int,
        seed: int
) -> BallMass:
    rng = np.random.default_rng(seed)
    hits = 0
    drawn = 0
    # Sample in batches to keep memory flat at high dimension.
    batch = max(1, min(samples, 2**17))
    while drawn < samples:
        size = min(batch, samples - drawn)
        pts = rng.random((size, space.dim))
        hits += int(np.count_nonzero(space.distance(pts, center) <= radius))
        drawn += size
    mass = hits / samples
    return BallMass(
        mass=mass,
        stderr=math.sqrt(max(mass * (1.0 - mass), 0.0) / samples)
    )


def ball_mass(
        space: MetricSpace,
        center: Sequence[float],
        radius: float,
        samples: int = MC_SAMPLES,
        seed: int = 0
) -> BallMass:
    """
    Get the mass of a closed ball under the uniform measure.

    The mass is exact on the torus (for ``radius <= 1/2``) and on the unit
    interval, comes from the area of a finely-segmented disk clipped to the
    unit square in two dimensions, and is estimated by Monte Carlo (with a
    standard error) otherwise.

    :param space: the space
    :param center: the ball's center
    :param radius: the ball's radius
    :param samples: the number of Monte Carlo samples (if they're needed)
    :param seed: the Monte Carlo seed
    :return: the mass
    :raises InvalidSpaceException: if the center has the wrong dimension
    :raises ValueError: if the radius is negative
    """
    _center = np.asarray(center, dtype=float).reshape(-1)
    if len(_center) != space.dim:
        raise InvalidSpaceException(
            message=(
                f"The center has {len(_center)} coordinates but the space has "
                f"{space.dim}."
            )
        )
    if radius < 0:
        raise ValueError("'radius' must be non-negative.")
    if space.periodic:
        if radius <= 0.5:
            return BallMass(
                mass=unit_ball_volume(space.dim) * radius ** space.dim
            )
        return _monte_carlo_mass(space, _center, radius, samples, seed)
    if space.dim == 1:
        x = _center[0]
        return BallMass(mass=max(0.0, min(x + radius, 1.0) - max(x - radius, 0.0)))
    if space.dim == 2:
        disk = Point(_center[0], _center[1]).buffer(
            radius, resolution=DISK_RESOLUTION
        )
        return BallMass(mass=float(disk.intersection(box(0.0, 0.0, 1.0, 1.0)).area))
    return _monte_carlo_mass(space, _center, radius, samples, seed)


def assumption_a_holds(mass: MassBounds, n: int) -> bool:
    """
    Do the ball masses satisfy Assumption-A at this number of nodes?

    :param mass: the ball-mass bounds
    :param n: the number of nodes
    :return: ``True`` if ``s >= 13 ln(n) / n``
    :raises ValueError: if ``n`` is less than ``2``
    """
    return mass.s >= assumption_a_s_min(n)


def require_assumption_a(
        mass: MassBounds,
        n: int,
        override: bool = False
) -> bool:
    """
    Check Assumption-A and refuse to go on if it doesn't hold (unless told
    to).

    :param mass: the ball-mass bounds
    :param n: the number of nodes
    :param override: ``True`` to log a warning instead of raising
    :return: ``True`` if the assumption holds, ``False`` if it was overridden
    :raises AssumptionViolatedException: if the assumption fails and there is
        no override
    """
    threshold = assumption_a_s_min(n)
    if mass.s >= threshold:
        return True
    msg = (
        f"Assumption-A fails: s = {mass.s:.6g} < 13 ln(n)/n = {threshold:.6g} "
        f"(n = {n})."
    )
    if not override:
        raise AssumptionViolatedException(
            message=msg, s=mass.s, threshold=threshold
        )
    logger.warning("%s Continuing because the check was overridden.", msg)
    return False


def radius_for_target_sn(
        space: MetricSpace,
        n: int,
        target_sn: float
) -> float:
    """
    Find the connection radius whose smallest ``r/2``-ball is expected to
    hold ``target_sn`` points.

    :param space: the space
    :param n: the number of nodes
    :param target_sn: the target value of ``s * n``
    :return: the radius
    :raises ValueError: if ``n`` or ``target_sn`` isn't positive
    :raises InvalidSpaceException: if the radius would exceed ``1``
    """
    if n < 1 or target_sn <= 0:
        raise ValueError("'n' and 'target_sn' must be positive.")
    s = target_sn / n
    corners = 1.0 if space.periodic else 2.0 ** space.dim
    r = 2.0 * (s * corners / unit_ball_volume(space.dim)) ** (1.0 / space.dim)
    if r > 1.0:
        raise InvalidSpaceException(
            message=(
                f"sn = {target_sn} at n = {n} needs r = {r:.6g} on {space}, "
                f"but r must be at most 1."
            )
        )
    logger.debug("target sn=%s on %s at n=%d: r=%.6g", target_sn, space, n, r)
    return r
