#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.rand
.. moduleauthor:: cliquesieve developers

Counter-based randomness.  A perturbation draw is a pure function of
``(seed, u, v)``, so the same pair gets the same draw no matter which order
(or which process) asks for it.  Trial seeds are split off a base seed with
numpy's :py:class:`~numpy.random.SeedSequence`.
"""
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    """
    The splitmix64 finalizer.  Arithmetic wraps modulo ``2^64``.
    """
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def pair_keys(u, v) -> np.ndarray:
    """
    Pack unordered vertex pairs into 64-bit keys (``min << 32 | max``).

    :param u: the first endpoints
    :param v: the second endpoints
    :return: the keys
    """
    _u = np.asarray(u, dtype=np.uint64)
    _v = np.asarray(v, dtype=np.uint64)
    lo = np.minimum(_u, _v)
    hi = np.maximum(_u, _v)
    return (lo << np.uint64(32)) | hi


def pair_uniforms(seed: int, u, v) -> np.ndarray:
    """
    Get one uniform draw in ``[0, 1)`` for each unordered pair ``(u, v)``.

    :param seed: the perturbation seed
    :param u: the first endpoints
    :param v: the second endpoints
    :return: the draws, one per pair
    """
    keys = np.atleast_1d(pair_keys(u, v))
    with np.errstate(over='ignore'):
        state = _mix(np.uint64(int(seed) & _MASK) + _GOLDEN)
        z = _mix(keys * _GOLDEN + state)
    return (z >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def spawn_seed(base_seed: int, index: int, stream: int = 0) -> int:
    """
    Split an independent 64-bit seed off a base seed.

    :param base_seed: the base seed
    :param index: the index of the child (e.g. a trial number)
    :param stream: an optional sub-stream (e.g. points vs. perturbation)
    :return: the child seed
    """
    seq = np.random.SeedSequence(
        entropy=int(base_seed) & _MASK,
        spawn_key=(int(index), int(stream))
    )
    return int(seq.generate_state(1, dtype=np.uint64)[0])
