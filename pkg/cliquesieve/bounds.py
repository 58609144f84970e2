#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.bounds
.. moduleauthor:: cliquesieve developers

Closed-form calculators for the quantities the edge-clique analysis is built
from: the Assumption-A mass threshold, filtering-threshold bounds, insertion
thresholds, expected numbers of ``uv``-cliques, and the Erdős–Rényi clique
quantities behind Janson's inequality.

Binomials and powers are evaluated in log-space so that block sizes in the
thousands and clique sizes in the dozens neither overflow nor underflow.
Wherever a result can be astronomically small or large the calculators return
a :py:class:`LogValue` carrying both the natural log and the value.

.. note::

    The constants ``c1``, ``c2`` and ``c3`` only exist in the analysis; they
    are parameters here (default ``1.0``).  Thresholds computed with them are
    qualitative guides, not certified cut-offs.
"""
import logging
import math
from typing import Any, Dict, NamedTuple, Optional, Sequence, Tuple
import numpy as np
from scipy.special import gammaln, logsumexp, xlogy
from .errors import CliqueSieveException

logger = logging.getLogger(__name__)

#: the largest number of terms the bounded-composition sum may evaluate
COMPOSITION_BUDGET: int = 10**8


class CompositionBudgetExceeded(CliqueSieveException):
    """
    Raised when a bounded-composition sum would need more terms than
    :py:data:`COMPOSITION_BUDGET` allows.
    """


class LogValue(NamedTuple):
    """
    A non-negative quantity reported both as its natural log and as a value.
    """
    log: float  #: the natural log (``-inf`` for zero)
    value: float  #: the value (may be ``inf`` or ``0.0`` past float range)

    @classmethod
    def from_log(cls, log: float) -> 'LogValue':
        """
        Create an instance from a natural log.

        :param log: the log
        :return: the instance
        """
        with np.errstate(over='ignore'):
            return cls(log=float(log), value=float(np.exp(log)))

    def __float__(self):
        return self.value


class ModelParams(NamedTuple):
    """
    The parameters the insertion thresholds depend on.
    """
    n: int  #: the number of nodes
    s: float  #: the Assumption-A mass lower bound
    rho: float = 1.0  #: the regularity factor
    p: float = 0.0  #: the deletion probability
    q: float = 0.0  #: the insertion probability
    K: float = 2.0  #: the target clique size
    c1: float = 1.0  #: the absolute insertion cap
    c2: float = 1.0  #: the scale constant
    c3: float = 1.0  #: the exponent constant

    @property
    def sn(self) -> float:
        """
        Get the expected number of points in the smallest ``r/2``-ball.
        """
        return self.s * self.n

    def validate(self) -> 'ModelParams':
        """
        Make sure the parameters are in range.

        :return: this instance
        :raises ValueError: if any parameter is out of range
        """
        if self.n < 2:
            raise ValueError("'n' must be at least 2.")
        if not 0.0 < self.s <= 1.0:
            raise ValueError("'s' must be in (0, 1].")
        if self.rho < 1.0:
            raise ValueError("'rho' must be at least 1.")
        for name in ('p', 'q'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"'{name}' must be in [0, 1].")
        if self.K < 2:
            raise ValueError("'K' must be at least 2.")
        for name in ('c1', 'c2', 'c3'):
            if getattr(self, name) <= 0:
                raise ValueError(f"'{name}' must be positive.")
        return self


class BlockProfile(NamedTuple):
    """
    The clique-block sizes around an edge ``uv`` and the number of extra
    clique vertices we're counting cliques for.
    """
    sizes: Tuple[int, ...]  #: the block sizes ``N_1 ... N_m``
    k: int  #: the number of clique vertices besides ``u`` and ``v``
    q: float  #: the insertion probability
    p: float = 0.0  #: the deletion probability


class ERCliqueParams(NamedTuple):
    """
    Clique quantities for an Erdős–Rényi graph ``G(N, pbar)``.
    """
    N: int  #: the number of vertices
    pbar: float  #: the edge probability
    k: int  #: the target clique size
    zeta: float  #: the expected number of ``k``-cliques
    delta_star: float  #: the conditional dependency sum
    delta: float  #: the (ordered-pair) dependency sum ``zeta * delta_star``

    @property
    def in_range(self) -> bool:
        """
        Does ``pbar`` lie in the range where the clique-size target is guaranteed?
        """
        low, high = er_pbar_range(self.N)
        return low < self.pbar < high


class JansonBounds(NamedTuple):
    """
    Janson upper bounds on the probability that no event occurs.
    """
    plain: float  #: ``exp(-zeta + delta/2)``
    extended: Optional[float]  #: ``exp(-zeta^2 / (2 delta))`` or ``None``

    @property
    def extended_applicable(self) -> bool:
        """
        Does the extended bound apply (``delta >= zeta``)?
        """
        return self.extended is not None


def log_binom(n, k):
    """
    Get the natural log of a binomial coefficient (``-inf`` where it is
    zero).

    :param n: the population size
    :param k: the sample size
    :return: ``ln C(n, k)``
    """
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    with np.errstate(invalid='ignore'):
        out = np.where(
            (k < 0) | (k > n),
            -np.inf,
            gammaln(n + 1) - gammaln(k + 1) - gammaln(np.maximum(n - k, 0) + 1)
        )
    return float(out) if out.ndim == 0 else out


def _pairs(x):
    """``C(x, 2)``"""
    return x * (x - 1) / 2.0


def assumption_a_s_min(n: int) -> float:
    """
    Get the smallest ball mass Assumption-A admits: ``13 ln(n) / n``.

    :param n: the number of nodes
    :return: the threshold (values above ``1`` mean the assumption can't be
        satisfied at this ``n``)
    :raises ValueError: if ``n`` is less than ``2``
    """
    if n < 2:
        raise ValueError("'n' must be at least 2.")
    return 13.0 * math.log(n) / n


def tau_good_edge_bound(p: float, s: float, n: int) -> float:
    """
    Get the edge clique number every good edge reaches (with high
    probability) under deletion: ``(2/3) log_{1/(1-p)}(sn)``.

    :param p: the deletion probability
    :param s: the Assumption-A mass lower bound
    :param n: the number of nodes
    :return: the bound
    :raises ValueError: if ``p`` is ``0`` or ``1`` (the formula degenerates;
        with ``p = 0`` use ``sn/4``), or if ``sn <= 1``
    """
    if not 0.0 < p < 1.0:
        raise ValueError(
            "'p' must be in (0, 1); with p = 0 the bound is sn/4."
        )
    sn = s * n
    if sn <= 1.0:
        raise ValueError("'sn' must exceed 1.")
    return (2.0 / 3.0) * math.log(sn) / math.log(1.0 / (1.0 - p))


def tau_insertion_only_bound(s: float, n: int) -> float:
    """
    Get the edge clique number every good edge reaches (with high
    probability) when nothing is deleted: ``sn/4``.

    :param s: the Assumption-A mass lower bound
    :param n: the number of nodes
    :return: the bound
    """
    return s * n / 4.0


def q_threshold(params: ModelParams, combined: bool = False) -> float:
    """
    Get the largest insertion probability under which bad edges keep edge
    clique numbers below ``K``:
    ``min{c1, c2 (1/n)^(c3/K) K / (sn)}``, or, in the combined model,
    ``min{c1, c2 (1/n)^(c3/K) K / (sn sqrt(1-p))}``.

    :param params: the model parameters
    :param combined: ``True`` to include the deletion correction
    :return: the threshold
    :raises ValueError: if the parameters are invalid, or if ``combined`` is
        requested with ``p = 1``
    """
    params.validate()
    log_second = (
        math.log(params.c2)
        - (params.c3 / params.K) * math.log(params.n)
        + math.log(params.K)
        - math.log(params.sn)
    )
    if combined:
        if params.p >= 1.0:
            raise ValueError("The combined threshold needs p < 1.")
        log_second -= 0.5 * math.log(1.0 - params.p)
    return min(params.c1, math.exp(log_second))


def recovery_q_insertion_only(n: int, s: float, c: float = 1.0) -> float:
    """
    Get the insertion probability ``c ln(n) / (sn)`` under which filtering
    with ``tau = ln(n)`` recovers the hidden metric when nothing is deleted.

    :param n: the number of nodes
    :param s: the Assumption-A mass lower bound
    :param c: the scale constant
    :return: the insertion probability
    """
    return c * math.log(n) / (s * n)


def recovery_q_constant(q: float, n: int, s: float) -> float:
    """
    Get the constant ``c`` with ``q = c ln(n) / (sn)``: the inverse of
    :py:func:`recovery_q_insertion_only`.

    :param q: the insertion probability
    :param n: the number of nodes
    :param s: the Assumption-A mass lower bound
    :return: the constant
    :raises ValueError: if ``n < 2`` or ``s`` isn't positive
    """
    if n < 2 or s <= 0:
        raise ValueError("'n' must be at least 2 and 's' must be positive.")
    return q * s * n / math.log(n)


def _composition_log_sum(
        block_logs: Sequence[np.ndarray],
        k: int
) -> float:
    """
    Sum ``prod_i f_i(x_i)`` over all compositions ``x_1 + ... + x_m = k``
    with ``x_i`` in the support of ``f_i``, given each ``log f_i`` as an array
    indexed by ``x_i``.  Blocks are folded in one at a time; the partial sums
    for every prefix total are kept so each composition is counted once.
    """
    work = len(block_logs) * (k + 1) * (k + 1)
    if work > COMPOSITION_BUDGET:
        raise CompositionBudgetExceeded(
            message=(
                f"Summing over compositions of {k} into {len(block_logs)} "
                f"parts needs {work} terms (budget {COMPOSITION_BUDGET})."
            )
        )
    # acc[j] = log of the sum over the blocks seen so far with total j
    acc = np.full(k + 1, -np.inf)
    acc[0] = 0.0
    for logs in block_logs:
        nxt = np.full(k + 1, -np.inf)
        top = min(k, len(logs) - 1)
        for j in range(k + 1):
            if acc[j] == -np.inf:
                continue
            span = min(top, k - j)
            cand = acc[j] + logs[:span + 1]
            nxt[j:j + span + 1] = np.logaddexp(nxt[j:j + span + 1], cand)
        acc = nxt
    return float(acc[k])


def expected_uv_cliques(profile: BlockProfile) -> LogValue:
    """
    Get the expected number of ``uv``-cliques of size ``k + 2`` when the
    vertices around ``uv`` fall in cliques (blocks) of the given sizes and
    every other pair is inserted with probability ``q``:

    ``q^(2k) sum_{x_1+...+x_m=k} prod C(N_i, x_i) q^((k^2 - sum x_i^2)/2)``,

    times ``(1-p)^(sum C(x_i, 2))`` when the blocks themselves lose edges
    with probability ``p``.

    :param profile: the block profile
    :return: the expectation (zero when ``k`` exceeds the total block size)
    :raises ValueError: if the profile is invalid
    :raises CompositionBudgetExceeded: if the sum is too large to evaluate
    """
    sizes = [int(x) for x in profile.sizes]
    k = int(profile.k)
    if k < 0 or any(x < 0 for x in sizes):
        raise ValueError("Block sizes and 'k' must be non-negative.")
    if not 0.0 <= profile.q <= 1.0 or not 0.0 <= profile.p <= 1.0:
        raise ValueError("'p' and 'q' must be in [0, 1].")
    if k == 0:
        return LogValue.from_log(0.0)
    if k > sum(sizes):
        return LogValue(log=-math.inf, value=0.0)
    log_q = math.log(profile.q) if profile.q > 0 else -math.inf
    log_keep = math.log1p(-profile.p) if profile.p < 1 else -math.inf
    block_logs = []
    for size in sizes:
        x = np.arange(min(size, k) + 1, dtype=float)
        with np.errstate(invalid='ignore'):
            logs = (
                log_binom(size, x)
                # each block contributes -x^2/2 to the q exponent...
                + np.where(x == 0, 0.0, -0.5 * x * x * log_q)
                # ...and its own C(x, 2) surviving edges
                + xlogy(_pairs(x), np.exp(log_keep))
            )
        block_logs.append(np.atleast_1d(logs))
    total = _composition_log_sum(block_logs, k)
    if total == -math.inf:
        return LogValue(log=-math.inf, value=0.0)
    # The shared factor q^(2k) * q^(k^2/2).
    log_value = total + (2 * k + 0.5 * k * k) * log_q
    if math.isnan(log_value):
        # q = 0 with k > 0: no insertions, no cliques.
        return LogValue(log=-math.inf, value=0.0)
    return LogValue.from_log(log_value)


def expected_uv_cliques_two_balls(
        nu: int,
        nv: int,
        k: int,
        q: float,
        p: float = 0.0
) -> LogValue:
    """
    Get the expected number of ``uv``-cliques of size ``k + 2`` when ``u``
    sits in a ball of ``nu`` points and ``v`` in a ball of ``nv`` points:

    ``sum_{x_1+x_2=k} C(nu-1, x_1) C(nv-1, x_2) q^((x_1+1)(x_2+1)-1)
    (1-p)^(C(x_1+1, 2) + C(x_2+1, 2))``.

    :param nu: the size of ``u``'s ball (``u`` included)
    :param nv: the size of ``v``'s ball (``v`` included)
    :param k: the number of clique vertices besides ``u`` and ``v``
    :param q: the insertion probability
    :param p: the deletion probability
    :return: the expectation (zero when ``k > (nu-1) + (nv-1)``)
    :raises ValueError: if a ball is empty or a probability is out of range
    """
    if nu < 1 or nv < 1:
        raise ValueError("'nu' and 'nv' must be at least 1.")
    if k < 0:
        raise ValueError("'k' must be non-negative.")
    if not 0.0 <= q <= 1.0 or not 0.0 <= p <= 1.0:
        raise ValueError("'p' and 'q' must be in [0, 1].")
    if k > (nu - 1) + (nv - 1):
        return LogValue(log=-math.inf, value=0.0)
    x1 = np.arange(max(0, k - (nv - 1)), min(k, nu - 1) + 1, dtype=float)
    x2 = k - x1
    logs = (
        log_binom(nu - 1, x1)
        + log_binom(nv - 1, x2)
        + xlogy((x1 + 1) * (x2 + 1) - 1, q)
        + xlogy(_pairs(x1 + 1) + _pairs(x2 + 1), 1.0 - p)
    )
    return LogValue.from_log(float(logsumexp(np.atleast_1d(logs))))


def er_clique_quantities(
        N: int,
        pbar: float,
        k: Optional[int] = None
) -> ERCliqueParams:
    """
    Get the clique quantities for ``G(N, pbar)``: the target size
    ``k = floor(log_{1/pbar} N)``, the expected number of ``k``-cliques
    ``zeta = C(N, k) pbar^C(k, 2)``, the conditional dependency sum
    ``delta_star = sum_{l=2}^{k-1} C(k, l) pbar^(C(k,2) - C(l,2)) C(N-k, k-l)``
    and ``delta = zeta * delta_star``.

    :param N: the number of vertices
    :param pbar: the edge probability
    :param k: a target clique size (``None`` for the default above)
    :return: the quantities
    :raises ValueError: if ``pbar`` isn't in ``(0, 1)``, ``N < 2`` or the
        target size isn't in ``[2, N]``
    """
    if not 0.0 < pbar < 1.0:
        raise ValueError("'pbar' must be in (0, 1).")
    if N < 2:
        raise ValueError("'N' must be at least 2.")
    if k is None:
        # The nudge keeps exact powers (e.g. N = 2^7, pbar = 1/2) exact.
        k = int(math.floor(math.log(N) / math.log(1.0 / pbar) + 1e-9))
    if not 2 <= k <= N:
        raise ValueError(f"The target clique size must be in [2, N] (got {k}).")
    log_p = math.log(pbar)
    log_zeta = log_binom(N, k) + _pairs(k) * log_p
    terms = [
        log_binom(k, l) + (_pairs(k) - _pairs(l)) * log_p + log_binom(N - k, k - l)
        for l in range(2, k)
    ]
    log_delta_star = float(logsumexp(terms)) if terms else -math.inf
    with np.errstate(over='ignore'):
        zeta = float(np.exp(log_zeta))
        delta_star = float(np.exp(log_delta_star))
    return ERCliqueParams(
        N=N,
        pbar=pbar,
        k=k,
        zeta=zeta,
        delta_star=delta_star,
        delta=zeta * delta_star
    )


def er_pbar_range(N: int) -> Tuple[float, float]:
    """
    Get the open interval of edge probabilities for which ``G(N, pbar)``
    has a clique of size ``floor(log_{1/pbar} N)`` except with probability
    below ``exp(-N^(3/2))``: ``((1/N)^(1/10), (1/N)^(1/N^(1/64)))``.

    :param N: the number of vertices
    :return: the ``(low, high)`` interval
    """
    return (
        (1.0 / N) ** 0.1,
        (1.0 / N) ** (1.0 / N ** (1.0 / 64.0))
    )


def janson_bounds(zeta: float, delta: float) -> JansonBounds:
    """
    Get Janson's bounds on the probability that none of a family of
    monotone events happens: ``exp(-zeta + delta/2)`` and, when
    ``delta >= zeta``, ``exp(-zeta^2 / (2 delta))``.

    :param zeta: the expected number of events
    :param delta: the ordered-pair dependency sum
    :return: the bounds
    :raises ValueError: if ``zeta`` isn't positive or ``delta`` is negative
    """
    if zeta <= 0:
        raise ValueError("'zeta' must be positive.")
    if delta < 0:
        raise ValueError("'delta' must be non-negative.")
    plain = math.exp(-zeta + delta / 2.0)
    extended = math.exp(-zeta * zeta / (2.0 * delta)) if delta >= zeta else None
    return JansonBounds(plain=plain, extended=extended)


def q_sufficient_case_a(
        k: int,
        n: int,
        n_max: float,
        m: int,
        eps: float = 3.0,
        p: float = 0.0
) -> float:
    """
    Get the largest insertion probability for which the expected number of
    ``uv``-cliques of size ``k + 2`` inside one well-separated clique
    partition (``m`` cliques of at most ``n_max`` points each) is
    ``O(n^-eps)``.  With deletion the three terms pick up the
    ``(1/(1-p))`` compensation factors and bound ``q / (1-p)``.

    :param k: the number of clique vertices besides ``u`` and ``v``
    :param n: the number of nodes
    :param n_max: the largest clique-block size
    :param m: the number of blocks
    :param eps: the decay exponent
    :param p: the deletion probability
    :return: the admissible upper bound on ``q``
    """
    if k < 1 or m < 1 or n_max <= 0:
        raise ValueError("'k', 'm' and 'n_max' must be positive.")
    if not 0.0 <= p < 1.0:
        raise ValueError("'p' must be in [0, 1).")
    log_kf = gammaln(k + 1)
    log_n, log_nmax, log_m = math.log(n), math.log(n_max), math.log(m)
    t1 = (log_kf - eps * log_n - k * log_nmax - log_m) / (2 * k)
    t2 = (log_kf - 2 * math.log(k) - eps * log_n - k * log_nmax - 2 * log_m) / k
    t3 = (log_kf - eps * log_n - k * log_m - k * log_nmax) * 4.0 / (k * k)
    log_inv_keep = -math.log1p(-p)
    grow = (k * k + 3 * k) / 2.0
    t1 += grow / (2 * k) * log_inv_keep
    t2 += grow / (2 * k + k * k / 4.0) * log_inv_keep
    t3 += grow / (2 * k + (k - 1) ** 2 / 4.0) * log_inv_keep
    return (1.0 - p) * math.exp(min(t1, t2, t3))


def q_sufficient_case_b(
        k: int,
        n: int,
        n_uv: float,
        eps: float = 3.0,
        p: float = 0.0
) -> float:
    """
    Get the largest insertion probability for which the expected number of
    ``uv``-cliques of size ``k + 2`` inside the two balls around ``u`` and
    ``v`` (``n_uv = N_u + N_v`` points in all) is ``O(n^-eps)``.

    :param k: the number of clique vertices besides ``u`` and ``v``
    :param n: the number of nodes
    :param n_uv: the combined size of the two balls
    :param eps: the decay exponent
    :param p: the deletion probability
    :return: the admissible upper bound on ``q``
    """
    if k < 1 or n_uv <= 0:
        raise ValueError("'k' and 'n_uv' must be positive.")
    if not 0.0 <= p < 1.0:
        raise ValueError("'p' must be in [0, 1).")
    log_kf = gammaln(k + 1)
    log_n, log_nuv = math.log(n), math.log(n_uv)
    t1 = (log_kf - 2 * math.log(k) - eps * log_n - k * log_nuv) / k
    t2 = (log_kf - k * log_nuv - eps * log_n) * 16.0 / (k * k)
    log_inv_keep = -math.log1p(-p)
    grow = (k * k + 3 * k) / 2.0
    t1 += grow / (k + k * k / 4.0) * log_inv_keep
    t2 += grow / (k + k * k / 16.0) * log_inv_keep
    return (1.0 - p) * math.exp(min(t1, t2))


def degree_claim_failure(n: int) -> float:
    """
    Get the stated failure probability of the claim that every node has at
    least ``sn/4`` neighbours: ``n^(-5/3)``.

    :param n: the number of nodes
    :return: the probability
    """
    return float(n) ** (-5.0 / 3.0)


def occupancy_claim_failure(n: int) -> float:
    """
    Get the stated failure probability of the claim that every ``r/2``-ball
    around a node holds at most ``3 rho sn`` nodes: ``n^(-5)``.

    :param n: the number of nodes
    :return: the probability
    """
    return float(n) ** -5.0


def all_bounds(params: ModelParams) -> Dict[str, Any]:
    """
    Evaluate every threshold that applies to a parameter set.

    :param params: the model parameters
    :return: a mapping of quantity names to values (``None`` where a formula
        doesn't apply)
    """
    params.validate()
    s_min = assumption_a_s_min(params.n)
    out: Dict[str, Any] = {
        'params': dict(params._asdict()),
        'sn': params.sn,
        'assumption_a_s_min': s_min,
        'assumption_a_holds': params.s >= s_min,
        'assumption_a_satisfiable': s_min <= 1.0,
        'tau_insertion_only': tau_insertion_only_bound(params.s, params.n),
        'tau_good_edge': None,
        'q_threshold': q_threshold(params, combined=False),
        'q_threshold_combined': None,
        'recovery_q_insertion_only': recovery_q_insertion_only(
            params.n, params.s
        ),
        'degree_claim_failure': degree_claim_failure(params.n),
        'occupancy_claim_failure': occupancy_claim_failure(params.n),
        'occupancy_cap': 3.0 * params.rho * params.sn,
        'q_within_threshold': None
    }
    if 0.0 < params.p < 1.0 and params.sn > 1.0:
        out['tau_good_edge'] = tau_good_edge_bound(params.p, params.s, params.n)
    if params.p < 1.0:
        out['q_threshold_combined'] = q_threshold(params, combined=True)
        out['q_within_threshold'] = params.q <= out['q_threshold_combined']
    if 0.0 < params.p < 1.0 and params.sn >= 2:
        try:
            er = er_clique_quantities(
                N=int(math.floor(params.sn)), pbar=1.0 - params.p
            )
            jb = janson_bounds(er.zeta, er.delta)
            out['er_clique'] = dict(er._asdict(), in_range=er.in_range)
            out['janson'] = {
                'plain': jb.plain,
                'extended': jb.extended,
                'extended_applicable': jb.extended_applicable
            }
        except ValueError as vex:
            logger.debug("No ER clique quantities: %s", vex)
    return out
