#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Desk-scale Monte Carlo checks of the "with high probability" claims.  A
claim passes when it holds in at least ``ACCEPTANCE_FRACTION`` of the
trials.  Run them with ``pytest -m slow``.
"""
import math
import os
import networkx as nx
import numpy as np
import pytest
from cliquesieve.bounds import (
    er_clique_quantities, q_threshold, recovery_q_insertion_only,
    tau_good_edge_bound
)
from cliquesieve.cliques import max_clique
from cliquesieve.filtering import clique_filter
from cliquesieve.graphgen import build_rgg
from cliquesieve.harness import (
    ACCEPTANCE_FRACTION, ExperimentConfig, build_instance, model_params,
    resolve_geometry, run_gap_experiment, run_gap_sweep,
    run_recovery_experiment, trial_seed
)
from cliquesieve.measure import ball_mass
from cliquesieve.partitions import build_wsp, validate_wsp
from cliquesieve.space import make_space, sample_points

pytestmark = pytest.mark.slow

#: the trials per claim (``CLIQUESIEVE_ACCEPTANCE_TRIALS`` overrides it)
TRIALS: int = int(os.environ.get('CLIQUESIEVE_ACCEPTANCE_TRIALS', '50'))

#: worker processes for the experiment runs
WORKERS: int = 4


@pytest.fixture(scope='module', name='insertion_only')
def insertion_only_fix(tmp_path_factory) -> ExperimentConfig:
    """
    Get the insertion-only regime: n = 800, sn = 40, q = 0.005.

    :return: the configuration
    """
    return ExperimentConfig(
        n=800, target_sn=40.0, q=0.005, trials=TRIALS, workers=WORKERS,
        override_assumption_a=True,
        output_dir=str(tmp_path_factory.mktemp('insertion-only'))
    )


def test_corner_ball_mass_matches_monte_carlo():
    """
    Arrange: Take a corner ball in the unit square.
    Act: Estimate its mass by sampling.
    Assert: The estimate is within three standard errors of the quarter disc.
    """
    space = make_space('unit-cube', 2)
    r = 0.3
    points = sample_points(space, 200000, seed=12).points
    hits = space.distance(points, np.zeros(2)) <= r
    estimate = hits.mean()
    stderr = math.sqrt(estimate * (1 - estimate) / len(points))
    expected = ball_mass(space, [0.0, 0.0], r).mass
    assert expected == pytest.approx(math.pi * r * r / 4, rel=1e-3)
    assert abs(estimate - expected) <= 3 * stderr


def test_good_edges_insertion_only(insertion_only):
    """
    Arrange/Act: Run the gap experiment in the insertion-only regime.
    Assert: Good edges reach sn/4, and the largest bad-edge clique number
        stays below the smallest good-edge one, in enough trials.
    """
    result = run_gap_experiment(insertion_only)
    summary = result.summary
    assert summary['failed_trials'] == 0
    assert summary['good_edge_bound'] == pytest.approx(10.0)
    assert summary['good_edge_bound_fraction'] >= ACCEPTANCE_FRACTION
    assert summary['gap_fraction'] >= ACCEPTANCE_FRACTION
    assert summary['degree_claim_fraction'] >= ACCEPTANCE_FRACTION
    assert summary['occupancy_claim_fraction'] >= ACCEPTANCE_FRACTION


def test_gap_widens_as_q_falls(insertion_only):
    """
    Arrange/Act: Sweep q over 0.02, 0.01 and 0.005.
    Assert: The median gap falls as q grows.
    """
    _, sweep = run_gap_sweep(
        insertion_only.with_overrides(q_sweep=(0.02, 0.01, 0.005))
    )
    assert sweep['spearman_rho'] is not None
    assert sweep['spearman_rho'] < 0


def test_deletion_only_edge_cliques():
    """
    Arrange: Take p = 0.5 and sn = 256, with no insertions.
    Act: Filter each trial's graph at the least integer above
        (2/3) log2(sn).
    Assert: No edge is removed in enough trials.
    """
    config = ExperimentConfig(
        n=400, target_sn=256.0, p=0.5, q=0.0, base_seed=11, override_assumption_a=True
    )
    geometry = resolve_geometry(config)
    _, mass = geometry
    bound = tau_good_edge_bound(0.5, mass.s, config.n)
    assert bound == pytest.approx(16.0 / 3.0)
    tau = math.ceil(bound)
    kept_all = []
    for i in range(TRIALS):
        inst = build_instance(config, trial_seed(config, i), geometry)
        kept_all.append(bool(clique_filter(inst.pg, tau).kept.all()))
    assert sum(kept_all) >= ACCEPTANCE_FRACTION * TRIALS


def test_exact_filter_combined(tmp_path):
    """
    Arrange: Take p = 0.5, sn = 256, tau = 5 and q at half the combined
        threshold.
    Act: Run the recovery experiment.
    Assert: The filter removes no good edge and keeps no bad edge in enough
        trials.
    """
    base = ExperimentConfig(
        n=800, target_sn=256.0, p=0.5, tau=5, trials=TRIALS, workers=WORKERS,
        override_assumption_a=True, output_dir=str(tmp_path)
    )
    _, mass = resolve_geometry(base)
    q = q_threshold(model_params(base, mass), combined=True) / 2.0
    result = run_recovery_experiment(base.with_overrides(q=q))
    assert result.summary['exact_filter_fraction'] >= ACCEPTANCE_FRACTION


#: the number of nodes in the metric-recovery regime
RECOVERY_N: int = 1000


def _recovery_config(tmp_path, c: float) -> ExperimentConfig:
    """
    Get the insertion-only recovery regime at n = 1000: tau = floor(ln n),
    sn = 40 > 4 tau and q = c ln(n) / (sn).
    """
    tau = int(math.floor(math.log(RECOVERY_N)))
    s = 40.0 / RECOVERY_N
    assert 40.0 > 4 * tau
    return ExperimentConfig(
        n=RECOVERY_N, target_sn=40.0, p=0.0,
        q=recovery_q_insertion_only(RECOVERY_N, s, c=c), tau=tau,
        trials=TRIALS, workers=WORKERS, override_assumption_a=True,
        output_dir=str(tmp_path)
    )


def test_metric_recovery_small_constant(tmp_path):
    """
    Arrange: Take the recovery regime with c = 0.005.
    Act: Run the recovery experiment.
    Assert: The stretch is at most 3 in enough trials, never above 3 when
        all three recovery events hold, and the summary reports c.
    """
    summary = run_recovery_experiment(_recovery_config(tmp_path, 0.005)).summary
    assert summary['recovery_q_constant'] == pytest.approx(0.005, rel=1e-3)
    assert summary['alpha_le_3_fraction'] >= ACCEPTANCE_FRACTION
    assert summary['implication_violations'] == 0


@pytest.mark.xfail(
    strict=True,
    reason=(
        "At n = 1000, q = 0.5 ln(n) / (sn) inserts enough edges that bad "
        "edges reach tau = floor(ln n) and survive the filter; the recovery "
        "guarantee is asymptotic and does not show at this size."
    )
)
def test_metric_recovery_half_log_constant(tmp_path):
    """
    Arrange: Take the recovery regime with c = 0.5.
    Act: Run the recovery experiment.
    Assert: The stretch is at most 3 in enough trials.
    """
    summary = run_recovery_experiment(_recovery_config(tmp_path, 0.5)).summary
    assert summary['recovery_q_constant'] == pytest.approx(0.5, rel=1e-3)
    assert summary['alpha_le_3_fraction'] >= ACCEPTANCE_FRACTION


def test_er_clique_target():
    """
    Arrange: Sample G(200, 1/2) repeatedly.
    Act: Find each sample's clique number.
    Assert: It reaches floor(log2 200) = 7 in at least 99% of samples.
    """
    k = er_clique_quantities(200, 0.5).k
    assert k == 7
    samples = 200
    hits = sum(
        1 for seed in range(samples)
        if len(max_clique(nx.gnp_random_graph(200, 0.5, seed=seed), budget=None)) >= k
    )
    assert hits >= 0.99 * samples


@pytest.mark.parametrize('kind', ['flat-torus', 'unit-cube'])
def test_wsp_always_validates(kind):
    """
    Arrange: Sample 50 clouds of up to 500 points.
    Act: Build a family for each.
    Assert: Every family validates.
    """
    space = make_space(kind, 2)
    rng = np.random.default_rng(5)
    for i in range(50):
        n = int(rng.integers(20, 501))
        r = float(rng.uniform(0.05, 0.3))
        cloud = sample_points(space, n, seed=i)
        report = validate_wsp(build_wsp(cloud, r), cloud, r, build_rgg(cloud, r))
        assert report.ok, (kind, i, report.violation)

