#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.harness
.. moduleauthor:: cliquesieve developers

Monte Carlo experiments: configuration, seeded trials, summaries and
reports.

Every trial is a pure function of ``(config, trial index)``.  Trial seeds are
split off the base seed with :py:func:`cliquesieve.rand.spawn_seed`, and each
trial splits its own seed again for the points and the perturbation, so
results don't depend on how many workers run the trials or in which order
they finish.

"With high probability" is checked as "in at least
:py:data:`ACCEPTANCE_FRACTION` of the trials"; this is a verification policy,
not a finite-``n`` guarantee.
"""
import csv
from dataclasses import asdict, dataclass, field, fields, replace
import json
import logging
import math
from multiprocessing import Pool
from pathlib import Path
import time
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union
import numpy as np
from scipy.stats import spearmanr
from . import bounds
from .cliques import (
    CliqueBudgetExceeded, DEFAULT_BUDGET, all_edge_clique_numbers,
    write_clique_stats
)
from .errors import CliqueSieveException, ConfigException
from .filtering import (
    FilterConfig, FilterMethod, FilteredGraph, apply_filter,
    write_filtered_graph
)
from .graphgen import (
    EdgeLabel, GeometricGraph, PerturbedGraph, build_rgg, classify_edges,
    degree_claim_holds, label_counts, occupancy_claim_holds, perturb,
    write_edge_list
)
from .measure import (
    MassBounds, ball_mass_bounds, radius_for_target_sn, require_assumption_a
)
from .metrics import all_pairs_distances, recovery_stretch
from .rand import spawn_seed
from .space import (
    PointCloud, make_space, read_point_cloud, sample_points, write_point_cloud
)
from .xchg import Exportable, load_json

logger = logging.getLogger(__name__)

#: the fraction of trials a "with high probability" claim must hold in
ACCEPTANCE_FRACTION: float = 0.9

#: the default expected occupancy of the smallest r/2-ball
DEFAULT_TARGET_SN: float = 40.0

#: the seed sub-stream for sampling points
POINTS_STREAM: int = 0

#: the seed sub-stream for perturbing edges
PERTURB_STREAM: int = 1


@dataclass(frozen=True)
class ExperimentConfig(Exportable):
    """
    Everything an experiment needs to know.
    """
    space_kind: str = 'flat-torus'  #: the space kind
    dim: int = 2  #: the space dimension
    n: int = 800  #: the number of points
    r: Optional[float] = None  #: the connection radius (or use ``target_sn``)
    target_sn: Optional[float] = None  #: the target ``s * n`` (default 40)
    p: float = 0.0  #: the deletion probability
    q: float = 0.005  #: the insertion probability
    tau: int = 5  #: the clique filter threshold
    filter_method: str = 'clique'  #: the filter used for recovery
    jaccard_threshold: float = 0.5  #: the Jaccard filter threshold
    trials: int = 50  #: the number of trials
    base_seed: int = 0  #: the base seed trial seeds are split from
    clique_budget: int = DEFAULT_BUDGET  #: the search budget per edge
    output_dir: str = 'runs'  #: where reports go
    override_assumption_a: bool = False  #: run even if Assumption-A fails
    workers: int = 1  #: the number of worker processes
    keep_artifacts: bool = False  #: write every trial's intermediate files
    c1: float = 1.0  #: the insertion-threshold cap
    c2: float = 1.0  #: the insertion-threshold scale
    c3: float = 1.0  #: the insertion-threshold exponent
    K: Optional[float] = None  #: the target clique size (defaults to ``tau``)
    points_file: Optional[str] = None  #: a point cloud to use for every trial
    s: Optional[float] = None  #: the ball-mass bound (required with a file)
    rho: Optional[float] = None  #: the regularity factor (with a file)
    compare_jaccard: bool = False  #: also run the Jaccard filter
    q_sweep: Tuple[float, ...] = field(default_factory=tuple)  #: gap sweep qs

    def __post_init__(self):
        object.__setattr__(self, 'q_sweep', tuple(float(q) for q in self.q_sweep))
        if self.r is not None and self.target_sn is not None:
            raise ConfigException(
                message="Give either 'r' or 'target_sn', not both.",
                field='r'
            )
        if self.r is None and self.target_sn is None:
            object.__setattr__(self, 'target_sn', DEFAULT_TARGET_SN)
        self._check()

    def _fail(self, name: str, message: str):
        raise ConfigException(message=f"'{name}' {message}", field=name)

    def _check(self):
        try:
            make_space(self.space_kind, self.dim)
        except CliqueSieveException as cse:
            raise ConfigException(message=cse.message, field='space_kind', inner=cse)
        if self.n < 2:
            self._fail('n', "must be at least 2.")
        if self.r is not None and self.r <= 0:
            self._fail('r', "must be positive.")
        if self.target_sn is not None and self.target_sn <= 0:
            self._fail('target_sn', "must be positive.")
        for name in ('p', 'q', 'jaccard_threshold'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                self._fail(name, "must be in [0, 1].")
        if any(not 0.0 <= q <= 1.0 for q in self.q_sweep):
            self._fail('q_sweep', "values must be in [0, 1].")
        if self.tau < 2:
            self._fail('tau', "must be at least 2.")
        try:
            FilterMethod(self.filter_method)
        except ValueError as vex:
            raise ConfigException(
                message=f"Unknown filter method: {self.filter_method!r}",
                field='filter_method',
                inner=vex
            )
        if self.trials < 1:
            self._fail('trials', "must be at least 1.")
        if self.workers < 1:
            self._fail('workers', "must be at least 1.")
        if self.clique_budget < 1:
            self._fail('clique_budget', "must be positive.")
        if self.points_file is not None and self.s is None:
            self._fail('s', "is required when 'points_file' is set.")
        if self.s is not None and not 0.0 < self.s <= 1.0:
            self._fail('s', "must be in (0, 1].")
        if self.rho is not None and self.rho < 1.0:
            self._fail('rho', "must be at least 1.")
        for name in ('c1', 'c2', 'c3'):
            if getattr(self, name) <= 0:
                self._fail(name, "must be positive.")
        if self.K is not None and self.K < 2:
            self._fail('K', "must be at least 2.")

    @property
    def filter_config(self) -> FilterConfig:
        """
        Get the configured filter.
        """
        method = FilterMethod(self.filter_method)
        threshold = self.tau if method == FilterMethod.CLIQUE else self.jaccard_threshold
        return FilterConfig(method=method, threshold=threshold)

    def with_overrides(self, **overrides) -> 'ExperimentConfig':
        """
        Get a copy with some fields replaced (``None`` values are ignored).

        :param overrides: the fields to replace
        :return: the new configuration
        """
        changes = {k: v for k, v in overrides.items() if v is not None}
        if 'r' in changes and 'target_sn' not in changes:
            changes['target_sn'] = None
        elif 'target_sn' in changes and 'r' not in changes:
            changes['r'] = None
        return replace(self, **changes)

    def export(self) -> Mapping[str, Any]:
        """
        Export the instance as a mapping of simple types.

        :return: the mapping
        """
        data = asdict(self)
        data['q_sweep'] = list(self.q_sweep)
        return data

    @classmethod
    def load(cls, data: Mapping[str, Any]) -> 'ExperimentConfig':
        """
        Create an instance from a mapping.  Unknown keys are rejected and
        every key that takes its default is logged.

        :param data: the data
        :return: the instance
        :raises ConfigException: if the mapping doesn't describe a valid
            configuration
        """
        if not isinstance(data, Mapping):
            raise ConfigException(message="A configuration must be a JSON object.")
        known = {f.name: f for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigException(message=f"Unknown field: {key!r}", field=key)
        for name in known:
            if name not in data:
                logger.info("Config field '%s' takes its default.", name)
        kwargs = dict(data)
        if 'q_sweep' in kwargs and kwargs['q_sweep'] is not None:
            kwargs['q_sweep'] = tuple(kwargs['q_sweep'])
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as ex:
            raise ConfigException(message=f"Invalid configuration: {ex}", inner=ex)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load a configuration from a JSON file.

    :param path: the file
    :return: the configuration
    :raises ConfigException: if the file is malformed
    """
    return load_json(ExperimentConfig, path)


class Instance(NamedTuple):
    """
    One generated instance: points, hidden graph, observed graph, labels.
    """
    cloud: PointCloud  #: the points
    truth: GeometricGraph  #: the hidden graph
    pg: PerturbedGraph  #: the observed graph
    labels: Dict[Tuple[int, int], EdgeLabel]  #: the observed edges' labels
    mass: MassBounds  #: the Assumption-A bounds
    points_seed: Optional[int]  #: the point-sampling seed
    perturb_seed: int  #: the perturbation seed


def resolve_geometry(config: ExperimentConfig) -> Tuple[float, MassBounds]:
    """
    Work out the connection radius and the ball-mass bounds a configuration
    implies.

    :param config: the configuration
    :return: ``(r, mass)``
    """
    space = make_space(config.space_kind, config.dim)
    if config.points_file is not None:
        if config.r is None:
            raise ConfigException(
                message="'r' is required when 'points_file' is set.", field='r'
            )
        return config.r, MassBounds(s=config.s, rho=config.rho or 1.0)
    r = config.r if config.r is not None else radius_for_target_sn(
        space, config.n, config.target_sn
    )
    mass = ball_mass_bounds(space, r)
    if config.s is not None:
        mass = MassBounds(s=config.s, rho=config.rho or mass.rho)
    return r, mass


def check_config(config: ExperimentConfig) -> Tuple[float, MassBounds]:
    """
    Resolve the geometry and gate on Assumption-A.

    :param config: the configuration
    :return: ``(r, mass)``
    :raises AssumptionViolatedException: if Assumption-A fails and isn't
        overridden
    """
    r, mass = resolve_geometry(config)
    require_assumption_a(mass, config.n, override=config.override_assumption_a)
    return r, mass


def trial_seed(config: ExperimentConfig, index: int) -> int:
    """
    Get the seed of one trial.

    :param config: the configuration
    :param index: the trial index
    :return: the seed
    """
    return spawn_seed(config.base_seed, index)


def build_instance(
        config: ExperimentConfig,
        seed: int,
        geometry: Optional[Tuple[float, MassBounds]] = None
) -> Instance:
    """
    Generate, perturb and label one instance.

    :param config: the configuration
    :param seed: the trial seed
    :param geometry: ``(r, mass)`` if already resolved
    :return: the instance
    """
    r, mass = geometry if geometry is not None else resolve_geometry(config)
    space = make_space(config.space_kind, config.dim)
    if config.points_file is not None:
        cloud = read_point_cloud(config.points_file)
        points_seed = cloud.seed
    else:
        points_seed = spawn_seed(seed, 0, POINTS_STREAM)
        cloud = sample_points(space, config.n, points_seed)
    truth = build_rgg(cloud, r)
    perturb_seed = spawn_seed(seed, 0, PERTURB_STREAM)
    pg = perturb(truth, config.p, config.q, perturb_seed)
    labels = classify_edges(pg)
    return Instance(
        cloud=cloud,
        truth=truth,
        pg=pg,
        labels=labels,
        mass=mass,
        points_seed=points_seed,
        perturb_seed=perturb_seed
    )


@dataclass
class TrialRecord(Exportable):
    """
    What one trial measured.
    """
    trial: int  #: the trial index
    seed: int  #: the trial seed
    kept: int = 0  #: observed edges kept from the hidden graph
    inserted: int = 0  #: observed edges that were inserted
    good: int = 0  #: good observed edges
    bad: int = 0  #: bad observed edges
    indeterminate: int = 0  #: indeterminate observed edges
    degree_claim: Optional[bool] = None  #: every hidden degree >= sn/4?
    occupancy_claim: Optional[bool] = None  #: every r/2-ball <= 3 rho sn?
    good_min: Optional[int] = None  #: smallest good-edge clique number
    good_max: Optional[int] = None  #: largest good-edge clique number
    good_mean: Optional[float] = None  #: mean good-edge clique number
    bad_min: Optional[int] = None  #: smallest bad-edge clique number
    bad_max: Optional[int] = None  #: largest bad-edge clique number
    bad_mean: Optional[float] = None  #: mean bad-edge clique number
    indeterminate_min: Optional[int] = None  #: smallest indeterminate value
    indeterminate_max: Optional[int] = None  #: largest indeterminate value
    indeterminate_mean: Optional[float] = None  #: mean indeterminate value
    edge_min: Optional[int] = None  #: smallest clique number over all edges
    gap: Optional[int] = None  #: smallest good less largest bad value
    good_removed: Optional[int] = None  #: good edges the filter removed
    bad_kept: Optional[int] = None  #: bad edges the filter kept
    indeterminate_kept: Optional[int] = None  #: indeterminate edges kept
    indeterminate_removed: Optional[int] = None  #: indeterminate edges removed
    e1: Optional[bool] = None  #: kept hidden edges stretch distances <= 2x?
    e2: Optional[bool] = None  #: every kept hidden edge survived the filter?
    e3: Optional[bool] = None  #: no bad edge survived the filter?
    alpha: Optional[float] = None  #: the recovery stretch factor
    mismatch: Optional[bool] = None  #: did connectivity differ?
    degenerate: Optional[bool] = None  #: did the filter remove every edge?
    jaccard_alpha: Optional[float] = None  #: the Jaccard filter's stretch
    failed: bool = False  #: did a clique search run over budget?
    wall_clock: float = 0.0  #: seconds spent on the trial

    #: the fields left out of the deterministic CSV report
    VOLATILE = ('wall_clock',)

    def export(self) -> Mapping[str, Any]:
        """
        Export the instance as a mapping of simple types.

        :return: the mapping
        """
        return asdict(self)

    @classmethod
    def load(cls, data: Mapping[str, Any]) -> 'TrialRecord':
        """
        Create an instance from a mapping.

        :param data: the data
        :return: the instance
        """
        return cls(**data)

    @classmethod
    def csv_fields(cls) -> List[str]:
        """
        Get the columns of the trials CSV.
        """
        return [f.name for f in fields(cls) if f.name not in cls.VOLATILE]


def _count_labels(record: TrialRecord, inst: Instance):
    record.kept = int((~inst.pg.inserted).sum())
    record.inserted = int(inst.pg.inserted.sum())
    counts = label_counts(inst.labels)
    record.good = counts[EdgeLabel.GOOD]
    record.bad = counts[EdgeLabel.BAD]
    record.indeterminate = counts[EdgeLabel.INDETERMINATE]
    record.degree_claim = degree_claim_holds(inst.truth, inst.mass.s)
    record.occupancy_claim = occupancy_claim_holds(inst.truth, inst.mass)


def _artifact_dir(config: ExperimentConfig, kind: str, index: int) -> Path:
    return Path(config.output_dir) / kind / 'artifacts' / f"trial-{index:04d}"


def _gap_trial(
        config: ExperimentConfig,
        index: int,
        geometry: Tuple[float, MassBounds],
        edge_workers: int
) -> TrialRecord:
    seed = trial_seed(config, index)
    record = TrialRecord(trial=index, seed=seed)
    inst = build_instance(config, seed, geometry)
    _count_labels(record, inst)
    stats = all_edge_clique_numbers(
        inst.pg, inst.labels, budget=config.clique_budget, workers=edge_workers
    )
    summary = stats.summary()
    for label, prefix in (
            (EdgeLabel.GOOD, 'good'),
            (EdgeLabel.BAD, 'bad'),
            (EdgeLabel.INDETERMINATE, 'indeterminate')
    ):
        s = summary[label]
        setattr(record, f'{prefix}_min', s.min)
        setattr(record, f'{prefix}_max', s.max)
        setattr(record, f'{prefix}_mean', s.mean)
    record.edge_min = int(stats.omega.min()) if len(stats.omega) else None
    record.gap = stats.gap
    if config.keep_artifacts:
        out = _artifact_dir(config, 'gap', index)
        write_point_cloud(inst.cloud, out / 'points.csv')
        write_edge_list(inst.pg, inst.labels, out / 'edges.txt')
        write_clique_stats(stats, out / 'cliques.csv', out / 'cliques.json')
    return record


def _filter_outcome(record: TrialRecord, fg: FilteredGraph, inst: Instance):
    labels = [inst.labels[e] for e in map(tuple, inst.pg.edges.tolist())]
    kept = fg.kept.tolist()
    record.good_removed = sum(
        1 for lb, k in zip(labels, kept) if lb == EdgeLabel.GOOD and not k
    )
    record.bad_kept = sum(1 for lb, k in zip(labels, kept) if lb == EdgeLabel.BAD and k)
    record.indeterminate_kept = sum(
        1 for lb, k in zip(labels, kept) if lb == EdgeLabel.INDETERMINATE and k
    )
    record.indeterminate_removed = sum(
        1 for lb, k in zip(labels, kept) if lb == EdgeLabel.INDETERMINATE and not k
    )


def _recovery_trial(
        config: ExperimentConfig,
        index: int,
        geometry: Tuple[float, MassBounds],
        edge_workers: int
) -> TrialRecord:
    seed = trial_seed(config, index)
    record = TrialRecord(trial=index, seed=seed)
    inst = build_instance(config, seed, geometry)
    _count_labels(record, inst)
    fg = apply_filter(inst.pg, config.filter_config, budget=config.clique_budget)
    _filter_outcome(record, fg, inst)
    d_truth = all_pairs_distances(inst.truth.graph())
    report = recovery_stretch(inst.truth, fg, labels=inst.labels, truth_distances=d_truth)
    record.e1, record.e2, record.e3 = report.e1, report.e2, report.e3
    record.alpha = report.alpha
    record.mismatch = report.approx.mismatch
    record.degenerate = len(fg.edges) == 0 and len(inst.truth.edges) > 0
    if record.degenerate:
        logger.warning("Trial %d is degenerate: the filter removed every edge.", index)
    if config.compare_jaccard and fg.config.method != FilterMethod.JACCARD:
        jg = apply_filter(
            inst.pg,
            FilterConfig(method=FilterMethod.JACCARD, threshold=config.jaccard_threshold)
        )
        record.jaccard_alpha = recovery_stretch(
            inst.truth, jg, labels=inst.labels, truth_distances=d_truth
        ).alpha
    if config.keep_artifacts:
        out = _artifact_dir(config, 'recovery', index)
        write_point_cloud(inst.cloud, out / 'points.csv')
        write_edge_list(inst.pg, inst.labels, out / 'edges.txt')
        write_filtered_graph(
            fg, out / 'filtered.txt',
            lineage={'trial': index, 'trial_seed': seed}
        )
    return record


_TRIALS = {'gap': _gap_trial, 'recovery': _recovery_trial}


def run_trial(
        config: ExperimentConfig,
        kind: str,
        index: int,
        geometry: Optional[Tuple[float, MassBounds]] = None,
        edge_workers: int = 1
) -> TrialRecord:
    """
    Run one trial.

    :param config: the configuration
    :param kind: ``'gap'`` or ``'recovery'``
    :param index: the trial index
    :param geometry: ``(r, mass)`` if already resolved
    :param edge_workers: worker processes for per-edge clique work
    :return: the trial's record
    :raises CliqueSieveException: if the trial fails for any reason but the
        clique budget
    """
    started = time.perf_counter()
    logger.info("Starting %s trial %d.", kind, index)
    try:
        record = _TRIALS[kind](
            config, index,
            geometry if geometry is not None else resolve_geometry(config),
            edge_workers
        )
    except CliqueBudgetExceeded as cbe:
        logger.warning("Trial %d failed: %s", index, cbe.message)
        record = TrialRecord(trial=index, seed=trial_seed(config, index), failed=True)
    except CliqueSieveException as cse:
        # The base exception survives the trip back from a worker process.
        raise CliqueSieveException(message=f"Trial {index}: {cse.message}", inner=cse)
    record.wall_clock = time.perf_counter() - started
    logger.info("Finished %s trial %d.", kind, index)
    return record


def _pool_trial(args) -> TrialRecord:
    return run_trial(*args)


def run_trials(
        config: ExperimentConfig,
        kind: str,
        geometry: Optional[Tuple[float, MassBounds]] = None
) -> List[TrialRecord]:
    """
    Run every trial of an experiment, in parallel when configured to.

    :param config: the configuration
    :param kind: ``'gap'`` or ``'recovery'``
    :param geometry: ``(r, mass)`` if already checked
    :return: the records, in trial order
    """
    if geometry is None:
        geometry = check_config(config)
    if config.workers <= 1 or config.trials == 1:
        edge_workers = config.workers if config.trials == 1 else 1
        return [
            run_trial(config, kind, i, geometry, edge_workers)
            for i in range(config.trials)
        ]
    with Pool(processes=config.workers) as pool:
        return list(pool.imap(
            _pool_trial,
            ((config, kind, i, geometry, 1) for i in range(config.trials))
        ))


class ExperimentResult(NamedTuple):
    """
    An experiment's trial records and summary.
    """
    kind: str  #: ``'gap'`` or ``'recovery'``
    config: ExperimentConfig  #: the configuration
    records: List[TrialRecord]  #: the trial records
    summary: Dict[str, Any]  #: the summary


def model_params(config: ExperimentConfig, mass: MassBounds) -> bounds.ModelParams:
    """
    Get the model parameters the closed-form bounds take.

    :param config: the configuration
    :param mass: the ball-mass bounds
    :return: the parameters
    """
    return bounds.ModelParams(
        n=config.n,
        s=mass.s,
        rho=mass.rho,
        p=config.p,
        q=config.q,
        K=config.K if config.K is not None else float(config.tau),
        c1=config.c1,
        c2=config.c2,
        c3=config.c3
    )


def _fraction(flags: Sequence[bool]) -> Optional[float]:
    return sum(1 for f in flags if f) / len(flags) if flags else None


def _separated(record: TrialRecord) -> bool:
    if record.gap is not None:
        return record.gap > 0
    return record.bad == 0


def good_edge_bound(config: ExperimentConfig, mass: MassBounds) -> float:
    """
    Get the clique number good edges should reach: ``sn/4`` without
    deletion, ``(2/3) log_{1/(1-p)}(sn)`` with it.

    :param config: the configuration
    :param mass: the ball-mass bounds
    :return: the bound
    """
    if config.p == 0.0:
        return bounds.tau_insertion_only_bound(mass.s, config.n)
    return bounds.tau_good_edge_bound(config.p, mass.s, config.n)


def _base_summary(
        config: ExperimentConfig,
        kind: str,
        records: List[TrialRecord],
        geometry: Tuple[float, MassBounds]
) -> Dict[str, Any]:
    r, mass = geometry
    done = [rec for rec in records if not rec.failed]
    return {
        'experiment': kind,
        'config': config.export(),
        'bounds': bounds.all_bounds(model_params(config, mass)),
        'r': r,
        's': mass.s,
        'rho': mass.rho,
        'sn': mass.s * config.n,
        'assumption_a_s_min': bounds.assumption_a_s_min(config.n),
        'acceptance_fraction': ACCEPTANCE_FRACTION,
        'trials': len(records),
        'failed_trials': len(records) - len(done),
        'degree_claim_fraction': _fraction([rec.degree_claim for rec in done]),
        'degree_claim_stated_failure': bounds.degree_claim_failure(config.n),
        'occupancy_claim_fraction': _fraction([rec.occupancy_claim for rec in done]),
        'occupancy_claim_stated_failure': bounds.occupancy_claim_failure(config.n)
    }


def summarize_gap(
        config: ExperimentConfig,
        records: List[TrialRecord],
        geometry: Tuple[float, MassBounds]
) -> Dict[str, Any]:
    """
    Summarise gap-experiment records.

    :param config: the configuration
    :param records: the records
    :param geometry: ``(r, mass)``
    :return: the summary
    """
    summary = _base_summary(config, 'gap', records, geometry)
    done = [rec for rec in records if not rec.failed]
    gaps = [rec.gap for rec in done if rec.gap is not None]
    bound = good_edge_bound(config, geometry[1])
    summary.update({
        'gap_fraction': _fraction([_separated(rec) for rec in done]),
        'gap_undefined_trials': sum(1 for rec in done if rec.gap is None),
        'gaps': gaps,
        'median_gap': float(np.median(gaps)) if gaps else None,
        'good_edge_bound': bound,
        'good_edge_bound_fraction': _fraction([
            rec.good_min is None or rec.good_min >= bound for rec in done
        ]),
        'edge_min_bound_fraction': _fraction([
            rec.edge_min is None or rec.edge_min >= bound for rec in done
        ])
    })
    return summary


def summarize_recovery(
        config: ExperimentConfig,
        records: List[TrialRecord],
        geometry: Tuple[float, MassBounds]
) -> Dict[str, Any]:
    """
    Summarise recovery-experiment records.

    :param config: the configuration
    :param records: the records
    :param geometry: ``(r, mass)``
    :return: the summary
    """
    summary = _base_summary(config, 'recovery', records, geometry)
    done = [rec for rec in records if not rec.failed]
    events = [bool(rec.e1 and rec.e2 and rec.e3) for rec in done]
    summary.update({
        'recovery_q_constant': bounds.recovery_q_constant(
            config.q, config.n, geometry[1].s
        ),
        'alpha_le_3_fraction': _fraction([rec.alpha <= 3.0 for rec in done]),
        'events_fraction': _fraction(events),
        'implication_violations': sum(
            1 for rec, ev in zip(done, events) if ev and rec.alpha > 3.0
        ),
        'exact_filter_fraction': _fraction([
            rec.good_removed == 0 and rec.bad_kept == 0 for rec in done
        ]),
        'degenerate_trials': sum(1 for rec in done if rec.degenerate),
        'alpha': _distribution([rec.alpha for rec in done])
    })
    if config.compare_jaccard:
        summary['comparison'] = {
            config.filter_method: _distribution([rec.alpha for rec in done]),
            FilterMethod.JACCARD.value: _distribution([
                rec.jaccard_alpha for rec in done if rec.jaccard_alpha is not None
            ])
        }
    return summary


def _distribution(alphas: Sequence[float]) -> Dict[str, Any]:
    if not alphas:
        return {'count': 0}
    values = np.asarray(alphas, dtype=float)
    return {
        'count': int(len(values)),
        'le_3_fraction': float(np.mean(values <= 3.0)),
        'infinite': int(np.sum(np.isinf(values))),
        'min': float(values.min()),
        'median': float(np.median(values)),
        'max': float(values.max())
    }


def run_gap_experiment(config: ExperimentConfig) -> ExperimentResult:
    """
    Measure edge clique numbers by label class across seeded trials.

    :param config: the configuration
    :return: the records and their summary
    """
    geometry = check_config(config)
    records = run_trials(config, 'gap', geometry)
    return ExperimentResult(
        kind='gap',
        config=config,
        records=records,
        summary=summarize_gap(config, records, geometry)
    )


def run_gap_sweep(config: ExperimentConfig) -> Tuple[List[ExperimentResult], Dict[str, Any]]:
    """
    Run the gap experiment once per insertion probability in
    ``config.q_sweep`` and correlate ``q`` with the median gap.

    :param config: the configuration
    :return: the per-``q`` results and the sweep summary
    """
    if len(config.q_sweep) < 2:
        raise ConfigException(
            message="A sweep needs at least two values of 'q'.", field='q_sweep'
        )
    results = [
        run_gap_experiment(config.with_overrides(q=q, q_sweep=()))
        for q in config.q_sweep
    ]
    medians = [res.summary['median_gap'] for res in results]
    usable = [(q, m) for q, m in zip(config.q_sweep, medians) if m is not None]
    rho = None
    if len(usable) >= 2:
        corr = spearmanr([q for q, _ in usable], [m for _, m in usable]).correlation
        rho = None if corr is None or math.isnan(corr) else float(corr)
    return results, {
        'q': list(config.q_sweep),
        'median_gap': medians,
        'spearman_rho': rho
    }


def run_recovery_experiment(config: ExperimentConfig) -> ExperimentResult:
    """
    Filter perturbed graphs and measure how well their metrics recover the
    hidden ones, across seeded trials.

    :param config: the configuration
    :return: the records and their summary
    """
    geometry = check_config(config)
    records = run_trials(config, 'recovery', geometry)
    return ExperimentResult(
        kind='recovery',
        config=config,
        records=records,
        summary=summarize_recovery(config, records, geometry)
    )


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return 'inf' if value > 0 else ('-inf' if value < 0 else 'nan')
    if isinstance(value, Mapping):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _csv_cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return repr(value)
    return str(value)


def write_reports(
        result: ExperimentResult,
        out_dir: Union[str, Path],
        extra: Optional[Mapping[str, Any]] = None
) -> List[Path]:
    """
    Write an experiment's ``summary.json``, ``trials.csv`` and (since wall
    clock times differ from run to run) a separate ``timings.csv``.

    :param result: the experiment result
    :param out_dir: the destination directory
    :param extra: more entries for the summary
    :return: the paths that were written
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = dict(result.summary)
    summary.update(extra or {})
    summary_path = out / 'summary.json'
    summary_path.write_text(
        json.dumps(_jsonable(summary), indent=2, sort_keys=True) + '\n',
        encoding='utf-8'
    )
    columns = TrialRecord.csv_fields()
    trials_path = out / 'trials.csv'
    with trials_path.open('w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for rec in result.records:
            data = rec.export()
            writer.writerow([_csv_cell(data[c]) for c in columns])
    timings_path = out / 'timings.csv'
    timings_path.write_text(
        'trial,seconds\n' + ''.join(
            f"{rec.trial},{rec.wall_clock:.6f}\n" for rec in result.records
        ),
        encoding='utf-8'
    )
    for path in (summary_path, trials_path, timings_path):
        logger.info("Wrote %s.", path)
    return [summary_path, trials_path, timings_path]
