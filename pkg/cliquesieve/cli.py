#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.cli
.. moduleauthor:: cliquesieve developers

This is the entry point for the command-line interface (CLI) application.

Exit codes: ``0`` on success, ``2`` for configuration errors and ``3`` when a
search budget runs out or a requirement can't be met at all.
"""
from functools import wraps
import json
import logging
from pathlib import Path
from typing import Any, Callable, Mapping, Optional
import click
from . import bounds
from .cliques import CliqueBudgetExceeded, DEFAULT_BUDGET, all_edge_clique_numbers, write_clique_stats
from .errors import CliqueSieveException, ConfigException
from .filtering import FilterConfig, FilterMethod, apply_filter, write_filtered_graph
from .graphgen import (
    build_rgg, classify_edges, label_counts, perturb, read_edge_list,
    write_edge_list
)
from .harness import (
    ExperimentConfig, ExperimentResult, load_config, run_gap_experiment,
    run_gap_sweep, run_recovery_experiment, write_reports
)
from .measure import AssumptionViolatedException, ball_mass_bounds, radius_for_target_sn
from .metrics import all_pairs_distances, recovery_stretch, report_as_dict, write_distance_matrix
from .space import SpaceKind, make_space, read_point_cloud, sample_points, write_point_cloud
from .version import __version__

logger = logging.getLogger(__name__)

LOGGING_LEVELS = {
    0: logging.WARNING,
    1: logging.INFO,
    2: logging.DEBUG
}  #: a mapping of `verbose` option counts to logging levels

#: the exit code for configuration errors
EXIT_CONFIG: int = 2

#: the exit code for exhausted budgets and unmeetable requirements
EXIT_INFEASIBLE: int = 3


class CliExit(click.ClickException):
    """
    A :py:class:`click.ClickException` with a chosen exit code.
    """
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _exit_code(ex: Exception) -> int:
    if isinstance(ex, AssumptionViolatedException):
        return EXIT_CONFIG if ex.satisfiable else EXIT_INFEASIBLE
    if isinstance(ex, (CliqueBudgetExceeded, bounds.CompositionBudgetExceeded)):
        return EXIT_INFEASIBLE
    inner = getattr(ex, 'inner', None)
    if isinstance(ex, CliqueSieveException) and isinstance(inner, Exception):
        return _exit_code(inner)
    return EXIT_CONFIG


def guarded(func: Callable) -> Callable:
    """
    Turn library errors raised by a command into exit codes.
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (CliqueSieveException, ValueError, OSError) as ex:
            message = ex.message if isinstance(ex, CliqueSieveException) else str(ex)
            if isinstance(ex, ConfigException) and ex.line is not None:
                message = f"{message} (line {ex.line})"
            raise CliExit(message, exit_code=_exit_code(ex)) from ex
    return wrapper


def _echo_json(data: Mapping[str, Any]):
    click.echo(json.dumps(_finite(data), indent=2, sort_keys=True))


def _finite(value: Any) -> Any:
    if isinstance(value, float) and value in (float('inf'), float('-inf')):
        return 'inf' if value > 0 else '-inf'
    if isinstance(value, Mapping):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


@click.group()
@click.option('--verbose', '-v', count=True, help="Enable verbose output.")
def cli(verbose: int):
    """
    Clique filtering for perturbed random geometric graphs.
    """
    logging.basicConfig(
        level=LOGGING_LEVELS[min(verbose, max(LOGGING_LEVELS))],
        format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )


@cli.command()
def version():
    """
    Get the library version.
    """
    click.echo(__version__)


@cli.command()
@click.option('--space', 'space_kind', type=click.Choice([k.value for k in SpaceKind]),
              default=SpaceKind.FLAT_TORUS.value, show_default=True, help="The space.")
@click.option('--dim', type=int, default=2, show_default=True, help="The dimension.")
@click.option('-n', '--n', 'n', type=int, required=True, help="The number of points.")
@click.option('--seed', type=int, default=0, show_default=True, help="The sampling seed.")
@click.option('--out', type=click.Path(dir_okay=False), required=True, help="The points CSV.")
@guarded
def generate(space_kind: str, dim: int, n: int, seed: int, out: str):
    """
    Sample points i.i.d. and write them as CSV.
    """
    cloud = sample_points(make_space(space_kind, dim), n, seed)
    write_point_cloud(cloud, out)
    click.echo(f"Wrote {cloud.n} points to {out}.")


def _radius(cloud, r: Optional[float], target_sn: Optional[float]) -> float:
    if (r is None) == (target_sn is None):
        raise ConfigException(message="Give exactly one of --r and --target-sn.", field='r')
    return r if r is not None else radius_for_target_sn(cloud.space, cloud.n, target_sn)


@cli.command('perturb')
@click.option('--points', type=click.Path(exists=True, dir_okay=False), required=True,
              help="The points CSV.")
@click.option('--r', type=float, default=None, help="The connection radius.")
@click.option('--target-sn', type=float, default=None, help="Solve r for this s*n.")
@click.option('-p', '--p', 'p', type=float, default=0.0, show_default=True,
              help="The deletion probability.")
@click.option('-q', '--q', 'q', type=float, default=0.0, show_default=True,
              help="The insertion probability.")
@click.option('--seed', type=int, default=0, show_default=True, help="The perturbation seed.")
@click.option('--out', type=click.Path(dir_okay=False), required=True, help="The edge list.")
@guarded
def perturb_command(
        points: str,
        r: Optional[float],
        target_sn: Optional[float],
        p: float,
        q: float,
        seed: int,
        out: str
):
    """
    Build the hidden graph, perturb it, and write the labelled edge list.
    """
    cloud = read_point_cloud(points)
    pg = perturb(build_rgg(cloud, _radius(cloud, r, target_sn)), p, q, seed)
    write_edge_list(pg, classify_edges(pg), out)
    click.echo(
        f"Wrote {len(pg.edges)} edges ({int(pg.inserted.sum())} inserted) to {out}."
    )


def _observed(points: str, edges: str):
    return read_edge_list(edges, read_point_cloud(points))


_points_option = click.option(
    '--points', type=click.Path(exists=True, dir_okay=False), required=True,
    help="The points CSV."
)
_edges_option = click.option(
    '--edges', type=click.Path(exists=True, dir_okay=False), required=True,
    help="The edge list."
)


@cli.command()
@_points_option
@_edges_option
@click.option('--out', type=click.Path(dir_okay=False), default=None,
              help="Rewrite the edge list with fresh labels here.")
@guarded
def classify(points: str, edges: str, out: Optional[str]):
    """
    Label every observed edge good, bad or indeterminate.
    """
    pg = _observed(points, edges)
    labels = classify_edges(pg)
    if out is not None:
        write_edge_list(pg, labels, out)
    _echo_json({lb.value: c for lb, c in label_counts(labels).items()})


@cli.command()
@_points_option
@_edges_option
@click.option('--budget', type=int, default=DEFAULT_BUDGET, show_default=True,
              help="The search budget per edge.")
@click.option('--workers', type=int, default=1, show_default=True,
              help="The number of worker processes.")
@click.option('--out', type=click.Path(file_okay=False), required=True,
              help="The output directory.")
@guarded
def cliques(points: str, edges: str, budget: int, workers: int, out: str):
    """
    Compute every observed edge's clique number.
    """
    pg = _observed(points, edges)
    stats = all_edge_clique_numbers(pg, classify_edges(pg), budget=budget, workers=workers)
    write_clique_stats(stats, Path(out) / 'cliques.csv', Path(out) / 'cliques.json')
    summary = stats.export()
    summary['gap'] = stats.gap
    _echo_json(summary)


def _filter_config(method: str, tau: int, threshold: float) -> FilterConfig:
    m = FilterMethod(method)
    return FilterConfig(method=m, threshold=tau if m == FilterMethod.CLIQUE else threshold)


_method_option = click.option(
    '--method', type=click.Choice([m.value for m in FilterMethod]),
    default=FilterMethod.CLIQUE.value, show_default=True, help="The filter."
)
_tau_option = click.option(
    '--tau', type=int, default=5, show_default=True, help="The clique threshold."
)
_threshold_option = click.option(
    '--threshold', type=float, default=0.5, show_default=True,
    help="The Jaccard threshold."
)


@cli.command('filter')
@_points_option
@_edges_option
@_method_option
@_tau_option
@_threshold_option
@click.option('--scores/--no-scores', default=False,
              help="Compute exact clique numbers as scores.")
@click.option('--out', type=click.Path(dir_okay=False), required=True,
              help="The filtered edge list.")
@guarded
def filter_command(
        points: str,
        edges: str,
        method: str,
        tau: int,
        threshold: float,
        scores: bool,
        out: str
):
    """
    Filter the observed edges and write which ones survive.
    """
    pg = _observed(points, edges)
    fg = apply_filter(pg, _filter_config(method, tau, threshold), scores=scores)
    write_filtered_graph(fg, out, lineage={'edges': edges})
    click.echo(f"Kept {len(fg.edges)} of {len(pg.edges)} edges; wrote {out}.")


@cli.command()
@_points_option
@_edges_option
@_method_option
@_tau_option
@_threshold_option
@click.option('--out', type=click.Path(file_okay=False), default=None,
              help="Write report.json and distances.csv here.")
@guarded
def recover(
        points: str,
        edges: str,
        method: str,
        tau: int,
        threshold: float,
        out: Optional[str]
):
    """
    Filter the observed graph and measure how well it recovers the hidden
    metric.
    """
    pg = _observed(points, edges)
    labels = classify_edges(pg)
    fg = apply_filter(pg, _filter_config(method, tau, threshold))
    report = recovery_stretch(pg.truth, fg, labels=labels)
    data = dict(report_as_dict(report))
    data['kept'] = int(fg.kept.sum())
    data['removed'] = int((~fg.kept).sum())
    if out is not None:
        _out = Path(out)
        _out.mkdir(parents=True, exist_ok=True)
        (_out / 'report.json').write_text(
            json.dumps(_finite(data), indent=2, sort_keys=True) + '\n', encoding='utf-8'
        )
        write_distance_matrix(all_pairs_distances(fg.graph()), _out / 'distances.csv')
    _echo_json(data)


@cli.command('bounds')
@click.option('-n', '--n', 'n', type=int, required=True, help="The number of nodes.")
@click.option('--s', type=float, default=None, help="The ball-mass lower bound.")
@click.option('--rho', type=float, default=None, help="The regularity factor.")
@click.option('--space', 'space_kind', type=click.Choice([k.value for k in SpaceKind]),
              default=None, help="Derive s and rho from this space (with --r).")
@click.option('--dim', type=int, default=2, show_default=True, help="The dimension.")
@click.option('--r', type=float, default=None, help="The connection radius.")
@click.option('-p', '--p', 'p', type=float, default=0.0, show_default=True,
              help="The deletion probability.")
@click.option('-q', '--q', 'q', type=float, default=0.0, show_default=True,
              help="The insertion probability.")
@click.option('--K', 'K', type=float, default=2.0, show_default=True,
              help="The target clique size.")
@click.option('--c1', type=float, default=1.0, show_default=True)
@click.option('--c2', type=float, default=1.0, show_default=True)
@click.option('--c3', type=float, default=1.0, show_default=True)
@guarded
def bounds_command(
        n: int,
        s: Optional[float],
        rho: Optional[float],
        space_kind: Optional[str],
        dim: int,
        r: Optional[float],
        p: float,
        q: float,
        K: float,
        c1: float,
        c2: float,
        c3: float
):
    """
    Print every closed-form quantity for a parameter set as JSON.
    """
    if space_kind is not None:
        if r is None:
            raise ConfigException(message="--space needs --r.", field='r')
        mass = ball_mass_bounds(make_space(space_kind, dim), r)
        s = mass.s if s is None else s
        rho = mass.rho if rho is None else rho
    if s is None:
        raise ConfigException(message="Give --s, or --space with --r.", field='s')
    params = bounds.ModelParams(
        n=n, s=s, rho=1.0 if rho is None else rho,
        p=p, q=q, K=K, c1=c1, c2=c2, c3=c3
    )
    _echo_json(bounds.all_bounds(params))


@cli.group()
def experiment():
    """
    Run Monte Carlo experiments.
    """


def _experiment_options(func: Callable) -> Callable:
    options = [
        click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                     default=None, help="A JSON configuration file."),
        click.option('--seed', type=int, default=None, help="The base seed."),
        click.option('--trials', type=int, default=None, help="The number of trials."),
        click.option('--workers', type=int, default=None, help="Worker processes."),
        click.option('--keep-artifacts', is_flag=True, default=None,
                     help="Write every trial's intermediate files."),
        click.option('--override-assumption-a', is_flag=True, default=None,
                     help="Run even when Assumption-A fails."),
        click.option('--out', type=click.Path(file_okay=False), default=None,
                     help="The output directory.")
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _load(config_path: Optional[str], **overrides) -> ExperimentConfig:
    config = load_config(config_path) if config_path else ExperimentConfig.load({})
    config = config.with_overrides(**overrides)
    logger.info(
        "Effective configuration: %s", json.dumps(config.export(), sort_keys=True)
    )
    return config


def _finish(result: ExperimentResult, out: Path, extra: Optional[Mapping[str, Any]] = None):
    for path in write_reports(result, out, extra=extra):
        click.echo(f"Wrote {path}.")


def _check_failures(*results: ExperimentResult):
    failed = sum(res.summary['failed_trials'] for res in results)
    if failed:
        raise CliExit(
            f"{failed} trial(s) ran over the clique budget.",
            exit_code=EXIT_INFEASIBLE
        )


@experiment.command('gap')
@_experiment_options
@click.option('--q-sweep', type=str, default=None,
              help="Comma-separated insertion probabilities to sweep.")
@guarded
def gap_command(
        config_path: Optional[str],
        seed: Optional[int],
        trials: Optional[int],
        workers: Optional[int],
        keep_artifacts: Optional[bool],
        override_assumption_a: Optional[bool],
        out: Optional[str],
        q_sweep: Optional[str]
):
    """
    Compare good and bad edges' clique numbers across seeded trials.
    """
    sweep = None
    if q_sweep:
        try:
            sweep = tuple(float(x) for x in q_sweep.split(','))
        except ValueError as vex:
            raise ConfigException(
                message=f"--q-sweep: {vex}", field='q_sweep', inner=vex
            )
    config = _load(
        config_path, base_seed=seed, trials=trials, workers=workers,
        keep_artifacts=keep_artifacts, override_assumption_a=override_assumption_a,
        output_dir=out, q_sweep=sweep
    )
    root = Path(config.output_dir) / 'gap'
    if config.q_sweep:
        results, sweep_summary = run_gap_sweep(config)
        for res in results:
            _finish(res, root / f"q-{res.config.q!r}")
        sweep_path = root / 'sweep.json'
        sweep_path.write_text(
            json.dumps(_finite(sweep_summary), indent=2, sort_keys=True) + '\n',
            encoding='utf-8'
        )
        click.echo(f"Wrote {sweep_path}.")
        _check_failures(*results)
        return
    result = run_gap_experiment(config)
    _finish(result, root)
    _check_failures(result)


@experiment.command('recovery')
@_experiment_options
@click.option('--compare-jaccard', is_flag=True, default=None,
              help="Also run the Jaccard filter on every trial.")
@guarded
def recovery_command(
        config_path: Optional[str],
        seed: Optional[int],
        trials: Optional[int],
        workers: Optional[int],
        keep_artifacts: Optional[bool],
        override_assumption_a: Optional[bool],
        out: Optional[str],
        compare_jaccard: Optional[bool]
):
    """
    Filter perturbed graphs and measure metric recovery across seeded trials.
    """
    config = _load(
        config_path, base_seed=seed, trials=trials, workers=workers,
        keep_artifacts=keep_artifacts, override_assumption_a=override_assumption_a,
        output_dir=out, compare_jaccard=compare_jaccard
    )
    result = run_recovery_experiment(config)
    _finish(result, Path(config.output_dir) / 'recovery')
    _check_failures(result)
