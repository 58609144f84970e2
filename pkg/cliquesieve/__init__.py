#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve
.. moduleauthor:: cliquesieve developers

Edge clique numbers, clique filtering and metric recovery for perturbed
random geometric graphs.
"""
from .cliques import CliqueIndex, edge_clique_at_least, edge_clique_number, max_clique
from .errors import CliqueSieveException
from .filtering import FilterConfig, FilterMethod, apply_filter
from .graphgen import EdgeLabel, build_rgg, classify_edges, perturb
from .harness import ExperimentConfig, run_gap_experiment, run_recovery_experiment
from .metrics import recovery_stretch
from .space import SpaceKind, make_space, sample_points
from .version import __version__, __release__
