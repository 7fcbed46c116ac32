# SPDX-License-Identifier: MIT
"""Fourier pricing with randomized quasi-Monte Carlo.

Every entry point takes a run configuration, either as a dict or as the
JSON text accepted by the ``fqmc`` command-line tool.
"""

import json as _json

from . import _fqmc
from ._fqmc import FqmcError, csv_columns, instances, suites, DEFAULT_SEED

__all__ = [
    "FqmcError",
    "DEFAULT_SEED",
    "price",
    "optimize_damping",
    "default_transform",
    "boundary_probe",
    "martingale_error",
    "normalize_config",
    "run_convergence",
    "instances",
    "suites",
    "csv_columns",
]


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def price(config):
    return _fqmc.price(_text(config))


def optimize_damping(config):
    return _fqmc.optimize_damping(_text(config))


def default_transform(config):
    return _fqmc.default_transform(_text(config))


def boundary_probe(config):
    return _fqmc.boundary_probe(_text(config))


def martingale_error(config):
    return _fqmc.martingale_error(_text(config))


def normalize_config(config):
    """Validated configuration with every block spelled out."""
    return _json.loads(_fqmc.dump_config(_text(config)))


def run_convergence(instance, backend="rqmc", lo=6, hi=12, S=30, seed=DEFAULT_SEED):
    return _fqmc.run_convergence(instance, backend, lo, hi, S, seed)
