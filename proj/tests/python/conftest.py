# SPDX-License-Identifier: MIT
import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture
def repo_root():
    return ROOT


@pytest.fixture
def cli():
    path = os.environ.get("FQMC_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("FQMC_CLI not set")
    return path


@pytest.fixture
def put_config():
    return {
        "model": {"kind": "GBM", "spot": [100.0], "sigma": 0.2, "rate": 0.0, "maturity": 1.0},
        "payoff": {"kind": "BasketPut", "strike": 100.0},
        "qmc": {"N": 4096, "S": 30},
    }
