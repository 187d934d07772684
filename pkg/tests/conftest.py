"""Общие фикстуры и опция --runslow для прогонов на полных сетках."""

from __future__ import annotations

import numpy as np
import pytest

from bicouple.solver.grid import GridKind, build_grid


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="запустить медленные тесты")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="нужен --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=[GridKind.NODAL, GridKind.FINITE_VOLUME], ids=["nodal", "fv"])
def grid_kind(request):
    return request.param


@pytest.fixture
def small_nodal():
    return build_grid(3, GridKind.NODAL)


@pytest.fixture
def small_fv():
    return build_grid(3, GridKind.FINITE_VOLUME)
