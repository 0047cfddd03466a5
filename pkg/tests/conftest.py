"""
Shared fixtures for the dickepulse test suite
"""

import logging

import numpy as np
import pytest

from dickepulse.core.chain import SystemConfig
from dickepulse.core.tables import table_row


@pytest.fixture(autouse=True)
def reset_logging():
    """CLI runs install handlers on temporary streams; drop them afterwards"""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def dicke3_row():
    return table_row("dicke", 3)


@pytest.fixture
def noon4_row():
    return table_row("noon", 4)


@pytest.fixture
def system4():
    return SystemConfig(n_ions=4)
