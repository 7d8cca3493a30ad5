"""
Pytest configuration and fixtures for the Best-k-Arm simulator tests
"""

import json
import sys
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from bestk_bandit.config import AlgorithmConfig, SubroutineConfig
from bestk_bandit.core import Instance, RngStream, SampleLedger
from bestk_bandit.harness import appendix_a


def pytest_configure(config):
    """Configure pytest"""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )


@pytest.fixture
def rng():
    """A fixed-seed sampling stream"""
    return RngStream(seed=20240601, stream_id=0)


@pytest.fixture
def ledger():
    """An unbudgeted sample ledger"""
    return SampleLedger()


@pytest.fixture
def sub_config():
    """Default subroutine constants"""
    return SubroutineConfig()


@pytest.fixture
def algo_config():
    """Default algorithm configuration"""
    return AlgorithmConfig()


@pytest.fixture
def appendix_small():
    """appendix_a(4, 1/16): 10 arms, k = 5"""
    return appendix_a(4, 0.0625)


@pytest.fixture
def two_arm():
    """Two well separated arms, k = 1"""
    return Instance.build([0.5, 0.0], k=1)


@pytest.fixture
def four_arm():
    """Means 0.5, 0.45, 0.3, 0.1 with k = 2"""
    return Instance.build([0.5, 0.45, 0.3, 0.1], k=2)


@pytest.fixture
def instance_file(tmp_path, appendix_small):
    """The appendix_a(4, 1/16) instance written to disk"""
    path = tmp_path / "appendix_small.json"
    path.write_text(json.dumps(appendix_small.to_file_dict()))
    return path
