import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nilmedge.scenarios import builtin_scenario
from nilmedge.synth import synth_scenario


@pytest.fixture(scope="session")
def single7_run():
    """One synthesized single7 scenario, shared across the session."""
    script, registry = builtin_scenario("single7")
    stream, track = synth_scenario(script, registry, seed=41)
    return stream, track, registry


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
