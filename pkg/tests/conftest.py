import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from casemix.capacity import effective_type_bounds, max_throughput, subtype_bounds
from casemix.fixtures import (
    bed_capacity_bounds,
    demo_scenario,
    raw_duration_variant,
    surge_scenario,
)

from tables import DEMO_MIX_FRACTIONS


@pytest.fixture(scope="session")
def demo():
    return demo_scenario()


@pytest.fixture(scope="session")
def demo_raw(demo):
    # the alteration studies on this dataset used plain ward stays in the
    # constraint matrix while scaling deviations by bed-hold bounds
    return raw_duration_variant(demo)


@pytest.fixture(scope="session")
def demo_baseline(demo):
    res = max_throughput(demo, mix=DEMO_MIX_FRACTIONS)
    assert res.status == "optimal"
    return res


@pytest.fixture(scope="session")
def demo_scaling(demo):
    return bed_capacity_bounds(demo)


@pytest.fixture(scope="session")
def demo_sub_bounds(demo):
    return subtype_bounds(demo)


@pytest.fixture(scope="session")
def surge():
    return surge_scenario()


@pytest.fixture(scope="session")
def surge_bounds(surge):
    return effective_type_bounds(surge)


@pytest.fixture(scope="session")
def surge_baseline(surge):
    res = max_throughput(surge, mix=[0.05, 0.43, 0.18, 0.09, 0.25, 0.0])
    assert res.status == "optimal"
    mix = res.case_mix.copy()
    mix[5] = max(mix[5], 0.0)
    return mix, res.sub_mix
