import pytest

import smplid as sm


@pytest.fixture(scope="session")
def body():
    skel = sm.default_skeleton(75.0, 1.75)
    return skel, sm.build_segment_params(skel)


@pytest.fixture(scope="session")
def walk120():
    return sm.synth_walk(4.0, 30.0)


@pytest.fixture(scope="session")
def clean_torque(body, walk120):
    skel, params = body
    return sm.compute_dynamics(skel, params, walk120).torque
