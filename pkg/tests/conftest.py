import numpy as np
import pytest

from stereocalib import Extrinsics, SceneConfig, generate, perturb_viewpoint
from stereocalib.so3 import exp_so3

IDENTITY_RIG = Extrinsics(np.eye(3), np.array([-1.0, 0.0, 0.0]))
# a rig as mounted in practice: small residual rotation, slightly tilted baseline
MOUNTED_RIG = Extrinsics(exp_so3([0.01, -0.02, 0.015]), np.array([-1.0, 0.02, 0.01]))
VIEWPOINTS = ["middle", "top", "bottom", "left", "right"]
FIVE_DEG = np.deg2rad(5.0)


def random_rotation(rng, max_angle=np.pi):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return exp_so3(axis * rng.uniform(0, max_angle))


def random_extrinsics(rng):
    while True:
        t = rng.normal(size=3)
        t /= np.linalg.norm(t)
        if abs(t[2]) < 0.99:
            return Extrinsics(random_rotation(rng), t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def top_view():
    return perturb_viewpoint(IDENTITY_RIG, "top", FIVE_DEG)


@pytest.fixture
def clean_scene(top_view):
    return generate(SceneConfig(seed=7), top_view)


ACCEPTANCE_RESULTS = []


@pytest.fixture
def criterion(request):
    """Record a criterion's outcome line; call with (passed, detail)."""
    def record(passed, detail):
        ACCEPTANCE_RESULTS.append((request.node.name, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
