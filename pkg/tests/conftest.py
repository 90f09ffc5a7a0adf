import numpy as np
import pytest

from escapelab import ModelParams, RngStream


@pytest.fixture
def mp_fig1():
    """The damped-oscillation showcase point."""
    return ModelParams(alpha=1.0, f=0.8, epsilon=0.01, V=1e6)


@pytest.fixture
def gen():
    return RngStream(20240809).generator()


def assert_close(a, b, tol, msg=""):
    assert abs(a - b) <= tol, f"{msg} |{a} - {b}| = {abs(a - b)} > {tol}"
