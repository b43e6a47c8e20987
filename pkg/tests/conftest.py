"""Shared flow runs.

The builders are plain functions so that ``test_acceptance.py`` can also be
run as a script without pytest.
"""

import numpy as np
import pytest

from legflow.flow3d import evolve_expanding, rescale_trajectory
from legflow.heis_core import legendrian_lift
from legflow.imcf_planar import SolverConfig, support_to_curve
from legflow.intrinsic_flow import CurvatureField, K2Config, evolve_k2
from legflow.shapes import circle, corpus, h0_cos2

ACCEPTANCE_LINES = []


def record_acceptance(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


def build_unit_circle_lift():
    return legendrian_lift(circle(256))


def build_circle_run(lift):
    """Expanding flow of the circle lift at dt = 1e-4 with ten checkpoints."""
    return evolve_expanding(lift, SolverConfig(dt=1e-4, t_end=1.0, n_outputs=11))


def build_corpus_runs(curves):
    cfg = SolverConfig(dt=1e-3, t_end=1.0, n_outputs=6)
    return {name: evolve_expanding(c, cfg) for name, c in curves.items()}


def build_h0_lift():
    return legendrian_lift(support_to_curve(h0_cos2(), 256))


def build_h0_long_run(lift):
    """h0 = 1 + 0.1 cos 2 theta to t = 3, expanding and rescaled."""
    raw = evolve_expanding(lift, SolverConfig(dt=1e-3, t_end=3.0, n_outputs=13))
    return raw, rescale_trajectory(raw)


def build_perturbed_phi0():
    u = 2 * np.pi * np.arange(256) / 256
    return 1.0 + 0.2 * np.sin(u)


def build_k2_run(phi0, W):
    return evolve_k2(CurvatureField(phi0), W, K2Config(dt=1e-3, t_end=6.0, n_outputs=25))


@pytest.fixture(scope="session")
def unit_circle_lift():
    return build_unit_circle_lift()


@pytest.fixture(scope="session")
def circle_run(unit_circle_lift):
    return build_circle_run(unit_circle_lift)


@pytest.fixture(scope="session")
def test_corpus():
    return corpus(256)


@pytest.fixture(scope="session")
def corpus_runs(test_corpus):
    return build_corpus_runs(test_corpus)


@pytest.fixture(scope="session")
def h0_lift():
    return build_h0_lift()


@pytest.fixture(scope="session")
def h0_long_run(h0_lift):
    return build_h0_long_run(h0_lift)


@pytest.fixture(scope="session")
def perturbed_phi0():
    return build_perturbed_phi0()


@pytest.fixture(scope="session")
def k2_run_w0(perturbed_phi0):
    return build_k2_run(perturbed_phi0, 0.0)


@pytest.fixture(scope="session")
def k2_run_wneg(perturbed_phi0):
    return build_k2_run(perturbed_phi0, -1.0)
