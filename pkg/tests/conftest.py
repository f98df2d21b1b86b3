import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("ci", max_examples=40, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=15, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for key, value in report.user_properties:
        if key == "criterion":
            _ACCEPTANCE[value] = ("PASS" if report.passed else "FAIL", report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE, key=lambda c: [int(p) if p.isdigit() else p for p in c.replace(".", " ").split()]):
        status, nodeid = _ACCEPTANCE[crit]
        terminalreporter.write_line(f"{status}  criterion {crit}  ({nodeid.split('::')[-1]})")


@pytest.fixture
def criterion(record_property):
    def mark(label):
        record_property("criterion", label)

    return mark


MARKOV_L_INDEX = 11  # L = 89: the largest ring whose two-excitation sector fits the dense budget
MARKOV_G = (0.2, 0.1)


@pytest.fixture(scope="session")
def markovian_runs():
    """lambda = 0 two-emitter trajectories at g and g/2; one diagonalization each."""
    from mosaic_doublon.dynamics import Propagator, evolve, initial_state
    from mosaic_doublon.model import EmitterSpec, LatticeSpec, build_emitter_h
    import numpy as np

    spec = LatticeSpec.from_fibonacci(MARKOV_L_INDEX, kappa=3, U=-5.0, lam=0.0)
    times = np.linspace(0.0, 200.0, 801)
    runs = {}
    for g in MARKOV_G:
        em = EmitterSpec(N=2, omega_e=-5.77 / 2, g=g)
        runs[g] = evolve(Propagator(build_emitter_h(spec, em)), initial_state(em, spec.L), times)
    return spec, runs
