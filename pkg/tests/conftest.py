import pytest

from sfcrel.model import BackupSpec, ChainSpec, ReliabilityParams, Scenario, Strategy

# Evaluation settings of the numerical study: servers 0.999, VNFs 0.9.
STUDY = ReliabilityParams(0.999, 0.999, 0.9, 0.9)


def make(strategy, n=1, psi=1, N=1, split=(), sigma=0, m=0,
         phi=1.0, phi_r=1.0, upsilon=1.0, upsilon_r=1.0, params=None):
    if isinstance(strategy, str):
        strategy = Strategy.parse(strategy)
    params = params or ReliabilityParams(phi, phi_r, upsilon, upsilon_r)
    return Scenario(strategy, params, ChainSpec(n, psi, N, split), BackupSpec(sigma, m))


@pytest.fixture
def study_params():
    return STUDY


def rel_close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        terminalreporter.write_line(mod.report())
