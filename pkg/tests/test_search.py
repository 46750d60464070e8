import pytest

from sfcrel import analytic
from sfcrel.model import BackupSpec, ChainSpec, ReliabilityParams, Scenario, Strategy
from sfcrel.search import InfeasibleError, max_protected_n, min_sigma

from conftest import STUDY

TARGET = 0.999


@pytest.mark.parametrize("strategy,n,m,sigma,omega", [
    ("asbn", 1, 0, 3, 0.25),
    ("asbs", 1, 0, 3, 0.25),
    ("anbs", 1, 0, 3, 0.25),
    ("anbn", 1, 1, 3, 0.25),
    ("asbn", 3, 0, 5, 0.375),
    ("asbs", 6, 0, 8, 6 / 14),
])
def test_min_sigma_reference_rows(strategy, n, m, sigma, omega):
    res = min_sigma(Strategy.parse(strategy), STUDY, ChainSpec(n, 3, 1), m, TARGET)
    assert res.sigma_min == sigma
    assert res.omega == pytest.approx(omega)
    assert res.achieved >= TARGET
    assert res.below is not None and res.below < TARGET


@pytest.mark.parametrize("strategy,m,sigma,n_max", [("anbn", 2, 4, 15), ("anbs", 0, 8, 9)])
def test_max_protected_n_reference_rows(strategy, m, sigma, n_max):
    s = Strategy.parse(strategy)
    assert max_protected_n(s, STUDY, 3, sigma, m, TARGET) == n_max
    over = Scenario(s, STUDY, ChainSpec(n_max + 1, 3, 1), BackupSpec(sigma, m))
    assert analytic.evaluate(over) < TARGET


def test_minimality_witness():
    chain = ChainSpec(4, 3, 1)
    res = min_sigma(Strategy.ASBN, STUDY, chain, 0, 0.99)
    below = analytic.evaluate(res.scenario.with_(sigma=res.sigma_min - 1))
    assert below == res.below < 0.99 <= res.achieved


def test_zero_sigma_when_already_met():
    perfect = ReliabilityParams(1.0, 1.0, 1.0, 1.0)
    res = min_sigma(Strategy.ASBS, perfect, ChainSpec(3, 2, 1), 0, 0.9)
    assert res.sigma_min == 0 and res.below is None


def test_infeasible_without_backup_strategy():
    with pytest.raises(InfeasibleError) as info:
        min_sigma(Strategy.CV_NONE, STUDY, ChainSpec(2, 3, 1), 0, TARGET)
    assert info.value.best < TARGET


def test_infeasible_when_backup_server_caps_success():
    # one backup server at 0.9 cannot push a shared-backup chain to 0.9999
    params = ReliabilityParams(0.999, 0.9, 0.9, 0.9)
    with pytest.raises(InfeasibleError):
        min_sigma(Strategy.ASBS, params, ChainSpec(4, 3, 1), 0, 0.9999)


def test_extreme_target_with_perfect_components():
    perfect = ReliabilityParams(1.0, 1.0, 1.0, 1.0)
    assert min_sigma(Strategy.ANBS, perfect, ChainSpec(2, 2, 1), 0, 1 - 1e-15).sigma_min == 0


@pytest.mark.parametrize("target", [0.0, 1.0, -0.1, 1.5])
def test_target_range(target):
    with pytest.raises(ValueError):
        min_sigma(Strategy.ASBN, STUDY, ChainSpec(1, 1, 1), 0, target)


def test_min_sigma_monotone_in_target():
    chain = ChainSpec(4, 3, 1)
    prev = 0
    for target in (0.9, 0.99, 0.995, 0.998, 0.9989):
        got = min_sigma(Strategy.ASBN, STUDY, chain, 0, target).sigma_min
        assert got >= prev
        prev = got


def test_max_n_non_decreasing_in_sigma():
    prev = 0
    for sigma in range(0, 10):
        got = max_protected_n(Strategy.ANBS, STUDY, 3, sigma, 0, TARGET)
        assert got >= prev
        prev = got


def test_max_n_zero_when_nothing_passes():
    assert max_protected_n(Strategy.CV_NONE, STUDY, 3, 0, 0, TARGET) == 0
