import pytest

from sfcrel.model import (BackupSpec, ChainSpec, ReliabilityParams, Scenario, ScenarioError,
                          Strategy, even_split, require_valid, total_backup_subchains, validate)

from conftest import STUDY, make


def test_provisioning_asbs_example_is_valid():
    sc = make("asbs", n=6, psi=3, sigma=8, params=STUDY)
    assert validate(sc).ok
    assert str(validate(sc)) == "OK"


def test_anbn_m_must_be_multiple_of_n():
    sc = make("anbn", n=4, psi=4, N=2, m=3, sigma=1)
    result = validate(sc)
    assert not result.ok
    assert "m must be a multiple of N" in result.violations


def test_probability_out_of_range():
    result = validate(make("cv-none", phi=1.2))
    assert "phi out of [0,1]" in result.violations


@pytest.mark.parametrize("kwargs, message", [
    (dict(n=0), "n must be >= 1"),
    (dict(n=65), "n must be <= 64"),
    (dict(psi=65), "psi_total must be <= 64"),
    (dict(psi=3, N=2, split=(1, 1)), "psi_split must sum to psi_total"),
    (dict(psi=3, N=2, split=(3,)), "psi_split length must equal n_servers"),
    (dict(psi=2, N=3), "n_servers must satisfy 1 <= N <= psi_total"),
    (dict(sigma=-1), "sigma must be >= 0"),
])
def test_reported_violations(kwargs, message):
    assert message in validate(make("anbs", **kwargs)).violations


def test_validate_never_raises_on_garbage():
    sc = Scenario(Strategy.ASBN, ReliabilityParams("x", None, 0.5, 0.5), ChainSpec(1, 1), BackupSpec(1))
    assert not validate(sc).ok
    bad_chain = Scenario(Strategy.DV_NONE, ReliabilityParams(), ChainSpec(2, 3, 2, (1, "a")), BackupSpec())
    assert not validate(bad_chain).ok


def test_require_valid_raises():
    with pytest.raises(ScenarioError):
        require_valid(make("cv-none", upsilon=-0.1))


def test_several_violations_reported_together():
    result = validate(make("asbn", n=0, phi=2.0, upsilon_r=-1))
    assert len(result.violations) >= 3


def test_total_backup_subchains():
    assert total_backup_subchains(make("anbn", m=2, N=1, sigma=4, n=15, psi=3)) == 8
    assert total_backup_subchains(make("asbs", sigma=3)) == 3
    assert total_backup_subchains(make("asbn", sigma=0)) == 0


@pytest.mark.parametrize("strategy", list(Strategy))
def test_total_backup_zero_sigma(strategy):
    assert total_backup_subchains(make(strategy, n=2, psi=2, sigma=0, m=2 if strategy is Strategy.ANBN else 0)) == 0


def test_anbn_total_divisible_by_sigma():
    for m in (2, 4, 6):
        for sigma in (1, 2, 5):
            assert total_backup_subchains(make("anbn", n=3, psi=2, N=2, m=m, sigma=sigma)) % sigma == 0


def test_even_split_puts_remainder_first():
    assert even_split(7, 3) == (3, 2, 2)
    assert even_split(3, 3) == (1, 1, 1)
    assert even_split(2, 3) == ()
    assert ChainSpec(2, 5, 2).psi_split == (3, 2)
    assert ChainSpec(2, 5, 2, (1, 4)).psi_split == (1, 4)


def test_cvnf_pins_one_type_per_server():
    sc = make("asbs", n=2, psi=4, N=2)
    assert sc.chain.n_servers == 4
    assert sc.chain.psi_split == (1, 1, 1, 1)


def test_strategy_parse():
    assert Strategy.parse("cv-none") is Strategy.CV_NONE
    assert Strategy.parse("ANBN") is Strategy.ANBN
    assert Strategy.parse("vnf_only") is Strategy.VNF_ONLY
    with pytest.raises(ValueError):
        Strategy.parse("bogus")


def test_with_overrides():
    sc = make("asbn", n=3, psi=3, sigma=5, params=STUDY)
    assert sc.with_(sigma=2).sigma == 2
    assert sc.with_(n=4).n == 4
    dv = sc.with_(strategy="dv-none")
    assert dv.chain.n_servers == 1 and dv.chain.psi_split == (3,)
    with pytest.raises(TypeError):
        sc.with_(bogus=1)
