import itertools
from math import comb

import pytest
import sympy as sp

from sfcrel import analytic
from sfcrel.analytic import ConsistencyError, binom_sum, evaluate
from sfcrel.model import Strategy

from conftest import STUDY, make, rel_close


def brute_binom(K, lo, hi, p):
    """Enumerate all 2^K unit states and count failures directly."""
    total = 0.0
    for states in itertools.product((True, False), repeat=K):
        failed = states.count(False)
        if lo <= failed <= hi:
            w = 1.0
            for up in states:
                w *= p if up else 1.0 - p
            total += w
    return total


class TestBinomSum:
    def test_full_range_is_one(self):
        assert binom_sum(2, 0, 2, 0.9) == pytest.approx(1.0, abs=1e-15)

    def test_empty_range(self):
        assert binom_sum(3, 5, 7, 0.5) == 0.0
        assert binom_sum(4, 0, -1, 0.3) == 0.0

    def test_partial(self):
        assert binom_sum(2, 0, 1, 0.9) == pytest.approx(0.99, abs=1e-15)
        assert brute_binom(2, 0, 1, 0.9) == pytest.approx(0.99, abs=1e-15)

    @pytest.mark.parametrize("K, lo, hi, p", [(5, 1, 3, 0.7), (6, 0, 10, 0.2), (4, 2, 2, 0.5), (0, 0, 0, 0.3)])
    def test_matches_enumeration(self, K, lo, hi, p):
        assert rel_close(binom_sum(K, lo, hi, p), brute_binom(K, lo, hi, p))

    def test_cap(self):
        with pytest.raises(ValueError):
            binom_sum(65, 0, 1, 0.5)


class TestVnfOnly:
    def test_perfect(self):
        assert analytic.success_vnf_only(1.0, 3, 0, 5) == 1.0

    def test_single_spare(self):
        # one active, one spare: fails only if both fail
        assert analytic.success_vnf_only(0.9, 1, 1, 1) == pytest.approx(1 - 0.1**2, abs=1e-15)

    def test_no_redundancy(self):
        assert analytic.success_vnf_only(0.9, 1, 0, 2) == pytest.approx(0.81, abs=1e-15)

    def test_dispatch(self):
        sc = make("vnf-only", n=2, psi=3, sigma=1, upsilon=0.8)
        assert evaluate(sc) == analytic.success_vnf_only(0.8, 2, 1, 3)


class TestNoBackup:
    def test_cv_perfect_and_dead(self):
        assert analytic.success_cv_none(make("cv-none", n=4, psi=3)) == 1.0
        assert analytic.success_cv_none(make("cv-none", n=4, psi=3, phi=0.0, upsilon=0.9)) == 0.0

    def test_cv_value(self):
        # frozen from exhaustive enumeration of 3 servers and 6 VNFs
        sc = make("cv-none", n=2, psi=3, phi=0.999, upsilon=0.9)
        assert analytic.success_cv_none(sc) == pytest.approx(0.529848270791559, rel=1e-12)

    def test_dv_value(self):
        # frozen from exhaustive enumeration of 4 servers and 6 VNFs
        sc = make("dv-none", n=2, psi=3, N=2, split=(2, 1), phi=0.999, upsilon=0.9)
        assert analytic.success_dv_none(sc) == pytest.approx(0.5293184225207676, rel=1e-12)

    def test_dv_perfect(self):
        assert analytic.success_dv_none(make("dv-none", n=5, psi=4, N=3, phi=1, upsilon=1)) == 1.0

    @pytest.mark.parametrize("n", [1, 2, 4, 7])
    def test_cv_dv_coincide_at_n_equals_psi(self, n):
        cv = make("cv-none", n=n, psi=n, phi=0.97, upsilon=0.91)
        dv = make("dv-none", n=n, psi=n, N=1, phi=0.97, upsilon=0.91)
        assert rel_close(evaluate(cv), evaluate(dv))


BACKED = [Strategy.ASBN, Strategy.ASBS, Strategy.ANBN, Strategy.ANBS]


@pytest.mark.parametrize("strategy", BACKED)
def test_zero_backup_reduces_to_plain(strategy):
    for n, psi, N in [(1, 1, 1), (3, 3, 1), (2, 4, 2), (5, 3, 3)]:
        m = N if strategy is Strategy.ANBN else 0
        kw = dict(n=n, psi=psi, N=N, sigma=0, m=m, phi=0.95, phi_r=0.9, upsilon=0.85, upsilon_r=0.8)
        plain = "cv-none" if strategy in (Strategy.ASBN, Strategy.ASBS) else "dv-none"
        assert rel_close(evaluate(make(strategy, **kw)), evaluate(make(plain, **kw)))


def test_anbn_without_backup_servers_reduces():
    kw = dict(n=3, psi=3, N=1, sigma=4, m=0, phi=0.95, phi_r=0.9, upsilon=0.85, upsilon_r=0.8)
    assert rel_close(evaluate(make("anbn", **kw)), evaluate(make("dv-none", **kw)))


@pytest.mark.parametrize("strategy", BACKED)
@pytest.mark.parametrize("phi, u", [(0.3, 0.6), (0.9, 0.5), (0.999, 0.9), (0.0, 0.0)])
def test_perfect_backup_limit(strategy, phi, u):
    for n in (1, 2, 4):
        sc = make(strategy, n=n, psi=3, N=1, sigma=n, m=1, phi=phi, upsilon=u, phi_r=1.0, upsilon_r=1.0)
        assert evaluate(sc) == pytest.approx(1.0, abs=1e-12)


def test_asbn_bracket_telescopes_symbolically():
    phi, u = sp.symbols("phi upsilon", positive=True)
    n = 3
    # phi_r = upsilon_r = 1, sigma >= n: every inner backup sum equals 1
    bracket = phi * u**n + phi * sum(sp.binomial(n, i) * (1 - u)**i * u**(n - i) for i in range(1, n + 1)) + (1 - phi)
    assert sp.simplify(bracket - 1) == 0


def test_anbn_position_bracket_telescopes_symbolically():
    phi, u = sp.symbols("phi upsilon", positive=True)
    n, psi_k = 2, 2
    # one backup server always up with ample perfect copies
    all_up = phi**n * (1 - u**(n * psi_k))
    down = sum(sp.binomial(n, f) * phi**(n - f) * (1 - phi)**f for f in range(1, n + 1))
    bracket = (phi * u**psi_k)**n + all_up + down
    assert sp.simplify(sp.expand(bracket) - 1) == 0


class TestProvisioningValues:
    def test_asbn_serial(self):
        assert evaluate(make("asbn", n=1, psi=3, sigma=3, params=STUDY)) >= 0.999

    def test_asbs_parallel(self):
        assert evaluate(make("asbs", n=6, psi=3, sigma=8, params=STUDY)) >= 0.999

    def test_anbn_fifteen(self):
        assert evaluate(make("anbn", n=15, psi=3, N=1, m=2, sigma=4, params=STUDY)) >= 0.999

    def test_anbs_nine(self):
        assert evaluate(make("anbs", n=9, psi=3, N=1, sigma=8, params=STUDY)) >= 0.999


def test_asbs_single_vnf_pair():
    # 1 - (1-u)(1-u_r) with perfect servers
    sc = make("asbs", n=1, psi=1, sigma=1, phi=1, phi_r=1, upsilon=0.9, upsilon_r=0.9)
    assert analytic.success_asbs(sc) == pytest.approx(0.99, abs=1e-15)


def test_anbs_shared_server_counted_once():
    # two positions share one backup server; a per-position phi_r factor
    # would undercount. Reference: exhaustive oracle value.
    from sfcrel.montecarlo import exact_by_server_states
    sc = make("anbs", n=2, psi=2, N=2, sigma=2, phi=0.9, phi_r=0.8, upsilon=0.7, upsilon_r=0.6)
    assert rel_close(evaluate(sc), exact_by_server_states(sc))


@pytest.mark.parametrize("strategy", [s for s in Strategy])
def test_dispatch_matches_direct(strategy):
    sc = make(strategy, n=2, psi=2, sigma=2, m=1, phi=0.9, phi_r=0.9, upsilon=0.8, upsilon_r=0.8)
    direct = {
        Strategy.CV_NONE: analytic.success_cv_none, Strategy.DV_NONE: analytic.success_dv_none,
        Strategy.ASBN: analytic.success_asbn, Strategy.ASBS: analytic.success_asbs,
        Strategy.ANBN: analytic.success_anbn, Strategy.ANBS: analytic.success_anbs,
    }
    if strategy is Strategy.VNF_ONLY:
        assert evaluate(sc) == analytic.success_vnf_only(0.8, 2, 2, 2)
    else:
        assert evaluate(sc) == direct[strategy](sc)


def test_clamp():
    assert analytic._clamp(1.0 + 5e-10) == 1.0
    assert analytic._clamp(-5e-10) == 0.0
    with pytest.raises(ConsistencyError):
        analytic._clamp(1.01)
    with pytest.raises(ConsistencyError):
        analytic._clamp(float("nan"))


def test_invalid_scenario_rejected():
    from sfcrel.model import ScenarioError
    with pytest.raises(ScenarioError):
        evaluate(make("asbs", n=0))
