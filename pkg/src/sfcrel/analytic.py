"""Closed-form service-success probabilities for parallelized VNF chains.

Notation follows the usual reliability-analysis conventions:

* ``phi`` / ``phi_r``       active / backup server reliability
* ``upsilon`` / ``upsilon_r`` active / backup VNF reliability
* ``n``     parallel sub-flows (active sub-SFCs)
* ``psi``   VNF types per sub-SFC
* ``sigma`` backup copies of each VNF type per backup server

Every sum with a lower bound above its upper bound is zero. A backup
server shared by several protected components contributes its
reliability once per expression (``phi_r * phi_r == phi_r``).
"""

from __future__ import annotations

from math import comb, prod

from .model import MAX_BINOM, Scenario, Strategy, require_valid

ROUNDOFF = 1e-9


class ConsistencyError(ArithmeticError):
    """A formula produced a value outside [0, 1] by more than round-off."""


def _clamp(value: float) -> float:
    if value < -ROUNDOFF or value > 1.0 + ROUNDOFF or value != value:
        raise ConsistencyError(f"probability {value!r} outside [0, 1]")
    return min(1.0, max(0.0, value))


def binom_sum(K: int, lo: int, hi: int, p: float) -> float:
    """Probability that between ``lo`` and ``hi`` of ``K`` units fail.

    Each unit survives with probability ``p``; the sum runs over
    ``i in [lo, min(hi, K)]`` of ``C(K,i) (1-p)^i p^(K-i)``.
    """
    if K < 0 or K > MAX_BINOM:
        raise ValueError(f"K={K} outside [0, {MAX_BINOM}]")
    hi = min(hi, K)
    lo = max(lo, 0)
    q = 1.0 - p
    total = 0.0
    for i in range(lo, hi + 1):
        total += comb(K, i) * q**i * p ** (K - i)
    return total


def _covered(n: int, cap: int, pre_failed: int, u: float, ur: float) -> float:
    """P(VNF failures among ``n`` live actives fit in ``cap`` backups).

    ``pre_failed`` backup copies are already consumed (by failed active
    servers); each additional active failure consumes one more working
    backup copy of the same type.
    """
    total = 0.0
    q = 1.0 - u
    for i in range(0, min(n, cap - pre_failed) + 1):
        total += comb(n, i) * q**i * u ** (n - i) * binom_sum(cap, 0, cap - pre_failed - i, ur)
    return total


def success_vnf_only(upsilon: float, n: int, sigma: int, psi_total: int) -> float:
    """VNF failures only: at most ``sigma`` of ``n + sigma`` replicas per type may fail."""
    return _clamp(binom_sum(sigma + n, 0, sigma, upsilon) ** psi_total)


def success_cv_none(scenario: Scenario) -> float:
    p = scenario.params
    return _clamp((p.phi * p.upsilon**scenario.n) ** scenario.psi_total)


def success_asbn(scenario: Scenario) -> float:
    p = scenario.params
    phi, phi_r, u, ur = p.as_tuple()
    n, psi, sigma = scenario.n, scenario.psi_total, scenario.sigma
    q = 1.0 - u

    stage = phi * u**n
    partial = 0.0
    for i in range(1, min(n, sigma) + 1):
        partial += comb(n, i) * q**i * u ** (n - i) * binom_sum(sigma, 0, sigma - i, ur)
    stage += phi * phi_r * partial
    stage += (1.0 - phi) * phi_r * binom_sum(sigma, 0, sigma - n, ur)
    return _clamp(stage**psi)


def success_asbs(scenario: Scenario) -> float:
    p = scenario.params
    phi, phi_r, u, ur = p.as_tuple()
    n, psi, sigma = scenario.n, scenario.psi_total, scenario.sigma

    all_up = phi**psi * u ** (n * psi)
    # one type, its server up: VNF failures covered by the shared backup
    mixed = _covered(n, sigma, 0, u, ur)
    # one type, its server down: n backups of that type must work
    replaced = binom_sum(sigma, 0, sigma - n, ur)

    value = all_up + phi**psi * phi_r * (mixed**psi - u ** (n * psi))
    tail = 0.0
    for f in range(1, psi + 1):
        tail += comb(psi, f) * phi ** (psi - f) * (1.0 - phi) ** f * replaced**f * mixed ** (psi - f)
    value += phi_r * tail
    return _clamp(value)


def success_dv_none(scenario: Scenario) -> float:
    p = scenario.params
    N = scenario.chain.n_servers
    per_flow = p.phi**N * prod(p.upsilon**k for k in scenario.chain.psi_split)
    return _clamp(per_flow**scenario.n)


def _position_backup_term(n: int, psi_k: int, cap: int, phi: float, u: float, ur: float) -> float:
    """Success mass for one position needing at least one backup VNF.

    ``cap`` is the per-type backup capacity reachable from this position.
    The no-failure case is excluded so it is not counted twice.
    """
    all_servers_up = phi**n * (_covered(n, cap, 0, u, ur) ** psi_k - u ** (n * psi_k))
    servers_down = 0.0
    for f in range(1, min(n, cap) + 1):
        servers_down += (
            comb(n, f) * phi ** (n - f) * (1.0 - phi) ** f
            * _covered(n - f, cap, f, u, ur) ** psi_k
        )
    return all_servers_up + servers_down


def success_anbn(scenario: Scenario) -> float:
    p = scenario.params
    phi, phi_r, u, ur = p.as_tuple()
    n, sigma = scenario.n, scenario.sigma
    per_pos = scenario.backups_per_position

    value = 1.0
    for psi_k in scenario.chain.psi_split:
        bracket = (phi * u**psi_k) ** n
        for lost in range(0, per_pos):
            alive = per_pos - lost
            weight = comb(per_pos, lost) * phi_r**alive * (1.0 - phi_r) ** lost
            bracket += weight * _position_backup_term(n, psi_k, alive * sigma, phi, u, ur)
        value *= bracket
    return _clamp(value)


def success_anbs(scenario: Scenario) -> float:
    """Single backup server for all N positions.

    Each position factor has the form ``a_k + phi_r * b_k``; the product
    over positions keeps ``phi_r`` to the first power:
    ``prod(a) + phi_r * (prod(a + b) - prod(a))``.
    """
    p = scenario.params
    phi, phi_r, u, ur = p.as_tuple()
    n, sigma = scenario.n, scenario.sigma

    without = 1.0
    with_backup = 1.0
    for psi_k in scenario.chain.psi_split:
        a = (phi * u**psi_k) ** n
        b = _position_backup_term(n, psi_k, sigma, phi, u, ur)
        without *= a
        with_backup *= a + b
    return _clamp(without + phi_r * (with_backup - without))


_DISPATCH = {
    Strategy.CV_NONE: success_cv_none,
    Strategy.DV_NONE: success_dv_none,
    Strategy.ASBN: success_asbn,
    Strategy.ASBS: success_asbs,
    Strategy.ANBN: success_anbn,
    Strategy.ANBS: success_anbs,
}


def evaluate(scenario: Scenario) -> float:
    """Service-success probability of a validated scenario."""
    require_valid(scenario)
    s = scenario.strategy
    if s is Strategy.VNF_ONLY:
        return success_vnf_only(scenario.params.upsilon, scenario.n, scenario.sigma, scenario.psi_total)
    try:
        fn = _DISPATCH[s]
    except KeyError:
        raise ValueError(f"unknown strategy {s!r}") from None
    return fn(scenario)
