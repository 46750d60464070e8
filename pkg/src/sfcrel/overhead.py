"""Resource utilization: required active VNFs over all reserved VNFs."""

from __future__ import annotations

from .model import Scenario, Strategy, require_valid


def utilization(scenario: Scenario) -> float:
    """Fraction of reserved VNFs that serve traffic when nothing fails.

    The chain length cancels, so the ratio depends only on the number of
    active and backup sub-SFCs. Strategies without backup return 1.
    """
    require_valid(scenario)
    s = scenario.strategy
    n, sigma = scenario.n, scenario.sigma
    if s in (Strategy.CV_NONE, Strategy.DV_NONE):
        return 1.0
    if s is Strategy.ANBN:
        nN = n * scenario.chain.n_servers
        return nN / (nN + scenario.backup.m * sigma)
    return n / (n + sigma)
