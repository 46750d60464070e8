"""Backup provisioning searches: minimal sigma for a target, maximal protected n."""

from __future__ import annotations

from dataclasses import dataclass

from .analytic import evaluate
from .model import (MAX_BINOM, MAX_N, BackupSpec, ChainSpec, ReliabilityParams, Scenario,
                    Strategy, require_valid, total_backup_subchains, validate)
from .overhead import utilization


class InfeasibleError(ValueError):
    """No amount of backup within the caps reaches the target."""

    def __init__(self, message: str, best: float):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class ProvisioningResult:
    sigma_min: int
    sigma_total: int
    achieved: float
    omega: float
    below: float | None  # success at sigma_min - 1; None when sigma_min == 0
    scenario: Scenario


def _check_target(target: float) -> None:
    if not (0.0 < target < 1.0):
        raise ValueError("target must lie in (0, 1)")


def _sigma_cap(scenario: Scenario) -> int:
    s = scenario.strategy
    if s in (Strategy.CV_NONE, Strategy.DV_NONE):
        return 0
    if s is Strategy.ANBN:
        per_pos = scenario.backups_per_position
        return MAX_BINOM // per_pos if per_pos else 0
    if s is Strategy.VNF_ONLY:
        return MAX_BINOM - scenario.n
    return MAX_BINOM


def min_sigma(strategy: Strategy, params: ReliabilityParams, chain: ChainSpec, m: int,
              target: float) -> ProvisioningResult:
    """Smallest sigma whose service success reaches ``target``.

    Scans sigma upward from 0; raises :class:`InfeasibleError` when the cap
    is reached first.
    """
    _check_target(target)
    base = require_valid(Scenario(strategy, params, chain, BackupSpec(0, m)))
    prev = None
    best = 0.0
    for sigma in range(0, _sigma_cap(base) + 1):
        sc = base.with_(sigma=sigma)
        value = evaluate(sc)
        if value >= target:
            return ProvisioningResult(sigma, total_backup_subchains(sc), value,
                                      utilization(sc), prev, sc)
        prev = value
        best = max(best, value)
    raise InfeasibleError(
        f"{strategy.value}: target {target} unreachable (best {best:.12g} with sigma <= {_sigma_cap(base)})",
        best)


def max_protected_n(strategy: Strategy, params: ReliabilityParams, psi_total: int, sigma: int,
                    m: int, target: float, n_servers: int = 1) -> int:
    """Largest n <= 64 whose service success reaches ``target``; 0 if none."""
    _check_target(target)
    best = 0
    for n in range(1, MAX_N + 1):
        sc = Scenario(strategy, params, ChainSpec(n, psi_total, n_servers), BackupSpec(sigma, m))
        if n > 1 and not validate(sc).ok:
            break  # only the n + sigma cap of the VNF-only model can trip here
        if evaluate(sc) >= target:
            best = n
    return best
