"""Domain types shared by every part of the toolkit.

All types are frozen dataclasses. Construction never raises on bad values;
call :func:`validate` to get the list of violated constraints.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

MAX_N = 64
MAX_PSI = 64
MAX_BINOM = 64


class Strategy(enum.Enum):
    CV_NONE = "cv-none"
    DV_NONE = "dv-none"
    ASBN = "asbn"
    ASBS = "asbs"
    ANBN = "anbn"
    ANBS = "anbs"
    VNF_ONLY = "vnf-only"

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        key = text.strip().lower().replace("_", "-")
        for s in cls:
            if s.value == key or s.name.lower().replace("_", "-") == key:
                return s
        raise ValueError(f"unknown strategy {text!r}")

    @property
    def concentrated_active(self) -> bool:
        """cVNF placement: one server per VNF type."""
        return self in (Strategy.CV_NONE, Strategy.ASBN, Strategy.ASBS)

    @property
    def distributed_active(self) -> bool:
        return self in (Strategy.DV_NONE, Strategy.ANBN, Strategy.ANBS)

    @property
    def has_backup(self) -> bool:
        return self in (Strategy.ASBN, Strategy.ASBS, Strategy.ANBN, Strategy.ANBS, Strategy.VNF_ONLY)


@dataclass(frozen=True)
class ReliabilityParams:
    phi: float = 1.0
    phi_r: float = 1.0
    upsilon: float = 1.0
    upsilon_r: float = 1.0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.phi, self.phi_r, self.upsilon, self.upsilon_r)


def even_split(total: int, parts: int) -> tuple[int, ...]:
    """Most even split of ``total`` into ``parts``; remainders go to the lowest indices."""
    if parts < 1 or total < parts:
        return ()
    q, r = divmod(total, parts)
    return tuple(q + 1 if k < r else q for k in range(parts))


@dataclass(frozen=True)
class ChainSpec:
    n: int
    psi_total: int
    n_servers: int = 1
    psi_split: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.psi_split:
            object.__setattr__(self, "psi_split", even_split(self.psi_total, self.n_servers))
        else:
            object.__setattr__(self, "psi_split", tuple(self.psi_split))


@dataclass(frozen=True)
class BackupSpec:
    sigma: int = 0
    m: int = 0


@dataclass(frozen=True)
class Scenario:
    strategy: Strategy
    params: ReliabilityParams
    chain: ChainSpec
    backup: BackupSpec = field(default_factory=BackupSpec)

    def __post_init__(self):
        # cVNF: one VNF type per active server, so N is pinned to psi_total.
        if self.strategy.concentrated_active and self.chain.psi_total >= 1:
            psi = self.chain.psi_total
            if self.chain.n_servers != psi or self.chain.psi_split != (1,) * psi:
                object.__setattr__(
                    self, "chain", ChainSpec(self.chain.n, psi, psi, (1,) * psi)
                )

    @property
    def n(self) -> int:
        return self.chain.n

    @property
    def psi_total(self) -> int:
        return self.chain.psi_total

    @property
    def sigma(self) -> int:
        return self.backup.sigma

    @property
    def backups_per_position(self) -> int:
        """Backup servers per active position (m/N), aNbN only."""
        return self.backup.m // self.chain.n_servers

    def with_(self, **changes) -> "Scenario":
        """Copy with field-level overrides.

        Accepts the flat names used by the CLI (``n``, ``psi_total``,
        ``n_servers``, ``psi_split``, ``sigma``, ``m``, ``phi``, ``phi_r``,
        ``upsilon``, ``upsilon_r``, ``strategy``).
        """
        strategy = changes.pop("strategy", self.strategy)
        if isinstance(strategy, str):
            strategy = Strategy.parse(strategy)
        params = replace(self.params, **{k: changes.pop(k) for k in
                                         ("phi", "phi_r", "upsilon", "upsilon_r") if k in changes})
        chain_kw = {k: changes.pop(k) for k in ("n", "psi_total", "n_servers", "psi_split") if k in changes}
        if ("psi_total" in chain_kw or "n_servers" in chain_kw) and "psi_split" not in chain_kw:
            chain_kw["psi_split"] = ()
        chain = replace(self.chain, **chain_kw)
        if strategy.distributed_active and self.strategy.concentrated_active and "n_servers" not in chain_kw:
            chain = ChainSpec(chain.n, chain.psi_total, 1)
        backup = replace(self.backup, **{k: changes.pop(k) for k in ("sigma", "m") if k in changes})
        if changes:
            raise TypeError(f"unknown scenario fields: {sorted(changes)}")
        return Scenario(strategy, params, chain, backup)


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "OK" if self.ok else "; ".join(self.violations)


class ScenarioError(ValueError):
    """Raised when an operation receives a scenario that fails validation."""


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate(scenario: Scenario) -> ValidationResult:
    """Check every constraint the formulas rely on. Never raises."""
    v: list[str] = []
    try:
        p = scenario.params
        for name in ("phi", "phi_r", "upsilon", "upsilon_r"):
            x = getattr(p, name)
            if not isinstance(x, (int, float)) or not (0.0 <= x <= 1.0):
                v.append(f"{name} out of [0,1]")

        c = scenario.chain
        if not _is_int(c.n) or c.n < 1:
            v.append("n must be >= 1")
        elif c.n > MAX_N:
            v.append(f"n must be <= {MAX_N}")
        if not _is_int(c.psi_total) or c.psi_total < 1:
            v.append("psi_total must be >= 1")
        elif c.psi_total > MAX_PSI:
            v.append(f"psi_total must be <= {MAX_PSI}")
        elif not _is_int(c.n_servers) or not (1 <= c.n_servers <= c.psi_total):
            v.append("n_servers must satisfy 1 <= N <= psi_total")
        else:
            split = c.psi_split
            if len(split) != c.n_servers:
                v.append("psi_split length must equal n_servers")
            if any((not _is_int(x)) or x < 1 for x in split):
                v.append("every psi_k must be >= 1")
            elif sum(split) != c.psi_total:
                v.append("psi_split must sum to psi_total")

        b = scenario.backup
        s = scenario.strategy
        if not _is_int(b.sigma) or b.sigma < 0:
            v.append("sigma must be >= 0")
        if not _is_int(b.m) or b.m < 0:
            v.append("m must be >= 0")
        if s is Strategy.ANBN and _is_int(b.m) and _is_int(c.n_servers) and c.n_servers >= 1:
            if b.m % c.n_servers != 0:
                v.append("m must be a multiple of N")
        if not v:
            total = total_backup_subchains(scenario)
            if total > MAX_BINOM:
                v.append(f"total backup sub-SFCs must be <= {MAX_BINOM}")
            elif s is Strategy.VNF_ONLY and c.n + b.sigma > MAX_BINOM:
                v.append(f"n + sigma must be <= {MAX_BINOM}")
    except Exception as exc:  # validate is total
        v.append(f"malformed scenario: {exc}")
    return ValidationResult(tuple(v))


def require_valid(scenario: Scenario) -> Scenario:
    result = validate(scenario)
    if not result.ok:
        raise ScenarioError(str(result))
    return scenario


def total_backup_subchains(scenario: Scenario) -> int:
    """Total backup sub-SFCs in the system (sigma summed over backup servers)."""
    s = scenario.strategy
    sigma = scenario.backup.sigma
    if s is Strategy.ANBN:
        return (scenario.backup.m // scenario.chain.n_servers) * sigma
    if s in (Strategy.CV_NONE, Strategy.DV_NONE):
        return 0
    return sigma
