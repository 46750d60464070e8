"""Service-success and backup-utilization analysis for parallelized VNF chains."""

from .analytic import evaluate
from .model import (BackupSpec, ChainSpec, ReliabilityParams, Scenario, Strategy,
                    total_backup_subchains, validate)
from .montecarlo import enumerate_exact, estimate
from .overhead import utilization
from .search import max_protected_n, min_sigma

__all__ = [
    "BackupSpec", "ChainSpec", "ReliabilityParams", "Scenario", "Strategy",
    "enumerate_exact", "estimate", "evaluate", "max_protected_n", "min_sigma",
    "total_backup_subchains", "utilization", "validate",
]
__version__ = "0.1.0"
