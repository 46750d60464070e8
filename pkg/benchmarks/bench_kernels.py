"""Compare the numba and numpy kernels.

    python benchmarks/bench_kernels.py [--trials 1000000] [--repeat 3]

Times Monte Carlo counting, brute-force enumeration and the server-state
oracle on fixed scenarios and checks that both backends agree.
"""

from __future__ import annotations

import argparse
import time

from sfcrel import kernels, montecarlo
from sfcrel._accel import HAVE_NUMBA
from sfcrel.model import BackupSpec, ChainSpec, ReliabilityParams, Scenario, Strategy

STUDY = ReliabilityParams(0.999, 0.999, 0.9, 0.9)

CASES = {
    "mc anbn n=15": Scenario(Strategy.ANBN, STUDY, ChainSpec(15, 3, 1), BackupSpec(4, 2)),
    "mc asbs n=6": Scenario(Strategy.ASBS, STUDY, ChainSpec(6, 3), BackupSpec(8, 0)),
    "enum asbs n=3 psi=3 sigma=3": Scenario(Strategy.ASBS, STUDY, ChainSpec(3, 3), BackupSpec(3, 0)),
    "factored anbn n=3 psi=3 N=3 m=6": Scenario(Strategy.ANBN, STUDY, ChainSpec(3, 3, 3),
                                                               BackupSpec(3, 6)),
}


def best_of(fn, repeat):
    times, value = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        times.append(time.perf_counter() - t0)
    return min(times), value


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'case':50s} {'numba s':>9s} {'numpy s':>9s} {'speedup':>8s}  agree")
    for label, sc in CASES.items():
        arrays = montecarlo.layout(sc).arrays()
        if label.startswith("mc"):
            run = {b: (lambda b=b: kernels.count_successes(1, 0, args.trials, arrays, b))
                   for b in ("numba", "numpy")}
        elif label.startswith("enum"):
            run = {b: (lambda b=b: kernels.enumerate_success(arrays, b)) for b in ("numba", "numpy")}
        else:
            run = {b: (lambda b=b: montecarlo.exact_by_server_states(sc, backend=b))
                   for b in ("numba", "numpy")}
        run["numba"]()  # compile outside the timing
        t_nb, v_nb = best_of(run["numba"], args.repeat)
        t_np, v_np = best_of(run["numpy"], args.repeat)
        agree = v_nb == v_np if isinstance(v_nb, int) else abs(v_nb - v_np) <= 1e-12 * abs(v_np)
        name = f"{label} ({montecarlo.component_count(sc)} components)"
        print(f"{name:50s} {t_nb:9.3f} {t_np:9.3f} {t_np / t_nb:7.1f}x  {agree}")


if __name__ == "__main__":
    main()
