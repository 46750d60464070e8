"""Parameter sweeps driven by a small key-value config format.

Example::

    # normalized success vs. chain length
    [sweep]
    vary = psi
    range = 1:8:1
    coupling = sigma=n
    baseline = n=1
    phi = 0.999
    phi_r = 0.999
    upsilon = 0.9
    upsilon_r = 0.9

    [asbn:n2]
    n = 2

    [anbn:n6]
    n = 6
    m = 2
    baseline = n=1, m=1

Keys in ``[sweep]`` are defaults; each ``[strategy]`` or
``[strategy:label]`` section is one series and may override any key.
``range`` is ``start:stop:step`` with ``stop`` inclusive.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields

from . import analytic, montecarlo
from .model import (BackupSpec, ChainSpec, ReliabilityParams, Scenario, Strategy, validate)
from .overhead import utilization

SCENARIO_KEYS = {
    "n": "n", "psi": "psi_total", "psi_total": "psi_total", "N": "n_servers",
    "n_servers": "n_servers", "psi_split": "psi_split", "sigma": "sigma", "m": "m",
    "phi": "phi", "phi_r": "phi_r", "upsilon": "upsilon", "upsilon_r": "upsilon_r",
    "sigma_total": "sigma_total",
}
INT_KEYS = {"n", "psi_total", "n_servers", "sigma", "m", "sigma_total"}
CONTROL_KEYS = {"vary", "range", "coupling", "baseline", "trials", "seed"}


class ConfigError(ValueError):
    pass


@dataclass
class ResultRow:
    strategy: str
    n: int
    psi_total: int
    n_servers: int
    sigma: int
    m: int
    phi: float
    phi_r: float
    upsilon: float
    upsilon_r: float
    analytic: float
    mc_mean: float | None = None
    mc_ci_low: float | None = None
    mc_ci_high: float | None = None
    omega: float | None = None
    normalized: float | None = None

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def for_scenario(cls, sc: Scenario, value: float) -> "ResultRow":
        p = sc.params
        return cls(sc.strategy.value, sc.n, sc.psi_total, sc.chain.n_servers, sc.sigma,
                   sc.backup.m, p.phi, p.phi_r, p.upsilon, p.upsilon_r, value,
                   omega=utilization(sc))


@dataclass
class Series:
    strategy: Strategy
    label: str
    settings: dict[str, str]


@dataclass
class SweepSpec:
    vary: str
    series: list[Series]

    def values(self, settings: dict[str, str]) -> list:
        return parse_range(settings.get("range", ""), self.vary)


def _number(text: str, key: str):
    text = text.strip()
    if "%" in text:
        raise ConfigError(f"{key}: percentages are not accepted ({text!r})")
    try:
        return int(text) if key in INT_KEYS else float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None


def parse_range(text: str, key: str) -> list:
    parts = [p.strip() for p in text.split(":")]
    if len(parts) not in (2, 3) or not all(parts):
        raise ConfigError(f"range must be start:stop[:step], got {text!r}")
    target = SCENARIO_KEYS.get(key, key)
    if target in INT_KEYS:
        start, stop = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
        if step <= 0:
            raise ConfigError("range step must be positive")
        return list(range(start, stop + 1, step))
    start, stop = float(parts[0]), float(parts[1])
    step = float(parts[2]) if len(parts) == 3 else 0.1
    if step <= 0:
        raise ConfigError("range step must be positive")
    if stop < start:
        return []
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_config(text: str) -> SweepSpec:
    defaults: dict[str, str] = {}
    series: list[Series] = []
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name == "sweep":
                current = defaults
                continue
            strat, _, label = name.partition(":")
            try:
                strategy = Strategy.parse(strat)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from None
            series.append(Series(strategy, label or strategy.value, {}))
            current = series[-1].settings
            continue
        if "=" not in line or current is None:
            raise ConfigError(f"line {lineno}: expected 'key = value' inside a section")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in SCENARIO_KEYS and key not in CONTROL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        current[key] = value.strip()

    vary = defaults.get("vary")
    if not vary:
        raise ConfigError("[sweep] must declare 'vary'")
    if vary not in SCENARIO_KEYS:
        raise ConfigError(f"cannot vary {vary!r}")
    for s in series:
        if "vary" in s.settings and s.settings["vary"] != vary:
            raise ConfigError("exactly one varying parameter per sweep")
        s.settings = {**defaults, **s.settings}
    return SweepSpec(vary, series)


def _apply(values: dict[str, object], key: str, raw) -> None:
    target = SCENARIO_KEYS[key]
    if target == "psi_split":
        values[target] = tuple(int(x) for x in str(raw).split(",") if x.strip())
    else:
        values[target] = raw if not isinstance(raw, str) else _number(raw, target)


def _overrides(text: str) -> dict[str, str]:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise ConfigError(f"bad override {part!r}")
        out[key.strip()] = value.strip()
    return out


def _couple(values: dict, strategy: Strategy, coupling: str) -> None:
    rule = coupling.replace(" ", "")
    if rule in ("", "none"):
        return
    if rule == "sigma=n":
        values["sigma"] = values["n"]
        return
    if rule.startswith("omega="):
        if strategy in (Strategy.CV_NONE, Strategy.DV_NONE):
            return
        omega = float(rule.split("=", 1)[1])
        if not 0.0 < omega <= 1.0:
            raise ConfigError("omega coupling needs 0 < omega <= 1")
        n = values["n"]
        if strategy is Strategy.ANBN:
            m = values.get("m", 0)
            if not m:
                raise ConfigError("omega coupling for anbn needs m > 0")
            exact = n * values.get("n_servers", 1) * (1.0 - omega) / (omega * m)
        else:
            exact = n * (1.0 - omega) / omega
        sigma = round(exact)
        if abs(exact - sigma) > 1e-9:
            raise ConfigError(f"omega={omega} needs non-integer sigma={exact:g}")
        values["sigma"] = sigma
        return
    raise ConfigError(f"unknown coupling {coupling!r}")


def resolve(strategy: Strategy, settings: dict[str, str], overrides: dict[str, object]) -> Scenario:
    """Build one scenario from series settings plus point overrides."""
    values: dict[str, object] = {"n": 1, "psi_total": 1, "n_servers": 1, "psi_split": (),
                                 "sigma": 0, "m": 0, "phi": 1.0, "phi_r": 1.0,
                                 "upsilon": 1.0, "upsilon_r": 1.0}
    for key, raw in settings.items():
        if key in SCENARIO_KEYS:
            _apply(values, key, raw)
    explicit_strategy = overrides.pop("strategy", None)
    if explicit_strategy is not None:
        strategy = Strategy.parse(str(explicit_strategy))
    for key, raw in overrides.items():
        if key not in SCENARIO_KEYS:
            raise ConfigError(f"unknown parameter {key!r}")
        _apply(values, key, raw)
    # precedence: explicit sigma override > sigma_total > coupling rule
    total = values.pop("sigma_total", None)
    if "sigma" in overrides:
        pass
    elif total is None:
        _couple(values, strategy, settings.get("coupling", "none"))
    else:
        per = 1
        if strategy is Strategy.ANBN:
            N = values["n_servers"] or 1
            per = values["m"] // N if values["m"] % N == 0 else 0
        if per <= 0 or total % per:
            raise ConfigError(f"sigma_total={total} is not a multiple of the backup servers per position")
        values["sigma"] = total // per
    return Scenario(
        strategy,
        ReliabilityParams(values["phi"], values["phi_r"], values["upsilon"], values["upsilon_r"]),
        ChainSpec(values["n"], values["psi_total"], values["n_servers"], values["psi_split"]),
        BackupSpec(values["sigma"], values["m"]),
    )


def _recheck(sc: Scenario, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise analytic.ConsistencyError(f"analytic value {value} outside [0,1]")
    if sc.strategy.has_backup and sc.strategy is not Strategy.VNF_ONLY:
        if sc.sigma == 0 or (sc.strategy is Strategy.ANBN and sc.backup.m == 0):
            plain = Strategy.CV_NONE if sc.strategy.concentrated_active else Strategy.DV_NONE
            ref = analytic.evaluate(sc.with_(strategy=plain, n_servers=sc.chain.n_servers,
                                             psi_split=sc.chain.psi_split, sigma=0, m=0))
            if abs(ref - value) > 1e-12 * max(ref, 1e-300):
                raise analytic.ConsistencyError("zero-backup value disagrees with no-backup formula")


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[ResultRow]:
    rows: list[ResultRow] = []
    for s in spec.series:
        trials = int(s.settings.get("trials", "0") or 0)
        seed = int(s.settings.get("seed", "1") or 1)
        baseline = _overrides(s.settings.get("baseline", ""))
        for value in spec.values(s.settings):
            point = f"{s.label}: {spec.vary}={value}"
            try:
                sc = resolve(s.strategy, s.settings, {spec.vary: value})
            except (ConfigError, ValueError) as exc:
                raise ConfigError(f"{point}: {exc}") from None
            check = validate(sc)
            if not check.ok:
                raise ConfigError(f"{point}: {check}")
            r = analytic.evaluate(sc)
            _recheck(sc, r)
            row = ResultRow.for_scenario(sc, r)
            if baseline:
                base_sc = resolve(s.strategy, s.settings, {spec.vary: value, **baseline})
                check = validate(base_sc)
                if not check.ok:
                    raise ConfigError(f"{point} (baseline): {check}")
                base = analytic.evaluate(base_sc)
                row.normalized = r / base if base > 0 else math.nan
            if trials > 0:
                est = montecarlo.estimate(sc, trials, seed, workers=workers)
                row.mc_mean, row.mc_ci_low, row.mc_ci_high = est.mean, est.ci_low, est.ci_high
            rows.append(row)
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ResultRow.columns())
    for r in rows:
        w.writerow([_fmt(v) for v in asdict(r).values()])
    return buf.getvalue()


def to_json(rows: list[ResultRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"
