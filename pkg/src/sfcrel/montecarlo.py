"""Brute-force failure simulator, independent of the closed-form formulas.

A scenario is expanded into concrete components (servers and VNFs), each
up independently with its reliability. :func:`succeeds` applies the
recovery rules of the placement strategy to one sampled world;
:func:`estimate` counts successes over many counter-seeded worlds, and
:func:`enumerate_exact` sums the probability of every successful world.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

import numpy as np

from . import kernels
from .model import ReliabilityParams, Scenario, Strategy, require_valid

MAX_ENUM_COMPONENTS = 24
MAX_ENUM_SERVERS = 20
CHUNK = 1 << 16
Z95 = NormalDist().inv_cdf(0.975)


class ShapeError(ValueError):
    """World does not match the component layout of the scenario."""


@dataclass(frozen=True)
class Layout:
    """Flat component description of a scenario.

    Component order is active servers, active VNFs, backup servers, backup
    VNFs. Host indices point into the flat component vector (``-1`` when a
    VNF has no host server).
    """

    probs: np.ndarray
    n_active_servers: int
    n_active_vnfs: int
    n_backup_servers: int
    n_backup_vnfs: int
    act_host: np.ndarray
    act_group: np.ndarray
    bak_host: np.ndarray
    bak_group: np.ndarray
    n_groups: int
    param_class: np.ndarray  # per component: 0 phi, 1 phi_r, 2 upsilon, 3 upsilon_r

    @property
    def n_components(self) -> int:
        return self.probs.shape[0]

    @property
    def n_servers(self) -> int:
        return self.n_active_servers + self.n_backup_servers

    @property
    def act_comp(self) -> np.ndarray:
        return np.arange(self.n_active_vnfs, dtype=np.int64) + self.n_active_servers

    @property
    def bak_comp(self) -> np.ndarray:
        start = self.n_active_servers + self.n_active_vnfs + self.n_backup_servers
        return np.arange(self.n_backup_vnfs, dtype=np.int64) + start

    def arrays(self):
        return (self.probs, self.act_comp, self.act_host, self.act_group,
                self.bak_comp, self.bak_host, self.bak_group, self.n_groups)

    def split(self, up: np.ndarray) -> "World":
        a, b, c = (self.n_active_servers, self.n_active_servers + self.n_active_vnfs,
                   self.n_active_servers + self.n_active_vnfs + self.n_backup_servers)
        up = np.asarray(up, dtype=bool)
        return World(up[:a].copy(), up[a:b].copy(), up[b:c].copy(), up[c:].copy())


def _type_offsets(split: tuple[int, ...]) -> list[range]:
    out, start = [], 0
    for k in split:
        out.append(range(start, start + k))
        start += k
    return out


@lru_cache(maxsize=512)
def layout(scenario: Scenario) -> Layout:
    require_valid(scenario)
    s = scenario.strategy
    phi, phi_r, u, ur = scenario.params.as_tuple()
    n, psi, sigma = scenario.n, scenario.psi_total, scenario.sigma

    a_srv: list[float] = []
    a_host: list[int] = []  # index into a_srv, -1 for none
    a_group: list[int] = []
    b_srv: list[float] = []
    b_host: list[int] = []  # index into b_srv
    b_group: list[int] = []
    b_prob = ur

    if s is Strategy.VNF_ONLY:
        for t in range(psi):
            a_host += [-1] * n
            a_group += [t] * n
        for t in range(psi):
            b_host += [-1] * sigma
            b_group += [t] * sigma
        b_prob = u
    elif s.concentrated_active:
        for k in range(psi):
            a_srv.append(phi)
            a_host += [k] * n
            a_group += [k] * n
        if s is Strategy.ASBN:
            for k in range(psi):
                b_srv.append(phi_r)
                b_host += [k] * sigma
                b_group += [k] * sigma
        elif s is Strategy.ASBS:
            b_srv.append(phi_r)
            for t in range(psi):
                b_host += [0] * sigma
                b_group += [t] * sigma
    else:
        types = _type_offsets(scenario.chain.psi_split)
        N = scenario.chain.n_servers
        for f in range(n):
            for k in range(N):
                a_srv.append(phi)
                for t in types[k]:
                    a_host.append(f * N + k)
                    a_group.append(t)
        if s is Strategy.ANBS:
            b_srv.append(phi_r)
            for t in range(psi):
                b_host += [0] * sigma
                b_group += [t] * sigma
        elif s is Strategy.ANBN:
            per_pos = scenario.backups_per_position
            for k in range(N):
                for _ in range(per_pos):
                    b_srv.append(phi_r)
                    for t in types[k]:
                        b_host += [len(b_srv) - 1] * sigma
                        b_group += [t] * sigma

    na_s, na_v, nb_s, nb_v = len(a_srv), len(a_host), len(b_srv), len(b_host)
    probs = np.array(a_srv + [u] * na_v + b_srv + [b_prob] * nb_v, dtype=np.float64)
    b_class = 2 if s is Strategy.VNF_ONLY else 3
    param_class = np.array([0] * na_s + [2] * na_v + [1] * nb_s + [b_class] * nb_v, dtype=np.int64)
    b_base = na_s + na_v
    act_host = np.array([h if h >= 0 else -1 for h in a_host], dtype=np.int64)
    bak_host = np.array([b_base + h if h >= 0 else -1 for h in b_host], dtype=np.int64)
    for arr in (probs, act_host, bak_host, param_class):
        arr.setflags(write=False)
    return Layout(
        probs=probs,
        n_active_servers=na_s,
        n_active_vnfs=na_v,
        n_backup_servers=nb_s,
        n_backup_vnfs=nb_v,
        act_host=act_host,
        act_group=np.array(a_group, dtype=np.int64),
        bak_host=bak_host,
        bak_group=np.array(b_group, dtype=np.int64),
        n_groups=psi,
        param_class=param_class,
    )


def component_count(scenario: Scenario) -> int:
    return layout(scenario).n_components


@dataclass(frozen=True, eq=False)
class World:
    active_server_up: np.ndarray
    active_vnf_up: np.ndarray
    backup_server_up: np.ndarray
    backup_vnf_up: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate([self.active_server_up, self.active_vnf_up,
                               self.backup_server_up, self.backup_vnf_up])

    def __eq__(self, other):
        if not isinstance(other, World):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(
            (self.active_server_up, self.active_vnf_up, self.backup_server_up, self.backup_vnf_up),
            (other.active_server_up, other.active_vnf_up, other.backup_server_up, other.backup_vnf_up)))


def sample_world(scenario: Scenario, trial_index: int, seed: int) -> World:
    """The world drawn for ``trial_index`` under ``seed``.

    Each backup server's state is drawn once per world, however many
    components it protects.
    """
    lay = layout(scenario)
    u = kernels.uniforms(seed, trial_index, lay.n_components)
    return lay.split(u < lay.probs)


def _check_shape(lay: Layout, world: World) -> None:
    got = (world.active_server_up.size, world.active_vnf_up.size,
           world.backup_server_up.size, world.backup_vnf_up.size)
    want = (lay.n_active_servers, lay.n_active_vnfs, lay.n_backup_servers, lay.n_backup_vnfs)
    if got != want:
        raise ShapeError(f"world shape {got} does not match scenario layout {want}")


def succeeds(scenario: Scenario, world: World) -> bool:
    """Recovery predicate of the scenario's placement strategy."""
    lay = layout(scenario)
    _check_shape(lay, world)
    s = scenario.strategy
    n, psi, sigma = scenario.n, scenario.psi_total, scenario.sigma
    srv = world.active_server_up
    bsrv = world.backup_server_up

    if s in (Strategy.CV_NONE, Strategy.DV_NONE):
        return bool(srv.all() and world.active_vnf_up.all())

    if s is Strategy.VNF_ONLY:
        failed = (~world.active_vnf_up.reshape(psi, n)).sum(axis=1)
        failed += (~world.backup_vnf_up.reshape(psi, sigma)).sum(axis=1)
        return bool((failed <= sigma).all())

    if s is Strategy.ASBN:
        vnf = world.active_vnf_up.reshape(psi, n)
        spare = world.backup_vnf_up.reshape(psi, sigma).sum(axis=1)
        for k in range(psi):
            if srv[k]:
                lost = int((~vnf[k]).sum())
                if lost and not (bsrv[k] and spare[k] >= lost):
                    return False
            elif not (bsrv[k] and spare[k] >= n):
                return False
        return True

    if s is Strategy.ASBS:
        vnf = world.active_vnf_up.reshape(psi, n)
        spare = world.backup_vnf_up.reshape(psi, sigma).sum(axis=1)
        for k in range(psi):
            demand = n if not srv[k] else int((~vnf[k]).sum())
            if demand and not (bsrv[0] and spare[k] >= demand):
                return False
        return True

    # dVNF: server (flow f, position k); each flow hosts types 0..psi-1 in order
    N = scenario.chain.n_servers
    types = _type_offsets(scenario.chain.psi_split)
    srv = srv.reshape(n, N)
    vnf = world.active_vnf_up.reshape(n, psi)
    if s is Strategy.ANBS:
        spare = world.backup_vnf_up.reshape(psi, sigma).sum(axis=1) if bsrv[0] else np.zeros(psi, int)
    else:
        per_pos = scenario.backups_per_position
        spare = np.zeros(psi, dtype=int)
        cursor = 0
        for k in range(N):
            width = len(types[k]) * sigma
            for j in range(per_pos):
                block = world.backup_vnf_up[cursor:cursor + width].reshape(len(types[k]), sigma)
                if bsrv[k * per_pos + j]:
                    spare[types[k].start:types[k].stop] += block.sum(axis=1)
                cursor += width
    for k in range(N):
        down = int((~srv[:, k]).sum())
        alive = srv[:, k]
        for t in types[k]:
            demand = down + int((~vnf[alive, t]).sum())
            if demand > spare[t]:
                return False
    return True


@dataclass(frozen=True)
class Estimate:
    mean: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    successes: int

    def standard_error(self, p: float | None = None) -> float:
        p = self.mean if p is None else p
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials * trials))
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


def estimate(scenario: Scenario, trials: int, seed: int, workers: int = 1,
             backend: str | None = None) -> Estimate:
    """Monte Carlo success rate with a 95% Wilson interval.

    Trials are cut into fixed chunks independent of ``workers``, so the
    result depends only on ``(scenario, trials, seed)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    arrays = layout(scenario).arrays()
    chunks = [(lo, min(trials, lo + CHUNK)) for lo in range(0, trials, CHUNK)]

    def run(bounds):
        return kernels.count_successes(seed, bounds[0], bounds[1], arrays, backend)

    if workers <= 1 or len(chunks) == 1:
        hits = sum(run(c) for c in chunks)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, chunks))
    lo, hi = wilson_interval(hits, trials)
    return Estimate(hits / trials, lo, hi, trials, seed, hits)


def enumerate_exact(scenario: Scenario, backend: str | None = None) -> float:
    """Sum of probabilities of every successful up/down assignment."""
    lay = layout(scenario)
    if lay.n_components > MAX_ENUM_COMPONENTS:
        raise ValueError(f"{lay.n_components} components exceed the enumeration cap of {MAX_ENUM_COMPONENTS}")
    return kernels.enumerate_success(lay.arrays(), backend)


@dataclass(frozen=True, eq=False)
class SuccessPolynomial:
    """Exact success probability as a polynomial in the four reliabilities.

    ``counts[a, b, c, d]`` is the number of successful worlds in which ``a``
    phi-class, ``b`` phi_r-class, ``c`` upsilon-class and ``d``
    upsilon_r-class components are up.
    """

    counts: np.ndarray

    def __call__(self, params: ReliabilityParams) -> float:
        probs = params.as_tuple()
        terms = []
        for idx in zip(*np.nonzero(self.counts)):
            w = float(self.counts[idx])
            for c, k in enumerate(idx):
                size = self.counts.shape[c] - 1
                w *= probs[c] ** int(k) * (1.0 - probs[c]) ** (size - int(k))
            terms.append(w)
        return math.fsum(terms)


def success_polynomial(scenario: Scenario, backend: str | None = None) -> SuccessPolynomial:
    """Enumerate every world once and keep per-class up-counts of the successful ones.

    The result covers every reliability setting of the scenario's structure;
    it is subject to the same component cap as :func:`enumerate_exact`.
    """
    lay = layout(scenario)
    if lay.n_components > MAX_ENUM_COMPONENTS:
        raise ValueError(f"{lay.n_components} components exceed the enumeration cap of {MAX_ENUM_COMPONENTS}")
    return SuccessPolynomial(kernels.class_counts(lay.param_class, lay.arrays(), backend))


def _count_pmf(prob_hit: list[np.ndarray], rows: int) -> np.ndarray:
    """Distribution of the number of hits among independent Bernoullis (per row)."""
    pmf = np.zeros((rows, len(prob_hit) + 1))
    pmf[:, 0] = 1.0
    for j, q in enumerate(prob_hit, start=1):
        nxt = pmf[:, :j + 1] * (1.0 - q)[:, None]
        nxt[:, 1:] += pmf[:, :j] * q[:, None]
        pmf[:, :j + 1] = nxt
    return pmf


def exact_by_server_states(scenario: Scenario, block: int = 1 << 13,
                           backend: str | None = None) -> float:
    """Exact success probability, enumerating servers and convolving VNF counts.

    Every server up/down pattern is visited explicitly; given the pattern,
    VNF groups are independent and each needs P(unavailable actives <=
    available backups), computed from exact count distributions. Handles
    scenarios far beyond the brute-force component cap.
    """
    lay = layout(scenario)
    a_srv = np.arange(lay.n_active_servers)
    b_srv = np.arange(lay.n_backup_servers) + lay.n_active_servers + lay.n_active_vnfs
    server_comp = np.concatenate([a_srv, b_srv]).astype(np.int64)
    n_s = server_comp.size
    if n_s > MAX_ENUM_SERVERS:
        raise ValueError(f"{n_s} servers exceed the cap of {MAX_ENUM_SERVERS}")
    slot = {int(c): i for i, c in enumerate(server_comp)}
    sp = lay.probs[server_comp]
    u_act = lay.probs[lay.act_comp]
    u_bak = lay.probs[lay.bak_comp]
    if kernels._use_numba(backend):
        act_slot = np.array([slot.get(int(h), -1) for h in lay.act_host], dtype=np.int64)
        bak_slot = np.array([slot.get(int(h), -1) for h in lay.bak_host], dtype=np.int64)
        return float(kernels._factored_nb(np.ascontiguousarray(sp), np.ascontiguousarray(u_act),
                                          act_slot, lay.act_group, np.ascontiguousarray(u_bak),
                                          bak_slot, lay.bak_group, lay.n_groups))

    groups = []
    for g in range(lay.n_groups):
        act = [(float(u_act[j]), slot.get(int(lay.act_host[j]), -1))
               for j in np.flatnonzero(lay.act_group == g)]
        bak = [(float(u_bak[j]), slot.get(int(lay.bak_host[j]), -1))
               for j in np.flatnonzero(lay.bak_group == g)]
        groups.append((act, bak))

    bits = np.arange(n_s, dtype=np.int64)
    parts = []
    total = 1 << n_s
    for lo in range(0, total, block):
        masks = np.arange(lo, min(total, lo + block), dtype=np.int64)
        up = ((masks[:, None] >> bits[None, :]) & 1).astype(bool)
        rows = masks.size
        weight = np.where(up, sp[None, :], 1.0 - sp[None, :]).prod(axis=1)
        for act, bak in groups:
            # failure probability of each active VNF (certain if its host is down)
            fail = [np.where(up[:, h], 1.0 - p, 1.0) if h >= 0 else np.full(rows, 1.0 - p)
                    for p, h in act]
            work = [np.where(up[:, h], p, 0.0) if h >= 0 else np.full(rows, p)
                    for p, h in bak]
            d_cdf = np.cumsum(_count_pmf(fail, rows), axis=1)
            s_pmf = _count_pmf(work, rows)
            cols = np.minimum(np.arange(s_pmf.shape[1]), d_cdf.shape[1] - 1)
            weight = weight * (s_pmf * d_cdf[:, cols]).sum(axis=1)
        parts.append(float(weight.sum()))
    return math.fsum(parts)
