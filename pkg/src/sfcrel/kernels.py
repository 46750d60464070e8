"""Hot loops for the failure simulator.

A failure world is a flat boolean vector over all components (servers
first, then VNFs, active before backup). Every VNF belongs to a *group*:
the set of interchangeable replicas of one VNF type that one pool of
backup copies can serve. A world succeeds iff, for every group,

    unavailable active VNFs  <=  available backup VNFs

where an active VNF is unavailable if it or its host server is down, and a
backup VNF is available if it and its host server are up.

Randomness is counter based: component ``c`` of trial ``t`` draws
``mix64(mix64(key + (t+1)G) + (c+1)G)`` with ``key = mix64(seed)`` and
``G`` the 64-bit golden-ratio increment, so any trial can be regenerated
independently of how trials are split across workers.

Each kernel exists twice, as a numba ``@njit`` loop and as a vectorized
numpy routine; ``_accel.USE_NUMBA`` picks the default.
"""

from __future__ import annotations

import math

import numpy as np

from . import _accel
from ._accel import njit

MASK64 = (1 << 64) - 1
GAMMA_INT = 0x9E3779B97F4A7C15
M1_INT = 0xBF58476D1CE4E5B9
M2_INT = 0x94D049BB133111EB

GAMMA = np.uint64(GAMMA_INT)
M1 = np.uint64(M1_INT)
M2 = np.uint64(M2_INT)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
INV53 = 2.0**-53


def mix64_int(z: int) -> int:
    """SplitMix64 finalizer on Python ints."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * M1_INT) & MASK64
    z = ((z ^ (z >> 27)) * M2_INT) & MASK64
    return z ^ (z >> 31)


def seed_key(seed: int) -> int:
    return mix64_int(seed & MASK64)


def uniforms(seed: int, trial: int, n_components: int) -> np.ndarray:
    """Per-component uniforms in [0, 1) for one trial (reference path)."""
    key = seed_key(seed)
    tk = mix64_int(key + (trial + 1) * GAMMA_INT)
    out = np.empty(n_components)
    for c in range(n_components):
        out[c] = (mix64_int(tk + (c + 1) * GAMMA_INT) >> 11) * INV53
    return out


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> S30)) * M1
    z = (z ^ (z >> S27)) * M2
    return z ^ (z >> S31)


@njit(cache=True)
def _world_ok(up, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, demand, supply):
    demand[:] = 0
    supply[:] = 0
    for j in range(act_comp.shape[0]):
        h = act_host[j]
        if not up[act_comp[j]] or (h >= 0 and not up[h]):
            demand[act_group[j]] += 1
    any_demand = False
    for g in range(demand.shape[0]):
        if demand[g] > 0:
            any_demand = True
            break
    if not any_demand:
        return True
    for j in range(bak_comp.shape[0]):
        h = bak_host[j]
        if up[bak_comp[j]] and (h < 0 or up[h]):
            supply[bak_group[j]] += 1
    for g in range(demand.shape[0]):
        if demand[g] > supply[g]:
            return False
    return True


@njit(cache=True, nogil=True)
def _count_successes_nb(key, start, stop, probs, act_comp, act_host, act_group,
                        bak_comp, bak_host, bak_group, n_groups):
    C = probs.shape[0]
    up = np.empty(C, np.bool_)
    demand = np.empty(n_groups, np.int64)
    supply = np.empty(n_groups, np.int64)
    count = 0
    for t in range(start, stop):
        tk = _mix64(key + np.uint64(t + 1) * GAMMA)
        for c in range(C):
            x = _mix64(tk + np.uint64(c + 1) * GAMMA)
            up[c] = np.float64(x >> S11) * INV53 < probs[c]
        if _world_ok(up, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, demand, supply):
            count += 1
    return count


@njit(cache=True, nogil=True)
def _enumerate_nb(probs, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, n_groups):
    C = probs.shape[0]
    up = np.empty(C, np.bool_)
    demand = np.empty(n_groups, np.int64)
    supply = np.empty(n_groups, np.int64)
    total = 0.0
    carry = 0.0
    for mask in range(1 << C):
        w = 1.0
        for c in range(C):
            if (mask >> c) & 1:
                up[c] = True
                w *= probs[c]
            else:
                up[c] = False
                w *= 1.0 - probs[c]
        if w == 0.0:
            continue
        if _world_ok(up, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, demand, supply):
            # Neumaier summation: up to 2^24 terms of mixed magnitude
            s = total + w
            if abs(total) >= abs(w):
                carry += (total - s) + w
            else:
                carry += (w - s) + total
            total = s
    return total + carry


@njit(cache=True, nogil=True)
def _class_counts_nb(cls, act_comp, act_host, act_group, bak_comp, bak_host, bak_group,
                     n_groups, strides, size):
    C = cls.shape[0]
    up = np.empty(C, np.bool_)
    demand = np.empty(n_groups, np.int64)
    supply = np.empty(n_groups, np.int64)
    table = np.zeros(size, np.int64)
    for mask in range(1 << C):
        idx = 0
        for c in range(C):
            if (mask >> c) & 1:
                up[c] = True
                idx += strides[cls[c]]
            else:
                up[c] = False
        if _world_ok(up, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, demand, supply):
            table[idx] += 1
    return table


@njit(cache=True, nogil=True)
def _factored_nb(sp, act_p, act_slot, act_group, bak_p, bak_slot, bak_group, n_groups):
    n_s = sp.shape[0]
    width = max(act_p.shape[0], bak_p.shape[0]) + 1
    dpmf = np.empty(width)
    spmf = np.empty(width)
    total = 0.0
    carry = 0.0
    for mask in range(1 << n_s):
        w = 1.0
        for i in range(n_s):
            w *= sp[i] if (mask >> i) & 1 else 1.0 - sp[i]
        if w == 0.0:
            continue
        for g in range(n_groups):
            # distribution of unavailable actives
            nd = 0
            dpmf[0] = 1.0
            for j in range(act_p.shape[0]):
                if act_group[j] != g:
                    continue
                h = act_slot[j]
                q = 1.0 if (h >= 0 and not (mask >> h) & 1) else 1.0 - act_p[j]
                dpmf[nd + 1] = 0.0
                for k in range(nd + 1, 0, -1):
                    dpmf[k] = dpmf[k] * (1.0 - q) + dpmf[k - 1] * q
                dpmf[0] *= 1.0 - q
                nd += 1
            # distribution of available backups
            ns = 0
            spmf[0] = 1.0
            for j in range(bak_p.shape[0]):
                if bak_group[j] != g:
                    continue
                h = bak_slot[j]
                q = 0.0 if (h >= 0 and not (mask >> h) & 1) else bak_p[j]
                spmf[ns + 1] = 0.0
                for k in range(ns + 1, 0, -1):
                    spmf[k] = spmf[k] * (1.0 - q) + spmf[k - 1] * q
                spmf[0] *= 1.0 - q
                ns += 1
            # P(D <= S)
            cdf = 0.0
            ok = 0.0
            for k in range(ns + 1):
                if k <= nd:
                    cdf += dpmf[k]
                ok += spmf[k] * cdf
            w *= ok
            if w == 0.0:
                break
        s = total + w
        if abs(total) >= abs(w):
            carry += (total - s) + w
        else:
            carry += (w - s) + total
        total = s
    return total + carry


# ---------------------------------------------------------------- numpy path


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> S30)) * M1
    z = (z ^ (z >> S27)) * M2
    return z ^ (z >> S31)


def _worlds_ok_np(up, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, n_groups):
    """Vectorized success test; ``up`` has shape (worlds, components)."""
    rows = up.shape[0]
    failed = ~up[:, act_comp]
    hosted = act_host >= 0
    if hosted.any():
        failed[:, hosted] |= ~up[:, act_host[hosted]]
    demand = np.zeros((rows, n_groups), np.int64)
    supply = np.zeros((rows, n_groups), np.int64)
    for g in range(n_groups):
        demand[:, g] = failed[:, act_group == g].sum(axis=1)
    if bak_comp.size:
        avail = up[:, bak_comp].copy()
        hosted = bak_host >= 0
        if hosted.any():
            avail[:, hosted] &= up[:, bak_host[hosted]]
        for g in range(n_groups):
            supply[:, g] = avail[:, bak_group == g].sum(axis=1)
    return (demand <= supply).all(axis=1)


def _count_successes_np(key, start, stop, probs, act_comp, act_host, act_group,
                        bak_comp, bak_host, bak_group, n_groups, block=4096):
    C = probs.shape[0]
    offsets = (np.arange(1, C + 1, dtype=np.uint64) * GAMMA)[None, :]
    count = 0
    for lo in range(start, stop, block):
        hi = min(stop, lo + block)
        t = np.arange(lo + 1, hi + 1, dtype=np.uint64)
        tk = _mix64_np(np.uint64(key) + t * GAMMA)
        x = _mix64_np(tk[:, None] + offsets)
        up = (x >> S11).astype(np.float64) * INV53 < probs[None, :]
        count += int(_worlds_ok_np(up, act_comp, act_host, act_group,
                                   bak_comp, bak_host, bak_group, n_groups).sum())
    return count


def _enumerate_np(probs, act_comp, act_host, act_group, bak_comp, bak_host, bak_group,
                  n_groups, block=1 << 15):
    C = probs.shape[0]
    bits = np.arange(C, dtype=np.int64)
    partial = []
    for lo in range(0, 1 << C, block):
        masks = np.arange(lo, min(1 << C, lo + block), dtype=np.int64)
        up = ((masks[:, None] >> bits[None, :]) & 1).astype(bool)
        w = np.where(up, probs[None, :], 1.0 - probs[None, :]).prod(axis=1)
        ok = _worlds_ok_np(up, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, n_groups)
        partial.append(float(w[ok].sum()))
    return math.fsum(partial)


def _class_counts_np(cls, act_comp, act_host, act_group, bak_comp, bak_host, bak_group,
                     n_groups, strides, size, block=1 << 15):
    C = cls.shape[0]
    bits = np.arange(C, dtype=np.int64)
    weights = strides[cls]
    table = np.zeros(size, np.int64)
    for lo in range(0, 1 << C, block):
        masks = np.arange(lo, min(1 << C, lo + block), dtype=np.int64)
        up = ((masks[:, None] >> bits[None, :]) & 1).astype(bool)
        ok = _worlds_ok_np(up, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, n_groups)
        table += np.bincount(up[ok].astype(np.int64) @ weights, minlength=size)
    return table


# ---------------------------------------------------------------- dispatch


def _use_numba(backend: str | None) -> bool:
    if backend is None:
        return _accel.USE_NUMBA
    if backend == "numba":
        if not _accel.HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        return True
    if backend == "numpy":
        return False
    raise ValueError(f"unknown backend {backend!r}")


def count_successes(seed: int, start: int, stop: int, arrays, backend: str | None = None) -> int:
    """Number of successful trials with index in ``[start, stop)``."""
    key = seed_key(seed)
    if _use_numba(backend):
        return int(_count_successes_nb(np.uint64(key), start, stop, *arrays))
    return _count_successes_np(key, start, stop, *arrays)


def enumerate_success(arrays, backend: str | None = None) -> float:
    """Total probability of all successful worlds (exhaustive)."""
    if _use_numba(backend):
        return float(_enumerate_nb(*arrays))
    return _enumerate_np(*arrays)


def world_ok(up: np.ndarray, arrays) -> bool:
    """Generic group test for a single world (used to cross-check predicates)."""
    probs, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, n_groups = arrays
    return bool(_worlds_ok_np(np.asarray(up, bool)[None, :], act_comp, act_host, act_group,
                              bak_comp, bak_host, bak_group, n_groups)[0])


def class_counts(param_class: np.ndarray, arrays, backend: str | None = None) -> np.ndarray:
    """Successful worlds tallied by how many components of each class are up.

    Returns an int64 array of shape ``(k0+1, k1+1, k2+1, k3+1)`` where ``kc``
    is the number of components in class ``c``.
    """
    _, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, n_groups = arrays
    cls = np.asarray(param_class, dtype=np.int64)
    shape = tuple(int((cls == c).sum()) + 1 for c in range(4))
    strides = np.array([shape[1] * shape[2] * shape[3], shape[2] * shape[3], shape[3], 1], np.int64)
    size = int(np.prod(shape))
    fn = _class_counts_nb if _use_numba(backend) else _class_counts_np
    table = fn(cls, act_comp, act_host, act_group, bak_comp, bak_host, bak_group, n_groups, strides, size)
    return np.asarray(table).reshape(shape)
