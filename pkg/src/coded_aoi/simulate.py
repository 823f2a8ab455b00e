"""Monte Carlo simulation of the full update pipeline.

The source transmits updates over an exponential-delay link; the worker
pool drops arrivals while busy and serves each accepted update with the
configured scheme.  The destination's age is a sawtooth that resets to
(delay + service time) of an update the moment its result is returned, and
the long-run average is estimated cycle by cycle as total sawtooth area
over total elapsed time.

Two modes:

    fast         draws the per-cycle triple (delay D, service S, idle wait Z)
                 directly, using the fact that the residual wait for the next
                 arrival after an exponential interarrival process is again
                 exponential.
    full_stream  generates the arrival stream the pool actually sees (every
                 transmission, including the ones the busy pool throws away,
                 each carrying the age it accumulated in transit) and reads
                 D, S, Z off the event sequence: the idle wait is measured
                 between real events instead of being drawn from the
                 residual-exponential shortcut.  Also records the
                 dropped-arrival fraction.

The alternative source policy "return-triggered" (send the next update when
the processed result comes back, rather than on acceptance of the previous
transmission) is available for empirical comparison; nothing is ever
dropped under it, so both modes coincide there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from numpy.random import Generator, PCG64, SeedSequence
from scipy import stats as sps

from .schemes import Scheme, SystemParams, sample_service_batch, validate

CHUNK = 1 << 14
DEFAULT_BATCHES = 30

SeedLike = Union[int, SeedSequence]
ServiceSampler = Callable[[Generator, int], np.ndarray]


class InsufficientCycles(ValueError):
    """Fewer cycles than confidence-interval batches."""


@dataclass(frozen=True)
class SimReport:
    """Empirical age estimate with its 95% confidence half-width.

    empirical_es/es2/ed/ez are the per-cycle sample moments of service
    time, squared service time, transmission delay, and idle wait.
    dropped_fraction is populated in full_stream mode only.
    """

    mean_age: float
    ci95_halfwidth: float
    cycles: int
    empirical_es: float
    empirical_es2: float
    empirical_ed: float
    empirical_ez: float
    seed: int
    dropped_fraction: Optional[float] = None


@dataclass
class _RepStats:
    area_batches: np.ndarray
    time_batches: np.ndarray
    sum_s: float
    sum_s2: float
    sum_d: float
    sum_z: float
    cycles: int
    arrivals: int = 0
    dropped: int = 0


def _exp_batch(rate: float, rng: Generator, size: int) -> np.ndarray:
    # inverse CDF on 1 - U with U in [0, 1), so log never sees 0
    return -np.log1p(-rng.random(size)) / rate


def _service_array(scheme: Scheme, params: SystemParams, rng: Generator,
                   count: int, sampler: Optional[ServiceSampler]) -> np.ndarray:
    # cap the per-chunk scratch matrix at ~4M doubles; the chunk size never
    # changes the drawn values, only how many rows are materialized at once
    width = params.nworkers * getattr(scheme, "load", 1)
    chunk = max(1, min(CHUNK, (1 << 22) // width))
    out = np.empty(count)
    for a in range(0, count, chunk):
        b = min(a + chunk, count)
        if sampler is not None:
            out[a:b] = sampler(rng, b - a)
        else:
            out[a:b] = sample_service_batch(scheme, params, rng, b - a)
    return out


def _batch_edges(cycles: int, batches: int) -> np.ndarray:
    return (np.arange(batches) * cycles) // batches


def _fast_cycles(scheme, params, rng, cycles, policy, sampler):
    lam = params.arrival_rate
    s = _service_array(scheme, params, rng, cycles + 1, sampler)
    if policy == "return-triggered":
        d = _exp_batch(lam, rng, cycles + 1)
        d_used, z = d[:-1], d[1:]
    else:
        d_used = _exp_batch(lam, rng, cycles)
        z = _exp_batch(lam, rng, cycles)
    v = d_used + s[:-1]
    length = z + s[1:]
    return s, d_used, z, v, length


def _stream_cycles(scheme, params, rng, cycles, sampler):
    lam = params.arrival_rate
    s = _service_array(scheme, params, rng, cycles + 1, sampler)
    d_used = np.empty(cycles)
    z = np.empty(cycles)
    dropped = 0

    buf = _exp_batch(lam, rng, 2 * CHUNK)
    pos = 0

    def draw() -> float:
        nonlocal buf, pos
        if pos == len(buf):
            buf = _exp_batch(lam, rng, 2 * CHUNK)
            pos = 0
        pos += 1
        return buf[pos - 1]

    # Each arrival consumes two exponentials: the interarrival gap and the
    # transit age the packet carries.  The first update finds the pool idle
    # by construction.
    t = draw()
    d_cur = draw()
    completion = t + s[0]
    for j in range(cycles):
        while True:
            t += draw()
            age = draw()
            if t >= completion:
                break
            dropped += 1
        d_used[j] = d_cur
        z[j] = t - completion
        d_cur = age
        completion = t + s[j + 1]
    v = d_used + s[:-1]
    length = z + s[1:]
    arrivals = cycles + 1 + dropped
    return s, d_used, z, v, length, arrivals, dropped


def _simulate_rep(scheme: Scheme, params: SystemParams, rng: Generator,
                  cycles: int, mode: str, policy: str, batches: int,
                  sampler: Optional[ServiceSampler]) -> _RepStats:
    arrivals = dropped = 0
    if mode == "full_stream" and policy != "return-triggered":
        s, d_used, z, v, length, arrivals, dropped = _stream_cycles(
            scheme, params, rng, cycles, sampler)
    else:
        s, d_used, z, v, length = _fast_cycles(
            scheme, params, rng, cycles, policy, sampler)
    areas = length * (v + 0.5 * length)
    edges = _batch_edges(cycles, batches)
    s_used = s[:-1]
    return _RepStats(
        area_batches=np.add.reduceat(areas, edges),
        time_batches=np.add.reduceat(length, edges),
        sum_s=float(s_used.sum()),
        sum_s2=float((s_used * s_used).sum()),
        sum_d=float(d_used.sum()),
        sum_z=float(z.sum()),
        cycles=cycles,
        arrivals=arrivals,
        dropped=dropped,
    )


def batch_means_ci(area_batches: np.ndarray, time_batches: np.ndarray) -> float:
    """95% half-width for the ratio estimator from batch means."""
    nb = len(area_batches)
    ratios = area_batches / time_batches
    return float(sps.t.ppf(0.975, nb - 1) * ratios.std(ddof=1) / math.sqrt(nb))


def jackknife_ci(area_batches: np.ndarray, time_batches: np.ndarray) -> float:
    """95% half-width for the ratio estimator by leave-one-batch-out jackknife.

    Cross-check for batch_means_ci; both should give comparable widths.
    """
    nb = len(area_batches)
    a_tot, t_tot = area_batches.sum(), time_batches.sum()
    loo = (a_tot - area_batches) / (t_tot - time_batches)
    se = math.sqrt((nb - 1) / nb * ((loo - loo.mean()) ** 2).sum())
    return float(sps.t.ppf(0.975, nb - 1) * se)


def _root_seq(seed: SeedLike) -> SeedSequence:
    return seed if isinstance(seed, SeedSequence) else SeedSequence(seed)


def run_parallel(scheme: Scheme, params: SystemParams, cycles_per_rep: int,
                 reps: int, seed: SeedLike, mode: str = "fast",
                 policy: str = "zero-wait", batches: int = DEFAULT_BATCHES,
                 service_sampler: Optional[ServiceSampler] = None) -> SimReport:
    """Run independent replications on split substreams and pool the cycles.

    The replications draw from SeedSequence children of ``seed`` in
    replication order, so the pooled report depends only on
    (seed, reps, cycles_per_rep), not on execution interleaving.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if mode not in ("fast", "full_stream"):
        raise ValueError(f"mode must be 'fast' or 'full_stream', got {mode!r}")
    if policy not in ("zero-wait", "return-triggered"):
        raise ValueError(f"policy must be 'zero-wait' or 'return-triggered', got {policy!r}")
    if cycles_per_rep < batches:
        raise InsufficientCycles(
            f"need at least {batches} cycles per replication, got {cycles_per_rep}")
    if service_sampler is None:
        validate(scheme, params, sampling=True)

    root = _root_seq(seed)
    stats = [
        _simulate_rep(scheme, params, Generator(PCG64(child)), cycles_per_rep,
                      mode, policy, batches, service_sampler)
        for child in root.spawn(reps)
    ]
    area = np.concatenate([r.area_batches for r in stats])
    time = np.concatenate([r.time_batches for r in stats])
    cycles = sum(r.cycles for r in stats)
    arrivals = sum(r.arrivals for r in stats)
    dropped = sum(r.dropped for r in stats)
    frac = dropped / arrivals if arrivals else None
    entropy = root.entropy
    return SimReport(
        mean_age=float(area.sum() / time.sum()),
        ci95_halfwidth=batch_means_ci(area, time),
        cycles=cycles,
        empirical_es=sum(r.sum_s for r in stats) / cycles,
        empirical_es2=sum(r.sum_s2 for r in stats) / cycles,
        empirical_ed=sum(r.sum_d for r in stats) / cycles,
        empirical_ez=sum(r.sum_z for r in stats) / cycles,
        seed=entropy if isinstance(entropy, int) else hash(entropy),
        dropped_fraction=frac,
    )


def run(scheme: Scheme, params: SystemParams, cycles: int, seed: SeedLike,
        mode: str = "fast", policy: str = "zero-wait",
        batches: int = DEFAULT_BATCHES,
        service_sampler: Optional[ServiceSampler] = None) -> SimReport:
    """Single-replication simulation; see run_parallel for the contract."""
    return run_parallel(scheme, params, cycles, 1, seed, mode=mode,
                        policy=policy, batches=batches,
                        service_sampler=service_sampler)
