"""Simulator checks: exact limits, determinism, mode agreement, moment recovery."""
import math

import numpy as np
import pytest
from numpy.random import Generator, PCG64, SeedSequence

from coded_aoi import (
    MDS,
    InsufficientCycles,
    MultiMDS,
    Repetition,
    SystemParams,
    Uncoded,
    age_mds,
    jackknife_ci,
    run,
    run_parallel,
    service_moments,
)
from coded_aoi.simulate import _simulate_rep, batch_means_ci


def params(lam=1.0, c=1.0, mu=1.0, n=100):
    return SystemParams(lam, c, mu, n)


def zero_service(rng, size):
    return np.zeros(size)


def test_zero_service_gives_twice_inverse_rate():
    for lam in (0.5, 1.0, 2.0):
        r = run(Uncoded(), params(lam=lam, n=1), 200_000, seed=42,
                service_sampler=zero_service)
        assert abs(r.mean_age - 2 / lam) <= r.ci95_halfwidth
        assert r.empirical_es == 0.0


def test_insufficient_cycles():
    with pytest.raises(InsufficientCycles):
        run(Uncoded(), params(n=1), 10, seed=1)


def test_sampling_validation_applies():
    with pytest.raises(ValueError, match="divide"):
        run(Repetition(33), params(n=100), 1000, seed=1)


def test_run_is_deterministic():
    a = run(MDS(69), params(), 5000, seed=7)
    b = run(MDS(69), params(), 5000, seed=7)
    assert repr(a) == repr(b)


def test_run_parallel_is_deterministic_and_extends_run():
    a = run_parallel(MDS(69), params(), 5000, 4, seed=7)
    b = run_parallel(MDS(69), params(), 5000, 4, seed=7)
    assert repr(a) == repr(b)
    assert repr(run_parallel(MDS(69), params(), 5000, 1, seed=7)) == repr(
        run(MDS(69), params(), 5000, seed=7))


def test_replications_pool_consistently():
    pooled = run_parallel(MDS(69), params(), 12_500, 8, seed=8)
    single = run(MDS(69), params(), 100_000, seed=9)
    joint = math.hypot(pooled.ci95_halfwidth, single.ci95_halfwidth)
    assert abs(pooled.mean_age - single.mean_age) <= joint
    assert pooled.cycles == 100_000


def test_fast_and_full_stream_agree():
    for scheme in (MDS(69), Uncoded()):
        a = run(scheme, params(), 100_000, seed=11, mode="fast")
        b = run(scheme, params(), 100_000, seed=12, mode="full_stream")
        joint = math.hypot(a.ci95_halfwidth, b.ci95_halfwidth)
        assert abs(a.mean_age - b.mean_age) <= joint
        assert a.dropped_fraction is None
        assert b.dropped_fraction is not None


def test_full_stream_delay_and_idle_wait_are_exponential_means():
    r = run(MDS(69), params(), 100_000, seed=11, mode="full_stream")
    se = 1.0 / math.sqrt(100_000)
    assert abs(r.empirical_ed - 1.0) < 3 * se
    assert abs(r.empirical_ez - 1.0) < 3 * se


def test_fast_mode_idle_wait_matches_rate():
    p = params(lam=2.0)
    r = run(MDS(69), p, 100_000, seed=14)
    se = 0.5 / math.sqrt(100_000)
    assert abs(r.empirical_ed - 0.5) < 3 * se
    assert abs(r.empirical_ez - 0.5) < 3 * se


def test_full_stream_drop_fraction_consistent():
    for scheme in (Uncoded(), MDS(69)):
        r = run(scheme, params(), 100_000, seed=12, mode="full_stream")
        es = service_moments(scheme, params()).es
        predicted = es / (es + 1.0)
        assert 0.0 < r.dropped_fraction < 1.0
        se = math.sqrt(predicted / 100_000)
        assert abs(r.dropped_fraction - predicted) < 4 * se


def test_empirical_service_moments_match_analytic():
    p = params()
    for scheme in (Uncoded(), Repetition(50), MDS(69)):
        m = service_moments(scheme, p)
        r = run(scheme, p, 100_000, seed=21)
        se = math.sqrt((m.es2 - m.es**2) / 100_000)
        assert abs(r.empirical_es - m.es) < 3 * se


def test_multi_message_moment_gap_shrinks_with_pool():
    # the analytic service moments use the asymptotic level split; the
    # sampled gap is a finite-pool effect and drops below 1% by n = 1000
    gaps = {}
    for n, k in ((100, 120), (1000, 1200)):
        p = params(n=n)
        m = service_moments(MultiMDS(k, 2), p)
        r = run(MultiMDS(k, 2), p, 100_000, seed=5)
        gaps[n] = abs(r.empirical_es - m.es) / m.es
    assert gaps[1000] < 0.01


def test_return_triggered_policy_matches_analytic():
    p = params()
    r = run(MDS(69), p, 200_000, seed=21, policy="return-triggered")
    assert abs(r.mean_age - age_mds(p, 69).delta) <= 1.5 * r.ci95_halfwidth


def test_simulated_age_tracks_analytic_quickly():
    p = params()
    for scheme, ana in [(Uncoded(), None), (MDS(69), None)]:
        expected = {Uncoded: 2.0637534065120195, MDS: 2.0317836502582427}[type(scheme)]
        r = run(scheme, p, 100_000, seed=33)
        assert abs(r.mean_age - expected) / expected < 0.01


def test_jackknife_matches_batch_means_scale():
    rng = Generator(PCG64(SeedSequence(3)))
    rep = _simulate_rep(MDS(69), params(), rng, 60_000, "fast", "zero-wait", 30, None)
    bm = batch_means_ci(rep.area_batches, rep.time_batches)
    jk = jackknife_ci(rep.area_batches, rep.time_batches)
    assert 0.5 < jk / bm < 2.0


def test_bad_mode_and_policy_rejected():
    with pytest.raises(ValueError):
        run(MDS(69), params(), 1000, seed=1, mode="warp")
    with pytest.raises(ValueError):
        run(MDS(69), params(), 1000, seed=1, policy="psychic")
