"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line; the same lines are
repeated in the pytest terminal summary.  Run directly with
``python3 tests/test_acceptance.py`` to print just those lines.
"""

import filecmp
import math
import statistics
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import gamma_ref, q_ref  # noqa: E402
from robust_dff.core import (  # noqa: E402
    EXCEEDS_MAX,
    expand_representation,
    hypercube_lower_bound_instance,
    min_exception_free_size,
    validate_instance,
)
from robust_dff.harness import run_config, run_trial, sweep  # noqa: E402
from robust_dff.learner import RobustDFF  # noqa: E402
from robust_dff.stochastic import gamma, q  # noqa: E402
from robust_dff.streams import gen_random_instance, lower_bound_stream  # noqa: E402

RESULTS: dict[int, str] = {}

ROBUST_LEMMAS = ("lemma1", "lemma2", "lemma3", "lemma4", "lemma5", "counter-cap")
ADVERSARIAL = {
    "instance": {"m": {"min": 1, "max": 8}, "d": {"min": 4, "max": 40}, "k": {"min": 0, "max": 5},
                 "s": {"min": 0, "max": 5}, "labels": {"min": 2, "max": 4}, "examples_per_component": 4},
    "teacher": {"strategy": ["shared-feature", "random-fresh", "label-flip-only"]},
    "stream": {"mode": "adversarial", "n": 300, "placement": ["front", "back", "random", "burst", "spread"]},
    "learner": {"kind": "robust"},
}
PERFECT = {
    "instance": {"m": {"min": 1, "max": 8}, "d": {"min": 4, "max": 40}, "k": 0,
                 "labels": {"min": 2, "max": 8}, "examples_per_component": 4},
    "stream": {"mode": "adversarial", "n": 300},
    "learner": {"kind": "robust", "k": 0, "s": 0},
}
STOCHASTIC = {
    "instance": {"m": {"min": 1, "max": 5}, "d": {"min": 8, "max": 16}, "k": {"min": 1, "max": 3},
                 "labels": {"min": 2, "max": 3}, "examples_per_component": 6},
    "stream": {"mode": "stochastic", "n": 50_000, "epsilon": 0.01, "sigma": 0.01,
               "checkpoints": [1000, 5000, 10000, 50000]},
    "learner": {"kind": "stochastic", "epsilon": 0.01, "sigma": 0.01, "delta": 0.05},
}


def _record(n, title, ok, detail, seconds):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} -- {detail} [{seconds:.1f}s]"
    RESULTS[n] = line
    print(line)
    return ok


def criterion_1():
    """Mistake bound on adversarial streams, 1000 random instances."""
    worst, violations, presented, dropped, strategies, placements = 1.0, 0, 0, 0, set(), set()
    for seed in range(1000):
        _, r, meta = run_config(ADVERSARIAL, seed, record=False)
        b = r.bounds["thm3"]
        violations += not b["passed"]
        worst = min(worst, b["margin"] / b["bound"])
        presented += r.exceptions_presented
        dropped += r.exceptions_dropped
        strategies.add(meta["strategy"])
        placements.add(meta["placement"])
    ok = violations == 0 and len(strategies) == 3 and len(placements) == 5
    return ok, (f"{violations} violations; min relative margin {worst:.3f}; "
                f"{presented} exceptions presented, {dropped} withheld by the similarity budget")


def criterion_2():
    """Perfect annotation: mistakes <= m(m+1) and no invariant violations."""
    over, flagged = 0, 0
    for seed in range(1000):
        _, r, _ = run_config(PERFECT, seed, record=False)
        m = r.params["m"]
        over += r.mistakes > m * (m + 1)
        flagged += any(r.violations[c] for c in ROBUST_LEMMAS)
        flagged += not (r.bounds["lemma4"]["passed"] and r.bounds["lemma5"]["passed"])
    return over == 0 and flagged == 0, f"{over} seeds above m(m+1); {flagged} seeds with invariant violations"


def criterion_3():
    """Hidden-assignment streams: mean mistakes >= m(m-1)/16, each seed within the upper bound."""
    parts, ok = [], True
    for m in (4, 6, 8):
        mistakes, over = [], 0
        for seed in range(500):
            inst, order, _ = lower_bound_stream(m, seed)
            _, r = run_trial(inst, order, RobustDFF(m), record=False)
            mistakes.append(r.mistakes)
            over += not r.bounds["thm3"]["passed"]
        mean = statistics.mean(mistakes)
        ok &= mean >= m * (m - 1) / 16 and over == 0
        parts.append(f"m={m}: mean {mean:.3f} >= {m * (m - 1) / 16}, {over} over bound")
    return ok, "; ".join(parts)


def criterion_4():
    """Absorbing exceptions into components: <= m + d*k components, none left, valid."""
    rng = np.random.default_rng(2024)
    bad, biggest = 0, 0.0
    for seed in range(200):
        m = int(rng.integers(1, 5))
        d = max(int(rng.integers(3, 9)), m * (m - 1) // 2 + 2)
        k = int(rng.integers(0, 4))
        inst = gen_random_instance(m, d, 3, k, 0, 4, seed)
        rep, comp_of = expand_representation(inst)
        out = inst.with_representation(rep, comp_of)
        bad += rep.m > m + d * k or bool(out.exceptions) or not validate_instance(out).ok
        biggest = max(biggest, rep.m / (m + d * k))
    return bad == 0, f"{bad} failing cases of 200; largest size/bound ratio {biggest:.2f}"


def criterion_5():
    """Hypercube with a single relabelled origin needs exactly d+1 components."""
    parts, ok = [], True
    for d in (2, 3):
        inst = hypercube_lower_bound_instance(d)
        rep, comp_of = expand_representation(inst)
        built = rep.m
        valid = validate_instance(inst.with_representation(rep, comp_of)).ok
        none_smaller = min_exception_free_size(inst, d) == EXCEEDS_MAX
        minimum = min_exception_free_size(inst, d + 1)
        ok &= built == d + 1 and valid and none_smaller and minimum == d + 1
        parts.append(f"d={d}: built {built}, minimum {minimum}, none of size <= {d}: {none_smaller}")
    return ok, "; ".join(parts)


def criterion_6():
    """Stochastic learner over 200 seeds of 50,000 rounds."""
    reports = [run_config(STOCHASTIC, seed, record=False)[1] for seed in range(200)]
    n = len(reports)
    rule_cap = sum(r.bounds["lemma10"]["passed"] for r in reports) / n
    structure = sum(all(r.ok(c) for c in ("lemma6", "lemma7", "lemma8")) for r in reports) / n
    mass = sum(r.ok("lemma9") for r in reports) / n
    early = statistics.median(r.rate_curve[5000] for r in reports)
    late = statistics.median(r.rate_curve[50000] for r in reports)
    ok = rule_cap >= 0.95 and structure >= 0.95 and mass >= 0.95 and late < early
    by_m = {}
    for r in reports:
        by_m.setdefault(r.params["m"], []).append(r.bounds["lemma10"]["passed"])
    per_m = ", ".join(f"m={m}: {sum(v)}/{len(v)}" for m, v in sorted(by_m.items()))
    return ok, (f"(a) rule cap {rule_cap:.3f} ({per_m}); (b) structural invariants {structure:.3f}; "
                f"(c) outside mass >= 2eps {mass:.3f}; (d) median rate {early:.4f} at 5k -> {late:.4f} at 50k")


def criterion_7():
    """Threshold functions match a 50-digit evaluation and grow with t."""
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(2000):
        eps = float(rng.uniform(0, 0.25))
        delta = float(rng.uniform(1e-6, math.exp(-2)))
        t = int(rng.integers(1, 10**6 + 1))
        r = int(rng.integers(0, t + 1))
        worst = max(worst, abs(q(eps, t, delta) / float(q_ref(eps, t, delta)) - 1))
        g = float(gamma_ref(eps, r, t, delta))
        worst = max(worst, abs(gamma(eps, r, t, delta) / g - 1))
    monotone = True
    ts = range(1, 10**6 + 1)
    for eps, delta in ((0.0, 0.05), (0.01, 0.05), (0.25, 1e-4)):
        prev = -math.inf
        for t in ts:
            v = q(eps, t, delta)
            if v <= prev:
                monotone = False
                break
            prev = v
    for eps, r, delta in ((0.01, 1, 0.05), (0.25, 1000, 0.01)):
        prev = -math.inf
        for t in ts:
            v = gamma(eps, r, t, delta)
            if v < prev:
                monotone = False
                break
            prev = v
    return worst <= 1e-9 and monotone, f"max relative error {worst:.2e}; monotone on [1, 1e6]: {monotone}"


def criterion_8():
    """Re-running a sweep gives byte-identical transcripts and metrics."""
    configs = {
        "adversarial": dict(ADVERSARIAL, stream=dict(ADVERSARIAL["stream"], n=120)),
        "adaptive": dict(ADVERSARIAL, stream={"mode": "adaptive", "n": 120}),
        "stochastic": dict(STOCHASTIC, stream=dict(STOCHASTIC["stream"], n=2000, checkpoints=[1000])),
        "lower-bound": {"instance": {"kind": "lower-bound", "m": 5}, "stream": {"mode": "lower-bound"}},
    }
    formats = ("csv", "json", "transcript")
    with tempfile.TemporaryDirectory() as tmp:
        a, b, c = (Path(tmp) / n for n in "abc")
        sweep(configs, range(6), 1, a, formats)
        sweep(configs, range(6), 1, b, formats)
        sweep(configs, range(6), 2, c, formats)
        files = sorted(str(p.relative_to(a)) for p in a.rglob("*") if p.is_file())
        same = all(filecmp.cmp(a / f, d / f, shallow=False) for d in (b, c) for f in files)
        n_transcripts = len(list((a / "transcripts").iterdir()))
    return same and n_transcripts == 24, f"{len(files)} files compared across 3 runs (1 and 2 workers): identical={same}"


CRITERIA = {
    1: ("mistake bound, adversarial streams", criterion_1),
    2: ("perfect-annotation recovery", criterion_2),
    3: ("hidden-assignment lower bound", criterion_3),
    4: ("exception absorption size", criterion_4),
    5: ("hypercube minimum size", criterion_5),
    6: ("stochastic learner statistics", criterion_6),
    7: ("threshold function accuracy", criterion_7),
    8: ("sweep determinism", criterion_8),
}


def _run(n):
    title, fn = CRITERIA[n]
    start = time.perf_counter()
    ok, detail = fn()
    return _record(n, title, ok, detail, time.perf_counter() - start)


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    assert _run(n), RESULTS[n]


if __name__ == "__main__":
    results = [_run(n) for n in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
