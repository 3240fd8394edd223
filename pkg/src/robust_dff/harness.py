"""Experiment harness: protocol loop, invariant auditing, bounds, sweeps.

The harness holds ground truth, so every structural property the analysis
relies on can be checked as the run goes.  Violations are recorded as data
and never raised, because the stochastic guarantees are statements about how
often they happen across seeds.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .core import Instance, _uniformly, instance_from_dict
from .learner import RobustDFF
from .stochastic import StRoDFF, rule_budget
from .streams import (
    AdaptiveAdversary,
    StochasticSampler,
    adversarial_stream,
    gen_random_instance,
    lower_bound_stream,
)
from .teacher import Teacher

__all__ = [
    "TranscriptRow",
    "TrialReport",
    "run_trial",
    "verify_bounds",
    "thm3_bound",
    "lemma5_bound",
    "build_trial",
    "run_config",
    "sweep",
    "SweepResult",
    "ROBUST_CHECKS",
    "STOCHASTIC_CHECKS",
    "OUTPUT_ENV",
]

log = logging.getLogger(__name__)

OUTPUT_ENV = "ROBUST_DFF_OUTPUT_DIR"
ROBUST_CHECKS = ("lemma1", "lemma2", "lemma3", "lemma4", "lemma5", "counter-cap",
                 "separation", "pair-cache", "s-budget")
STOCHASTIC_CHECKS = ("lemma6", "lemma7", "lemma8", "lemma9", "lemma10",
                     "separation", "pair-cache")
MAX_DETAILS = 20


def thm3_bound(m: int, k: int, s: int) -> int:
    return (m + k) * ((s + 1) * (m - 1) + k + 2)


def lemma5_bound(m: int, k: int, s: int) -> int:
    return (s + 1) * (m - 1) + k + 1


@dataclass
class TranscriptRow:
    t: int
    example: int
    rule: Any  # rule id, "default", or None on the initial row
    predicted: int | None
    explanation: int | None
    correct: bool
    feedback_label: int | None
    feedback_feature: int | None
    feedback_polarity: bool | None
    delta: str
    audit: str | None
    case: str | None

    def to_json(self) -> str:
        return json.dumps(asdict(self))


@dataclass
class TrialReport:
    learner: str
    params: dict
    n: int = 0
    mistakes: int = 0
    rules_created: int = 0
    rules_deleted: int = 0
    rule_mistakes: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)
    violation_details: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    exceptions_presented: int = 0
    exceptions_dropped: int = 0
    max_similar: int = 0
    max_similar_mass: float | None = None
    rate_curve: dict = field(default_factory=dict)
    creation_outside_mass: list = field(default_factory=list)
    error: str | None = None

    def ok(self, check: str) -> bool:
        return self.violations.get(check, 0) == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rule_mistakes"] = {str(k): v for k, v in sorted(self.rule_mistakes.items())}
        d["rate_curve"] = {str(k): v for k, v in sorted(self.rate_curve.items())}
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "TrialReport":
        data = dict(data)
        data["rule_mistakes"] = {int(k): v for k, v in data.get("rule_mistakes", {}).items()}
        data["rate_curve"] = {int(k): v for k, v in data.get("rate_curve", {}).items()}
        return cls(**data)


class _Checker:
    """Ground-truth invariant checks, driven by learner state changes."""

    def __init__(self, instance: Instance, learner, report: TrialReport, weights=None):
        self.inst = instance
        self.learner = learner
        self.report = report
        self.weights = weights
        self.stochastic = isinstance(learner, StRoDFF)
        rep = instance.representation
        ex = instance.examples
        full = (1 << instance.d) - 1
        self.masks = []
        for c in rep.components:
            a, o = full, 0
            for x in c.members:
                a &= ex[x].code
                o |= ex[x].code
            self.masks.append((a, o))
        self.clean_comps = {instance.component_of[x] for x in ex if x not in instance.exceptions}
        names = STOCHASTIC_CHECKS if self.stochastic else ROBUST_CHECKS
        report.violations = {name: 0 for name in names}
        self.names = ("lemma6", "lemma7", "lemma8") if self.stochastic else ("lemma1", "lemma2", "lemma3")
        if not self.stochastic:
            m, k, s = learner.m, learner.k, learner.s
            self.rule_cap = lemma5_bound(m, k, s)
            self.create_cap = m + k

    def flag(self, check: str, t: int, detail: str) -> None:
        self.report.violations[check] = self.report.violations.get(check, 0) + 1
        if len(self.report.violation_details) < MAX_DETAILS:
            snapshot = [repr(r) for r in self.learner.rules_]
            self.report.violation_details.append({"check": check, "t": t, "detail": detail, "rules": snapshot})

    # -- lemma-level properties ---------------------------------------------
    def rule_sound(self, rule, t: int) -> None:
        """Clean rules cover their whole component, and each literal is justified."""
        rep_id = rule.representative.id
        if rep_id in self.inst.exceptions:
            return
        home = self.inst.component_of[rep_id]
        a, o = self.masks[home]
        pos = rule.value
        neg = rule.mask & ~rule.value
        if (a & pos) != pos or (o & neg):
            self.flag(self.names[0], t, f"rule {rule.id} does not cover component {home}")
        for lit in rule.conjunction:
            phi = lit.negate()
            if not any(_uniformly(phi, self.masks[j], True) for j in self.clean_comps if j != home):
                self.flag(self.names[0], t, f"rule {rule.id}: {lit} separates no clean component from {home}")

    def no_duplicates(self, rule, t: int) -> None:
        if rule.representative.id in self.inst.exceptions:
            return
        home = self.inst.component_of[rule.representative.id]
        for other in self.learner.rules_:
            oid = other.representative.id
            if other is not rule and oid not in self.inst.exceptions and self.inst.component_of[oid] == home:
                self.flag(self.names[1], t, f"rules {other.id} and {rule.id} both represent component {home}")

    def outside_mass(self, exclude=None) -> float:
        rules = [r for r in self.learner.rules_ if r is not exclude]
        total = 0.0
        for xid, w in self.weights.items():
            code = self.inst.examples[xid].code
            if not any((code & r.mask) == r.value for r in rules):
                total += w
        return total

    # -- event dispatch ------------------------------------------------------
    def on_delta(self, delta, t: int) -> None:
        tag = delta.tag
        learner = self.learner
        if tag == "create":
            rule = learner.rules_[-1]
            self.no_duplicates(rule, t)
            if self.stochastic:
                if self.weights is not None:
                    mass = self.outside_mass(exclude=rule)
                    self.report.creation_outside_mass.append(mass)
                    if mass < 2 * learner.epsilon:
                        self.flag("lemma9", t, f"rule {rule.id} created with outside mass {mass:.6g}")
            elif learner.n_rules_created_ > self.create_cap:
                self.flag("lemma4", t, f"{learner.n_rules_created_} rules created > m+k={self.create_cap}")
            return
        rule = self._rule(delta.rule_id)
        if not self.stochastic:
            if rule.mistakes > self.rule_cap:
                self.flag("lemma5", t, f"rule {rule.id} made {rule.mistakes} mistakes > {self.rule_cap}")
            if rule.fcount and max(rule.fcount.values()) > learner.s:
                self.flag("counter-cap", t, f"rule {rule.id} counter exceeds s={learner.s}")
        if tag == "refine":
            self.rule_sound(rule, t)
        elif tag == "delete":
            if rule.representative.id not in self.inst.exceptions:
                self.flag(self.names[2], t, f"deleted rule {rule.id} has clean representative {rule.representative.id}")

    def _rule(self, rule_id):
        for r in self.learner.rules_:
            if r.id == rule_id:
                return r
        for r in reversed(self.learner.deleted_rules_):
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def full_audit(self, t: int) -> None:
        for rule in self.learner.rules_:
            self.rule_sound(rule, t)
        seen = {}
        for rule in self.learner.rules_:
            rid = rule.representative.id
            if rid in self.inst.exceptions:
                continue
            home = self.inst.component_of[rid]
            if home in seen:
                self.flag(self.names[1], t, f"rules {seen[home]} and {rule.id} both represent component {home}")
            seen[home] = rule.id


def _fixed_source(ids: Sequence[int], learner, teacher, examples, exceptions, counters):
    """Yield stream ids, deferring exceptions the teacher cannot answer within budget."""
    pending = deque(ids)
    deferred: list[int] = []
    budgeted = teacher.s is not None

    def admissible(xid):
        x = examples[xid]
        out = learner.predict_one(x)
        return teacher.admissible(x, out.predicted, out.explanation)

    while pending or deferred:
        chosen = None
        for i, xid in enumerate(deferred):
            if admissible(xid):
                chosen = deferred.pop(i)
                break
        if chosen is None:
            if not pending:
                break
            xid = pending.popleft()
            if budgeted and xid in exceptions and not admissible(xid):
                deferred.append(xid)
                continue
            chosen = xid
        yield chosen
    counters["dropped"] = len(deferred)


def run_trial(instance: Instance, stream, learner, teacher: Teacher | None = None, *,
              weights: Mapping[int, float] | None = None, checkpoints: Iterable[int] = (),
              audit: str = "events", record: bool = True):
    """Run the protocol over one stream and audit it against ground truth.

    ``stream`` is a sequence of example ids (the first is the initial
    labelled example) or an :class:`AdaptiveAdversary`.  ``audit`` is
    ``"events"`` (check whenever the learner state changes, which is when
    the audited properties can change) or ``"every-round"``.

    Returns ``(transcript, report)``; the transcript is empty when
    ``record`` is false.
    """
    if audit not in ("events", "every-round"):
        raise ValueError("audit must be 'events' or 'every-round'")
    stochastic = isinstance(learner, StRoDFF)
    if teacher is None:
        teacher = Teacher(instance, s=None if stochastic else learner.s)
    if stochastic:
        params = {"m": learner.m, "epsilon": learner.epsilon, "sigma": learner.sigma,
                  "delta": learner.delta, "nk_clock": learner.nk_clock}
    else:
        params = {"m": learner.m, "k": learner.k, "s": learner.s}
    report = TrialReport("stochastic" if stochastic else "robust", params)
    ex = instance.examples
    exc = instance.exceptions
    counters = {"dropped": 0}

    if isinstance(stream, AdaptiveAdversary):
        x0_id = stream.first()
        n_rounds = stream.n - 1
        source = (stream.next(learner, teacher) for _ in range(n_rounds))
    else:
        ids = list(stream)
        x0_id = ids[0]
        source = _fixed_source(ids[1:], learner, teacher, ex, exc, counters)

    x0 = ex[x0_id]
    learner.start(x0, teacher.label(x0))
    checker = _Checker(instance, learner, report, weights)
    rows: list[TranscriptRow] = []
    if record:
        rows.append(TranscriptRow(0, x0_id, None, None, None, True, None, None, None, "init", None, None))
    checkpoints = set(checkpoints)
    every_round = audit == "every-round"
    predict_one, respond, observe = learner.predict_one, teacher.respond, learner.observe
    pair_cache = {}
    comp_of = instance.component_of
    mistakes = 0
    presented_exc = 1 if x0_id in exc else 0
    t = 0
    for xid in source:
        t += 1
        x = ex[xid]
        if xid in exc:
            presented_exc += 1
        out = predict_one(x)
        fb = respond(x, out.predicted, out.explanation)
        delta = observe(x, out, fb)
        if fb is not None:
            mistakes += 1
            lit = fb.feature
            xhat = out.explanation
            if not lit(x) or lit(xhat):
                checker.flag("separation", t, f"{lit} does not separate {xid} from {xhat.id}")
            if teacher.last_case == "regular":
                pair = (comp_of[xid], comp_of[xhat.id])
                if pair_cache.setdefault(pair, lit) != lit:
                    checker.flag("pair-cache", t, f"pair {pair} got {lit}, earlier {pair_cache[pair]}")
        if delta.tag != "none":
            checker.on_delta(delta, t)
        if every_round:
            checker.full_audit(t)
        if t in checkpoints:
            report.rate_curve[t] = mistakes / t
        if record:
            rule = out.rule.id if out.rule is not None else "default"
            rows.append(TranscriptRow(
                t, xid, rule, out.predicted, out.explanation.id, fb is None,
                fb.label if fb else None, fb.feature.feature if fb else None,
                fb.feature.polarity if fb else None, delta.tag, delta.audit,
                teacher.last_case if fb else None))

    report.n = t
    report.mistakes = mistakes
    report.rules_created = learner.n_rules_created_
    report.rules_deleted = learner.n_rules_deleted_
    report.rule_mistakes = {r.id: r.mistakes for r in learner.rules_ + learner.deleted_rules_}
    report.exceptions_presented = presented_exc
    report.exceptions_dropped = counters["dropped"]
    report.max_similar = teacher.max_similar()
    if t and t not in report.rate_curve:
        report.rate_curve[t] = mistakes / t
    if weights is not None:
        report.max_similar_mass = teacher.max_similar_mass(weights)
    if not stochastic and teacher.s is not None and report.max_similar > teacher.s:
        checker.flag("s-budget", t, f"{report.max_similar} similar exceptions > s={teacher.s}")
    if stochastic and learner.n_rules_created_ > rule_budget(learner.m, learner.delta):
        checker.flag("lemma10", t, f"{learner.n_rules_created_} rules > {rule_budget(learner.m, learner.delta):.4g}")
    report.bounds = verify_bounds(report)
    return rows, report


def verify_bounds(report: TrialReport) -> dict:
    """Evaluate the closed-form bounds for the report's parameters.

    Each entry has ``bound``, ``observed``, ``margin`` (bound - observed)
    and ``passed``; the per-rule bound also lists offending rule ids.
    """
    p = report.params
    out = {}
    if report.learner == "robust":
        m, k, s = p["m"], p["k"], p["s"]
        b3 = thm3_bound(m, k, s)
        out["thm3"] = {"bound": b3, "observed": report.mistakes,
                       "margin": b3 - report.mistakes, "passed": report.mistakes <= b3}
        out["lemma4"] = {"bound": m + k, "observed": report.rules_created,
                         "margin": m + k - report.rules_created, "passed": report.rules_created <= m + k}
        b5 = lemma5_bound(m, k, s)
        worst = max(report.rule_mistakes.values(), default=0)
        bad = sorted(int(r) for r, c in report.rule_mistakes.items() if c > b5)
        out["lemma5"] = {"bound": b5, "observed": worst, "margin": b5 - worst,
                         "passed": not bad, "failing_rules": bad}
    else:
        R = rule_budget(p["m"], p["delta"])
        out["lemma10"] = {"bound": R, "observed": report.rules_created,
                          "margin": R - report.rules_created, "passed": report.rules_created <= R}
    return out


# -- configuration -----------------------------------------------------------

def _pick(value, rng, seed):
    """Resolve a config value: ``{"min", "max"}`` draws an int, a list cycles by seed."""
    if isinstance(value, Mapping) and "min" in value:
        lo, hi = value["min"], value["max"]
        if isinstance(lo, float) or isinstance(hi, float):
            return float(rng.uniform(lo, hi))
        return int(rng.integers(lo, hi + 1))
    if isinstance(value, list):
        return value[seed % len(value)]
    return value


@dataclass
class Trial:
    instance: Instance
    stream: Any
    learner: Any
    teacher: Teacher
    weights: dict | None
    checkpoints: tuple
    meta: dict


def _min_d(m: int, per_component: int) -> int:
    return max(m * (m - 1) // 2, (m - 1) + max(1, math.ceil(math.log2(max(per_component, 1)))) + 1)


def build_trial(config: Mapping, seed: int) -> Trial:
    """Materialize instance, stream, teacher and learner for one seed."""
    ss = np.random.SeedSequence(seed)
    param_ss, inst_ss, stream_ss, teacher_ss = ss.spawn(4)
    rng = np.random.default_rng(param_ss)
    icfg = dict(config.get("instance", {}))
    scfg = dict(config.get("stream", {}))
    tcfg = dict(config.get("teacher", {}))
    lcfg = dict(config.get("learner", {}))
    mode = _pick(scfg.get("mode", "adversarial"), rng, seed)
    kind = icfg.get("kind", "lower-bound" if mode == "lower-bound" else "random")
    inst_seed = int(inst_ss.generate_state(1)[0])
    stream_seed = int(stream_ss.generate_state(1)[0])
    teacher_seed = int(teacher_ss.generate_state(1)[0])
    meta = {"mode": mode}

    stream = None
    if kind == "random":
        m = _pick(icfg.get("m", 3), rng, seed)
        per = _pick(icfg.get("examples_per_component", 4), rng, seed)
        d = _pick(icfg.get("d", 12), rng, seed)
        if icfg.get("clamp_d", True):
            d = max(d, _min_d(m, per))
        labels = _pick(icfg.get("labels", m), rng, seed)
        k = _pick(icfg.get("k", 0), rng, seed)
        k = min(k, m * (per - 1))
        if labels < 2:
            k = 0
        s = min(_pick(icfg.get("s", 0), rng, seed), k)
        instance = gen_random_instance(m, d, labels, k, s, per, inst_seed)
    elif kind == "file":
        with open(icfg["path"]) as fp:
            instance = instance_from_dict(json.load(fp))
    elif kind == "lower-bound":
        m = _pick(icfg.get("m", scfg.get("m", 4)), rng, seed)
        instance, stream, S = lower_bound_stream(m, stream_seed)
        meta["S"] = sorted(S)
    else:
        raise ValueError(f"unknown instance kind {kind!r}")

    # rounds after the initial example
    n = _pick(scfg.get("n", 200), rng, seed)
    weights = None
    if mode == "adversarial":
        placement = _pick(scfg.get("placement", "random"), rng, seed)
        first = bool(_pick(scfg.get("exception_first", False), rng, seed))
        stream = adversarial_stream(instance, n + 1, stream_seed, placement, first)
        meta.update(placement=placement, exception_first=first)
    elif mode == "adaptive":
        stream = AdaptiveAdversary(instance, n + 1, stream_seed, scfg.get("aggression", 0.8))
    elif mode == "stochastic":
        eps = float(_pick(scfg.get("epsilon", lcfg.get("epsilon", 0.01)), rng, seed))
        sig = float(_pick(scfg.get("sigma", lcfg.get("sigma", eps)), rng, seed))
        sampler = StochasticSampler(instance, eps, sig, stream_seed)
        stream = sampler.draw(n + 1)
        weights = sampler.weight_map()
    elif mode == "lower-bound":
        if stream is None:
            raise ValueError("lower-bound streams need instance kind 'lower-bound'")
    else:
        raise ValueError(f"unknown stream mode {mode!r}")

    lkind = _pick(lcfg.get("kind", "robust"), rng, seed)
    if lkind == "stochastic":
        learner = StRoDFF(
            m=lcfg.get("m", instance.m),
            epsilon=float(lcfg.get("epsilon", scfg.get("epsilon", 0.01))),
            sigma=float(lcfg.get("sigma", scfg.get("sigma", lcfg.get("epsilon", 0.01)))),
            delta=float(lcfg.get("delta", 0.05)),
            nk_clock=lcfg.get("nk_clock", "rule"),
            log_base=float(lcfg.get("log_base", math.e)),
        )
        budget = None
    elif lkind in ("robust", "baseline"):
        k = 0 if lkind == "baseline" else lcfg.get("k", instance.k)
        s = 0 if lkind == "baseline" else lcfg.get("s", instance.s)
        learner = RobustDFF(m=lcfg.get("m", instance.m), k=k, s=s)
        budget = s
    else:
        raise ValueError(f"unknown learner kind {lkind!r}")
    strategy = _pick(tcfg.get("strategy", "shared-feature"), rng, seed)
    teacher = Teacher(instance, strategy, s=tcfg.get("s", budget), seed=teacher_seed)
    meta.update(learner=lkind, strategy=strategy, instance_m=instance.m, d=instance.d,
                k=instance.k, s=instance.s)
    checkpoints = tuple(sorted(set(scfg.get("checkpoints", ()))))
    return Trial(instance, stream, learner, teacher, weights, checkpoints, meta)


def run_config(config: Mapping, seed: int, record: bool = True):
    """Build and run one trial; returns ``(transcript, report, meta)``."""
    trial = build_trial(config, seed)
    rows, report = run_trial(trial.instance, trial.stream, trial.learner, trial.teacher,
                             weights=trial.weights, checkpoints=trial.checkpoints,
                             audit=config.get("audit", "events"), record=record)
    return rows, report, trial.meta


# -- sweeps ------------------------------------------------------------------

@dataclass
class SweepResult:
    rows: list  # one metrics dict per trial
    reports: list  # (config_id, seed, TrialReport)
    aggregate: dict

    def metrics_csv(self) -> str:
        if not self.rows:
            return ""
        buf = io.StringIO()
        cols = list(self.rows[0])
        for r in self.rows[1:]:
            cols += [c for c in r if c not in cols]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r)
        return buf.getvalue()


def _fmt(v):
    return float(f"{v:.12g}") if isinstance(v, float) else v


def _metrics_row(config_id, seed, report: TrialReport, meta) -> dict:
    p = report.params
    row = {
        "config-id": config_id, "seed": seed, "learner": meta.get("learner", report.learner),
        "strategy": meta.get("strategy"), "m": p.get("m"),
        "k": p.get("k", ""), "s": p.get("s", ""),
        "epsilon": p.get("epsilon", ""), "sigma": p.get("sigma", ""),
        "n": report.n, "mistakes": report.mistakes,
        "rules-created": report.rules_created, "rules-deleted": report.rules_deleted,
    }
    for name in ("thm3", "lemma4", "lemma5", "lemma10"):
        b = report.bounds.get(name, {})
        row[f"{name}-bound"] = _fmt(b.get("bound", ""))
        row[f"{name}-pass"] = b.get("passed", "")
    for name in sorted(report.violations):
        row[f"{name}-violations"] = report.violations[name]
    row["error"] = report.error or ""
    return row


def _run_one(args):
    config_id, config, seed, want_transcript = args
    try:
        rows, report, meta = run_config(config, seed, record=want_transcript)
        lines = [r.to_json() for r in rows] if want_transcript else []
    except Exception as exc:  # isolate per-trial failures
        log.exception("trial %s/%s failed", config_id, seed)
        report = TrialReport("error", {}, error=f"{type(exc).__name__}: {exc}")
        meta, lines = {}, []
    return config_id, seed, report, meta, lines


def _aggregate(reports) -> dict:
    out = {}
    for cid in dict.fromkeys(c for c, _, _ in reports):
        reps = [r for c, _, r in reports if c == cid]
        good = [r for r in reps if r.error is None]
        agg = {"trials": len(reps), "errors": len(reps) - len(good)}
        if good:
            checks = sorted({name for r in good for name in r.violations})
            agg["invariant_pass_rate"] = {c: sum(r.ok(c) for r in good) / len(good) for c in checks}
            bounds = sorted({name for r in good for name in r.bounds})
            agg["bound_pass_rate"] = {b: sum(r.bounds[b]["passed"] for r in good if b in r.bounds) / len(good)
                                      for b in bounds}
            mistakes = [r.mistakes for r in good]
            agg["mean_mistakes"] = _fmt(float(np.mean(mistakes)))
            agg["max_mistakes"] = int(max(mistakes))
        out[str(cid)] = agg
    return out


def sweep(configs, seeds: Iterable[int], parallelism: int = 1, outdir=None, formats=("csv", "json")) -> SweepResult:
    """Run every config on every seed; write CSV/JSON (and transcripts) to ``outdir``.

    ``configs`` is a list of configs or a mapping ``config_id -> config``.
    Trials are independent; output order is always (config, seed) order.
    """
    if isinstance(configs, Mapping):
        items = list(configs.items())
    else:
        items = [(c.get("id", str(i)), c) for i, c in enumerate(configs)]
    if not items:
        raise ValueError("sweep needs at least one config")
    seeds = list(seeds)
    want_transcript = "transcript" in formats and outdir is not None
    jobs = [(cid, cfg, int(seed), want_transcript) for cid, cfg in items for seed in seeds]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * parallelism))))
    else:
        results = [_run_one(j) for j in jobs]

    reports = [(cid, seed, rep) for cid, seed, rep, _, _ in results]
    rows = [_metrics_row(cid, seed, rep, meta) for cid, seed, rep, meta, _ in results]
    result = SweepResult(rows, reports, _aggregate(reports))
    if outdir is not None:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        if "csv" in formats:
            (out / "metrics.csv").write_text(result.metrics_csv())
        if "json" in formats:
            (out / "aggregate.json").write_text(json.dumps(result.aggregate, indent=1, sort_keys=True) + "\n")
            with open(out / "reports.jsonl", "w") as fp:
                for cid, seed, rep in reports:
                    fp.write(json.dumps({"config_id": cid, "seed": seed, "report": rep.to_dict()}, sort_keys=True) + "\n")
        if want_transcript:
            tdir = out / "transcripts"
            tdir.mkdir(exist_ok=True)
            for cid, seed, _, _, lines in results:
                (tdir / f"{cid}_{seed}.jsonl").write_text("".join(line + "\n" for line in lines))
    return result


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "dff-output"))


def load_config(path) -> dict:
    with open(path) as fp:
        return json.load(fp)


def config_seeds(config: Mapping) -> list[int]:
    seeds = config.get("sweep", {}).get("seeds", [0])
    if isinstance(seeds, Mapping):
        start = int(seeds.get("start", 0))
        return list(range(start, start + int(seeds["count"])))
    return [int(s) for s in seeds]
