"""RobustDFF: rule learner for discriminative feature feedback with exceptions.

The learner keeps a default ``(x0, y0)`` and an ordered list of rules.  Each
rule is a conjunction of negated feedback literals attached to a
representative example.  A mistake on a rule counts the returned literal;
once a literal has been returned more than ``s`` times the rule is refined
by its negation.  Rules that grow to ``m`` literals, or whose counters
outside the ``m - 1 - |C|`` largest sum to more than ``k``, are dropped.
With ``k = s = 0`` this is the perfect-annotation learner.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_examples, check_int_param
from .core import Example, Literal
from .teacher import Feedback, FeedbackAuditor

__all__ = ["Rule", "PredictionOutcome", "Delta", "handle_mistake", "RobustDFF"]


@dataclass(eq=False)
class Rule:
    id: int
    representative: Example
    label: int
    created_at: int
    conjunction: list[Literal] = field(default_factory=list)
    fcount: dict[Literal, int] = field(default_factory=dict)
    mistakes: int = 0
    # round at which each counter last left zero (used by StRoDFF)
    first_seen: dict[Literal, int] = field(default_factory=dict)
    mask: int = 0
    value: int = 0

    def matches(self, x: Example) -> bool:
        return (x.code & self.mask) == self.value

    def add_negation(self, phi: Literal) -> None:
        lit = phi.negate()
        if lit in self.conjunction:
            return
        self.conjunction.append(lit)
        bit = 1 << lit.feature
        self.mask |= bit
        self.value = (self.value & ~bit) | (bit if lit.polarity else 0)

    def __repr__(self):
        conj = " & ".join(map(str, self.conjunction)) or "True"
        return f"Rule(id={self.id}, rep={self.representative.id}, label={self.label}, C=[{conj}])"


@dataclass(frozen=True)
class PredictionOutcome:
    predicted: int
    explanation: Example
    rule: Rule | None = None


@dataclass(frozen=True)
class Delta:
    """What one round did to the learner state.

    ``tag`` is one of ``none``, ``counter-inc``, ``refine``, ``delete``,
    ``create``.  ``audit`` carries the inconsistency tag of ignored feedback.
    """

    tag: str = "none"
    rule_id: int | None = None
    feature: Literal | None = None
    audit: str | None = None


def handle_mistake(rule: Rule, phi: Literal, n_k: float, n_s: float, m: int) -> str:
    """Update ``rule`` after a mistake with feedback literal ``phi``.

    Returns ``"refine"`` when the rule gained ``~phi``, ``"delete"`` when it
    must be removed from the rule list, else ``"counter-inc"``.  Thresholds
    may be real; comparisons are strict.
    """
    c = rule.fcount.get(phi, 0) + 1
    rule.fcount[phi] = c
    if c > n_s:
        rule.add_negation(phi)
        del rule.fcount[phi]
        return "delete" if len(rule.conjunction) >= m else "refine"
    b = m - 1 - len(rule.conjunction)
    counts = sorted(rule.fcount.values(), reverse=True)
    if sum(counts[b:]) > n_k:
        return "delete"
    return "counter-inc"


class _DFFBase(ClassifierMixin, BaseEstimator):
    """Protocol plumbing shared by the adversarial and stochastic learners."""

    def _reset(self):
        self.rules_: list[Rule] = []
        self.t_ = 0
        self.mistakes_ = 0
        self.n_rules_created_ = 0
        self.n_rules_deleted_ = 0
        self.deleted_rules_: list[Rule] = []
        self.auditor_ = FeedbackAuditor()

    def start(self, x0: Example, y0: int):
        """Begin a run with the first labelled example."""
        self._check_params()
        self._reset()
        self.x0_ = x0
        self.y0_ = int(y0)
        self.auditor_.confirm(x0, self.y0_)
        return self

    def predict_one(self, x: Example) -> PredictionOutcome:
        for rule in self.rules_:
            if (x.code & rule.mask) == rule.value:
                return PredictionOutcome(rule.label, rule.representative, rule)
        return PredictionOutcome(self.y0_, self.x0_, None)

    def _create(self, x: Example, label: int) -> Rule:
        rule = Rule(self.n_rules_created_, x, int(label), self.t_)
        self.n_rules_created_ += 1
        self.rules_.append(rule)
        return rule

    def _delete(self, rule: Rule) -> None:
        self.rules_.remove(rule)
        self.deleted_rules_.append(rule)
        self.n_rules_deleted_ += 1

    def _screen(self, x, outcome, feedback):
        """Audit the round; returns the ignore tag or ``None``."""
        if feedback is None:
            return self.auditor_.confirm(x, outcome.predicted)
        self.mistakes_ += 1
        return self.auditor_.audit(x, outcome.explanation, feedback)

    def fit(self, X, teacher, y=None):
        """Run the interactive protocol over the stream ``X``.

        ``teacher`` provides ``label(x)`` for the first example and
        ``respond(x, prediction, explanation)`` afterwards.  ``y`` is ignored;
        labels only ever come from the teacher.
        """
        lookup = getattr(getattr(teacher, "instance", None), "example_by_bits", None)
        stream = as_examples(X, lookup)
        self.start(stream[0], teacher.label(stream[0]))
        return self.partial_fit(stream[1:], teacher)

    def partial_fit(self, X, teacher, y=None):
        check_is_fitted(self, "x0_")
        if len(X) == 0:
            return self
        lookup = getattr(getattr(teacher, "instance", None), "example_by_bits", None)
        for x in as_examples(X, lookup):
            outcome = self.predict_one(x)
            self.observe(x, outcome, teacher.respond(x, outcome.predicted, outcome.explanation))
        return self

    def predict(self, X):
        check_is_fitted(self, "x0_")
        return np.array([self.predict_one(x).predicted for x in as_examples(X)], dtype=np.int64)

    def explain(self, X):
        """Ids of the explanation examples the learner would offer."""
        check_is_fitted(self, "x0_")
        return np.array([self.predict_one(x).explanation.id for x in as_examples(X)], dtype=np.int64)


class RobustDFF(_DFFBase):
    """Robust learner for the adversarial setting.

    Parameters
    ----------
    m : int
        Upper bound on the size of the teacher's representation.
    k : int
        Upper bound on the number of exceptions in the stream.
    s : int
        Upper bound on the number of similar exceptions, ``s <= k``.
    """

    def __init__(self, m=2, k=0, s=0):
        self.m = m
        self.k = k
        self.s = s

    def _check_params(self):
        check_int_param(self.m, "m", 1)
        check_int_param(self.k, "k", 0)
        check_int_param(self.s, "s", 0)
        if self.s > self.k:
            raise ValueError(f"s={self.s} must not exceed k={self.k}")

    def mistake_bound(self) -> int:
        m, k, s = self.m, self.k, self.s
        return (m + k) * ((s + 1) * (m - 1) + k + 2)

    def observe(self, x: Example, outcome: PredictionOutcome, feedback: Feedback | None) -> Delta:
        """Apply one round's feedback; ``feedback`` is ``None`` iff the prediction was right."""
        self.t_ += 1
        flag = self._screen(x, outcome, feedback)
        if feedback is None or flag is not None:
            return Delta(audit=flag)
        rule = outcome.rule
        if rule is None:
            # the literal is not used on this branch
            return Delta("create", self._create(x, feedback.label).id)
        rule.mistakes += 1
        tag = handle_mistake(rule, feedback.feature, self.k, self.s, self.m)
        if tag == "delete":
            self._delete(rule)
        return Delta(tag, rule.id, feedback.feature)
