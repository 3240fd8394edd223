"""Simulated teacher for the discriminative-feature-feedback protocol.

On a correct prediction the teacher stays silent.  On a mistake it returns
the correct label and a literal that is true on the current example and
false on the explanation.  When neither example is an exception, the literal
is the fixed table entry for the pair of components, so the same component
pair always gets the same feature.  When an exception is involved, the
literal comes from an :class:`ExceptionStrategy`.

Charges follow the definition of similar exceptions: an exception ``x`` is
charged to ``(xhat, phi)`` when ``phi`` is returned against a non-exception
explanation ``xhat``.  With a budget ``s`` the teacher never lets more than
``s`` distinct exceptions share one ``(xhat, phi)``.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum

from .core import Example, Instance, Literal

__all__ = [
    "ExceptionStrategy",
    "Feedback",
    "Teacher",
    "FeedbackAuditor",
    "audit_feedback",
    "ProtocolViolation",
    "BudgetExhausted",
]


class ProtocolViolation(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    """No literal can be returned without exceeding the similar-exception budget."""


class ExceptionStrategy(str, Enum):
    SHARED_FEATURE = "shared-feature"
    RANDOM_FRESH = "random-fresh"
    LABEL_FLIP_ONLY = "label-flip-only"


@dataclass(frozen=True)
class Feedback:
    label: int
    feature: Literal


def separators(x: Example, xhat: Example) -> list[Literal]:
    """All coordinate literals true on ``x`` and false on ``xhat``."""
    diff = x.code ^ xhat.code
    out = []
    j = 0
    while diff:
        if diff & 1:
            out.append(Literal(j, bool((x.code >> j) & 1)))
        diff >>= 1
        j += 1
    return out


class Teacher:
    """Ground-truth teacher bound to one instance.

    Parameters
    ----------
    instance : Instance
    strategy : ExceptionStrategy or str
        How literals are chosen when an exception is involved.
        ``shared-feature`` reuses the literals already returned against the
        same explanation (worst case for the counters); ``random-fresh``
        draws a uniformly random valid literal; ``label-flip-only`` answers
        as if the exception still belonged to its component, falling back to
        the lowest separating coordinate when the components carry no entry.
    s : int or None
        Budget on distinct exceptions per ``(xhat, phi)``; ``None`` disables
        it (the stochastic setting bounds mass instead of counts).
    seed : int, optional
        Seeds ``random-fresh``.
    """

    def __init__(self, instance: Instance, strategy="shared-feature", s: int | None = None, seed=None):
        self.instance = instance
        self.strategy = ExceptionStrategy(strategy)
        self.s = s
        self._rng = random.Random(seed)
        rep = instance.representation
        self._sep = rep.separation
        self._comp_of = instance.component_of
        self._label = instance.concept_label
        self._exc = instance.exceptions
        # (xhat id, literal) -> ids of distinct exceptions charged
        self.mxp: dict[tuple[int, Literal], set[int]] = defaultdict(set)
        # literals returned against each explanation in exception cases
        self._used: dict[int, dict[Literal, int]] = defaultdict(dict)
        self.pair_cache: dict[tuple[int, int], Literal] = {}
        self.last_case = None

    def label(self, x: Example) -> int:
        return self._label[x.id]

    def case(self, x: Example, xhat: Example) -> str:
        ex, eh = x.id in self._exc, xhat.id in self._exc
        if ex and eh:
            return "both-exceptions"
        if ex:
            return "exception-example"
        if eh:
            return "exception-explanation"
        return "regular"

    def _ordered(self, x: Example, xhat: Example) -> list[Literal]:
        cands = separators(x, xhat)
        if self.strategy is ExceptionStrategy.RANDOM_FRESH:
            self._rng.shuffle(cands)
            return cands
        if self.strategy is ExceptionStrategy.LABEL_FLIP_ONLY:
            lit = self._sep.get((self._comp_of[x.id], self._comp_of[xhat.id]))
            if lit is not None and lit in cands:
                cands.remove(lit)
                cands.insert(0, lit)
            return cands
        used = self._used.get(xhat.id)
        if used:
            cands.sort(key=lambda lit: -used.get(lit, 0))
        return cands

    def _charged(self, x: Example, xhat: Example) -> bool:
        return x.id in self._exc and xhat.id not in self._exc

    def _within_budget(self, x: Example, xhat: Example, lit: Literal) -> bool:
        charged = self.mxp.get((xhat.id, lit), ())
        return x.id in charged or len(charged) < self.s

    def _choose(self, x: Example, xhat: Example) -> Literal | None:
        cands = self._ordered(x, xhat)
        if self.s is not None and self._charged(x, xhat):
            cands = [lit for lit in cands if self._within_budget(x, xhat, lit)]
        return cands[0] if cands else None

    def admissible(self, x: Example, prediction: int, xhat: Example) -> bool:
        """Whether :meth:`respond` can answer without breaking the budget."""
        if prediction == self._label[x.id] or self.s is None or not self._charged(x, xhat):
            return True
        return any(self._within_budget(x, xhat, lit) for lit in separators(x, xhat))

    def respond(self, x: Example, prediction: int, xhat: Example, require: bool = False) -> Feedback | None:
        """Answer one round of the protocol.

        Raises :class:`ProtocolViolation` if the explanation's label is not
        the predicted one, or if ``require`` asks for feedback on a correct
        prediction.
        """
        if self._label[xhat.id] != prediction:
            raise ProtocolViolation(f"explanation {xhat.id} is not labelled {prediction}")
        y = self._label[x.id]
        if prediction == y:
            if require:
                raise ProtocolViolation(f"prediction {prediction} on {x.id} is correct; no feedback exists")
            self.last_case = None
            return None
        case = self.case(x, xhat)
        self.last_case = case
        if case == "regular":
            pair = (self._comp_of[x.id], self._comp_of[xhat.id])
            lit = self._sep[pair]
            self.pair_cache.setdefault(pair, lit)
            return Feedback(y, lit)
        lit = self._choose(x, xhat)
        if lit is None:
            raise BudgetExhausted(f"no literal for exception {x.id} against {xhat.id} within s={self.s}")
        used = self._used[xhat.id]
        used[lit] = used.get(lit, 0) + 1
        if self._charged(x, xhat):
            self.mxp[(xhat.id, lit)].add(x.id)
        return Feedback(y, lit)

    def max_similar(self) -> int:
        """Largest number of distinct exceptions charged to one ``(xhat, phi)``."""
        return max((len(v) for v in self.mxp.values()), default=0)

    def max_similar_mass(self, weights: dict[int, float]) -> float:
        return max((sum(weights[x] for x in v) for v in self.mxp.values()), default=0.0)


def audit_feedback(x: Example, xhat: Example, feedback: Feedback | None, seen_labels: dict[int, int]) -> str | None:
    """Flag feedback that is inconsistent on its face.

    Returns ``"non-separating"`` when the literal does not separate the two
    examples, ``"contradictory-label"`` when ``x`` was earlier given a
    different correct label, else ``None``.  ``seen_labels`` is updated with
    accepted labels.
    """
    if feedback is None:
        return None
    lit = feedback.feature
    if not lit(x) or lit(xhat):
        return "non-separating"
    prev = seen_labels.get(x.id)
    if prev is not None and prev != feedback.label:
        return "contradictory-label"
    seen_labels[x.id] = feedback.label
    return None


class FeedbackAuditor:
    """Tracks labels established so far and audits each round's feedback."""

    def __init__(self):
        self.labels: dict[int, int] = {}

    def confirm(self, x: Example, label: int) -> str | None:
        """Record a label implied by a correct prediction (or given for ``x0``)."""
        prev = self.labels.setdefault(x.id, label)
        return None if prev == label else "contradictory-label"

    def audit(self, x: Example, xhat: Example, feedback: Feedback | None) -> str | None:
        return audit_feedback(x, xhat, feedback, self.labels)
