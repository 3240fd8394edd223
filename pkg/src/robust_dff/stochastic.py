"""StRoDFF: the stochastic-setting learner and its time-dependent thresholds.

The fixed budgets ``k`` and ``s`` of :class:`~robust_dff.learner.RobustDFF`
become confidence thresholds that grow with elapsed time, and rule creation
is gated so that new rules only appear while enough probability mass still
falls outside the current rules.
"""

from __future__ import annotations

import math

from ._validation import check_int_param, check_real_param
from .core import Example
from .learner import Delta, PredictionOutcome, _DFFBase, handle_mistake
from .teacher import Feedback

__all__ = ["q", "gamma", "rule_budget", "StRoDFF", "NK_CLOCKS"]

NK_CLOCKS = ("rule", "literal")


def _log(v: float, base: float) -> float:
    return math.log(v) if base == math.e else math.log(v) / math.log(base)


def q(eps: float, t: int, delta: float, log_base: float = math.e) -> float:
    """Count threshold for events of probability ``eps`` over ``t`` rounds.

    ``eps*t + (2/3)*L + sqrt(2*eps*t*L)`` with ``L = log(8 t^3 / delta)``.
    """
    if t < 1:
        raise ValueError(f"q is defined for t >= 1, got t={t}")
    if delta <= 0:
        raise ValueError("delta must be positive")
    L = _log(8.0 * t ** 3 / delta, log_base)
    return eps * t + 2.0 / 3.0 * L + math.sqrt(2.0 * eps * t * L)


def gamma(eps: float, r: int, t: int, delta: float, log_base: float = math.e) -> float:
    """Rule-creation threshold on the number of unmatched rounds.

    ``(r + 4 sqrt(r) L^{3/2}) / (1 - 2 eps) - r + 1`` with
    ``L = log(8 t^2 / delta)``.
    """
    if eps >= 0.5:
        raise ValueError(f"gamma needs eps < 1/2, got {eps}")
    if r < 0:
        raise ValueError("r must be non-negative")
    if t < 1:
        raise ValueError(f"gamma is defined for t >= 1, got t={t}")
    L = _log(8.0 * t ** 2 / delta, log_base)
    return (r + 4.0 * math.sqrt(r) * L ** 1.5) / (1.0 - 2.0 * eps) - r + 1.0


def rule_budget(m: int, delta: float) -> float:
    """High-probability cap ``4 m log(4/delta)`` on rules ever created."""
    return 4.0 * m * math.log(4.0 / delta)


class StRoDFF(_DFFBase):
    """Robust learner for i.i.d. streams.

    Parameters
    ----------
    m : int
        Upper bound on the representation size.
    epsilon : float
        Upper bound on the probability that a draw is an exception, at most 1/4.
    sigma : float
        Upper bound on the mass of any set of similar exceptions, at most epsilon.
    delta : float
        Confidence parameter in (0, 1/e^2].
    nk_clock : {"rule", "literal"}
        Elapsed time used for the deletion threshold: rounds since the rule
        was created (``"rule"``, default) or since the literal's counter left
        zero (``"literal"``).
    log_base : float
        Base of the logarithms in the thresholds.
    """

    def __init__(self, m=2, epsilon=0.01, sigma=0.01, delta=0.05, nk_clock="rule", log_base=math.e):
        self.m = m
        self.epsilon = epsilon
        self.sigma = sigma
        self.delta = delta
        self.nk_clock = nk_clock
        self.log_base = log_base

    def _check_params(self):
        check_int_param(self.m, "m", 1)
        eps = check_real_param(self.epsilon, "epsilon", 0.0, 0.25)
        check_real_param(self.sigma, "sigma", 0.0, eps)
        check_real_param(self.delta, "delta", 0.0, math.exp(-2), low_open=True)
        check_real_param(self.log_base, "log_base", 1.0, low_open=True)
        if self.nk_clock not in NK_CLOCKS:
            raise ValueError(f"nk_clock must be one of {NK_CLOCKS}")

    def _reset(self):
        super()._reset()
        self.t_lr_ = 0
        self.n_lr_ = 0

    def rule_budget(self) -> float:
        return rule_budget(self.m, self.delta)

    def thresholds(self, rule, phi, t: int) -> tuple[float, float]:
        """``(n_k, n_s)`` for a mistake on ``rule`` with literal ``phi`` at round ``t``."""
        t_lit = t - rule.first_seen[phi] + 1
        t_k = t - rule.created_at + 1 if self.nk_clock == "rule" else t_lit
        return (q(self.epsilon, t_k, self.delta, self.log_base),
                q(self.sigma, t_lit, self.delta, self.log_base) + 1.0)

    def creation_gate(self, t: int) -> float:
        """Current value of the gate the unmatched count must reach."""
        return gamma(self.epsilon, t - self.t_lr_ - self.n_lr_ + 1, t, self.delta, self.log_base)

    def observe(self, x: Example, outcome: PredictionOutcome, feedback: Feedback | None) -> Delta:
        self.t_ += 1
        t = self.t_
        rule = outcome.rule
        if rule is None:
            self.n_lr_ += 1
        flag = self._screen(x, outcome, feedback)
        if feedback is None or flag is not None:
            return Delta(audit=flag)
        if rule is None:
            if self.n_lr_ < self.creation_gate(t):
                return Delta()
            new = self._create(x, feedback.label)
            self.n_lr_ = 0
            self.t_lr_ = t
            return Delta("create", new.id)
        phi = feedback.feature
        if rule.fcount.get(phi, 0) == 0:
            rule.first_seen[phi] = t
        n_k, n_s = self.thresholds(rule, phi, t)
        rule.mistakes += 1
        tag = handle_mistake(rule, phi, n_k, n_s, self.m)
        if tag == "delete":
            self._delete(rule)
        return Delta(tag, rule.id, phi)
