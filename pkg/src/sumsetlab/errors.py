"""Distinguished outcomes shared by all sumsetlab modules.

``HypothesisNotMet`` is a normal, expected outcome: the structural results
implemented here are conditional statements, and callers routinely probe
inputs that do not satisfy the hypothesis.  ``ContractViolation`` is never
expected: it means a verified hypothesis failed to produce the guaranteed
conclusion, i.e. a bug (or a counterexample to a proven statement).
"""

from __future__ import annotations

from typing import Any


class HypothesisNotMet(Exception):
    """A required hypothesis of a conditional result does not hold.

    ``reason`` is a short machine-readable tag (e.g. ``"doubling-bound"``,
    ``"subgroup-closure"``); ``payload`` optionally carries the data computed
    before the check failed (e.g. the plain intersection set).
    """

    def __init__(self, reason: str, message: str = "", payload: Any = None):
        super().__init__(message or reason)
        self.reason = reason
        self.payload = payload


class ContractViolation(AssertionError):
    """A guaranteed postcondition failed despite a verified hypothesis."""
