"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class LorentzError(Exception):
    """Base class for all errors raised by lorentzseq."""


class InvalidSpec(LorentzError, ValueError):
    """A weight, sequence, envelope or family violates its construction rules."""


class UnknownTerm(LorentzError):
    """The sequence only bounds |a_i| at this index; its exact value is unavailable."""


class BudgetExhausted(LorentzError):
    """The configured horizon budget was reached before the result was certified."""


class HorizonExhausted(BudgetExhausted):
    """No horizon within budget separates the requested ranks from the tail."""


class ToleranceUnreachable(BudgetExhausted):
    """The available information cannot narrow an enclosure to the requested width."""


class NotSummable(LorentzError):
    """The sequence is certified not to belong to L_{p,w}."""


class SupportTooLarge(LorentzError):
    """Brute-force search refused: the instance exceeds the configured cap."""


class UnsupportedVariant(LorentzError, TypeError):
    """The operation is not defined for this representation."""


class NotUniform(LorentzError):
    """The family does not tend to zero uniformly, so no majorant exists."""
