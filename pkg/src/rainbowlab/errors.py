"""Shared exception types.

Exit-code mapping used by the CLI: ParameterError -> 3 (usage),
StructureUnsupported / OutOfRegime -> 2, property violations -> 1.
"""

from __future__ import annotations


class RainbowLabError(Exception):
    """Base class for all library errors."""


class ParameterError(RainbowLabError, ValueError):
    """Invalid argument (bad graph spec, palette too small, budget <= 0, ...)."""


class StructureUnsupported(RainbowLabError):
    """Input falls outside the structural regime an algorithm handles.

    Carries the offending object (component, subgraph, ...) when available.
    """

    def __init__(self, message: str, offending=None):
        super().__init__(message)
        self.offending = offending


class OutOfRegime(RainbowLabError):
    """Quantity out of the certified range (e.g. a K4-component with phi > 7)."""

    def __init__(self, message: str, offending=None):
        super().__init__(message)
        self.offending = offending


class SearchExhausted(RainbowLabError):
    """A bounded search hit its node budget before reaching a conclusion."""


class CounterexampleFound(RainbowLabError):
    """A certificate extractor failed on a valid input.

    This would falsify the underlying combinatorial statement; the harness
    archives the instance (graph + colouring) attached here.
    """

    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}
