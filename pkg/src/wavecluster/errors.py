"""Exception types shared across the toolkit.

Every error raised deliberately by this package derives from
:class:`WaveclusterError`, so callers (and the CLI) can distinguish
domain failures from programming bugs.
"""

from __future__ import annotations


class WaveclusterError(Exception):
    """Base class for all errors raised by this package."""


class GraphFormatError(WaveclusterError):
    """Malformed edge-list input: bad line, bad weight, self-loop, duplicate
    edge with conflicting weights, or an empty graph."""


class DisconnectedGraphError(WaveclusterError):
    """The graph is not connected; the spectral pipeline requires a single
    component so that the zero eigenvalue is simple."""


class ValidationError(WaveclusterError):
    """A parameter is outside its documented domain (wave speed, k, sizes)."""


class NumericalError(WaveclusterError):
    """A numerical routine produced values outside its contract: non-finite
    samples, eigenvalues off the unit circle, rank collapse, and similar."""
