"""Atomic-frequency-comb memory simulator: spectral-hole-burning preparation,
analytic comb theory and a numerical echo propagator."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__all__ = [n for n in dir() if not n.startswith("_")]
