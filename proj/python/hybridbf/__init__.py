"""Hybrid precoder/combiner design for mmWave MIMO-OFDM (C++ core)."""

from ._hybridbf import *  # noqa: F401,F403
from ._hybridbf import __version__  # noqa: F401
