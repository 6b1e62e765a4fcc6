"""Bounded linearizability checking with meta-configuration trackers.

Submodules are imported on demand so that ``lintrack.oracle`` can be loaded
without the tracker machinery it is meant to cross-check.
"""

from __future__ import annotations

__version__ = "0.1.0"
