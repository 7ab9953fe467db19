"""Coded caching with shared caches and multiple transmit antennas.

Simulates the placement-and-delivery scheme, verifies decodability, and
computes the optimal worst-case delay together with its index-coding
converse, all in exact arithmetic.
"""

__version__ = "0.1.0"

from .bounds import converse_bound, optimal_delay, uniform_delay
from .delivery import deliver
from .model import Association, Profile, SystemParams

__all__ = [
    "Association",
    "Profile",
    "SystemParams",
    "converse_bound",
    "deliver",
    "optimal_delay",
    "uniform_delay",
]
