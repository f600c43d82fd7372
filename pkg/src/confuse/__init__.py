"""Expand-and-randomize secure computation toolkit.

Builds three-party non-interactive secure computation schemes by embedding a
function table into addition over a finite field or modular ring, randomizing
with a multiplicative subgroup, and verifying correctness and perfect
security by exact enumeration.
"""

__version__ = "0.1.0"
