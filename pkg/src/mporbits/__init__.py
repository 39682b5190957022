"""Exact engine for nilpotent orbit bookkeeping in split p-adic symmetric pairs.

The package classifies nilpotent orbits of the fixed-point group acting on the
(-1)-eigenspace of an involution of sl_n over Q_p (n = 2, 3), by matching them
against noticed depth-zero cosets attached to facets of the standard apartment.
All core arithmetic is exact (rationals with p-adic valuations, prime fields);
truncated p-adic expansions appear only in Hensel square roots and in the
successive-approximation conjugation algorithm.
"""

__version__ = "0.1.0"
