"""environom: multi-energy system optimization coupled with life-cycle impact assessment.

The package assembles a monthly-resolution multi-energy system model as a
linear program, attaches one economic and five life-cycle impact objectives,
solves single- and multi-objective variants with a built-in simplex solver,
and post-processes the resulting solution sets into correlation, distribution
and burden-shift statistics.
"""

__version__ = "0.1.0"
