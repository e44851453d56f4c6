"""Spectral laboratory for coupled cubic Schrodinger systems.

Builds solitary-wave pairs traveling at different speeds, constructs
nearby exact solutions by backward-in-time integration, and verifies the
quantitative decay, conservation and coercivity estimates that control
the construction.
"""

__version__ = "0.1.0"

from .grid import ComplexField, FieldPair, Grid, make_grid  # noqa: F401
from .profiles import Profile, ground_state_1d, petviashvili  # noqa: F401
from .solitons import SolitonFamily, SolitonParams, pair_solitons, soliton_field  # noqa: F401
