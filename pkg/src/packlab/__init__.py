"""Hard-core packing laboratory on uniform 2d lattices.

Submodules:
    lattices      catalog of the 14 periodic graphs and torus instantiation
    configuration occupancy configurations, legality, densities, snapshots
    engine        the pressure-parametrized cellular automaton
    oracle        exact enumeration, densest packings, local moves, growth fits
    bounds        density bound machinery, voter curves, residual entropies
    criticality   phase classification, bisection brackets, critical curves
    cli           batch command-line front end
"""

__version__ = "0.1.0"

from . import bounds, cli, configuration, criticality, engine, lattices, oracle

__all__ = [
    "bounds",
    "cli",
    "configuration",
    "criticality",
    "engine",
    "lattices",
    "oracle",
    "__version__",
]
