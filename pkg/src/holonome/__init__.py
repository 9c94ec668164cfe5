"""holonome: holonomic single-qubit gates in a two-cavity optomechanical system.

Gate synthesis (dark/bright-state loops with pulse area pi), open-system
dynamics under cavity decay and a thermal mechanical bath, and the standard
numerical experiments: photon transfer, entanglement generation, and
fidelity sweeps over damping grids.
"""

__version__ = "0.1.0"

from . import errors, experiments, fock, holonomy, lindblad, model, units

__all__ = [
    "__version__",
    "errors",
    "experiments",
    "fock",
    "holonomy",
    "lindblad",
    "model",
    "units",
]
