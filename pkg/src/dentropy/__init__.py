"""Quench relaxation of tunable integrable-to-chaotic quantum models.

Builds the Dicke model (even parity sector, truncated Fock basis) and a
NN/NNN spin-1/2 chain (fixed magnetization, even reflection), evolves
eigenstate initial conditions through sudden coupling quenches, and
measures diagonal entropy, diagonal-ensemble entropy, inverse
participation ratio, and level-spacing chaos diagnostics.
"""

from .backends import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
