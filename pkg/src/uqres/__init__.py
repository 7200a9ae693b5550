"""uqres: exact desk-scale toolkit for quantum-resource analysis.

Modules:
  qkernel      foundation types (states, operators, channels) and dense kernels
  measures     static coherence / entanglement / distance measures
  interference channel-state duals and interference power of gates
  wigner       discrete Wigner functions, negativity and mana for odd primes
  circuits     branch-exact circuit IR and contextual-circuit constructions
  mps          matrix-product / valence-bond / cluster states
  protocols    two-party nonlocal-box protocols (BTT, PMQC, MBQC rows, CHSH)
  hamiltonian  term sums, Trotterization, automaton quenches, history states
  algorithms   resource analyses of standard circuit families
  cli          batch front end (``uqres`` command)
"""

from . import (algorithms, circuits, hamiltonian, interference, measures, mps,
               protocols, qkernel, wigner)
from .qkernel import (CapExceededError, DensityOperator, HilbertSpec, InvariantError,
                      QuantumChannel, ResourceError, StateVector, UnitaryOp, UqresError)

__version__ = "0.1.0"

__all__ = [
    "algorithms", "circuits", "hamiltonian", "interference", "measures", "mps",
    "protocols", "qkernel", "wigner",
    "CapExceededError", "DensityOperator", "HilbertSpec", "InvariantError",
    "QuantumChannel", "ResourceError", "StateVector", "UnitaryOp", "UqresError",
    "__version__",
]
