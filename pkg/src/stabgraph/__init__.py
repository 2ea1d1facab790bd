"""Stabilizer-state reachability graphs, entropy vectors and Clifford orbits."""

from .clifford import (
    CNOT,
    H,
    P,
    CanonicalKey,
    Circuit,
    GateOp,
    PauliString,
    StabilizerTableau,
    amplitudes,
    apply_circuit,
    apply_gate,
    basis_state,
    canonicalize,
    one_qubit_state,
    product_state,
    tableau_from_key,
)

__version__ = "0.1.0"
