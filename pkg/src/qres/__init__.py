"""Quantum-resource costing of molecular ground-state energy estimation.

Pipeline: FCIDUMP integrals -> Jordan-Wigner qubit Hamiltonian ->
measurable/simulable fragments (commuting, anticommuting, or orbital-rotated
fermionic) -> measurement counts, Trotter commutator norms, LCU 1-norms,
QCC/iQCC variational states, all checked against exact reference solutions.
"""

from .integrals import (
    FermionicOperator,
    SpinOrbitalIntegrals,
    assemble_fermionic_hamiltonian,
    parse_fcidump,
    serialize_fcidump,
)
from .pauli import (
    PauliPolynomial,
    PauliProduct,
    anticommutes,
    commutes,
    expectation,
    jordan_wigner,
    multiply,
    variance,
)
from .states import (
    SymmetrySector,
    WaveVector,
    cisd_state,
    eigensolve,
    find_pauli_symmetries,
    hf_state,
    overlap_sum,
)

__all__ = [
    "FermionicOperator",
    "SpinOrbitalIntegrals",
    "assemble_fermionic_hamiltonian",
    "parse_fcidump",
    "serialize_fcidump",
    "PauliPolynomial",
    "PauliProduct",
    "anticommutes",
    "commutes",
    "expectation",
    "jordan_wigner",
    "multiply",
    "variance",
    "SymmetrySector",
    "WaveVector",
    "cisd_state",
    "eigensolve",
    "find_pauli_symmetries",
    "hf_state",
    "overlap_sum",
]
