"""Lindblad dynamics of symmetry-protected degenerate subspaces.

A small dense-matrix laboratory for the question: when a Hamiltonian's
degenerate ground doublet is protected by a symmetry, does coherence in
that doublet survive Markovian dissipation through a coupling operator O?

The answer depends on whether the protecting symmetry is unitary (a group
representation, here the quaternion group on spin 3/2) or anti-unitary
(time reversal), and on whether O is Hermitian:

* unitary symmetry, [O, G] = 0     -> coherence survives (any O)
* anti-unitary symmetry, [O, T] = 0 -> survives only for Hermitian O

Modules
-------
operators    spin matrices, named Hamiltonians and coupling operators
symmetry     quaternion group, time reversal, Schur proportionality tests
spectra      eigendecomposition, ground subspaces, subspace densities
lindblad     master-equation engine: rhs, Liouvillian, RK4 and expm
observables  von Neumann entropy, entropy series, coherence verdicts
response     first-order-in-gamma perturbative oracle
classify     the 16-scenario classification table harness
cli          command-line front end
"""

from lindsymlab import (
    classify,
    lindblad,
    observables,
    operators,
    response,
    spectra,
    symmetry,
)

__all__ = [
    "classify",
    "lindblad",
    "observables",
    "operators",
    "response",
    "spectra",
    "symmetry",
]

__version__ = "0.1.0"
