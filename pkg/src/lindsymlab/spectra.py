"""Spectral decomposition and ground-doublet handling.

The models of interest have doubly degenerate ground levels. This module
extracts the ground subspace with a deterministic basis (phase-fixed, and
time-reversal-paired when the caller supplies a compatible anti-unitary),
checks Kramers-type even degeneracy, and restricts density matrices to the
subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import ComplexMatrix
from .symmetry import AntiUnitaryOp, DEFAULT_TOL, commutes_with_antiunitary, frob


class SubspaceDepletedError(Exception):
    """Raised when the subspace population is too small to normalize."""


def eigh(h: ComplexMatrix, tol: float = DEFAULT_TOL):
    """Hermitian eigendecomposition with an explicit hermiticity gate.

    Raises:
        ValueError: if h is not Hermitian within tol (relative, Frobenius).
    """
    h = np.asarray(h, dtype=complex)
    if frob(h - h.conj().T) > tol * max(1.0, frob(h)):
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigh(h)


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component real and positive."""
    idx = int(np.argmax(np.abs(v)))
    phase = v[idx] / abs(v[idx])
    return v / phase


@dataclass(frozen=True)
class GroundSubspace:
    """Ground level of a Hermitian matrix with a deterministic basis.

    basis has one orthonormal column per ground state; projector is the
    rank-dim orthogonal projector built from it. spans_full_space is set
    when the whole spectrum is degenerate (no meaningful gap).
    """

    energy: float
    basis: ComplexMatrix
    projector: ComplexMatrix
    dim: int
    spans_full_space: bool


def ground_subspace(h: ComplexMatrix, rel_tol: float = 1e-9,
                    pairing: AntiUnitaryOp | None = None) -> GroundSubspace:
    """Extract the ground subspace of h with a reproducible basis.

    Eigenvalues within rel_tol times the spectral spread of the minimum
    count as ground states. Each basis vector is phase-fixed so its
    largest-magnitude component is real positive. For a two-dimensional
    ground level, a caller-supplied anti-unitary that commutes with h
    fixes the second vector proportional to the image of the first,
    re-orthonormalized; the anti-unitary must map the subspace to itself.

    Raises:
        ValueError: if pairing is supplied but maps the first ground state
            out of the subspace (it then does not commute with h there).
    """
    vals, vecs = eigh(h)
    spread = float(vals[-1] - vals[0])
    if spread <= 1e-14 * max(1.0, abs(float(vals[0]))):
        basis = np.ascontiguousarray(vecs)
        basis = np.column_stack([_phase_fix(basis[:, k]) for k in range(basis.shape[1])])
        proj = basis @ basis.conj().T
        return GroundSubspace(energy=float(vals[0]), basis=basis, projector=proj,
                              dim=basis.shape[1], spans_full_space=True)
    mask = vals - vals[0] <= rel_tol * spread
    basis = np.column_stack([_phase_fix(vecs[:, k]) for k in np.nonzero(mask)[0]])
    proj = basis @ basis.conj().T
    if pairing is not None and basis.shape[1] == 2:
        phi_plus = basis[:, 0]
        partner = pairing.act_state(phi_plus)
        leak = partner - proj @ partner
        if frob(leak) > 1e-9:
            raise ValueError(
                "pairing operator maps the ground state out of its subspace")
        partner = partner - phi_plus * (phi_plus.conj() @ partner)
        partner = partner / np.linalg.norm(partner)
        basis = np.column_stack([phi_plus, _phase_fix(partner)])
        proj = basis @ basis.conj().T
    return GroundSubspace(energy=float(vals[0]), basis=basis, projector=proj,
                          dim=basis.shape[1], spans_full_space=False)


def kramers_check(h: ComplexMatrix, t: AntiUnitaryOp,
                  rel_tol: float = 1e-9) -> bool:
    """True when every eigenvalue of h has even multiplicity.

    Meaningful for anti-unitary symmetries squaring to -1, where even
    degeneracy is forced; with t squaring to +1 odd multiplicities can
    occur and the check simply reports them.

    Raises:
        ValueError: if h does not commute with t.
    """
    if not commutes_with_antiunitary(h, t):
        raise ValueError("Hamiltonian does not commute with the anti-unitary")
    vals, _ = eigh(h)
    spread = max(float(vals[-1] - vals[0]), 1e-30)
    groups = []
    for v in vals:
        if groups and abs(v - groups[-1][-1]) <= rel_tol * spread:
            groups[-1].append(v)
        else:
            groups.append([v])
    return all(len(g) % 2 == 0 for g in groups)


def subspace_density(rho: ComplexMatrix, basis: ComplexMatrix,
                     tol: float = DEFAULT_TOL) -> ComplexMatrix:
    """Restrict a density matrix to the span of basis columns.

    Returns basis^dag rho basis; its trace is the subspace population and
    is generally below one once leakage sets in.

    Raises:
        ValueError: if rho is not Hermitian unit-trace within tol.
    """
    rho = np.asarray(rho, dtype=complex)
    if frob(rho - rho.conj().T) > tol * max(1.0, frob(rho)):
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError("density matrix must have unit trace")
    return basis.conj().T @ rho @ basis


def normalize_subspace(rho_g: ComplexMatrix,
                       trace_floor: float = 1e-12) -> ComplexMatrix:
    """Rescale a subspace block to unit trace.

    Raises:
        SubspaceDepletedError: if the block trace is at or below trace_floor,
            where normalization would amplify numerical noise.
    """
    tr = float(np.trace(rho_g).real)
    if tr <= trace_floor:
        raise SubspaceDepletedError(f"subspace population {tr:.3e} below floor")
    return rho_g / tr
