"""Spin angular-momentum matrices and the named model operators.

Spin matrices come from the ladder-operator construction and reproduce the
standard spin-3/2 representation exactly (entries are halves and half-root-3
values). Hamiltonians and coupling operators are built from a small named
catalog so that scenarios, configs, and tests all speak the same names.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ComplexMatrix = np.ndarray

# Dense storage only; dimensions beyond this are out of scope.
MAX_DIM = 64


@dataclass(frozen=True)
class SpinTriple:
    """The three spin matrices for a fixed total spin s."""

    s: float
    sx: ComplexMatrix
    sy: ComplexMatrix
    sz: ComplexMatrix

    @property
    def dim(self) -> int:
        return self.sx.shape[0]


@dataclass(frozen=True)
class OperatorSpec:
    """A named catalog operator or a literal matrix, times a real scale.

    scale plays the role of the energy unit E_g for Hamiltonians and is an
    ordinary prefactor for coupling operators (default 1).
    """

    name: str | None = None
    matrix: ComplexMatrix | None = None
    scale: float = 1.0

    def __post_init__(self):
        if (self.name is None) == (self.matrix is None):
            raise ValueError("OperatorSpec needs exactly one of name or matrix")


def spin_matrices(s: float) -> SpinTriple:
    """Build Sx, Sy, Sz for total spin s via ladder operators.

    Args:
        s: half-integer spin quantum number (1/2, 1, 3/2, ...).

    Returns:
        SpinTriple with (2s+1)-dimensional Hermitian matrices; Sz is
        diagonal with entries s, s-1, ..., -s.

    Raises:
        ValueError: if 2s is not a positive integer or the dimension
            exceeds the dense-storage cap.
    """
    two_s = 2 * s
    if two_s <= 0 or abs(two_s - round(two_s)) > 1e-12:
        raise ValueError(f"spin must be a positive half-integer, got {s}")
    dim = int(round(two_s)) + 1
    if dim > MAX_DIM:
        raise ValueError(f"spin {s} needs dimension {dim} > {MAX_DIM}")
    m = np.array([s - k for k in range(dim)], dtype=float)
    s_plus = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        s_plus[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    s_minus = s_plus.conj().T
    sx = (s_plus + s_minus) / 2
    sy = (s_plus - s_minus) / 2j
    sz = np.diag(m).astype(complex)
    return SpinTriple(s=s, sx=sx, sy=sy, sz=sz)


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Return ab - ba."""
    _check_dims(a, b)
    return a @ b - b @ a


def anticommutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Return ab + ba."""
    _check_dims(a, b)
    return a @ b + b @ a


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need equal square matrices, got {a.shape} and {b.shape}")


# ---------------------------------------------------------------------------
# Named catalog.
#
# Hamiltonians: the three symmetry classes of the model family.
# Couplings: every operator appearing in the classification scenarios plus
# a few extra probes of the same algebra. The name table is documented in
# the CLI reference (README).

_HAMILTONIANS = {
    "q_symmetric": lambda t: t.sx @ t.sy @ t.sz + t.sz @ t.sy @ t.sx,
    "tr_invariant": lambda t: anticommutator(t.sx, t.sz),
    "both_symmetric": lambda t: t.sz @ t.sz,
}

_COUPLINGS = {
    "sy2": lambda t: t.sy @ t.sy,
    "sxsy_sym": lambda t: anticommutator(t.sx, t.sy),
    "sxsysz": lambda t: t.sx @ t.sy @ t.sz,
    "sysz": lambda t: t.sy @ t.sz,
    "sx2": lambda t: t.sx @ t.sx,
    "sz": lambda t: t.sz.copy(),
    "isz": lambda t: 1j * t.sz,
    "sx": lambda t: t.sx.copy(),
    "sxsysz_sym": lambda t: t.sx @ t.sy @ t.sz + t.sz @ t.sy @ t.sx,
    "i_sxsysz_asym": lambda t: 1j * (t.sx @ t.sy @ t.sz - t.sz @ t.sy @ t.sx),
    "i_sxsysz_sym": lambda t: 1j * (t.sx @ t.sy @ t.sz + t.sz @ t.sy @ t.sx),
    "sxsy": lambda t: t.sx @ t.sy,
    "sx2sz": lambda t: t.sx @ t.sx @ t.sz,
}

# Accepted spellings -> canonical name. Keys are compared lowercase.
_ALIASES = {
    "sy^2": "sy2",
    "sxsy+sysx": "sxsy_sym",
    "sx^2": "sx2",
    "sxsysz+szsysx": "sxsysz_sym",
    "i(sxsysz-szsysx)": "i_sxsysz_asym",
    "i(sxsysz+szsysx)": "i_sxsysz_sym",
    "sx^2sz": "sx2sz",
    "{sx,sz}": "tr_invariant",
    "sz^2": "both_symmetric",
}

COUPLING_NAMES = tuple(_COUPLINGS)
HAMILTONIAN_NAMES = tuple(_HAMILTONIANS)


def canonical_name(name: str) -> str:
    """Resolve a catalog name or accepted alias to its canonical form."""
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in _COUPLINGS and key not in _HAMILTONIANS:
        known = ", ".join(sorted((*_COUPLINGS, *_HAMILTONIANS)))
        raise ValueError(f"unknown operator name {name!r}; known names: {known}")
    return key


def build_hamiltonian(spec: OperatorSpec, spins: SpinTriple) -> ComplexMatrix:
    """Resolve a Hamiltonian spec to a Hermitian matrix scaled by E_g.

    Args:
        spec: one of the named Hamiltonians (q_symmetric, tr_invariant,
            both_symmetric) or a literal Hermitian matrix; spec.scale is E_g.
        spins: spin matrices of the working dimension.

    Raises:
        ValueError: unknown name, or a literal matrix that is not Hermitian.
    """
    if spec.matrix is not None:
        h = np.asarray(spec.matrix, dtype=complex)
        _check_dims(h, spins.sz)
        if np.linalg.norm(h - h.conj().T) > 1e-12 * max(1.0, np.linalg.norm(h)):
            raise ValueError("literal Hamiltonian must be Hermitian")
        return spec.scale * h
    key = canonical_name(spec.name)
    if key not in _HAMILTONIANS:
        raise ValueError(f"{spec.name!r} names a coupling operator, not a Hamiltonian")
    return spec.scale * _HAMILTONIANS[key](spins)


def build_coupling(spec: OperatorSpec, spins: SpinTriple) -> ComplexMatrix:
    """Resolve a coupling spec to its matrix; hermiticity is never assumed."""
    if spec.matrix is not None:
        o = np.asarray(spec.matrix, dtype=complex)
        _check_dims(o, spins.sz)
        return spec.scale * o
    key = canonical_name(spec.name)
    if key not in _COUPLINGS:
        raise ValueError(f"{spec.name!r} names a Hamiltonian, not a coupling operator")
    return spec.scale * _COUPLINGS[key](spins)
