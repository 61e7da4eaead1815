"""Scalar diagnostics of trajectories: subspace entropy, purity, verdicts."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .operators import ComplexMatrix
from .symmetry import frob


class PositivityError(Exception):
    """Raised when a state has an eigenvalue too negative to be roundoff."""


# Eigenvalues above this (negative) floor are treated as roundoff and
# clamped to zero; anything below is a genuine positivity violation.
NEG_EIG_FLOOR = -1e-7


def von_neumann_entropy(rho: ComplexMatrix) -> float:
    """Von Neumann entropy -tr(rho ln rho) in nats.

    Accepts any Hermitian positive matrix; if the trace is off unity by
    more than 1e-8 the matrix is normalized first, so subspace blocks can
    be passed directly. Eigenvalues in [NEG_EIG_FLOOR, 0) are clamped to
    zero and 0 ln 0 counts as 0.

    Raises:
        PositivityError: if any eigenvalue lies below NEG_EIG_FLOOR.
    """
    rho = np.asarray(rho, dtype=complex)
    if frob(rho - rho.conj().T) > 1e-8 * max(1.0, frob(rho)):
        raise ValueError("entropy needs a Hermitian matrix")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-8:
        if tr <= 0:
            raise PositivityError(f"cannot normalize trace {tr:.3e}")
        rho = rho / tr
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < NEG_EIG_FLOOR:
        raise PositivityError(f"eigenvalue {lam.min():.3e} below {NEG_EIG_FLOOR}")
    lam = np.clip(lam, 0.0, 1.0)
    pos = lam[lam > 0]
    return float(-(pos * np.log(pos)).sum()) + 0.0  # avoid IEEE -0.0


def purity(rho: ComplexMatrix) -> float:
    """tr(rho^2) of the unit-trace version of rho."""
    rho = np.asarray(rho, dtype=complex)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-8:
        rho = rho / tr
    return float(np.trace(rho @ rho).real)


@dataclass(frozen=True)
class EntropySeries:
    """Subspace entropy along a trajectory.

    s_v is the entropy of the normalized subspace state (nats); trace_g is
    the raw subspace population, which can leak below one and is not
    guaranteed monotone.
    """

    times: np.ndarray
    s_v: np.ndarray
    trace_g: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.s_v) == len(self.trace_g)):
            raise ValueError("series arrays must share one length")


def entropy_response(s: EntropySeries, s0: EntropySeries) -> np.ndarray:
    """Pointwise entropy difference S(t) - S0(t) on a shared time grid.

    For a pure initial state evolved at gamma = 0 the reference entropy
    vanishes identically, so the response equals s itself.

    Raises:
        ValueError: if the two time grids differ.
    """
    if len(s.times) != len(s0.times) or not np.allclose(s.times, s0.times,
                                                        rtol=0, atol=1e-12):
        raise ValueError("entropy series live on different time grids")
    return s.s_v - s0.s_v


class Coherence(str, enum.Enum):
    COHERENT = "Coherence"
    DECOHERENT = "Decoherence"
    AMBIGUOUS = "Ambiguous"


DEFAULT_COH_TOL = 1e-6
DEFAULT_DEC_TOL = 1e-2


def coherence_verdict(s: EntropySeries, coh_tol: float = DEFAULT_COH_TOL,
                      dec_tol: float = DEFAULT_DEC_TOL) -> Coherence:
    """Classify a trajectory by the peak of its subspace entropy.

    Coherent when max s_v stays below coh_tol, decoherent when it exceeds
    dec_tol, ambiguous in between. The two thresholds sit four decades
    apart because coherent runs are zero up to integrator noise while
    decoherent ones reach order 0.1 and above; anything between the
    thresholds means the scenario or the tolerances need attention.
    """
    peak = float(np.max(s.s_v))
    if peak < coh_tol:
        return Coherence.COHERENT
    if peak > dec_tol:
        return Coherence.DECOHERENT
    return Coherence.AMBIGUOUS
