"""First-order-in-gamma response: an oracle independent of the integrators.

For an initial state inside an eigenspace of H, the exact first-order
correction to the density matrix is a time integral of dissipator terms
conjugated into the frame comoving with the coherent evolution. Because the
formula never touches the Lindblad propagators, it validates them: the
difference between the full evolution and (rho_0 + delta_rho) must shrink
as gamma squared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lindblad import Trajectory
from .observables import von_neumann_entropy
from .operators import ComplexMatrix, anticommutator
from .spectra import eigh
from .symmetry import frob


@dataclass(frozen=True)
class PerturbativeResult:
    """Bundle of first-order diagnostics produced by sweep validation."""

    delta_rho: ComplexMatrix
    delta_s_v: float
    order_estimate: float


def interaction_picture(o: ComplexMatrix, h: ComplexMatrix,
                        t: float) -> ComplexMatrix:
    """Return exp(iHt) O exp(-iHt) through the eigenbasis of H.

    Raises:
        ValueError: if h is not Hermitian (from the eigendecomposition gate).
    """
    vals, vecs = eigh(h)
    w = vecs.conj().T @ o @ vecs
    phase = np.exp(1j * vals * t)
    return vecs @ (w * np.outer(phase, phase.conj())) @ vecs.conj().T


def _simpson_weights(n_panels: int, width: float) -> np.ndarray:
    w = np.ones(n_panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (width / n_panels / 3.0)


def delta_rho(rho0_traj: Trajectory, o: ComplexMatrix, h: ComplexMatrix,
              gamma: float, t: float, n_quad: int = 128) -> ComplexMatrix:
    """First-order correction delta_rho(t), composite Simpson in t'.

    Evaluates

        gamma * int_0^t dt' [ 2 o(t') rho_0(t) o(t')^dag
                              - {o(t')^dag o(t'), rho_0(t)} ]

    with o(t') the coupling operator carried backward along the coherent
    evolution and rho_0(t) held at the outer time. Exact to first order for
    initial states prepared inside an eigenspace of h. Manifestly linear
    in gamma.

    Args:
        rho0_traj: reference trajectory integrated with gamma = 0; must
            contain the requested time t on its grid.
        n_quad: even number of Simpson panels, at least 16.

    Raises:
        ValueError: gamma-nonzero reference, odd or too-small n_quad, or t
            missing from the reference grid.
    """
    if rho0_traj.meta.get("gamma", None) != 0:
        raise ValueError("reference trajectory must be integrated at gamma = 0")
    if n_quad < 16 or n_quad % 2 != 0:
        raise ValueError("n_quad must be an even panel count >= 16")
    hits = np.nonzero(np.abs(rho0_traj.times - t) <= 1e-9 * max(1.0, abs(t)))[0]
    if len(hits) == 0:
        raise ValueError(f"t={t} is not on the reference trajectory grid")
    rho0_t = rho0_traj.states[int(hits[0])]

    weights = _simpson_weights(n_quad, t)
    acc = np.zeros_like(rho0_t)
    for k, w in enumerate(weights):
        tp = t * k / n_quad
        o_tp = interaction_picture(o, h, -tp)
        odo = o_tp.conj().T @ o_tp
        acc = acc + w * (2.0 * (o_tp @ rho0_t @ o_tp.conj().T)
                         - anticommutator(odo, rho0_t))
    return gamma * acc


# Regularization for the entropy response: the reference state is usually
# pure, where ln(rho) is singular, so mix in eps of the maximally mixed
# state before differencing the exact entropy functional.
ENTROPY_REG_EPS = 1e-8


def delta_entropy(rho0_sub: ComplexMatrix, delta_sub: ComplexMatrix) -> float:
    """Entropy response of a subspace state to a first-order correction.

    Returns exactly 0 when delta_sub is proportional to rho0_sub: a
    proportional correction only rescales the subspace population, and the
    normalized state, hence its entropy, is unchanged. Otherwise evaluates
    the finite difference S(rho_reg + delta) - S(rho_reg) of the exact
    (normalized) entropy functional at the regularized reference.

    Raises:
        ValueError: if rho0_sub does not have unit trace within 1e-9.
    """
    rho0 = np.asarray(rho0_sub, dtype=complex)
    delta = np.asarray(delta_sub, dtype=complex)
    if abs(np.trace(rho0) - 1.0) > 1e-9:
        raise ValueError("reference subspace state must have unit trace")
    denom = float(np.trace(rho0.conj().T @ rho0).real)
    coeff = np.trace(rho0.conj().T @ delta) / denom
    if frob(delta - coeff * rho0) <= 1e-12 * max(1.0, frob(delta)):
        return 0.0
    d = rho0.shape[0]
    rho_reg = (1.0 - ENTROPY_REG_EPS) * rho0 + ENTROPY_REG_EPS * np.eye(d) / d
    return von_neumann_entropy(rho_reg + delta) - von_neumann_entropy(rho_reg)


def scaling_exponent(gammas, residuals) -> float:
    """Least-squares slope of log(residual) against log(gamma)."""
    x = np.log(np.asarray(gammas, dtype=float))
    y = np.log(np.asarray(residuals, dtype=float))
    if len(x) < 2:
        raise ValueError("need at least two points to fit a slope")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
