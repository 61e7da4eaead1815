"""Dissipative evolution of a density matrix with a single coupling channel.

The master equation is

    drho/dt = -i [H, rho] + gamma (2 O rho O^dag - {O^dag O, rho})

with the factor-2 convention on the sandwich term. Everything here works
with either the matrix form (rhs, RK4 stepping) or the vectorized form
(Liouvillian supermatrix acting on row-major vec(rho)); the two routes are
kept independent so they can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .operators import ComplexMatrix, anticommutator, commutator


class StepSizeError(Exception):
    """Raised when fixed-step integration visibly loses the trace."""


def rhs(rho: ComplexMatrix, h: ComplexMatrix, o: ComplexMatrix,
        gamma: float) -> ComplexMatrix:
    """Right-hand side of the master equation in matrix form."""
    odo = o.conj().T @ o
    return (-1j * commutator(h, rho)
            + gamma * (2.0 * (o @ rho @ o.conj().T) - anticommutator(odo, rho)))


def vec(rho: ComplexMatrix) -> np.ndarray:
    """Row-major vectorization: row index varies slowest."""
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvec(v: np.ndarray) -> ComplexMatrix:
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return np.asarray(v, dtype=complex).reshape(n, n)


def liouvillian_matrix(h: ComplexMatrix, o: ComplexMatrix,
                       gamma: float) -> ComplexMatrix:
    """Supermatrix L with vec(drho/dt) = L vec(rho), row-major convention.

    Uses vec(A X B) = (A kron B^T) vec(X). The left trace vector is a zero
    mode: vec(I)^dag L = 0, which encodes trace preservation.
    """
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    odo = o.conj().T @ o
    l_h = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    l_d = (2.0 * np.kron(o, o.conj())
           - np.kron(odo, eye) - np.kron(eye, odo.T))
    return l_h + gamma * l_d


def default_dt(h: ComplexMatrix, o: ComplexMatrix, gamma: float) -> float:
    """Step size keeping RK4 well inside its stability region.

    Scales inversely with the stiffest of the Hamiltonian and dissipative
    rates (Frobenius norms), floored at 1 so weak problems still resolve
    unit-time structure.
    """
    odo = o.conj().T @ o
    rate = max(float(np.linalg.norm(h)), gamma * float(np.linalg.norm(odo)), 1.0)
    return 0.01 / rate


@dataclass
class Trajectory:
    """Sampled evolution: times[k] pairs with states[k] (a density matrix)."""

    times: np.ndarray
    states: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)


def evolve_rk4(rho0: ComplexMatrix, h: ComplexMatrix, o: ComplexMatrix,
               gamma: float, t_max: float, dt: float | None = None,
               n_samples: int = 201) -> Trajectory:
    """Integrate the master equation with classical fixed-step RK4.

    The requested dt is snapped so that an integer number of equal steps
    lands exactly on each of the n_samples uniformly spaced sample times.
    Stored samples are re-Hermitized as (rho + rho^dag)/2; the drift of
    trace and hermiticity of the raw state is recorded in meta.

    Raises:
        StepSizeError: if the running trace deviates from one by more than
            1e-6, the signature of a step size outside the stable region.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    if dt is None:
        dt = default_dt(h, o, gamma)
    intervals = n_samples - 1
    steps_per_sample = max(1, int(np.ceil(t_max / dt / intervals)))
    dt_eff = t_max / (intervals * steps_per_sample)

    times = np.linspace(0.0, t_max, n_samples)
    d = rho0.shape[0]
    states = np.empty((n_samples, d, d), dtype=complex)
    rho = np.asarray(rho0, dtype=complex).copy()
    states[0] = (rho + rho.conj().T) / 2
    trace_drift = abs(np.trace(rho) - 1.0)
    herm_drift = float(np.linalg.norm(rho - rho.conj().T))

    for k in range(1, n_samples):
        for _ in range(steps_per_sample):
            k1 = rhs(rho, h, o, gamma)
            k2 = rhs(rho + 0.5 * dt_eff * k1, h, o, gamma)
            k3 = rhs(rho + 0.5 * dt_eff * k2, h, o, gamma)
            k4 = rhs(rho + dt_eff * k3, h, o, gamma)
            rho = rho + (dt_eff / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        err = abs(np.trace(rho) - 1.0)
        trace_drift = max(trace_drift, err)
        herm_drift = max(herm_drift, float(np.linalg.norm(rho - rho.conj().T)))
        if err > 1e-6:
            raise StepSizeError(
                f"trace drifted to {err:.3e} at t={times[k]:.4g}; reduce dt")
        states[k] = (rho + rho.conj().T) / 2

    meta = {"integrator": "rk4", "gamma": gamma, "dt": dt_eff,
            "trace_drift": float(trace_drift), "herm_drift": herm_drift}
    return Trajectory(times=times, states=states, meta=meta)


def evolve_expm(rho0: ComplexMatrix, h: ComplexMatrix, o: ComplexMatrix,
                gamma: float, times: np.ndarray) -> Trajectory:
    """Propagate through the matrix exponential of the Liouvillian.

    Exact up to roundoff for any step, so it serves as the reference the
    RK4 route is validated against. Propagators are cached per distinct
    time increment, which reduces a uniform grid to a single expm call.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 1 or times[0] < 0:
        raise ValueError("times must be a 1d grid starting at t >= 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    l_mat = liouvillian_matrix(h, o, gamma)
    d = rho0.shape[0]
    states = np.empty((len(times), d, d), dtype=complex)
    props: dict[float, np.ndarray] = {}

    def prop(delta: float) -> np.ndarray:
        key = float(delta)
        if key not in props:
            props[key] = scipy.linalg.expm(l_mat * key)
        return props[key]

    v = vec(rho0)
    if times[0] > 0:
        v = prop(times[0]) @ v
    states[0] = unvec(v)
    for k in range(1, len(times)):
        v = prop(times[k] - times[k - 1]) @ v
        states[k] = unvec(v)
    meta = {"integrator": "expm", "gamma": gamma}
    return Trajectory(times=times, states=states, meta=meta)


@dataclass(frozen=True)
class BlockIdentity:
    """Result of testing a subspace block for proportionality to identity."""

    proportional: bool
    coefficient: complex
    residual: float


def subspace_block(l_matrix: ComplexMatrix, basis: ComplexMatrix) -> ComplexMatrix:
    """Restrict a Liouvillian to the coherence block of a subspace.

    The block acts on vectorized subspace operators |phi_c><phi_d| in
    row-major pair order (for a doublet: ++, +-, -+, --). Its columns are
    the images of those dyads, re-expressed in the same dyad basis; when
    the subspace is not invariant the block is the compression.
    """
    g = basis.shape[1]
    cols = [np.kron(basis[:, c], basis[:, d].conj())
            for c in range(g) for d in range(g)]
    p = np.column_stack(cols)
    return p.conj().T @ l_matrix @ p


def block_identity_test(block: ComplexMatrix,
                        tol: float = 1e-9) -> BlockIdentity:
    """Check block = c * I, the algebraic criterion for preserved coherence.

    The coefficient is tr(block)/dim and the residual is Frobenius. If the
    block is a multiple of the identity, every subspace density matrix is
    rescaled uniformly: populations and coherences decay at the same rate
    and the normalized subspace state never moves.
    """
    dim = block.shape[0]
    coeff = complex(np.trace(block) / dim)
    residual = float(np.linalg.norm(block - coeff * np.eye(dim)))
    return BlockIdentity(proportional=residual <= tol * max(1.0, abs(coeff)),
                         coefficient=coeff, residual=residual)
