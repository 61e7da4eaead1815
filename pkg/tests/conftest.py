import numpy as np
import pytest

from lindsymlab import classify, operators, symmetry


@pytest.fixture(scope="session")
def spins():
    return operators.spin_matrices(1.5)


@pytest.fixture(scope="session")
def group():
    return symmetry.quaternion_group()


@pytest.fixture(scope="session")
def trev():
    return symmetry.time_reversal(1.5)


@pytest.fixture(scope="session")
def hams(spins):
    return {
        name: operators.build_hamiltonian(operators.OperatorSpec(name=name), spins)
        for name in operators.HAMILTONIAN_NAMES
    }


@pytest.fixture(scope="session")
def scenarios():
    return {sc.name: sc for sc in classify.catalog()}


def random_density(rng, dim=4):
    """Random Hermitian unit-trace matrix (not necessarily positive)."""
    while True:
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = (a + a.conj().T) / 2
        tr = np.trace(rho).real
        if abs(tr) > 0.5:  # keep the normalization mild
            return rho / tr


def random_state(rng, dim=4):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
