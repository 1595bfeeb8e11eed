import numpy as np
import pytest

from qcorr.linalg import SubsystemLayout
from qcorr.quantum_state import pure_state

LN2 = np.log(2)


def bell_vector():
    return np.array([1, 0, 0, 1]) / np.sqrt(2)


def two_bell_vector():
    """(|00> + |11>)_12 (|00> + |11>)_34 / 2, written out component by component."""
    v = np.zeros(16)
    for idx in (0b0000, 0b0011, 0b1100, 0b1111):
        v[idx] = 0.5
    return v


@pytest.fixture
def bell():
    return pure_state(bell_vector(), SubsystemLayout.qubits(2))


@pytest.fixture
def two_bell():
    return pure_state(two_bell_vector(), SubsystemLayout.qubits(4))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
