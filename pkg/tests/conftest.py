import numpy as np
import pytest

from enaqt import build_hamiltonian, effective_trap_rate, enaqt4_network

LAMBDA0 = 792.5

# (-1,-1,0,1)/sqrt(3): the eigenmode with no amplitude on the target site
# when the end-site detuning equals the chain coupling
DARK_VECTOR = np.array([-1.0, -1.0, 0.0, 1.0]) / np.sqrt(3.0)


@pytest.fixture(scope="session")
def design_net():
    """Design network with a sink long enough for z = 15 cm."""
    return enaqt4_network()


@pytest.fixture(scope="session")
def design_net_short_sink():
    """Same network with a 21-guide sink (too short for z = 15 cm)."""
    return enaqt4_network(sink=SinkSpec(n_sink=21))


@pytest.fixture(scope="session")
def design_net_open():
    """The four system guides alone."""
    return enaqt4_network(sink=None)


@pytest.fixture(scope="session")
def h_system(design_net_open):
    return build_hamiltonian(design_net_open, LAMBDA0)


@pytest.fixture(scope="session")
def design_kappa():
    return effective_trap_rate(1.5 / 1.75, 1.75)
