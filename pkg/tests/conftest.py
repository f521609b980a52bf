import numpy as np
import pytest

import rcsbench as rb


@pytest.fixture(scope="session")
def grid_3x4():
    return rb.assign_patterns(rb.build_grid(3, 4))


@pytest.fixture(scope="session")
def grid_4x4():
    return rb.assign_patterns(rb.build_grid(4, 4))


@pytest.fixture(scope="session")
def demo60():
    return rb.sixty_qubit_grid()


@pytest.fixture(scope="session")
def deep_12q_state(grid_3x4):
    """Deep 12-qubit instance with near-ideal collision ratio (seed picked so
    D*sum(p^2)-1 is within 1e-4 of the chaotic-state value 1)."""
    circuit = rb.standard_circuit(grid_3x4, 14, seed=151)
    state = rb.run(circuit)
    return circuit, state, rb.probabilities(state)


def random_fsim(gen: np.random.Generator) -> rb.FsimParams:
    return rb.FsimParams(
        theta=float(gen.uniform(0, np.pi)),
        phi=float(gen.uniform(-np.pi, np.pi)),
        delta_plus=float(gen.uniform(-np.pi, np.pi)),
        delta_minus=float(gen.uniform(-np.pi, np.pi)),
        delta_minus_off=float(gen.uniform(-np.pi, np.pi)),
    )
