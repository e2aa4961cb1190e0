import numpy as np
import pytest

from cliffpencil import build_clifford_module
from cliffpencil.fields import FourierField, Frame
from cliffpencil.hamiltonians import TrigHamiltonian
from cliffpencil.reduction import ReducedProblem, choose_truncation


def rand_field(rank, dim_v, cutoff, rng, scale=1.0, zero_mean=False):
    """Random real field with Hermitian coefficients."""
    f = FourierField(rank, dim_v, cutoff)
    f.coeffs = scale * (rng.standard_normal(f.coeffs.shape)
                        + 1j * rng.standard_normal(f.coeffs.shape))
    f = f.hermitianize()
    if zero_mean:
        f = f.zero_mean()
    return f


def a1_hamiltonian():
    return TrigHamiltonian(1, 2, [
        {"m": [0], "n": [1, 0], "cos": 0.1},
        {"m": [0], "n": [0, 1], "cos": 0.1},
    ])


@pytest.fixture(scope="session")
def a1_problem():
    H = a1_hamiltonian()
    frame = Frame(np.array([[1.0]]))
    module = build_clifford_module(1)
    trunc = choose_truncation(H, frame, cutoff=24, q_max=0.25)
    return ReducedProblem(H, frame, module, trunc)


def random_reduced_point(problem, rng, fiber_scale=0.3):
    z = np.zeros(problem.n_dof)
    z[: problem.dim_v] = rng.uniform(0.0, 1.0, problem.dim_v)
    if problem.n_fiber:
        z[problem.dim_v:] = fiber_scale * rng.standard_normal(problem.n_fiber) \
            / np.sqrt(problem.n_fiber)
    return z
