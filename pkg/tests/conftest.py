import numpy as np
import pytest

from linalg import DEFAULT_TOL, orthonormal_basis
from mps import MpsTensor

# Thresholds used by the worked examples
SUBSPACE_RESIDUAL = 1e-8
WITNESS_RESIDUAL = 1e-12
PUSHING_RESIDUAL = 1e-9


@pytest.fixture
def tol():
    return DEFAULT_TOL


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def basis_vector(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def ket(bits: str, d: int = 2) -> np.ndarray:
    """|i_1 ... i_n> in big-endian order, e.g. ket("010")"""
    return basis_vector(int(bits, d), d ** len(bits))


def w_vector(n: int, excitations: int = 1) -> np.ndarray:
    """Unnormalized Dicke state: all n-bit strings with the given number of ones"""
    v = np.zeros(2 ** n, dtype=complex)
    for index in range(2 ** n):
        if bin(index).count("1") == excitations:
            v[index] = 1.0
    return v


def span(*vectors):
    return orthonormal_basis(list(vectors), DEFAULT_TOL)


def random_tensor_seeded(seed: int, d: int, D: int) -> MpsTensor:
    rng = np.random.default_rng(seed)
    return MpsTensor(rng.standard_normal((d, D, D)) + 1j * rng.standard_normal((d, D, D)))


def well_conditioned(rng: np.random.Generator, D: int) -> np.ndarray:
    """I + E with ‖E‖_2 = 0.5, so the condition number is at most 3"""
    E = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    return np.eye(D) + 0.5 * E / np.linalg.norm(E, 2)
