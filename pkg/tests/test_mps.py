import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import DENSE_CAP_ENV
from conftest import ket, random_tensor_seeded, span, w_vector, well_conditioned
from errors import ContractViolation, DenseCapExceeded, DimensionMismatch
from gallery import (afm_ising, aklt, counterexample_c, dicke, domain_wall,
                     gen_w, ghz, w_momentum, w_state)
from linalg import contains, equal, orthonormal_basis, span_sum
from mps import (MpsTensor, StateVector, block_decompose, boundary_basis,
                 check_dense, conjugate, direct_sum, mps_state,
                 periodic_subspace, physical_subspace, product_span,
                 product_state, random_tensor, translate, translate_subspace,
                 translation_permutation, transpose_tensor, virtual_subspace,
                 word_products)


def reverse_sites(v: np.ndarray, d: int, n: int) -> np.ndarray:
    return v.reshape((d,) * n).transpose(tuple(range(n - 1, -1, -1))).ravel()


def ket_bra(mu, nu, D=2):
    m = np.zeros((D, D), dtype=complex)
    m[mu, nu] = 1.0
    return m


# =============================================================================
# Tensors and states
# =============================================================================

def test_tensor_validation():
    with pytest.raises(DimensionMismatch):
        MpsTensor(np.zeros((2, 2, 3)))
    with pytest.raises(ContractViolation):
        MpsTensor(np.zeros((2, 2, 2)))


def test_tensor_shape():
    A = aklt()
    assert (A.d, A.D) == (3, 2)
    np.testing.assert_allclose(A[1], -np.sqrt(1 / 3) * np.diag([1, -1]))


def test_word_products_order():
    A = w_state()
    words = word_products(A, 2)
    assert words.shape == (4, 2, 2)
    # word index 1 is (i_1, i_2) = (0, 1)
    np.testing.assert_allclose(words[1], A[0] @ A[1])
    np.testing.assert_allclose(words[3], np.zeros((2, 2)))


def test_mps_state_w():
    psi = mps_state(w_state(), ket_bra(1, 0) / np.sqrt(3), 3)
    expected = (ket("100") + ket("010") + ket("001")) / np.sqrt(3)
    np.testing.assert_allclose(psi.amplitudes, expected, atol=1e-12)


def test_mps_state_zero_boundary(rng):
    psi = mps_state(random_tensor(2, 3, rng), np.zeros((3, 3)), 4)
    assert not np.any(psi.amplitudes)


def test_mps_state_is_linear_in_boundary(rng):
    A = random_tensor(2, 3, rng)
    X, Y = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(2))
    a, b = 0.7 - 1.2j, -2.0 + 0.3j
    combined = mps_state(A, a * X + b * Y, 4).amplitudes
    expected = a * mps_state(A, X, 4).amplitudes + b * mps_state(A, Y, 4).amplitudes
    np.testing.assert_allclose(combined, expected, atol=1e-12)


def test_mps_state_ghz():
    psi = mps_state(ghz(), np.eye(2), 3)
    np.testing.assert_allclose(psi.amplitudes, ket("000") + ket("111"))


def test_mps_state_boundary_shape():
    with pytest.raises(DimensionMismatch):
        mps_state(w_state(), np.eye(3), 2)


def test_product_state_matches_uniform_mps(rng):
    A = random_tensor(2, 2, rng)
    X = rng.standard_normal((2, 2))
    np.testing.assert_allclose(product_state(X, [A] * 4).amplitudes,
                               mps_state(A, X, 4).amplitudes, atol=1e-12)


def test_state_vector_addition():
    a = StateVector(2, 2, ket("01"))
    b = StateVector(2, 2, ket("10"))
    assert (a + b).norm() == pytest.approx(np.sqrt(2))
    with pytest.raises(DimensionMismatch):
        a + StateVector(3, 2, ket("010"))


def test_dense_cap(monkeypatch):
    assert check_dense(2, 10) == 1024
    monkeypatch.setenv(DENSE_CAP_ENV, "16")
    with pytest.raises(DenseCapExceeded):
        physical_subspace(w_state(), 5)
    with pytest.raises(DenseCapExceeded):
        mps_state(w_state(), np.eye(2), 5)


def test_random_tensor_is_seeded():
    A = random_tensor(2, 3, np.random.default_rng(5))
    B = random_tensor(2, 3, np.random.default_rng(5))
    np.testing.assert_array_equal(A.matrices, B.matrices)
    assert not np.any(random_tensor(2, 3, np.random.default_rng(5), "real").matrices.imag)
    with pytest.raises(ContractViolation):
        random_tensor(2, 2, np.random.default_rng(0), "uniform")


# =============================================================================
# Physical and virtual subspaces
# =============================================================================

def test_physical_subspace_w():
    S = physical_subspace(w_state(), 3)
    assert S.dim == 2
    assert equal(S, span(ket("000"), w_vector(3)))


def test_physical_subspace_domain_wall():
    S = physical_subspace(domain_wall(), 4)
    assert S.dim == 3
    dw = ket("0001") + ket("0011") + ket("0111")
    assert contains(S, span(ket("0000"), ket("1111"), dw))


def test_physical_subspace_afm_ising():
    assert equal(physical_subspace(afm_ising(), 2), span(ket("01"), ket("10")))


def test_physical_subspace_spanned_by_boundary_states(rng):
    A = random_tensor(2, 2, rng)
    states = [mps_state(A, X, 3).amplitudes for X in boundary_basis(2)]
    assert equal(physical_subspace(A, 3), orthonormal_basis(states))


def test_virtual_subspace_w():
    V = virtual_subspace(w_state(), 5)
    assert V.dim == 2
    assert equal(V, span(np.eye(2).ravel(), ket_bra(0, 1).ravel()))


def test_virtual_subspace_afm_ising():
    assert equal(virtual_subspace(afm_ising(), 1), span(ket_bra(1, 0).ravel(), ket_bra(0, 1).ravel()))


def test_virtual_subspace_dicke():
    A = dicke(3)
    V = virtual_subspace(A, 4)
    assert V.dim == 3
    assert equal(V, span(np.eye(3).ravel(), A[1].ravel(), (A[1] @ A[1]).ravel()))


SUBSPACE_TENSORS = {
    "w_state": w_state,
    "domain_wall": domain_wall,
    "afm_ising": afm_ising,
    "aklt": aklt,
    "dicke3": lambda: dicke(3),
    "counterexample_c": counterexample_c,
}


@pytest.mark.parametrize("name", sorted(SUBSPACE_TENSORS))
def test_physical_subspace_dimension_bounded_by_bond(name):
    A = SUBSPACE_TENSORS[name]()
    for n in range(1, 7):
        assert physical_subspace(A, n).dim <= A.D ** 2, f"n={n}"


@pytest.mark.parametrize("name", sorted(SUBSPACE_TENSORS))
def test_virtual_subspace_concatenation(name):
    A = SUBSPACE_TENSORS[name]()
    V = {j: virtual_subspace(A, j) for j in range(1, 9)}
    for j in range(1, 8):
        for k in range(1, 9 - j):
            assert equal(V[j + k], product_span(V[j], V[k], A.D)), f"j={j}, k={k}"


@pytest.mark.parametrize("scale", [10.0, 100.0])
def test_physical_subspace_survives_skewed_gauge(scale):
    A = w_state()
    B = conjugate(A, np.diag([scale, 1.0]))
    for n in range(1, 13):
        S = physical_subspace(B, n)
        assert S.dim == 2, f"n={n}"
        assert equal(S, physical_subspace(A, n))


def test_physical_subspace_of_gauged_nilpotent_tensor(rng):
    A = MpsTensor([ket_bra(0, 1), 2 * ket_bra(0, 1)])
    B = conjugate(A, well_conditioned(rng, 2))
    assert physical_subspace(B, 1).dim == 1
    assert physical_subspace(B, 2).is_zero
    assert physical_subspace(B, 5).is_zero


def test_virtual_subspace_matches_word_span(rng):
    A = random_tensor(2, 3, rng)
    for j in (1, 2, 3, 5):
        words = word_products(A, j).reshape(-1, 9)
        assert equal(virtual_subspace(A, j), orthonormal_basis(words))


# =============================================================================
# Translation and periodic subspaces
# =============================================================================

def test_translate_basis_state():
    v = StateVector(3, 2, ket("001"))
    np.testing.assert_array_equal(translate(v).amplitudes, ket("100"))
    np.testing.assert_array_equal(translate(v, -1).amplitudes, ket("010"))


def test_translation_permutation_agrees_with_translate(rng):
    v = StateVector(4, 3, rng.standard_normal(81))
    perm = translation_permutation(3, 4)
    np.testing.assert_array_equal(translate(v).amplitudes, v.amplitudes[perm])


@settings(deadline=None, max_examples=30)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 6))
def test_translation_has_order_n(seed, n):
    rng = np.random.default_rng(seed)
    v = StateVector(n, 2, rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n))
    w = v
    for _ in range(n):
        w = translate(w)
    np.testing.assert_allclose(w.amplitudes, v.amplitudes)
    assert translate(v).norm() == pytest.approx(v.norm())


def test_w_momentum_state_is_translation_eigenvector():
    p = 2 * np.pi / 5
    v = mps_state(w_momentum(p), ket_bra(1, 0), 5)
    np.testing.assert_allclose(v.amplitudes[[16, 8, 4, 2, 1]], np.exp(-1j * p * np.arange(5)))
    np.testing.assert_allclose(translate(v).amplitudes, np.exp(1j * p) * v.amplitudes, atol=1e-12)


def test_periodic_subspace_afm_odd_is_zero():
    assert periodic_subspace(afm_ising(), 3).is_zero


def test_periodic_subspace_w_is_physical():
    assert equal(periodic_subspace(w_state(), 4), physical_subspace(w_state(), 4))


def test_periodic_subspace_w_momentum_off_resonance():
    S = periodic_subspace(w_momentum(1.0), 4)
    assert equal(S, span(ket("0000")))


def test_periodic_subspace_is_translation_invariant():
    S = periodic_subspace(domain_wall(), 5)
    assert equal(translate_subspace(S, 2, 5), S)
    assert S.dim == 2


# =============================================================================
# Gauge, direct sum, transpose
# =============================================================================

def test_conjugate_identity(rng):
    A = random_tensor(2, 3, rng)
    np.testing.assert_allclose(conjugate(A, np.eye(3)).matrices, A.matrices)


def test_conjugate_preserves_physical_subspace(rng):
    A = domain_wall()
    B = conjugate(A, well_conditioned(rng, 2))
    for n in (2, 3, 4):
        assert equal(physical_subspace(A, n), physical_subspace(B, n))


def test_conjugate_rejects_singular():
    with pytest.raises(ContractViolation):
        conjugate(w_state(), np.array([[1, 1], [1, 1]]))


def test_direct_sum_spans_sum():
    A, B = w_state(), afm_ising()
    C = direct_sum(A, B)
    assert C.D == 4
    for n in (2, 3, 4):
        assert equal(physical_subspace(C, n), span_sum(physical_subspace(A, n), physical_subspace(B, n)))


def test_direct_sum_requires_same_d():
    with pytest.raises(DimensionMismatch):
        direct_sum(w_state(), aklt())


def test_transpose_reverses_sites():
    A = domain_wall()
    for n in (2, 3, 4):
        S = physical_subspace(A, n)
        reversed_basis = [reverse_sites(v, 2, n) for v in S.vectors()]
        assert equal(physical_subspace(transpose_tensor(A), n), orthonormal_basis(reversed_basis))


# =============================================================================
# block_decompose
# =============================================================================

def test_block_decompose_w():
    B, _ = block_decompose(w_state(), ket_bra(0, 0))
    np.testing.assert_allclose(B[0], np.eye(2))
    np.testing.assert_allclose(B[1], np.zeros((2, 2)))


def test_block_decompose_ghz_has_no_waves(rng):
    B, waves = block_decompose(ghz(), ket_bra(0, 0))
    np.testing.assert_allclose(B.matrices, ghz().matrices)
    X = rng.standard_normal((2, 2))
    assert not np.any(waves(X, 4).amplitudes)


def test_block_decompose_rejects_non_invariant_projector():
    with pytest.raises(ContractViolation):
        block_decompose(w_state(), ket_bra(1, 1))


def test_block_decompose_rejects_non_projector():
    with pytest.raises(ContractViolation):
        block_decompose(w_state(), 2 * ket_bra(0, 0))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_block_decompose_identity_w(rng, n):
    A = w_state()
    B, waves = block_decompose(A, ket_bra(0, 0))
    X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    total = mps_state(B, X, n) + waves(X, n)
    np.testing.assert_allclose(total.amplitudes, mps_state(A, X, n).amplitudes, atol=1e-12)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_block_decompose_identity_generalized_w(seed):
    A = random_tensor_seeded(seed, 2, 2)
    Bd = random_tensor_seeded(seed + 100, 2, 2)
    C = gen_w(A, Bd)
    P = np.diag([1.0, 1.0, 0.0, 0.0])
    B, waves = block_decompose(C, P)
    rng = np.random.default_rng(seed)
    for n in (1, 2, 3, 4):
        X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        total = mps_state(B, X, n) + waves(X, n)
        np.testing.assert_allclose(total.amplitudes, mps_state(C, X, n).amplitudes, atol=1e-10)
