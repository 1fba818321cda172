import math

import numpy as np
import pytest

from certify import (LEFT, RIGHT, StabilityWitness, check_witness,
                     direct_sum_witness, generalized_intersection_check,
                     injectivity_length, intersection_check, is_nilpotent,
                     normal_pushing_operator, pushing_operator, revalidate,
                     solve_stability, stability_length, stability_witness,
                     transpose_witness, verify_pushing, virtual_dimensions)
from conftest import PUSHING_RESIDUAL, WITNESS_RESIDUAL, random_tensor_seeded
from errors import ContractViolation, DimensionMismatch
from gallery import (afm_ising, aklt, counterexample_c, counterexample_d,
                     dicke, domain_wall, ghz, nilpotent_aklt, w_momentum,
                     w_state)
from linalg import equal
from mps import (MpsTensor, conjugate, direct_sum, physical_subspace,
                 transpose_tensor)


def ket_bra(mu, nu, D=2):
    m = np.zeros((D, D), dtype=complex)
    m[mu, nu] = 1.0
    return m


# =============================================================================
# Injectivity and nilpotency
# =============================================================================

def test_injectivity_w_absent():
    assert injectivity_length(w_state(), 6) is None


def test_injectivity_length_two():
    A = MpsTensor([np.diag([1, 2]), ket_bra(0, 1) + ket_bra(1, 0)])
    assert injectivity_length(A, 4) == 2


def test_injectivity_ghz_absent():
    assert injectivity_length(ghz(), 6) is None


def test_injectivity_aklt():
    assert injectivity_length(aklt(), 4) == 2


def test_injectivity_requires_positive_bound():
    with pytest.raises(ContractViolation):
        injectivity_length(w_state(), 0)


def test_virtual_dimensions():
    assert virtual_dimensions(w_state(), 4) == [2, 2, 2, 2]
    assert virtual_dimensions(dicke(3), 4) == [2, 3, 3, 3]
    assert virtual_dimensions(nilpotent_aklt(), 5)[3:] == [0, 0]


def test_nilpotent_examples():
    E = ket_bra(0, 1)
    assert is_nilpotent(MpsTensor([E, E]))
    assert not is_nilpotent(w_state())
    assert is_nilpotent(nilpotent_aklt())
    assert physical_subspace(nilpotent_aklt(), 4).is_zero
    assert not physical_subspace(nilpotent_aklt(), 3).is_zero


# =============================================================================
# Stability witnesses
# =============================================================================

def test_w_state_witness_found():
    W = stability_witness(w_state(), 1, LEFT)
    assert W is not None
    assert W.residual <= WITNESS_RESIDUAL


def test_w_state_given_witness():
    A = w_state()
    check = check_witness(A, StabilityWitness(LEFT, 1, A.matrices))
    assert check.valid
    assert max(check.residual_invariance, check.residual_identity) <= WITNESS_RESIDUAL


def test_zero_witness_fails_identity():
    check = check_witness(w_state(), StabilityWitness(LEFT, 1, np.zeros((2, 2, 2))))
    assert not check.valid
    assert check.residual_invariance == pytest.approx(0.0)
    assert check.residual_identity == pytest.approx(1.0)


def test_dicke_witness():
    A = dicke(3)
    Y = np.array([np.eye(3), A[1] @ A[1]])
    assert check_witness(A, StabilityWitness(LEFT, 2, Y)).valid
    assert stability_witness(A, 2, LEFT) is not None
    assert stability_witness(A, 1, LEFT) is None


def test_counterexample_c_unstable():
    C = counterexample_c()
    for side in (LEFT, RIGHT):
        for j in range(1, 6):
            candidate = solve_stability(C, j, side)
            assert candidate.residual > 1e-3


def test_domain_wall_stability_length():
    A = domain_wall()
    found = stability_length(A, LEFT, 4)
    assert found.j == 2
    assert found.persistent
    Y = np.array([A[0] @ (np.eye(2) - A[1]), A[1]])
    assert check_witness(A, StabilityWitness(LEFT, 2, Y)).valid


def test_afm_stability_length():
    A = afm_ising()
    assert stability_length(A, LEFT, 3).j == 1
    assert check_witness(A, StabilityWitness(LEFT, 1, np.array([A[1], A[0]]))).valid


def test_w_momentum_witness():
    p = 2 * math.pi / 5
    A = w_momentum(p)
    assert stability_length(A, LEFT, 3).j == 1
    Y = np.array([np.diag([np.exp(1j * p), 1.0]), np.zeros((2, 2))])
    assert check_witness(A, StabilityWitness(LEFT, 1, Y)).valid


def test_aklt_is_two_stable_not_one():
    A = aklt()
    for side in (LEFT, RIGHT):
        assert stability_witness(A, 1, side) is None
        assert stability_witness(A, 2, side) is not None


def test_witness_persists():
    A = domain_wall()
    W = stability_witness(A, 2, LEFT)
    for j in (3, 4):
        assert check_witness(A, StabilityWitness(LEFT, j, W.Y)).valid


def test_check_witness_shape():
    with pytest.raises(DimensionMismatch):
        check_witness(w_state(), StabilityWitness(LEFT, 1, np.zeros((3, 2, 2))))


def test_bad_side():
    with pytest.raises(ContractViolation):
        solve_stability(w_state(), 1, "up")


def test_revalidate_fills_residuals():
    A = w_state()
    W = revalidate(A, StabilityWitness(LEFT, 1, A.matrices))
    assert W.is_valid()


def test_transpose_witness():
    A = domain_wall()
    W = stability_witness(A, 2, LEFT)
    T = transpose_witness(W)
    assert T.side == RIGHT
    assert check_witness(transpose_tensor(A), T).valid


@pytest.mark.parametrize("other", [w_state, lambda: MpsTensor(w_state().matrices * 1j)])
def test_direct_sum_witness(other):
    A, B = w_state(), other()
    W = direct_sum_witness(stability_witness(A, 1, LEFT), stability_witness(B, 1, LEFT))
    assert W.j == 1
    assert check_witness(direct_sum(A, B), W).valid


def test_direct_sum_witness_w_ghz_at_two():
    A, B = w_state(), ghz()
    WA = stability_witness(A, 2, LEFT)
    WB = stability_witness(B, 2, LEFT)
    assert check_witness(direct_sum(A, B), direct_sum_witness(WA, WB)).valid


def test_direct_sum_witness_sides_must_match():
    W = stability_witness(w_state(), 1, LEFT)
    with pytest.raises(ContractViolation):
        direct_sum_witness(W, transpose_witness(W))

# =============================================================================
# Pushing operator
# =============================================================================

PUSHING_CASES = [
    (w_state, 1, LEFT),
    (w_state, 1, RIGHT),
    (domain_wall, 2, LEFT),
    (afm_ising, 1, LEFT),
    (aklt, 2, LEFT),
    (aklt, 2, RIGHT),
    (lambda: dicke(3), 2, LEFT),
]


@pytest.mark.parametrize("make, j, side", PUSHING_CASES)
def test_pushing_operator_transfers_insertions(make, j, side):
    A = make()
    W = stability_witness(A, j, side)
    op = pushing_operator(A, W)
    assert op.O.shape == (A.d ** (j + 1), A.d ** (j + 1))
    rng = np.random.default_rng(j)
    for _ in range(20):
        M = rng.standard_normal((A.D, A.D)) + 1j * rng.standard_normal((A.D, A.D))
        r = verify_pushing(A, op, M)
        assert r.fixed_point <= PUSHING_RESIDUAL
        assert r.transfer <= PUSHING_RESIDUAL


def test_pushing_identity_insertion_gives_z():
    A = w_state()
    op = pushing_operator(A, stability_witness(A, 1, LEFT))
    r = verify_pushing(A, op, np.eye(2))
    assert r.transfer <= PUSHING_RESIDUAL


def test_pushing_requires_valid_witness():
    with pytest.raises(ContractViolation):
        pushing_operator(w_state(), StabilityWitness(LEFT, 1, np.zeros((2, 2, 2))))


@pytest.mark.parametrize("side", [LEFT, RIGHT])
def test_normal_pushing_operator(side):
    A = aklt()
    W = stability_witness(A, 2, side)
    op = normal_pushing_operator(A, W)
    rng = np.random.default_rng(3)
    M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    r = verify_pushing(A, op, M)
    assert r.fixed_point <= PUSHING_RESIDUAL
    assert r.transfer <= PUSHING_RESIDUAL


def test_normal_pushing_requires_injectivity():
    A = w_state()
    with pytest.raises(ContractViolation):
        normal_pushing_operator(A, stability_witness(A, 1, LEFT))

# =============================================================================
# Intersection property
# =============================================================================

@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_w_intersection(k):
    r = intersection_check(w_state(), k)
    assert r.holds
    assert r.lhs_dim == r.rhs_dim == 2


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_w_intersection_survives_skewed_gauge(k):
    r = intersection_check(conjugate(w_state(), np.diag([100.0, 1.0])), k)
    assert r.holds
    assert r.lhs_dim == r.rhs_dim == 2


def test_w_intersection_fails_at_one():
    assert not intersection_check(w_state(), 1).holds


def test_domain_wall_intersection():
    r = intersection_check(domain_wall(), 2)
    assert not r.holds
    assert (r.lhs_dim, r.rhs_dim) == (4, 3)
    for k in range(3, 7):
        assert intersection_check(domain_wall(), k).holds


@pytest.mark.parametrize("k", [3, 4, 5])
def test_counterexample_c_overlap_is_s_of_d(k):
    r = intersection_check(counterexample_c(), k)
    assert not r.holds
    S_D = physical_subspace(counterexample_d(), k + 1)
    assert r.lhs_dim == S_D.dim == 4
    assert equal(r.lhs, S_D)


def test_counterexample_c_fails_at_two():
    assert not intersection_check(counterexample_c(), 2).holds


def test_generalized_intersection_c_d():
    r = generalized_intersection_check(counterexample_c(), counterexample_d(), 3, 6)
    assert r.holds_at_k
    assert r.b_intersects_above


def test_generalized_intersection_reduces_to_ordinary():
    r = generalized_intersection_check(w_state(), w_state(), 2, 4)
    assert r.holds_at_k and r.b_intersects_above


def test_generalized_intersection_w_ghz():
    assert not generalized_intersection_check(w_state(), ghz(), 2, 4).holds_at_k


def test_generalized_intersection_contracts():
    with pytest.raises(DimensionMismatch):
        generalized_intersection_check(w_state(), aklt(), 2, 4)
    with pytest.raises(ContractViolation):
        generalized_intersection_check(w_state(), w_state(), 3, 3)


def test_random_injective_tensor_is_stable_at_injectivity_length():
    A = random_tensor_seeded(11, 2, 2)
    L = injectivity_length(A, 5)
    assert L == 2
    assert stability_witness(A, L, LEFT) is not None
    assert stability_witness(A, L, RIGHT) is not None
