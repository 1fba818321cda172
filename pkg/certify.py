"""
Certificates for MPS tensors

Injectivity and nilpotency from the virtual subspaces V_j, stability
witnesses from a linear least-squares feasibility problem, the boundary
pushing operator built from a witness, and the (generalized) intersection
property checked on the physical subspaces.

Left j-stability asks for matrices Y_i with
    Y_i V_{j+1} ⊆ V_j                and    Z B = B for B in V_{j+1},
where Z = sum_i A_i Y_i. The right version reads V_{j+1} Y_i ⊆ V_j and
B Z = B with Z = sum_i Y_i A_i. Matrices are vectorized row-major, so
vec(X Y W) = kron(X, W^T) vec(Y).
"""

import logging
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg

from errors import (ConstructionFailure, ContractViolation, DimensionMismatch,
                    NumericalFailure)
from linalg import (DEFAULT_TOL, Subspace, Tolerance, equal, full_space,
                    intersect, projector, tensor_product)
from mps import (MpsTensor, check_dense, matrices_of, physical_subspace,
                 product_span, virtual_subspace, word_products)

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"
SIDES = (LEFT, RIGHT)

# Fixed-point residual accepted for a constructed pushing operator
PUSHING_TOLERANCE = 1e-9


def _check_side(side: str) -> str:
    side = side.lower()
    if side not in SIDES:
        raise ContractViolation(f"side must be 'left' or 'right', got {side!r}")
    return side


@dataclass(frozen=True, eq=False)
class StabilityWitness:
    side: str
    j: int
    Y: np.ndarray  # shape (d, D, D)
    residual_invariance: float = float("nan")
    residual_identity: float = float("nan")

    @property
    def residual(self) -> float:
        return max(self.residual_invariance, self.residual_identity)

    def is_valid(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return bool(self.residual <= tol.eig_zero)


@dataclass(frozen=True)
class WitnessCheck:
    valid: bool
    residual_invariance: float
    residual_identity: float


class StabilityLength(NamedTuple):
    j: int
    witness: StabilityWitness
    persistent: Optional[bool]  # None when j + 1 exceeded the scan bound


@dataclass(frozen=True, eq=False)
class PushingOperator:
    side: str
    j: int
    O: np.ndarray  # shape (d^{j+1}, d^{j+1})
    Y: np.ndarray


@dataclass(frozen=True)
class PushResidual:
    fixed_point: float
    transfer: float


@dataclass(frozen=True, eq=False)
class IntersectionResult:
    holds: bool
    lhs_dim: int
    rhs_dim: int
    lhs: Subspace


@dataclass(frozen=True)
class GeneralizedIntersectionResult:
    holds_at_k: bool
    b_intersects_above: bool
    kmax: int


# =============================================================================
# INJECTIVITY AND NILPOTENCY
# =============================================================================

def virtual_dimensions(A: MpsTensor, jmax: int, tol: Tolerance = DEFAULT_TOL) -> List[int]:
    """dim V_j for j = 1..jmax"""
    V1 = virtual_subspace(A, 1, tol)
    dims = [V1.dim]
    V = V1
    for _ in range(2, jmax + 1):
        V = product_span(V, V1, A.D, tol)
        dims.append(V.dim)
    return dims


def injectivity_length(A: MpsTensor, jmax: int, tol: Tolerance = DEFAULT_TOL) -> Optional[int]:
    """Smallest j <= jmax with V_j = M_D, or None"""
    if jmax < 1:
        raise ContractViolation(f"jmax must be positive, got {jmax}")
    full = A.D * A.D
    V1 = virtual_subspace(A, 1, tol)
    V = V1
    for j in range(1, jmax + 1):
        if j > 1:
            V = product_span(V, V1, A.D, tol)
        if V.dim == full:
            return j
        if V.is_zero:
            return None
    return None


def is_nilpotent(A: MpsTensor, tol: Tolerance = DEFAULT_TOL) -> bool:
    """A nilpotent algebra in M_D has all length-D products equal to zero"""
    return virtual_subspace(A, A.D, tol).is_zero

# =============================================================================
# STABILITY WITNESSES
# =============================================================================

class _StabilitySystem(NamedTuple):
    matrix: np.ndarray
    rhs: np.ndarray
    invariance: np.ndarray  # boolean mask over blocks
    block_size: int


def _stability_system(A: MpsTensor, j: int, side: str, tol: Tolerance) -> _StabilitySystem:
    d, D = A.d, A.D
    DD = D * D
    V_j = virtual_subspace(A, j, tol)
    V_next = virtual_subspace(A, j + 1, tol)
    complement = np.eye(DD) - projector(V_j)
    eye = np.eye(D)

    blocks, rhs, invariance = [], [], []
    for B in matrices_of(V_next, D):
        acting = np.kron(eye, B.T) if side == LEFT else np.kron(B, eye)
        for i in range(d):
            block = np.zeros((DD, d * DD), dtype=complex)
            block[:, i * DD:(i + 1) * DD] = complement @ acting
            blocks.append(block)
            rhs.append(np.zeros(DD, dtype=complex))
            invariance.append(True)
        if side == LEFT:
            identity = [np.kron(A[i], B.T) for i in range(d)]
        else:
            identity = [np.kron(B, A[i].T) for i in range(d)]
        blocks.append(np.hstack(identity))
        rhs.append(B.ravel())
        invariance.append(False)

    if not blocks:
        return _StabilitySystem(np.zeros((0, d * DD), dtype=complex), np.zeros(0, dtype=complex),
                                np.zeros(0, dtype=bool), DD)
    return _StabilitySystem(np.vstack(blocks), np.concatenate(rhs), np.array(invariance), DD)


def _block_residuals(system: _StabilitySystem, x: np.ndarray) -> Tuple[float, float]:
    if system.rhs.size == 0:
        return 0.0, 0.0
    r = (system.matrix @ x - system.rhs).reshape(-1, system.block_size)
    norms = np.linalg.norm(r, axis=1)
    inv = norms[system.invariance]
    ident = norms[~system.invariance]
    return (float(inv.max()) if inv.size else 0.0,
            float(ident.max()) if ident.size else 0.0)


def solve_stability(A: MpsTensor, j: int, side: str = LEFT,
                    tol: Tolerance = DEFAULT_TOL) -> StabilityWitness:
    """
    Minimal-norm least-squares candidate for a j-stability witness.

    Always returns the best candidate; check ``is_valid`` for the verdict.
    """
    side = _check_side(side)
    if j < 1:
        raise ContractViolation(f"length must be positive, got {j}")
    system = _stability_system(A, j, side, tol)
    if system.rhs.size == 0:
        x = np.zeros(system.matrix.shape[1], dtype=complex)
    else:
        try:
            x, *_ = scipy.linalg.lstsq(system.matrix, system.rhs)
        except scipy.linalg.LinAlgError as e:
            raise NumericalFailure(f"least-squares solve failed: {e}") from e
    res_inv, res_id = _block_residuals(system, x)
    return StabilityWitness(side, j, x.reshape(A.d, A.D, A.D), res_inv, res_id)


def stability_witness(A: MpsTensor, j: int, side: str = LEFT,
                      tol: Tolerance = DEFAULT_TOL) -> Optional[StabilityWitness]:
    """Witness for (side) j-stability, or None if none was found within tolerance"""
    candidate = solve_stability(A, j, side, tol)
    if candidate.is_valid(tol):
        logger.info(f"{candidate.side} {j}-stable: residuals "
                    f"{candidate.residual_invariance:.2e} / {candidate.residual_identity:.2e}")
        return candidate
    logger.debug(f"no {candidate.side} witness at j={j}: best residual {candidate.residual:.3e}")
    return None


def check_witness(A: MpsTensor, W: StabilityWitness, tol: Tolerance = DEFAULT_TOL) -> WitnessCheck:
    """Recompute both residuals for given Y matrices"""
    Y = np.asarray(W.Y, dtype=complex)
    if Y.shape != A.matrices.shape:
        raise DimensionMismatch(f"witness of shape {Y.shape} for tensor of shape {A.matrices.shape}")
    system = _stability_system(A, W.j, _check_side(W.side), tol)
    res_inv, res_id = _block_residuals(system, Y.ravel())
    return WitnessCheck(max(res_inv, res_id) <= tol.eig_zero, res_inv, res_id)


def revalidate(A: MpsTensor, W: StabilityWitness, tol: Tolerance = DEFAULT_TOL) -> StabilityWitness:
    """Copy of W with residuals recomputed against A"""
    check = check_witness(A, W, tol)
    return replace(W, residual_invariance=check.residual_invariance,
                   residual_identity=check.residual_identity)


def stability_length(A: MpsTensor, side: str = LEFT, jmax: int = 4,
                     tol: Tolerance = DEFAULT_TOL) -> Optional[StabilityLength]:
    """
    First j in 1..jmax with a witness. The same Y matrices are re-checked
    at j + 1 when that is still within the scan bound.
    """
    for j in range(1, jmax + 1):
        W = stability_witness(A, j, side, tol)
        if W is None:
            continue
        persistent = None
        if j + 1 <= jmax:
            persistent = check_witness(A, replace(W, j=j + 1), tol).valid
            if not persistent:
                logger.warning(f"{side} witness at j={j} does not persist to j={j + 1}")
        return StabilityLength(j, W, persistent)
    return None


def transpose_witness(W: StabilityWitness) -> StabilityWitness:
    """Witness for the transpose tensor: Y_i^T on the opposite side"""
    return StabilityWitness(RIGHT if W.side == LEFT else LEFT, W.j, W.Y.transpose(0, 2, 1),
                            W.residual_invariance, W.residual_identity)


def direct_sum_witness(WA: StabilityWitness, WB: StabilityWitness) -> StabilityWitness:
    """Block-diagonal candidate witness for A ⊕ B at max(j_A, j_B)"""
    if WA.side != WB.side:
        raise ContractViolation("witnesses are for different sides")
    if WA.Y.shape[0] != WB.Y.shape[0]:
        raise DimensionMismatch("witnesses have different physical dimensions")
    Y = np.array([scipy.linalg.block_diag(a, b) for a, b in zip(WA.Y, WB.Y)])
    return StabilityWitness(WA.side, max(WA.j, WB.j), Y)

# =============================================================================
# PUSHING OPERATOR
# =============================================================================

def _targets(words: np.ndarray, Y: np.ndarray, side: str) -> np.ndarray:
    # (d, d^{j+1}, D, D): Y_i A_r on the left, A_r Y_i on the right
    if side == LEFT:
        return np.einsum('iab,rbc->irac', Y, words)
    return np.einsum('rab,ibc->irac', words, Y)


def _assemble(coefficients: np.ndarray, side: str) -> np.ndarray:
    # coefficients[i, r, w] -> O[r, (i, w)] (left) or O[r, (w, i)] (right)
    d, R, Wn = coefficients.shape
    if side == LEFT:
        return coefficients.transpose(1, 0, 2).reshape(R, d * Wn)
    return coefficients.transpose(1, 2, 0).reshape(R, Wn * d)


def pushing_operator(A: MpsTensor, W: StabilityWitness,
                     tol: Tolerance = DEFAULT_TOL) -> PushingOperator:
    """
    Operator O on j + 1 sites with O [A]^{j+1} = [A]^{j+1} that moves a
    virtual insertion to the boundary (left side):
        O (A M [A]^j) = N [A]^{j+1},   N = sum_i A_i M Y_i.
    Coefficients are minimal-norm least-squares expansions of Y_i A_r
    (A_r Y_i on the right) in the length-j products.
    """
    side = _check_side(W.side)
    if not check_witness(A, W, tol).valid:
        raise ContractViolation("pushing operator requires a valid witness")
    d, D, j = A.d, A.D, W.j
    check_dense(d, j + 1)
    Y = np.asarray(W.Y, dtype=complex)

    dictionary = word_products(A, j).reshape(-1, D * D).T  # (D^2, d^j)
    block = word_products(A, j + 1)
    targets = _targets(block, Y, side)
    rhs = targets.reshape(-1, D * D).T  # (D^2, d * d^{j+1})
    try:
        coeffs, *_ = scipy.linalg.lstsq(dictionary, rhs)
    except scipy.linalg.LinAlgError as e:
        raise NumericalFailure(f"least-squares solve failed: {e}") from e
    misfit = np.linalg.norm(dictionary @ coeffs - rhs, axis=0)
    scale = np.maximum(1.0, np.linalg.norm(rhs, axis=0))
    worst = float(np.max(misfit / scale))
    if worst > max(tol.eig_zero, PUSHING_TOLERANCE):
        raise ConstructionFailure(
            f"products Y_i A_w are not spanned by length-{j} words (residual {worst:.3e})")

    O = _assemble(coeffs.T.reshape(d, d ** (j + 1), d ** j), side)
    op = PushingOperator(side, j, O, Y)
    fixed_residual = _relative_residual(_apply(op.O, block), block)
    if fixed_residual > PUSHING_TOLERANCE:
        raise ConstructionFailure(f"fixed-point residual {fixed_residual:.3e}")
    logger.debug(f"pushing operator ({side}, j={j}): fixed-point residual {fixed_residual:.2e}")
    return op


def normal_pushing_operator(A: MpsTensor, W: StabilityWitness,
                            tol: Tolerance = DEFAULT_TOL) -> PushingOperator:
    """
    Closed-form O for a j-injective tensor:
        O[r, (i, w)] = Tr(A_r Ã_w Y_i)   (left),
        O[r, (w, i)] = Tr(A_r Y_i Ã_w)   (right),
    where Ã_w are the dual matrices of the length-j products
    (sum_w Tr(Ã_w X) A_w = X).
    """
    side = _check_side(W.side)
    d, D, j = A.d, A.D, W.j
    if virtual_subspace(A, j, tol).dim != D * D:
        raise ContractViolation(f"tensor is not injective at length {j}")
    dictionary = word_products(A, j).reshape(-1, D * D).T
    dual = scipy.linalg.pinv(dictionary).reshape(-1, D, D).transpose(0, 2, 1)
    words = word_products(A, j + 1)
    Y = np.asarray(W.Y, dtype=complex)
    if side == LEFT:
        coeffs = np.einsum('rab,wbc,ica->irw', words, dual, Y)
    else:
        coeffs = np.einsum('rab,ibc,wca->irw', words, Y, dual)
    return PushingOperator(side, j, _assemble(coeffs, side), Y)


def _apply(O: np.ndarray, T: np.ndarray) -> np.ndarray:
    return np.einsum('rc,cab->rab', O, T)


def _relative_residual(actual: np.ndarray, expected: np.ndarray) -> float:
    return float(np.linalg.norm(actual - expected) / max(1.0, np.linalg.norm(expected)))


def verify_pushing(A: MpsTensor, op: PushingOperator, M: np.ndarray) -> PushResidual:
    """
    Residuals of O [A]^{j+1} = [A]^{j+1} and of the transfer identity
    O (A M [A]^j) = N [A]^{j+1} (left) or O ([A]^j M A) = [A]^{j+1} N (right).
    """
    M = np.asarray(M, dtype=complex)
    if M.shape != (A.D, A.D):
        raise DimensionMismatch(f"insertion of shape {M.shape} for bond dimension {A.D}")
    j = op.j
    block = word_products(A, j + 1)
    shorter = word_products(A, j)
    fixed = _relative_residual(_apply(op.O, block), block)

    if op.side == LEFT:
        inserted = np.einsum('iab,bc,wcd->iwad', A.matrices, M, shorter).reshape(-1, A.D, A.D)
        N = np.einsum('iab,bc,icd->ad', A.matrices, M, op.Y)
        expected = np.einsum('ab,rbc->rac', N, block)
    else:
        inserted = np.einsum('wab,bc,icd->wiad', shorter, M, A.matrices).reshape(-1, A.D, A.D)
        N = np.einsum('iab,bc,icd->ad', op.Y, M, A.matrices)
        expected = np.einsum('rab,bc->rac', block, N)
    transfer = _relative_residual(_apply(op.O, inserted), expected)
    return PushResidual(fixed, transfer)

# =============================================================================
# INTERSECTION PROPERTY
# =============================================================================

def overlap_space(S: Subspace, d: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """(S ⊗ H) ∩ (H ⊗ S) for S on k sites and a single site H of dimension d"""
    H = full_space(d, tol)
    return intersect(tensor_product(S, H), tensor_product(H, S))


def intersection_check(A: MpsTensor, k: int, tol: Tolerance = DEFAULT_TOL) -> IntersectionResult:
    """Does (S_k ⊗ H) ∩ (H ⊗ S_k) equal S_{k+1}?"""
    check_dense(A.d, k + 1)
    lhs = overlap_space(physical_subspace(A, k, tol), A.d, tol)
    rhs = physical_subspace(A, k + 1, tol)
    holds = equal(lhs, rhs)
    logger.debug(f"intersection at k={k}: lhs dim {lhs.dim}, S_{k + 1} dim {rhs.dim}, holds={holds}")
    return IntersectionResult(holds, lhs.dim, rhs.dim, lhs)


def generalized_intersection_check(A: MpsTensor, B: MpsTensor, k: int, kmax: int,
                                   tol: Tolerance = DEFAULT_TOL) -> GeneralizedIntersectionResult:
    """
    holds_at_k: (S_k(A) ⊗ H) ∩ (H ⊗ S_k(A)) = S_{k+1}(B).
    b_intersects_above: B has the intersection property at every k' in k+1..kmax
    (no claim is made beyond kmax).
    """
    if A.d != B.d:
        raise DimensionMismatch(f"physical dimensions differ: {A.d} vs {B.d}")
    if kmax < k + 1:
        raise ContractViolation(f"kmax must be at least k + 1 = {k + 1}, got {kmax}")
    check_dense(A.d, kmax + 1)
    lhs = overlap_space(physical_subspace(A, k, tol), A.d, tol)
    holds_at_k = equal(lhs, physical_subspace(B, k + 1, tol))
    above = all(intersection_check(B, kk, tol).holds for kk in range(k + 1, kmax + 1))
    return GeneralizedIntersectionResult(holds_at_k, above, kmax)
