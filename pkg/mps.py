"""
MPS tensors, their states and subspaces

Conventions:
    - A tensor holds d matrices of shape (D, D), stored as one (d, D, D) array.
    - States on n sites are length-d^n vectors in big-endian site order
      (site 1 is the most significant digit).
    - Boundary matrices X are plain (D, D) arrays; e_{mu nu} = |mu><nu|
      are enumerated row-major (mu outer, nu inner).
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from config import get_dense_cap
from errors import ContractViolation, DenseCapExceeded, DimensionMismatch
from linalg import (DEFAULT_TOL, Subspace, Tolerance, intersect,
                    orthonormal_basis, zero_space)

logger = logging.getLogger(__name__)

BoundaryOp = np.ndarray


@dataclass(frozen=True, eq=False)
class MpsTensor:
    """A = sum_i A_i ⊗ |i>, with matrices of shape (d, D, D)"""
    matrices: np.ndarray

    def __post_init__(self):
        mats = np.array(self.matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[0] < 1:
            raise DimensionMismatch(f"expected d square D x D matrices, got shape {mats.shape}")
        if not np.any(mats):
            raise ContractViolation("all-zero MPS tensor")
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    @property
    def d(self) -> int:
        return self.matrices.shape[0]

    @property
    def D(self) -> int:
        return self.matrices.shape[1]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.matrices[i]

    def __repr__(self) -> str:
        return f"MpsTensor(d={self.d}, D={self.D})"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes of an n-site state, big-endian"""
    n: int
    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.shape[0] != self.d ** self.n:
            raise DimensionMismatch(
                f"{amps.shape[0]} amplitudes for {self.n} sites of dimension {self.d}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def __add__(self, other: 'StateVector') -> 'StateVector':
        if (self.n, self.d) != (other.n, other.d):
            raise DimensionMismatch("cannot add states on different spaces")
        return StateVector(self.n, self.d, self.amplitudes + other.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


TensorLike = Union[MpsTensor, np.ndarray]


def _as_array(T: TensorLike) -> np.ndarray:
    return T.matrices if isinstance(T, MpsTensor) else np.asarray(T, dtype=complex)


def check_dense(d: int, n: int, cap: Optional[int] = None) -> int:
    """Return d^n, raising DenseCapExceeded if it is above the cap"""
    if n < 1:
        raise ContractViolation(f"number of sites must be positive, got {n}")
    size = d ** n
    cap = cap or get_dense_cap()
    if size > cap:
        raise DenseCapExceeded(size, cap)
    return size


def boundary_basis(D: int) -> List[np.ndarray]:
    """e_{mu nu} = |mu><nu| in row-major order"""
    basis = []
    for mu in range(D):
        for nu in range(D):
            e = np.zeros((D, D), dtype=complex)
            e[mu, nu] = 1.0
            basis.append(e)
    return basis


def _chain(first: np.ndarray, rest: Sequence[np.ndarray]) -> np.ndarray:
    words = first
    for T in rest:
        words = np.einsum('wab,ibc->wiac', words, T)
        words = words.reshape(-1, words.shape[-2], words.shape[-1])
    return words


def word_products(A: MpsTensor, n: int) -> np.ndarray:
    """All products A_{i_1}...A_{i_n}, shape (d^n, D, D), big-endian word order"""
    check_dense(A.d, n)
    return _chain(A.matrices, [A.matrices] * (n - 1))


def _check_boundary(X: BoundaryOp, D: int) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.shape != (D, D):
        raise DimensionMismatch(f"boundary of shape {X.shape} for bond dimension {D}")
    return X


def mps_state(A: MpsTensor, X: BoundaryOp, n: int) -> StateVector:
    """|X[A]^n> with amplitudes Tr(X A_{i_1} ... A_{i_n})"""
    X = _check_boundary(X, A.D)
    words = word_products(A, n)
    return StateVector(n, A.d, np.einsum('ab,wba->w', X, words))


def product_state(X: BoundaryOp, tensors: Sequence[TensorLike]) -> StateVector:
    """
    MPS with a different tensor on every site.

    Amplitudes Tr(X T1_{i_1} T2_{i_2} ... Tn_{i_n}); all tensors share d and D.
    """
    arrays = [_as_array(T) for T in tensors]
    if not arrays:
        raise ContractViolation("product_state needs at least one site")
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise DimensionMismatch(f"site tensors have different shapes: {sorted(shapes)}")
    d, D, _ = arrays[0].shape
    check_dense(d, len(arrays))
    X = _check_boundary(X, D)
    words = _chain(arrays[0], arrays[1:])
    return StateVector(len(arrays), d, np.einsum('ab,wba->w', X, words))


def physical_subspace(A: MpsTensor, n: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """S_n(A) = span{ |e_{mu nu}[A]^n> }, ambient d^n"""
    words = word_products(A, n)
    # products that vanish exactly leave only rounding noise in the words
    if virtual_subspace(A, n, tol).is_zero:
        return zero_space(A.d ** n, tol)
    # Tr(e_{mu nu} P) = P[nu, mu]
    vectors = words.transpose(2, 1, 0).reshape(A.D * A.D, -1)
    S = orthonormal_basis(vectors, tol)
    logger.debug(f"S_{n}: dim {S.dim} in ambient {S.ambient_dim}")
    return S


def matrices_of(S: Subspace, D: int) -> np.ndarray:
    """Basis of a subspace of M_D as an (r, D, D) array"""
    return S.basis.T.reshape(-1, D, D)


def product_span(S: Subspace, T: Subspace, D: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Span of all products B C with B, C basis matrices of S and T"""
    if S.is_zero or T.is_zero:
        return zero_space(D * D, tol)
    products = np.einsum('rab,sbc->rsac', matrices_of(S, D), matrices_of(T, D))
    # basis matrices have unit norm, so products are bounded by 1
    return orthonormal_basis(products.reshape(-1, D * D), tol, floor=tol.rank_rel)


def virtual_subspace(A: MpsTensor, j: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """
    V_j = span of all length-j products, as flattened D x D matrices.

    Built by repeated squaring: V_{2m} = span(V_m V_m), combining the
    binary digits of j.
    """
    if j < 1:
        raise ContractViolation(f"length must be positive, got {j}")
    D = A.D
    power = orthonormal_basis(A.matrices.reshape(A.d, D * D), tol)
    result = None
    while True:
        if j & 1:
            result = power if result is None else product_span(result, power, D, tol)
        j >>= 1
        if not j:
            break
        power = product_span(power, power, D, tol)
    return result


def translation_permutation(d: int, n: int) -> np.ndarray:
    """perm with (tau v) = v[perm] for tau|i_1...i_n> = |i_n i_1...i_{n-1}>"""
    indices = np.arange(d ** n).reshape((d,) * n)
    return np.moveaxis(indices, n - 1, 0).ravel()


def translate(v: StateVector, power: int = 1) -> StateVector:
    """tau_n^power v (negative powers translate the other way)"""
    if v.n == 1:
        return v
    amps = v.amplitudes.reshape((v.d,) * v.n)
    amps = np.moveaxis(amps, list(range(v.n)), [(k + power) % v.n for k in range(v.n)])
    return StateVector(v.n, v.d, np.ravel(amps))


def translate_subspace(S: Subspace, d: int, n: int) -> Subspace:
    perm = translation_permutation(d, n)
    return Subspace(S.ambient_dim, S.basis[perm, :], S.tol)


def periodic_subspace(A: MpsTensor, n: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Largest translation-invariant subspace of S_n(A): ∩_i tau^i S_n(A)"""
    S = physical_subspace(A, n, tol)
    result = S
    shifted = S
    for _ in range(1, n):
        if result.is_zero:
            break
        shifted = translate_subspace(shifted, A.d, n)
        result = intersect(result, shifted)
    return result


def conjugate(A: MpsTensor, T: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> MpsTensor:
    """Gauge transform A_i -> T A_i T^{-1}"""
    T = np.asarray(T, dtype=complex)
    if T.shape != (A.D, A.D):
        raise DimensionMismatch(f"gauge matrix of shape {T.shape} for bond dimension {A.D}")
    cond = np.linalg.cond(T)
    if not np.isfinite(cond) or cond >= 1.0 / tol.eig_zero:
        raise ContractViolation(f"gauge matrix is singular (condition number {cond:.3e})")
    T_inv = scipy.linalg.inv(T)
    return MpsTensor(np.einsum('ab,ibc,cd->iad', T, A.matrices, T_inv))


def direct_sum(A: MpsTensor, B: MpsTensor) -> MpsTensor:
    """C_i = A_i ⊕ B_i"""
    if A.d != B.d:
        raise DimensionMismatch(f"physical dimensions differ: {A.d} vs {B.d}")
    return MpsTensor([scipy.linalg.block_diag(a, b) for a, b in zip(A.matrices, B.matrices)])


def transpose_tensor(A: MpsTensor) -> MpsTensor:
    """B_i = A_i^T"""
    return MpsTensor(A.matrices.transpose(0, 2, 1))


def kron_tensor(A: MpsTensor, N: np.ndarray) -> MpsTensor:
    """B_i = A_i ⊗ N"""
    return MpsTensor([np.kron(a, N) for a in A.matrices])


def random_tensor(d: int, D: int, rng: np.random.Generator, dist: str = "complex") -> MpsTensor:
    """i.i.d. standard Gaussian entries, complex (unit variance) or real"""
    if dist == "complex":
        mats = (rng.standard_normal((d, D, D)) + 1j * rng.standard_normal((d, D, D))) / np.sqrt(2)
    elif dist == "real":
        mats = rng.standard_normal((d, D, D))
    else:
        raise ContractViolation(f"unknown distribution: {dist}")
    return MpsTensor(mats)


class BlockDecomposition(NamedTuple):
    B: MpsTensor
    wave_terms: Callable[[BoundaryOp, int], StateVector]


def block_decompose(A: MpsTensor, P: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> BlockDecomposition:
    """
    Split A along an invariant projector P (A_i P = P A_i P).

    B_i = P A_i P + Q A_i Q with Q = 1 - P, and
        |X[A]^n> = |X[B]^n> + wave_terms(X, n),
    where wave_terms sums, over the position l = 1..n of the single
    P-to-Q transition, the states |(QXP) [PAP]^{l-1} [PAQ] [QAQ]^{n-l}>.
    """
    P = np.asarray(P, dtype=complex)
    if P.shape != (A.D, A.D):
        raise DimensionMismatch(f"projector of shape {P.shape} for bond dimension {A.D}")
    scale = max(1.0, float(np.linalg.norm(P)))
    if np.linalg.norm(P @ P - P) > tol.eig_zero * scale:
        raise ContractViolation("P is not a projector")
    for i, a in enumerate(A.matrices):
        defect = np.linalg.norm(a @ P - P @ a @ P)
        if defect > tol.eig_zero * max(1.0, float(np.linalg.norm(a))):
            raise ContractViolation(f"P is not invariant under A_{i} (defect {defect:.3e})")

    Q = np.eye(A.D) - P
    upper = np.einsum('ab,ibc,cd->iad', P, A.matrices, P)
    cross = np.einsum('ab,ibc,cd->iad', P, A.matrices, Q)
    lower = np.einsum('ab,ibc,cd->iad', Q, A.matrices, Q)
    B = MpsTensor(upper + lower)

    def wave_terms(X: BoundaryOp, n: int) -> StateVector:
        X = _check_boundary(X, A.D)
        boundary = Q @ X @ P
        total = np.zeros(check_dense(A.d, n), dtype=complex)
        for l in range(1, n + 1):
            sites = [upper] * (l - 1) + [cross] + [lower] * (n - l)
            total += product_state(boundary, sites).amplitudes
        return StateVector(n, A.d, total)

    return BlockDecomposition(B, wave_terms)
