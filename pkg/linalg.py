"""
Tolerance-aware dense complex linear algebra

Subspaces are stored as orthonormal column bases. All rank decisions use a
relative singular-value cutoff, all "is this zero" decisions an absolute
eig_zero threshold on normalized operators.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from config import DEFAULT_EIG_ZERO, DEFAULT_RANK_REL
from errors import ContractViolation, DimensionMismatch, NumericalFailure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared by every subspace decision"""
    rank_rel: float = DEFAULT_RANK_REL
    eig_zero: float = DEFAULT_EIG_ZERO

    def __post_init__(self):
        if not (self.rank_rel > 0 and self.eig_zero > 0):
            raise ContractViolation("tolerances must be strictly positive")
        if self.rank_rel >= 1:
            raise ContractViolation(f"rank_rel must be < 1, got {self.rank_rel}")

    def to_dict(self) -> dict:
        return {"rank_rel": self.rank_rel, "eig_zero": self.eig_zero}

    @classmethod
    def from_dict(cls, data: dict) -> 'Tolerance':
        return cls(rank_rel=float(data["rank_rel"]), eig_zero=float(data["eig_zero"]))


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Subspace of C^ambient_dim given by an orthonormal basis.

    ``basis`` has shape (ambient_dim, dim); the zero subspace has an empty
    basis of shape (ambient_dim, 0). The array is read-only.
    """
    ambient_dim: int
    basis: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        basis = np.array(self.basis, dtype=complex)
        if basis.ndim != 2 or basis.shape[0] != self.ambient_dim:
            raise DimensionMismatch(
                f"basis of shape {basis.shape} does not fit ambient dimension {self.ambient_dim}")
        if basis.shape[1] > self.ambient_dim:
            raise ContractViolation("more basis vectors than the ambient dimension")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    def vectors(self) -> list:
        """Basis vectors as a list of 1-D arrays"""
        return [self.basis[:, k] for k in range(self.dim)]

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of a vector (or column stack) onto the subspace"""
        return self.basis @ (self.basis.conj().T @ v)

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def _check_ambient(S1: Subspace, S2: Subspace):
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {S1.ambient_dim} vs {S2.ambient_dim}")


def _svd(M: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    try:
        U, s, _ = scipy.linalg.svd(M, full_matrices=False)
    except scipy.linalg.LinAlgError:
        # gesdd occasionally fails where the slower QR-iteration driver succeeds
        try:
            U, s, _ = scipy.linalg.svd(M, full_matrices=False, lapack_driver='gesvd')
        except scipy.linalg.LinAlgError as e:
            raise NumericalFailure(f"SVD did not converge: {e}") from e
    return U, s


def _eigh(M: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    try:
        return scipy.linalg.eigh(M)
    except scipy.linalg.LinAlgError as e:
        raise NumericalFailure(f"Hermitian eigensolver failed: {e}") from e


def zero_space(ambient_dim: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return Subspace(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex), tol)


def full_space(ambient_dim: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return Subspace(ambient_dim, np.eye(ambient_dim, dtype=complex), tol)


def orthonormal_basis(vectors: Union[Sequence[np.ndarray], np.ndarray],
                      tol: Tolerance = DEFAULT_TOL,
                      ambient_dim: Optional[int] = None,
                      floor: float = 0.0) -> Subspace:
    """
    Orthonormal basis of the span of ``vectors``.

    Args:
        vectors: sequence of 1-D arrays, or a 2-D array with one vector per row
        tol: singular values below rank_rel * sigma_max are dropped
        ambient_dim: required when ``vectors`` is empty
        floor: absolute cutoff; the effective cutoff is max(rank_rel * sigma_max, floor)

    Returns:
        Subspace (the zero subspace for empty or all-zero input)
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        rows = vectors
    else:
        vectors = [np.ravel(np.asarray(v)) for v in vectors]
        lengths = {v.shape[0] for v in vectors}
        if len(lengths) > 1:
            raise DimensionMismatch(f"vectors have different lengths: {sorted(lengths)}")
        if not vectors:
            if ambient_dim is None:
                raise ContractViolation("ambient_dim is required for an empty vector list")
            return zero_space(ambient_dim, tol)
        rows = np.array(vectors, dtype=complex)

    n = rows.shape[1]
    if ambient_dim is not None and n != ambient_dim:
        raise DimensionMismatch(f"vectors of length {n} in ambient dimension {ambient_dim}")
    if rows.shape[0] == 0 or not np.any(rows):
        return zero_space(n, tol)

    U, s = _svd(rows.T.astype(complex))
    cutoff = max(tol.rank_rel * s[0], floor)
    rank = int(np.count_nonzero(s > cutoff))
    return Subspace(n, U[:, :rank], tol)


def intersect(S1: Subspace, S2: Subspace) -> Subspace:
    """
    S1 ∩ S2 as the (near-)kernel of P1⊥ + P2⊥.

    The kernel lies inside S1, so the operator is compressed onto S1, where
    it reads I - G G^H with G = Q1^H Q2. Eigenvectors with eigenvalue at most
    eig_zero are lifted back through Q1.
    """
    _check_ambient(S1, S2)
    tol = S1.tol
    if S1.is_zero or S2.is_zero:
        return zero_space(S1.ambient_dim, tol)
    G = S1.basis.conj().T @ S2.basis
    compressed = np.eye(S1.dim) - G @ G.conj().T
    w, V = _eigh((compressed + compressed.conj().T) / 2)
    keep = w <= tol.eig_zero
    return Subspace(S1.ambient_dim, S1.basis @ V[:, keep], tol)


def span_sum(S1: Subspace, S2: Subspace) -> Subspace:
    """S1 + S2"""
    _check_ambient(S1, S2)
    stacked = np.hstack([S1.basis, S2.basis]).T
    return orthonormal_basis(stacked, S1.tol, ambient_dim=S1.ambient_dim)


def containment_residual(S: Subspace, T: Subspace) -> float:
    """Largest ‖(I - P_S) t‖ over the basis vectors t of T"""
    _check_ambient(S, T)
    if T.is_zero:
        return 0.0
    outside = T.basis - S.project(T.basis)
    return float(np.max(np.linalg.norm(outside, axis=0)))


def contains(S: Subspace, T: Subspace, tol: Optional[Tolerance] = None) -> bool:
    """True iff T ⊆ S"""
    tol = tol or S.tol
    return containment_residual(S, T) <= tol.eig_zero


def equal(S: Subspace, T: Subspace, tol: Optional[Tolerance] = None) -> bool:
    """Mutual containment"""
    return S.dim == T.dim and contains(S, T, tol) and contains(T, S, tol)


def tensor_product(S: Subspace, T: Subspace) -> Subspace:
    """S ⊗ T with S on the leading (most significant) sites"""
    return Subspace(S.ambient_dim * T.ambient_dim, np.kron(S.basis, T.basis), S.tol)


def projector(S: Subspace) -> np.ndarray:
    return S.basis @ S.basis.conj().T


def hermiticity_defect(M: np.ndarray) -> float:
    return float(np.linalg.norm(M - M.conj().T))


def _check_hermitian(M: np.ndarray, tol: Tolerance) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {M.shape}")
    scale = max(1.0, float(np.linalg.norm(M)))
    if hermiticity_defect(M) > 10 * tol.eig_zero * scale:
        raise ContractViolation("operator is not Hermitian")
    return (M + M.conj().T) / 2


def hermitian_spectrum(M: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and eigenvectors of a (checked) Hermitian operator"""
    return _eigh(_check_hermitian(M, tol))


def kernel_from_spectrum(w: np.ndarray, V: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if scale == 0.0:
        return full_space(V.shape[0], tol)
    keep = w <= tol.eig_zero * scale
    logger.debug(f"kernel: {int(np.count_nonzero(keep))} of {w.size} eigenvalues below {tol.eig_zero * scale:.3e}")
    return Subspace(V.shape[0], V[:, keep], tol)


def zero_window(w: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> float:
    """eig_zero * max(1, ‖M‖) for an operator with eigenvalues w"""
    return tol.eig_zero * max(1.0, float(np.max(np.abs(w))))


def kernel(M: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """
    Kernel of a Hermitian PSD operator.

    Eigenvalues at most eig_zero times the largest eigenvalue count as zero.
    The kernel of the zero operator is the whole space.
    """
    M = _check_hermitian(M, tol)
    if not np.any(M):
        return full_space(M.shape[0], tol)
    w, V = _eigh(M)
    return kernel_from_spectrum(w, V, tol)


def lowest_eigenspace(M: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Tuple[float, Subspace]:
    """
    Smallest eigenvalue E0 and the span of eigenvectors with eigenvalue
    at most E0 + eig_zero * max(1, ‖M‖).
    """
    w, V = hermitian_spectrum(M, tol)
    E0 = float(w[0])
    keep = w <= E0 + zero_window(w, tol)
    return E0, Subspace(V.shape[0], V[:, keep], tol)
