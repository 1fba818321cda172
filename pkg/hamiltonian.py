"""
Parent Hamiltonians and their exact ground spaces

H_n(A, l) sums the local projector h = I - P_{S_l(A)} over the n - l + 1
open-boundary positions; the periodic version sums its n cyclic translates.
"""

import logging
from dataclasses import dataclass

import numpy as np

from config import get_operator_cap
from errors import ContractViolation, DenseCapExceeded, NotProperSubspace
from linalg import (DEFAULT_TOL, Subspace, Tolerance, containment_residual,
                    hermitian_spectrum, kernel_from_spectrum, projector,
                    zero_window)
from mps import (MpsTensor, periodic_subspace, physical_subspace,
                 translation_permutation)

logger = logging.getLogger(__name__)

OBC = "obc"
PBC = "pbc"
BOUNDARIES = (OBC, PBC)


@dataclass(frozen=True, eq=False)
class ParentHamiltonian:
    tensor: MpsTensor
    ell: int
    n: int
    boundary: str
    operator: np.ndarray

    @property
    def n_terms(self) -> int:
        return self.n - self.ell + 1 if self.boundary == OBC else self.n


@dataclass(frozen=True, eq=False)
class GroundSpaceResult:
    energy: float
    space: Subspace
    frustration_free: bool

    @property
    def degeneracy(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class GroundComparison:
    """Outcome of comparing a parent-Hamiltonian ground space with the MPS subspace"""
    equal: bool
    gs_dim: int
    mps_dim: int
    max_residual: float
    energy: float
    frustration_free: bool

    def to_dict(self) -> dict:
        return {
            "equal": self.equal,
            "gs_dim": self.gs_dim,
            "mps_dim": self.mps_dim,
            "max_residual": self.max_residual,
            "energy": self.energy,
            "frustration_free": self.frustration_free,
        }


def _check_operator_size(d: int, n: int) -> int:
    size = d ** n
    cap = get_operator_cap()
    if size > cap:
        raise DenseCapExceeded(size, cap, what="operator")
    return size


def local_term(A: MpsTensor, ell: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """h = I - P_{S_ell(A)}, the projector onto S_ell(A)^⊥"""
    size = _check_operator_size(A.d, ell)
    S = physical_subspace(A, ell, tol)
    if S.dim == size:
        raise NotProperSubspace(f"S_{ell}(A) is the full {size}-dimensional space")
    h = np.eye(size, dtype=complex) - projector(S)
    return (h + h.conj().T) / 2


def build(A: MpsTensor, ell: int, n: int, boundary: str = OBC,
          tol: Tolerance = DEFAULT_TOL) -> ParentHamiltonian:
    """Assemble the ell-local parent Hamiltonian on n sites"""
    boundary = boundary.lower()
    if boundary not in BOUNDARIES:
        raise ContractViolation(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
    if not 1 <= ell <= n:
        raise ContractViolation(f"interaction length {ell} must be between 1 and n = {n}")
    _check_operator_size(A.d, n)

    h = local_term(A, ell, tol)
    rest = A.d ** (n - ell)
    if boundary == OBC:
        operator = sum(
            np.kron(np.kron(np.eye(A.d ** i), h), np.eye(rest // A.d ** i))
            for i in range(n - ell + 1)
        )
    else:
        perm = translation_permutation(A.d, n)
        term = np.kron(h, np.eye(rest))
        operator = np.zeros_like(term)
        for _ in range(n):
            operator += term
            term = term[np.ix_(perm, perm)]
    logger.debug(f"built {boundary.upper()} parent Hamiltonian: ell={ell}, n={n}, size {operator.shape[0]}")
    return ParentHamiltonian(A, ell, n, boundary, operator)


def ground_space(H: ParentHamiltonian, tol: Tolerance = DEFAULT_TOL) -> GroundSpaceResult:
    """
    Ground energy and ground space.

    Frustration free iff E0 lies within eig_zero * max(1, ‖H‖); the space
    is then the kernel of H, otherwise the lowest eigenspace.
    """
    w, V = hermitian_spectrum(H.operator, tol)
    E0 = float(w[0])
    window = zero_window(w, tol)
    frustration_free = E0 <= window
    if frustration_free:
        space = kernel_from_spectrum(w, V, tol)
    else:
        space = Subspace(V.shape[0], V[:, w <= E0 + window], tol)
    logger.info(f"{H.boundary.upper()} n={H.n} ell={H.ell}: E0={E0:.3e}, degeneracy {space.dim}"
                f"{'' if frustration_free else ' (frustrated)'}")
    return GroundSpaceResult(E0, space, frustration_free)


def verify_ground_equals_mps(A: MpsTensor, ell: int, n: int, boundary: str = OBC,
                             tol: Tolerance = DEFAULT_TOL) -> GroundComparison:
    """Compare the ground space with S_n(A) (OBC) or S_n^P(A) (PBC)"""
    H = build(A, ell, n, boundary, tol)
    gs = ground_space(H, tol)
    mps = physical_subspace(A, n, tol) if H.boundary == OBC else periodic_subspace(A, n, tol)
    residual = max(containment_residual(gs.space, mps), containment_residual(mps, gs.space))
    equal = gs.degeneracy == mps.dim and residual <= tol.eig_zero
    return GroundComparison(
        equal=equal,
        gs_dim=gs.degeneracy,
        mps_dim=mps.dim,
        max_residual=residual,
        energy=gs.energy,
        frustration_free=gs.frustration_free,
    )
