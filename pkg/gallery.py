"""
Gallery of example MPS tensors with their known properties

Every entry pairs a tensor with an Expectations record. ``run_all`` checks
each record with the generic certify/hamiltonian routines and returns one
CheckRecord per expectation; failures are data, never exceptions.
"""

import logging
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from certify import (LEFT, RIGHT, check_witness, injectivity_length,
                     intersection_check, is_nilpotent, stability_length,
                     stability_witness, StabilityWitness)
from config import default_jmax
from errors import ContractViolation, DenseCapExceeded, MpsError
from hamiltonian import OBC, PBC, build, ground_space, verify_ground_equals_mps
from linalg import (DEFAULT_TOL, Tolerance, equal, intersect,
                    orthonormal_basis, span_sum)
from mps import (MpsTensor, boundary_basis, direct_sum, kron_tensor, mps_state,
                 periodic_subspace, physical_subspace, transpose_tensor)

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass
class Expectations:
    """Known properties of a gallery tensor; None means no claim"""
    stability: Optional[Tuple[str, int]] = None      # (side, first stable length)
    witness: Optional[np.ndarray] = None             # Y matrices valid at the stability length
    unstable_up_to: Optional[int] = None             # no witness on either side for j <= this
    injectivity: Optional[int] = None
    nilpotent: bool = False
    zero_from: Optional[int] = None                  # S_n = {0} for n >= zero_from
    intersection_from: Optional[int] = None
    intersection_fails_at: Tuple[int, ...] = ()
    ell: int = 2
    obc_gs_dims: Dict[int, int] = field(default_factory=dict)
    pbc_gs_dims: Dict[int, int] = field(default_factory=dict)
    frustrated_cases: List[Tuple[int, int]] = field(default_factory=list)  # PBC (n, degeneracy)
    obc_equals_mps: bool = True
    source: str = ""


@dataclass
class GalleryEntry:
    name: str
    tensor: MpsTensor
    expected: Expectations
    params: Dict[str, object] = field(default_factory=dict)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        parts = ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in sorted(self.params.items()))
        return f"{self.name}({parts})"

    @property
    def slug(self) -> str:
        """File-name friendly label"""
        return re.sub(r"[^A-Za-z0-9.]+", "_", self.label).strip("_")


@dataclass
class CheckRecord:
    entry: str
    check: str
    status: str
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PropertyOutcome:
    status: str
    reason: str = ""
    failures: List[str] = field(default_factory=list)

# =============================================================================
# TENSOR CONSTRUCTORS
# =============================================================================

def _ket_bra(D: int, mu: int, nu: int) -> np.ndarray:
    m = np.zeros((D, D), dtype=complex)
    m[mu, nu] = 1.0
    return m


def _vector(v: Sequence[complex], name: str) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    if v.size == 0 or not np.any(v):
        raise ContractViolation(f"{name} must be a nonzero vector")
    return v


def _independent(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise ContractViolation("a and b must have the same length")
    if np.linalg.matrix_rank(np.vstack([a, b])) < 2:
        raise ContractViolation("a and b must be linearly independent")


def constant_tensor(v: Sequence[complex]) -> MpsTensor:
    """Bond dimension 1 tensor generating the product states |v...v>"""
    v = _vector(v, "v")
    return MpsTensor(v.reshape(-1, 1, 1))


def w_state() -> MpsTensor:
    return MpsTensor([np.eye(2), _ket_bra(2, 0, 1)])


def w_general(a: Sequence[complex] = (1, 1), b: Sequence[complex] = (1, -1)) -> MpsTensor:
    """A_i = a_i 1 + b_i |0><1|"""
    a, b = _vector(a, "a"), _vector(b, "b")
    _independent(a, b)
    E = _ket_bra(2, 0, 1)
    return MpsTensor([ai * np.eye(2) + bi * E for ai, bi in zip(a, b)])


def dicke(D: int = 3) -> MpsTensor:
    """A_0 = 1_D, A_1 = sum_i |i><i+1|"""
    if D < 2:
        raise ContractViolation(f"Dicke tensor needs D >= 2, got {D}")
    return MpsTensor([np.eye(D), np.eye(D, k=1)])


def w_momentum(p: float = 2 * math.pi / 5) -> MpsTensor:
    p = float(p)
    if not math.isfinite(p):
        raise ContractViolation(f"momentum must be a finite real number, got {p}")
    A0 = np.diag([np.exp(-1j * p), 1.0])
    return MpsTensor([A0, _ket_bra(2, 0, 1)])


def domain_wall() -> MpsTensor:
    return MpsTensor([[[1, 1], [0, 0]], [[0, 0], [0, 1]]])


def domain_wall_general(a: Sequence[complex] = (1, 1), b: Sequence[complex] = (1, -1)) -> MpsTensor:
    """A = |0>(<0| + <1|) ⊗ |a> + |1><1| ⊗ |b>"""
    a, b = _vector(a, "a"), _vector(b, "b")
    _independent(a, b)
    wall = np.array([[1, 1], [0, 0]], dtype=complex)
    up = _ket_bra(2, 1, 1)
    return MpsTensor([ai * wall + bi * up for ai, bi in zip(a, b)])


def afm_ising() -> MpsTensor:
    return MpsTensor([_ket_bra(2, 1, 0), _ket_bra(2, 0, 1)])


def ghz() -> MpsTensor:
    return MpsTensor([_ket_bra(2, 0, 0), _ket_bra(2, 1, 1)])


def block_triangular(A: MpsTensor, B: Union[MpsTensor, np.ndarray], C: MpsTensor) -> MpsTensor:
    """C_i = [[A_i, B_i], [0, C_i]]; the defect B may be a (d, D_A, D_C) array"""
    Bm = B.matrices if isinstance(B, MpsTensor) else np.asarray(B, dtype=complex)
    if not A.d == C.d == Bm.shape[0]:
        raise ContractViolation("tensors must share the physical dimension")
    if Bm.shape[1:] != (A.D, C.D):
        raise ContractViolation(f"defect block must be {A.D} x {C.D}, got {Bm.shape[1:]}")
    return MpsTensor([np.block([[a, b], [np.zeros((C.D, A.D)), c]])
                      for a, b, c in zip(A.matrices, Bm, C.matrices)])


def gen_w(A: MpsTensor, B: MpsTensor) -> MpsTensor:
    """C_i = [[A_i, B_i], [0, A_i]]"""
    if A.D != B.D:
        raise ContractViolation("A and B must share the bond dimension")
    return block_triangular(A, B, A)


def gen_dw(A: MpsTensor, B: MpsTensor) -> MpsTensor:
    """C_i = [[A_i, A_i], [0, B_i]]"""
    if A.D != B.D:
        raise ContractViolation("A and B must share the bond dimension")
    return block_triangular(A, A, B)


def counterexample_a() -> MpsTensor:
    return MpsTensor([[[1, 1], [0, 0]], [[0, 1], [0, 0]]])


def counterexample_c() -> MpsTensor:
    A = counterexample_a()
    return direct_sum(A, transpose_tensor(A))


def counterexample_d() -> MpsTensor:
    D0 = np.zeros((4, 4))
    D0[1, 0] = D0[1, 1] = D0[2, 2] = 1
    D1 = np.zeros((4, 4))
    D1[2, 0] = D1[3, 1] = D1[3, 2] = 1
    return MpsTensor([D0, D1])


def aklt() -> MpsTensor:
    """Spin-1 AKLT tensor with physical order (+, 0, -)"""
    sp = _ket_bra(2, 0, 1)
    sz = np.diag([1.0, -1.0])
    return MpsTensor([np.sqrt(2 / 3) * sp, -np.sqrt(1 / 3) * sz, -np.sqrt(2 / 3) * sp.T])


def nilpotent_aklt() -> MpsTensor:
    """AKLT ⊗ N with N the 4 x 4 shift (N^4 = 0, N^3 != 0)"""
    return kron_tensor(aklt(), np.eye(4, k=1))

# =============================================================================
# GALLERY ENTRIES
# =============================================================================

def _dims(ns, value) -> Dict[int, int]:
    return {n: value for n in ns}


def _entry_w_state() -> GalleryEntry:
    A = w_state()
    return GalleryEntry("w_state", A, Expectations(
        stability=(LEFT, 1), witness=A.matrices, intersection_from=2, intersection_fails_at=(1,),
        ell=2, obc_gs_dims=_dims(range(3, 9), 2), pbc_gs_dims=_dims(range(3, 9), 2),
        source="W state: 1-stable with Y_i = A_i, ground space |0...0> and |W_n>"))


def _entry_w_general(a=(1, 1), b=(1, -1)) -> GalleryEntry:
    return GalleryEntry("w_general", w_general(a, b), Expectations(
        stability=(LEFT, 1), intersection_from=2, ell=2,
        obc_gs_dims=_dims(range(3, 9), 2), pbc_gs_dims=_dims(range(3, 9), 2),
        source="W state on two independent local vectors"), {"a": tuple(a), "b": tuple(b)})


def _entry_dicke(D: int = 3) -> GalleryEntry:
    A = dicke(D)
    witness = np.array([np.eye(D), np.linalg.matrix_power(A[1], D - 1)])
    return GalleryEntry("dicke", A, Expectations(
        stability=(LEFT, D - 1), witness=witness, intersection_from=D,
        intersection_fails_at=(D - 1,), ell=D,
        obc_gs_dims=_dims(range(D + 1, 9), D), pbc_gs_dims=_dims(range(D + 1, 9), D),
        source="superposition of Dicke states: stability length D-1, ground space of dimension D"),
        {"D": D})


def _entry_w_momentum(p: float = 2 * math.pi / 5) -> GalleryEntry:
    A = w_momentum(p)
    witness = np.array([np.diag([np.exp(1j * p), 1.0]), np.zeros((2, 2))])
    pbc = {n: 2 if abs(np.exp(1j * p * n) - 1) < 1e-9 else 1 for n in range(3, 9)}
    return GalleryEntry("w_momentum", A, Expectations(
        stability=(LEFT, 1), witness=witness, intersection_from=2, ell=2,
        obc_gs_dims=_dims(range(3, 9), 2), pbc_gs_dims=pbc,
        source="W state with momentum p: periodic ground space doubles only for quantized p"),
        {"p": float(p)})


def _domain_wall_expectations(source: str, witness=None) -> Expectations:
    return Expectations(
        stability=(LEFT, 2), witness=witness, intersection_from=3, intersection_fails_at=(2,),
        ell=3, obc_gs_dims=_dims(range(4, 9), 3), source=source)


def _entry_domain_wall() -> GalleryEntry:
    A = domain_wall()
    witness = np.array([A[0] @ (np.eye(2) - A[1]), A[1]])
    return GalleryEntry("domain_wall", A, _domain_wall_expectations(
        "domain-wall superposition: 2-stable, ground space |0...0>, |1...1>, |DW_n>", witness))


def _entry_domain_wall_general(a=(1, 1), b=(1, -1)) -> GalleryEntry:
    return GalleryEntry("domain_wall_general", domain_wall_general(a, b), _domain_wall_expectations(
        "domain walls between two independent local vectors"), {"a": tuple(a), "b": tuple(b)})


def _entry_afm_ising() -> GalleryEntry:
    A = afm_ising()
    return GalleryEntry("afm_ising", A, Expectations(
        stability=(LEFT, 1), witness=np.array([A[1], A[0]]), intersection_from=2,
        intersection_fails_at=(1,), ell=2, obc_gs_dims=_dims(range(3, 9), 2),
        pbc_gs_dims=_dims((4, 6, 8), 2), frustrated_cases=[(3, 6), (5, 10), (7, 14)],
        source="antiferromagnetic Ising: periodic chains of odd length are frustrated, degeneracy 2n"))


def _entry_ghz() -> GalleryEntry:
    A = ghz()
    return GalleryEntry("ghz", A, Expectations(
        stability=(LEFT, 1), witness=A.matrices, intersection_from=2, intersection_fails_at=(1,),
        ell=2, obc_gs_dims=_dims(range(3, 9), 2), pbc_gs_dims=_dims(range(3, 9), 2),
        source="GHZ tensor: block-normal, ground space |0...0> and |1...1>"))


def _entry_gen_w() -> GalleryEntry:
    C = gen_w(constant_tensor([1, 0]), constant_tensor([0, 1]))
    return GalleryEntry("gen_w", C, Expectations(
        stability=(LEFT, 1), intersection_from=2, ell=2,
        obc_gs_dims=_dims(range(3, 9), 2), pbc_gs_dims=_dims(range(3, 9), 2),
        source="generalized W with bond dimension 1 blocks reproduces the W state"))


def _entry_gen_dw() -> GalleryEntry:
    C = gen_dw(constant_tensor([1, 0]), constant_tensor([0, 1]))
    return GalleryEntry("gen_dw", C, _domain_wall_expectations(
        "generalized domain wall with bond dimension 1 blocks reproduces the domain wall"))


def _entry_block_triangular() -> GalleryEntry:
    zero, one = constant_tensor([1, 0]), constant_tensor([0, 1])
    C = block_triangular(zero, one, one)
    return GalleryEntry("block_triangular", C, Expectations(
        stability=(RIGHT, 2), intersection_from=3, intersection_fails_at=(2,), ell=3,
        obc_gs_dims=_dims(range(4, 9), 3),
        source="domain wall with a defect tensor, mirrored: right 2-stable"))


def _entry_counterexample_a() -> GalleryEntry:
    A = counterexample_a()
    return GalleryEntry("counterexample_a", A, Expectations(
        stability=(LEFT, 1), witness=np.array([A[0], np.zeros((2, 2))]), intersection_from=2,
        intersection_fails_at=(1,), ell=2, obc_gs_dims=_dims(range(3, 9), 2),
        source="non-normal left 1-stable tensor, S_k = |0...00>, |0...01>"))


def _entry_counterexample_c() -> GalleryEntry:
    return GalleryEntry("counterexample_c", counterexample_c(), Expectations(
        unstable_up_to=5, intersection_fails_at=(2, 3, 4, 5), ell=3,
        obc_gs_dims=_dims(range(5, 8), 4), obc_equals_mps=False,
        source="direct sum of a left- and a right-stable tensor: neither side stable, "
               "ground space S_n(D) is larger than S_n(C)"))


def _entry_counterexample_d() -> GalleryEntry:
    return GalleryEntry("counterexample_d", counterexample_d(), Expectations(
        intersection_from=3, intersection_fails_at=(2,), ell=3, obc_gs_dims=_dims(range(4, 9), 4),
        source="tensor whose subspaces are the overlaps of the counterexample C"))


def _entry_aklt() -> GalleryEntry:
    return GalleryEntry("aklt", aklt(), Expectations(
        stability=(LEFT, 2), injectivity=2, intersection_from=3, ell=3,
        obc_gs_dims=_dims(range(4, 7), 4), pbc_gs_dims=_dims(range(4, 7), 1),
        source="AKLT: injective at length 2, 2-stable but not 1-stable"))


def _entry_nilpotent_aklt() -> GalleryEntry:
    return GalleryEntry("nilpotent_aklt", nilpotent_aklt(), Expectations(
        nilpotent=True, zero_from=4, intersection_fails_at=(3,),
        source="AKLT ⊗ N with N^4 = 0: S_4 vanishes"))


_BUILTINS: Dict[str, Callable[..., GalleryEntry]] = {
    "w_state": _entry_w_state,
    "w_general": _entry_w_general,
    "dicke": _entry_dicke,
    "w_momentum": _entry_w_momentum,
    "domain_wall": _entry_domain_wall,
    "domain_wall_general": _entry_domain_wall_general,
    "afm_ising": _entry_afm_ising,
    "ghz": _entry_ghz,
    "gen_w": _entry_gen_w,
    "gen_dw": _entry_gen_dw,
    "block_triangular": _entry_block_triangular,
    "counterexample_a": _entry_counterexample_a,
    "counterexample_c": _entry_counterexample_c,
    "counterexample_d": _entry_counterexample_d,
    "aklt": _entry_aklt,
    "nilpotent_aklt": _entry_nilpotent_aklt,
}

BUILTIN_NAMES = tuple(_BUILTINS)

DEFAULT_ENTRIES: List[Tuple[str, dict]] = [
    ("w_state", {}),
    ("w_general", {}),
    ("dicke", {"D": 3}),
    ("dicke", {"D": 4}),
    ("w_momentum", {"p": 2 * math.pi / 5}),
    ("w_momentum", {"p": 1.0}),
    ("domain_wall", {}),
    ("domain_wall_general", {}),
    ("afm_ising", {}),
    ("ghz", {}),
    ("gen_w", {}),
    ("gen_dw", {}),
    ("block_triangular", {}),
    ("counterexample_a", {}),
    ("counterexample_c", {}),
    ("counterexample_d", {}),
    ("aklt", {}),
    ("nilpotent_aklt", {}),
]


def builtin(name: str, **params) -> GalleryEntry:
    """Gallery entry by name, e.g. builtin("dicke", D=4)"""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ContractViolation(f"unknown gallery entry {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    try:
        return factory(**params)
    except TypeError as e:
        raise ContractViolation(f"bad parameters for {name}: {e}") from e


def default_entries() -> List[GalleryEntry]:
    return [builtin(name, **params) for name, params in DEFAULT_ENTRIES]


def export_entries(directory: str, entries: Optional[List[GalleryEntry]] = None) -> List[str]:
    """Write every entry's tensor in the tensor file format; returns the paths"""
    from models import save_tensor

    os.makedirs(directory, exist_ok=True)
    paths = []
    for entry in entries or default_entries():
        path = os.path.join(directory, f"{entry.slug}.json")
        save_tensor(entry.tensor, path)
        paths.append(path)
    return paths

# =============================================================================
# REGRESSION DRIVER
# =============================================================================

def _run_check(label: str, check: str, fn: Callable[[], Tuple[bool, str]]) -> CheckRecord:
    try:
        ok, detail = fn()
    except DenseCapExceeded as e:
        return CheckRecord(label, check, SKIPPED, str(e))
    except MpsError as e:
        return CheckRecord(label, check, FAIL, f"{type(e).__name__}: {e}")
    return CheckRecord(label, check, PASS if ok else FAIL, detail)


def _check_entry(entry: GalleryEntry, nmax: int, tol: Tolerance) -> List[CheckRecord]:
    A, exp, label = entry.tensor, entry.expected, entry.label
    records = []

    def add(check: str, fn: Callable[[], Tuple[bool, str]]):
        records.append(_run_check(label, check, fn))

    def skip(check: str, reason: str):
        records.append(CheckRecord(label, check, SKIPPED, reason))

    def nilpotency():
        found = is_nilpotent(A, tol)
        return found == exp.nilpotent, f"nilpotent={found}"
    add("nilpotent", nilpotency)

    def injectivity():
        found = injectivity_length(A, default_jmax(A.D), tol)
        return found == exp.injectivity, f"injectivity length {found}"
    add("injectivity", injectivity)

    if exp.stability is not None:
        side, j = exp.stability

        def stability():
            found = stability_length(A, side, j, tol)
            found_j = None if found is None else found.j
            return found_j == j, f"{side} stability length {found_j}"
        add(f"stability {side} j={j}", stability)

        if exp.witness is not None:
            def witness():
                check = check_witness(A, StabilityWitness(side, j, np.asarray(exp.witness)), tol)
                return check.valid, (f"residuals {check.residual_invariance:.2e} / "
                                     f"{check.residual_identity:.2e}")
            add(f"witness {side} j={j}", witness)

    if exp.unstable_up_to is not None:
        def unstable():
            found = [(side, j) for side in (LEFT, RIGHT) for j in range(1, exp.unstable_up_to + 1)
                     if stability_witness(A, j, side, tol) is not None]
            return not found, f"witnesses found at {found}" if found else "no witness"
        add(f"unstable j<={exp.unstable_up_to}", unstable)

    if exp.zero_from is not None:
        if exp.zero_from > nmax:
            skip(f"S_{exp.zero_from} = 0", f"requires n={exp.zero_from} > nmax={nmax}")
        else:
            add(f"S_{exp.zero_from} = 0",
                lambda: (physical_subspace(A, exp.zero_from, tol).is_zero, ""))

    if exp.intersection_from is not None:
        ks = range(exp.intersection_from, nmax)
        if not ks:
            skip(f"intersection k>={exp.intersection_from}", f"requires n > nmax={nmax}")
        for k in ks:
            def holds(k=k):
                r = intersection_check(A, k, tol)
                return r.holds, f"lhs dim {r.lhs_dim}, S_{k + 1} dim {r.rhs_dim}"
            add(f"intersection k={k}", holds)

    for k in exp.intersection_fails_at:
        if k + 1 > nmax:
            skip(f"intersection fails k={k}", f"requires n={k + 1} > nmax={nmax}")
            continue

        def fails(k=k):
            r = intersection_check(A, k, tol)
            return not r.holds, f"lhs dim {r.lhs_dim}, S_{k + 1} dim {r.rhs_dim}"
        add(f"intersection fails k={k}", fails)

    for boundary, dims, must_equal in ((OBC, exp.obc_gs_dims, exp.obc_equals_mps),
                                       (PBC, exp.pbc_gs_dims, True)):
        for n, dim in sorted(dims.items()):
            check = f"{boundary} ell={exp.ell} n={n}"
            if n > nmax:
                skip(check, f"n={n} > nmax={nmax}")
                continue

            def ground(n=n, dim=dim, boundary=boundary, must_equal=must_equal):
                r = verify_ground_equals_mps(A, exp.ell, n, boundary, tol)
                ok = r.gs_dim == dim and r.frustration_free and (r.equal or not must_equal)
                return ok, f"gs dim {r.gs_dim} (expected {dim}), mps dim {r.mps_dim}, equal={r.equal}"
            add(check, ground)

    for n, degeneracy in exp.frustrated_cases:
        check = f"frustrated pbc ell={exp.ell} n={n}"
        if n > nmax:
            skip(check, f"n={n} > nmax={nmax}")
            continue

        def frustrated(n=n, degeneracy=degeneracy):
            gs = ground_space(build(A, exp.ell, n, PBC, tol), tol)
            ok = not gs.frustration_free and gs.energy > 1e-6 and gs.degeneracy == degeneracy
            return ok, f"E0={gs.energy:.3e}, degeneracy {gs.degeneracy} (expected {degeneracy})"
        add(check, frustrated)

    return records


def run_all(nmax: int, entries: Optional[List[GalleryEntry]] = None, workers: int = 1,
            tol: Tolerance = DEFAULT_TOL) -> List[CheckRecord]:
    """
    Check every expectation of every entry up to nmax sites.

    Entries run concurrently when workers > 1; records are ordered by entry
    label and, within an entry, by check order.
    """
    entries = default_entries() if entries is None else entries
    ordered = sorted(entries, key=lambda e: e.label)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda e: _check_entry(e, nmax, tol), ordered))
    else:
        results = [_check_entry(e, nmax, tol) for e in ordered]
    records = [r for entry_records in results for r in entry_records]
    failed = sum(r.status == FAIL for r in records)
    logger.info(f"gallery: {len(records)} checks, {failed} failed, "
                f"{sum(r.status == SKIPPED for r in records)} skipped")
    return records

# =============================================================================
# PROPERTY TESTS FOR THE GENERALIZED FAMILIES
# =============================================================================

def _single_site_disjoint(A: MpsTensor, B: MpsTensor, tol: Tolerance) -> bool:
    return intersect(physical_subspace(A, 1, tol), physical_subspace(B, 1, tol)).is_zero


def _embedded_boundary(D: int, X: np.ndarray) -> np.ndarray:
    # lower-left block picks out the off-diagonal (moving wave) part of the product
    big = np.zeros((2 * D, 2 * D), dtype=complex)
    big[D:, :D] = X
    return big


def moving_wave_subspace(A: MpsTensor, B: MpsTensor, n: int, tol: Tolerance = DEFAULT_TOL):
    """S_n^W(A, B) = span{ sum_l |X [A]^{l-1} B [A]^{n-l}> }"""
    C = gen_w(A, B)
    states = [mps_state(C, _embedded_boundary(A.D, X), n).amplitudes for X in boundary_basis(A.D)]
    return orthonormal_basis(np.array(states), tol)


def gen_w_property_test(A: MpsTensor, B: MpsTensor, k: int, nmax: int,
                        tol: Tolerance = DEFAULT_TOL) -> PropertyOutcome:
    """
    For C = gen_w(A, B): S_n(C) = S_n(A) + S_n^W(A, B) with dim <= 2 D^2 for
    n = 1..nmax, and C inherits the intersection property of A at k when
    S_1(A) ∩ S_1(B) = {0}.
    """
    if A.d != B.d or A.D != B.D:
        return PropertyOutcome(SKIPPED, "A and B must share d and D")
    if not _single_site_disjoint(A, B, tol):
        return PropertyOutcome(SKIPPED, "S_1(A) and S_1(B) intersect")
    if not intersection_check(A, k, tol).holds:
        return PropertyOutcome(SKIPPED, f"A does not satisfy intersection at k={k}")

    C = gen_w(A, B)
    failures = []
    for n in range(1, nmax + 1):
        S_C = physical_subspace(C, n, tol)
        expected = span_sum(physical_subspace(A, n, tol), moving_wave_subspace(A, B, n, tol))
        if not equal(S_C, expected):
            failures.append(f"S_{n}(C) has dim {S_C.dim}, S_n(A) + S_n^W has dim {expected.dim}")
        if S_C.dim > 2 * A.D * A.D:
            failures.append(f"dim S_{n}(C) = {S_C.dim} exceeds 2 D^2")
    if not intersection_check(C, k, tol).holds:
        failures.append(f"C fails intersection at k={k}")
    return PropertyOutcome(FAIL if failures else PASS, failures=failures)


def gen_dw_property_test(A: MpsTensor, B: MpsTensor, kmax: int, nmax: int,
                         tol: Tolerance = DEFAULT_TOL) -> PropertyOutcome:
    """
    For A left j_A-stable, B right j_B-stable and S_1(A) ∩ S_1(B) = {0},
    C = gen_dw(A, B) satisfies intersection for k = j_A + j_B + 1..kmax and
    its periodic subspace splits as S_n^P(A) ⊕ S_n^P(B) for n = 2..nmax.
    """
    if A.d != B.d or A.D != B.D:
        return PropertyOutcome(SKIPPED, "A and B must share d and D")
    if not _single_site_disjoint(A, B, tol):
        return PropertyOutcome(SKIPPED, "S_1(A) and S_1(B) intersect")
    left = stability_length(A, LEFT, default_jmax(A.D), tol)
    if left is None:
        return PropertyOutcome(SKIPPED, "A is not left-stable within the scan bound")
    right = stability_length(B, RIGHT, default_jmax(B.D), tol)
    if right is None:
        return PropertyOutcome(SKIPPED, "B is not right-stable within the scan bound")

    C = gen_dw(A, B)
    failures = []
    for k in range(left.j + right.j + 1, kmax + 1):
        try:
            r = intersection_check(C, k, tol)
        except DenseCapExceeded:
            break
        if not r.holds:
            failures.append(f"intersection fails at k={k}: lhs dim {r.lhs_dim}, S_{k + 1} dim {r.rhs_dim}")
    for n in range(2, nmax + 1):
        periodic = periodic_subspace(C, n, tol)
        expected = span_sum(periodic_subspace(A, n, tol), periodic_subspace(B, n, tol))
        if not equal(periodic, expected):
            failures.append(f"S_{n}^P(C) has dim {periodic.dim}, expected {expected.dim}")
    logger.debug(f"gen_dw property: j_A={left.j}, j_B={right.j}, {len(failures)} failures")
    return PropertyOutcome(FAIL if failures else PASS, failures=failures)


def random_disjoint_pair(seed: int, D: int = 2) -> Tuple[MpsTensor, MpsTensor]:
    """
    Random complex Gaussian tensors on d = 4 with A supported on physical
    states {0, 1} and B on {2, 3}, so S_1(A) ∩ S_1(B) = {0}.
    """
    rng = np.random.default_rng(seed)

    def half(offset: int) -> MpsTensor:
        mats = np.zeros((4, D, D), dtype=complex)
        block = rng.standard_normal((2, D, D)) + 1j * rng.standard_normal((2, D, D))
        mats[offset:offset + 2] = block / np.sqrt(2)
        return MpsTensor(mats)

    return half(0), half(2)
