"""
Command-line interface for mpstab

Usage:
    python main.py analyze w_state                   # report JSON on stdout
    python main.py certify w_state --j 1 --side left --out witness.json
    python main.py groundspace domain_wall --ell 3 --n 6 --boundary obc
    python main.py gallery --nmax 7
    python main.py scan --count 100 --seed 7 --d 2 --D 2 --out scan.csv

Tensor arguments are file paths or names of packaged tensors.

Exit codes: 0 analysis completed, 1 gallery expectation failed,
2 unreadable input, 3 size cap exceeded, 4 numerical failure.
"""

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

import numpy as np

from certify import (LEFT, RIGHT, SIDES, check_witness, injectivity_length,
                     intersection_check, is_nilpotent, pushing_operator,
                     solve_stability, stability_length, verify_pushing,
                     virtual_dimensions)
from config import (APP_NAME, APP_VERSION, DEFAULT_EIG_ZERO, DEFAULT_ELL,
                    DEFAULT_GALLERY_NMAX, DEFAULT_KMAX, DEFAULT_NMAX,
                    DEFAULT_PUSH_SAMPLES, DEFAULT_RANK_REL, DEFAULT_SCAN_COUNT,
                    DEFAULT_SCAN_SEED, default_jmax, get_dense_cap,
                    get_operator_cap)
from errors import (ContractViolation, DenseCapExceeded, DimensionMismatch, MpsError,
                    NotProperSubspace, TensorFormatError)
from gallery import FAIL, export_entries, run_all
from hamiltonian import BOUNDARIES, OBC, PBC, verify_ground_equals_mps
from linalg import Tolerance
from models import (SCAN_COLUMNS, AnalysisReport, GroundSpaceRecord, ScanRow,
                    StabilityRecord, load_tensor, load_witness, save_witness,
                    tensor_digest, witness_to_dict)
from mps import MpsTensor, random_tensor
from resources import list_packaged_tensors, resolve_tensor_argument

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_NUMERICAL = 4


def _tolerance(args) -> Tolerance:
    try:
        return Tolerance(rank_rel=args.tol_rank, eig_zero=args.tol_zero)
    except ContractViolation as e:
        raise TensorFormatError(f"bad tolerance flags: {e}") from e


def _require(condition: bool, message: str):
    if not condition:
        raise TensorFormatError(message)


def _positive(args, *names: str):
    for name in names:
        value = getattr(args, name)
        _require(value is None or value >= 1, f"--{name} must be positive, got {value}")


def _load(arg: str) -> MpsTensor:
    path = resolve_tensor_argument(arg)
    try:
        return load_tensor(path)
    except OSError as e:
        raise TensorFormatError(f"cannot read {path}: {e.strerror or e} "
                                f"(packaged tensors: {', '.join(list_packaged_tensors())})") from e


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
        logger.info(f"wrote {out}")
    else:
        print(text)


def _fits(d: int, n: int, cap: int) -> bool:
    return d ** n <= cap

# =============================================================================
# ANALYZE
# =============================================================================

def _stability_record(A: MpsTensor, side: str, jmax: int, tol: Tolerance) -> StabilityRecord:
    found = stability_length(A, side, jmax, tol)
    if found is None:
        return StabilityRecord(side)
    W = found.witness
    return StabilityRecord(side, found.j, W.residual_invariance, W.residual_identity, found.persistent)


def choose_ell(stability: List[StabilityRecord]) -> int:
    """Shortest stability length plus one, or DEFAULT_ELL without a witness"""
    lengths = [s.j for s in stability if s.j is not None]
    return min(lengths) + 1 if lengths else DEFAULT_ELL


def analyze(A: MpsTensor, tol: Tolerance, jmax: Optional[int] = None, kmax: int = DEFAULT_KMAX,
            nmax: int = DEFAULT_NMAX, ell: Optional[int] = None) -> AnalysisReport:
    """Run every certificate on A and collect the results in a report"""
    jmax = jmax or default_jmax(A.D)
    report = AnalysisReport(tensor_digest(A), tolerances=tol, tool_version=APP_VERSION)
    report.injectivity = injectivity_length(A, jmax, tol)
    report.nilpotent = is_nilpotent(A, tol)
    report.virtual_dimensions = virtual_dimensions(A, jmax, tol)
    report.stability = [_stability_record(A, side, jmax, tol) for side in SIDES]

    dense_cap = get_dense_cap()
    ks = [k for k in range(1, kmax + 1) if _fits(A.d, k + 1, dense_cap)]
    if len(ks) < kmax:
        logger.warning(f"intersection range clipped to k <= {ks[-1] if ks else 0} by the dense cap {dense_cap}")
    report.intersection = {k: intersection_check(A, k, tol).holds for k in ks}

    ell = ell or choose_ell(report.stability)
    operator_cap = get_operator_cap()
    ns = [n for n in range(ell, nmax + 1) if _fits(A.d, n, operator_cap)]
    if len(ns) < max(0, nmax - ell + 1):
        logger.warning(f"ground-space range clipped to n <= {ns[-1] if ns else ell - 1} "
                       f"by the operator cap {operator_cap}")
    for n in ns:
        for boundary in BOUNDARIES:
            try:
                r = verify_ground_equals_mps(A, ell, n, boundary, tol)
            except NotProperSubspace as e:
                logger.warning(f"no parent Hamiltonian at ell={ell}: {e}")
                return report
            report.ground_spaces.append(GroundSpaceRecord(
                boundary=boundary, ell=ell, n=n, energy=r.energy, degeneracy=r.gs_dim,
                frustration_free=r.frustration_free, equals_mps=r.equal))
    return report


def cmd_analyze(args) -> int:
    tol = _tolerance(args)
    _positive(args, "jmax", "kmax", "nmax", "ell")
    A = _load(args.tensor)
    report = analyze(A, tol, args.jmax, args.kmax, args.nmax, args.ell)
    _emit(report.to_json(), args.out)
    return EXIT_OK

# =============================================================================
# CERTIFY
# =============================================================================

def _pushing_check(A: MpsTensor, op, samples: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    fixed, transfer = 0.0, 0.0
    for _ in range(samples):
        M = rng.standard_normal((A.D, A.D)) + 1j * rng.standard_normal((A.D, A.D))
        r = verify_pushing(A, op, M)
        fixed, transfer = max(fixed, r.fixed_point), max(transfer, r.transfer)
    return {"fixed_point": fixed, "transfer": transfer, "samples": samples}


def cmd_certify(args) -> int:
    tol = _tolerance(args)
    _positive(args, "j")
    A = _load(args.tensor)

    if args.witness:
        try:
            W, _ = load_witness(args.witness)
        except OSError as e:
            raise TensorFormatError(f"cannot read {args.witness}: {e.strerror or e}") from e
        try:
            check = check_witness(A, W, tol)
        except DimensionMismatch as e:
            raise TensorFormatError(f"witness {args.witness} does not fit the tensor: {e}") from e
        _emit(json.dumps({
            "side": W.side, "j": W.j, "valid": check.valid,
            "residual_invariance": check.residual_invariance,
            "residual_identity": check.residual_identity,
        }, indent=2), None)
        return EXIT_OK

    W = solve_stability(A, args.j, args.side, tol)
    if not W.is_valid(tol):
        print(f"no {W.side} {W.j}-stability witness "
              f"(best residuals {W.residual_invariance:.3e} / {W.residual_identity:.3e})")
        return EXIT_OK

    op = pushing_operator(A, W, tol)
    residuals = _pushing_check(A, op, DEFAULT_PUSH_SAMPLES, args.seed)
    logger.info(f"pushing residuals: {residuals}")
    if args.out:
        save_witness(W, args.out, op.O)
        print(f"{W.side} {W.j}-stable; witness written to {args.out}")
    else:
        print(json.dumps(witness_to_dict(W, op.O), indent=2))
    print(f"residuals: invariance {W.residual_invariance:.3e}, identity {W.residual_identity:.3e}, "
          f"pushing {residuals['transfer']:.3e}", file=sys.stderr)
    return EXIT_OK

# =============================================================================
# GROUNDSPACE
# =============================================================================

def cmd_groundspace(args) -> int:
    tol = _tolerance(args)
    _positive(args, "ell", "n")
    A = _load(args.tensor)
    r = verify_ground_equals_mps(A, args.ell, args.n, args.boundary, tol)
    result = {"boundary": args.boundary, "ell": args.ell, "n": args.n}
    result.update(r.to_dict())
    _emit(json.dumps(result, indent=2), args.out)
    return EXIT_OK

# =============================================================================
# GALLERY
# =============================================================================

def cmd_gallery(args) -> int:
    tol = _tolerance(args)
    _positive(args, "nmax", "workers")
    if args.export:
        for path in export_entries(args.export):
            print(path)
        return EXIT_OK

    records = run_all(args.nmax, workers=args.workers, tol=tol)
    if args.json:
        print(json.dumps([r.to_dict() for r in records], indent=2))
    else:
        width = max((len(r.entry) for r in records), default=0)
        for r in records:
            print(f"{r.status.upper():8} {r.entry:{width}}  {r.check}  {r.detail}")
    failed = [r for r in records if r.status == FAIL]
    print(f"{len(records)} checks, {len(failed)} failed", file=sys.stderr)
    return EXIT_FINDINGS if failed else EXIT_OK

# =============================================================================
# SCAN
# =============================================================================

def min_intersection_k(holds: List[bool]) -> Optional[int]:
    """
    Smallest k such that the property holds at every k' from k to the end
    of the range; ``holds[i]`` is the result at k = i + 1.
    """
    k = None
    for index in range(len(holds) - 1, -1, -1):
        if not holds[index]:
            break
        k = index + 1
    return k


def scan_sample(seed: int, index: int, d: int, D: int, dist: str, kmax: int,
                tol: Tolerance) -> ScanRow:
    """Certificates of one random tensor; the RNG stream depends only on (seed, index)"""
    rng = np.random.default_rng([seed, index])
    A = random_tensor(d, D, rng, dist)
    jmax = default_jmax(D)
    row = ScanRow(index, d, D, inj_len=injectivity_length(A, jmax, tol))
    for side in (LEFT, RIGHT):
        found = stability_length(A, side, jmax, tol)
        setattr(row, f"stab_{side}", None if found is None else found.j)
    cap = get_dense_cap()
    holds = [intersection_check(A, k, tol).holds for k in range(1, kmax + 1) if _fits(d, k + 1, cap)]
    row.min_intersection_k = min_intersection_k(holds)
    return row


def _scan_task(task: tuple) -> ScanRow:
    return scan_sample(*task)


def cmd_scan(args) -> int:
    tol = _tolerance(args)
    _positive(args, "d", "D", "kmax", "workers")
    _require(args.count >= 0, f"--count must be non-negative, got {args.count}")
    tasks = [(args.seed, i, args.d, args.D, args.dist, args.kmax, tol) for i in range(args.count)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_scan_task, tasks))
    else:
        rows = [_scan_task(t) for t in tasks]

    out = open(args.out, 'w', newline='', encoding='utf-8') if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SCAN_COLUMNS)
        for row in rows:
            writer.writerow(row.to_row())
    finally:
        if args.out:
            out.close()
    return EXIT_OK

# =============================================================================
# ENTRY POINT
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME,
                                     description="Stability, intersection and parent Hamiltonians of MPS tensors")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("--tol-rank", type=float, default=DEFAULT_RANK_REL,
                        help=f"relative singular-value cutoff (default: {DEFAULT_RANK_REL})")
    parser.add_argument("--tol-zero", type=float, default=DEFAULT_EIG_ZERO,
                        help=f"zero-eigenvalue threshold (default: {DEFAULT_EIG_ZERO})")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)
    tensor_help = f"tensor file or packaged tensor name ({', '.join(list_packaged_tensors())})"

    analyze_parser = subparsers.add_parser("analyze", help="Full report for one tensor")
    analyze_parser.add_argument("tensor", help=tensor_help)
    analyze_parser.add_argument("--jmax", type=int, help="stability/injectivity bound (default: D^2 + 1)")
    analyze_parser.add_argument("--kmax", type=int, default=DEFAULT_KMAX,
                                help=f"largest intersection length (default: {DEFAULT_KMAX})")
    analyze_parser.add_argument("--nmax", type=int, default=DEFAULT_NMAX,
                                help=f"largest chain length (default: {DEFAULT_NMAX})")
    analyze_parser.add_argument("--ell", type=int,
                                help="interaction length (default: stability length + 1)")
    analyze_parser.add_argument("--out", help="write the report here instead of stdout")
    analyze_parser.set_defaults(func=cmd_analyze)

    certify_parser = subparsers.add_parser("certify", help="Stability witness and pushing operator")
    certify_parser.add_argument("tensor", help=tensor_help)
    certify_parser.add_argument("--j", type=int, default=1, help="stability length (default: 1)")
    certify_parser.add_argument("--side", choices=SIDES, default=LEFT)
    certify_parser.add_argument("--witness", help="re-validate a stored witness file instead of solving")
    certify_parser.add_argument("--seed", type=int, default=DEFAULT_SCAN_SEED,
                                help="seed for the random insertions used to check pushing")
    certify_parser.add_argument("--out", help="witness file to write")
    certify_parser.set_defaults(func=cmd_certify)

    ground_parser = subparsers.add_parser("groundspace", help="Parent Hamiltonian ground space")
    ground_parser.add_argument("tensor", help=tensor_help)
    ground_parser.add_argument("--ell", type=int, default=DEFAULT_ELL)
    ground_parser.add_argument("--n", type=int, required=True)
    ground_parser.add_argument("--boundary", choices=(OBC, PBC), default=OBC)
    ground_parser.add_argument("--out", help="write the result here instead of stdout")
    ground_parser.set_defaults(func=cmd_groundspace)

    gallery_parser = subparsers.add_parser("gallery", help="Run the gallery regression suite")
    gallery_parser.add_argument("--nmax", type=int, default=DEFAULT_GALLERY_NMAX,
                                help=f"largest chain length checked (default: {DEFAULT_GALLERY_NMAX})")
    gallery_parser.add_argument("--workers", type=int, default=1)
    gallery_parser.add_argument("--json", action="store_true", help="print records as JSON")
    gallery_parser.add_argument("--export", metavar="DIR", help="write the gallery tensors to DIR and exit")
    gallery_parser.set_defaults(func=cmd_gallery)

    scan_parser = subparsers.add_parser("scan", help="Certificates of random tensors as CSV")
    scan_parser.add_argument("--count", type=int, default=DEFAULT_SCAN_COUNT)
    scan_parser.add_argument("--seed", type=int, default=DEFAULT_SCAN_SEED)
    scan_parser.add_argument("--dist", choices=("complex", "real"), default="complex")
    scan_parser.add_argument("--d", type=int, default=2)
    scan_parser.add_argument("--D", type=int, default=2)
    scan_parser.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
    scan_parser.add_argument("--workers", type=int, default=1)
    scan_parser.add_argument("--out", help="CSV file (default: stdout)")
    scan_parser.set_defaults(func=cmd_scan)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except TensorFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except DenseCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except MpsError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
