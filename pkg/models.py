"""
Data models and file formats for mpstab

Tensor files:   {"d": int, "D": int, "matrices": [d matrices of D x D [re, im] entries]}
Witness files:  {"side": "left"|"right", "j": int, "Y": [matrix, ...], "O": matrix}
Reports:        AnalysisReport.to_dict(), versioned by "report_version"
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from numbers import Real
from typing import Dict, List, Optional, Tuple

import numpy as np

from certify import SIDES, StabilityWitness
from config import APP_VERSION, REPORT_VERSION
from errors import ContractViolation, DimensionMismatch, TensorFormatError
from linalg import Tolerance
from mps import MpsTensor

# =============================================================================
# COMPLEX ARRAY ENCODING
# =============================================================================

def encode_matrix(M: np.ndarray) -> list:
    """Nested lists with every entry as [re, im]"""
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _is_number(x) -> bool:
    return isinstance(x, Real) and not isinstance(x, bool)


def decode_complex(value, path: str) -> complex:
    if not (isinstance(value, list) and len(value) == 2 and all(_is_number(x) for x in value)):
        raise TensorFormatError("complex numbers must be [re, im] pairs", path=path)
    return complex(value[0], value[1])


def decode_matrix(value, path: str, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Parse a matrix of [re, im] entries, rejecting ragged rows"""
    if not isinstance(value, list) or not value:
        raise TensorFormatError("matrix must be a non-empty list of rows", path=path)
    rows = len(value) if shape is None else shape[0]
    if len(value) != rows:
        raise TensorFormatError(f"expected {rows} rows, found {len(value)}", path=path)
    cols = None if shape is None else shape[1]
    out = []
    for r, row in enumerate(value):
        row_path = f"{path}[{r}]"
        if not isinstance(row, list):
            raise TensorFormatError("matrix row must be a list", path=row_path)
        if cols is None:
            cols = len(row)
        if len(row) != cols:
            raise TensorFormatError(f"expected {cols} entries, found {len(row)}", path=row_path)
        out.append([decode_complex(z, f"{row_path}[{c}]") for c, z in enumerate(row)])
    return np.array(out, dtype=complex)


def _load_json_text(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise TensorFormatError(f"invalid JSON: {e.msg}", lineno=e.lineno, colno=e.colno) from e
    if not isinstance(data, dict):
        raise TensorFormatError("top level must be a JSON object", path="$")
    return data


def _read_text(filepath: str) -> str:
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            return f.read()
    except UnicodeDecodeError as e:
        raise TensorFormatError(f"file is not UTF-8: {e}") from e


def _positive_int(data: dict, key: str) -> int:
    value = data.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise TensorFormatError(f"'{key}' must be a positive integer", path=key)
    return value

# =============================================================================
# TENSOR FILES
# =============================================================================

def tensor_to_dict(A: MpsTensor) -> dict:
    return {"d": A.d, "D": A.D, "matrices": [encode_matrix(m) for m in A.matrices]}


def tensor_from_dict(data: dict) -> MpsTensor:
    d = _positive_int(data, "d")
    D = _positive_int(data, "D")
    mats = data.get("matrices")
    if not isinstance(mats, list):
        raise TensorFormatError("'matrices' must be a list", path="matrices")
    if len(mats) != d:
        raise TensorFormatError(f"expected {d} matrices, found {len(mats)}", path="matrices")
    arrays = [decode_matrix(m, f"matrices[{i}]", (D, D)) for i, m in enumerate(mats)]
    try:
        return MpsTensor(arrays)
    except (ContractViolation, DimensionMismatch) as e:
        raise TensorFormatError(str(e), path="matrices") from e


def parse_tensor(text: str) -> MpsTensor:
    return tensor_from_dict(_load_json_text(text))


def load_tensor(filepath: str) -> MpsTensor:
    return parse_tensor(_read_text(filepath))


def save_tensor(A: MpsTensor, filepath: str):
    with open(filepath, 'w', encoding='utf-8') as f:
        json.dump(tensor_to_dict(A), f, indent=2)


@dataclass
class TensorDigest:
    d: int
    D: int
    sha256: str


def tensor_digest(A: MpsTensor) -> TensorDigest:
    """Shape plus the SHA-256 of the canonical (sorted, compact) tensor JSON"""
    canonical = json.dumps(tensor_to_dict(A), sort_keys=True, separators=(",", ":"))
    return TensorDigest(A.d, A.D, hashlib.sha256(canonical.encode("utf-8")).hexdigest())

# =============================================================================
# WITNESS FILES
# =============================================================================

def witness_to_dict(W: StabilityWitness, O: Optional[np.ndarray] = None) -> dict:
    data = {
        "side": W.side,
        "j": W.j,
        "Y": [encode_matrix(y) for y in W.Y],
    }
    if O is not None:
        data["O"] = encode_matrix(O)
    return data


def witness_from_dict(data: dict) -> Tuple[StabilityWitness, Optional[np.ndarray]]:
    side = data.get("side")
    if side not in SIDES:
        raise TensorFormatError("'side' must be \"left\" or \"right\"", path="side")
    j = _positive_int(data, "j")
    Y = data.get("Y")
    if not isinstance(Y, list) or not Y:
        raise TensorFormatError("'Y' must be a non-empty list of matrices", path="Y")
    first = decode_matrix(Y[0], "Y[0]")
    mats = [first] + [decode_matrix(m, f"Y[{i}]", first.shape) for i, m in enumerate(Y[1:], 1)]
    O = decode_matrix(data["O"], "O") if "O" in data else None
    return StabilityWitness(side, j, np.array(mats)), O


def save_witness(W: StabilityWitness, filepath: str, O: Optional[np.ndarray] = None):
    with open(filepath, 'w', encoding='utf-8') as f:
        json.dump(witness_to_dict(W, O), f, indent=2)


def load_witness(filepath: str) -> Tuple[StabilityWitness, Optional[np.ndarray]]:
    return witness_from_dict(_load_json_text(_read_text(filepath)))

# =============================================================================
# ANALYSIS REPORT
# =============================================================================

@dataclass
class StabilityRecord:
    side: str
    j: Optional[int] = None
    residual_invariance: Optional[float] = None
    residual_identity: Optional[float] = None
    persistent: Optional[bool] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'StabilityRecord':
        return cls(**data)


@dataclass
class GroundSpaceRecord:
    boundary: str
    ell: int
    n: int
    energy: float
    degeneracy: int
    frustration_free: bool
    equals_mps: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'GroundSpaceRecord':
        return cls(**data)


@dataclass
class AnalysisReport:
    """Everything ``analyze`` finds out about one tensor"""
    tensor_digest: TensorDigest
    injectivity: Optional[int] = None
    nilpotent: bool = False
    virtual_dimensions: List[int] = field(default_factory=list)   # dim V_j, j = 1..jmax
    stability: List[StabilityRecord] = field(default_factory=list)  # left before right
    intersection: Dict[int, bool] = field(default_factory=dict)     # ascending k
    ground_spaces: List[GroundSpaceRecord] = field(default_factory=list)
    tolerances: Tolerance = field(default_factory=Tolerance)
    tool_version: str = APP_VERSION
    report_version: str = REPORT_VERSION

    def to_dict(self) -> dict:
        return {
            "report_version": self.report_version,
            "tool_version": self.tool_version,
            "tensor_digest": asdict(self.tensor_digest),
            "tolerances": self.tolerances.to_dict(),
            "injectivity": self.injectivity,
            "nilpotent": self.nilpotent,
            "virtual_dimensions": list(self.virtual_dimensions),
            "stability": [s.to_dict() for s in self.stability],
            "intersection": {str(k): v for k, v in sorted(self.intersection.items())},
            "ground_spaces": [g.to_dict() for g in self.ground_spaces],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'AnalysisReport':
        version = data.get("report_version")
        if version != REPORT_VERSION:
            raise TensorFormatError(f"unsupported report version {version!r}", path="report_version")
        try:
            return cls(
                tensor_digest=TensorDigest(**data["tensor_digest"]),
                injectivity=data.get("injectivity"),
                nilpotent=data["nilpotent"],
                virtual_dimensions=list(data.get("virtual_dimensions", [])),
                stability=[StabilityRecord.from_dict(s) for s in data.get("stability", [])],
                intersection={int(k): v for k, v in data.get("intersection", {}).items()},
                ground_spaces=[GroundSpaceRecord.from_dict(g) for g in data.get("ground_spaces", [])],
                tolerances=Tolerance.from_dict(data["tolerances"]),
                tool_version=data["tool_version"],
                report_version=version,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise TensorFormatError(f"malformed report: {e}") from e

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, filepath: str):
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(self.to_json())

    @classmethod
    def load(cls, filepath: str) -> 'AnalysisReport':
        return cls.from_dict(_load_json_text(_read_text(filepath)))

# =============================================================================
# SCAN SUMMARY
# =============================================================================

SCAN_COLUMNS = ("seed_index", "d", "D", "inj_len", "stab_left", "stab_right", "min_intersection_k")


@dataclass
class ScanRow:
    """One random tensor of an ensemble scan; None is written as an empty cell"""
    seed_index: int
    d: int
    D: int
    inj_len: Optional[int] = None
    stab_left: Optional[int] = None
    stab_right: Optional[int] = None
    min_intersection_k: Optional[int] = None

    def to_row(self) -> List[str]:
        values = asdict(self)
        return ["" if values[c] is None else str(values[c]) for c in SCAN_COLUMNS]
