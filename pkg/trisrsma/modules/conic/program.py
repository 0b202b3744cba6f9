"""
Standard-form cone programs: minimize cᵀx subject to Ax + s = b, s ∈ K.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from ...core.errors import ConeProgramError
from .cones import PSD, Cone, ConeSpec, Exp, NonNeg, SecondOrder, Zero

logger = logging.getLogger(__name__)


class SolverStatus(Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True, eq=False)
class ConeProgram:
    c: np.ndarray
    A: sparse.csc_matrix
    b: np.ndarray
    cones: ConeSpec

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float).ravel()
        A = sparse.csc_matrix(self.A, dtype=float)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A", A)

        if A.shape != (b.shape[0], c.shape[0]):
            raise ConeProgramError(f"A has shape {A.shape}, expected ({b.shape[0]}, {c.shape[0]})")
        if self.cones.dim != b.shape[0]:
            raise ConeProgramError(f"cone dimension {self.cones.dim} does not match {b.shape[0]} rows")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(b)) and np.all(np.isfinite(A.data))):
            raise ConeProgramError("program data contains non-finite entries")
        A.eliminate_zeros()
        row_counts = np.bincount(A.indices, minlength=b.shape[0])
        empty = np.flatnonzero(row_counts == 0)
        if empty.size:
            raise ConeProgramError(f"constraint row {int(empty[0])} of A is all zero")

    @property
    def num_variables(self) -> int:
        return self.c.shape[0]

    @property
    def num_constraints(self) -> int:
        return self.b.shape[0]


@dataclass(frozen=True, eq=False)
class ConeSolution:
    x: np.ndarray
    s: np.ndarray
    y: np.ndarray
    status: SolverStatus
    primal_residual: float
    dual_residual: float
    gap: float
    iterations: int
    objective: float
    solve_ms: float = 0.0
    rho: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status is SolverStatus.OPTIMAL


_ORDER = (Zero, NonNeg, SecondOrder, PSD, Exp)
_MERGED = (Zero, NonNeg, Exp)


@dataclass
class _Rows:
    tag: str
    block: Cone
    matrix: sparse.csr_matrix
    rhs: np.ndarray


class ProgramBuilder:
    """
    Collects named variables and tagged constraint blocks, then emits a
    ConeProgram with blocks in canonical order (zero, nonneg, each second
    order cone, each PSD block, exponential triples).
    """

    def __init__(self):
        self._variables: Dict[str, slice] = {}
        self._size = 0
        self._rows: List[_Rows] = []

    @property
    def num_variables(self) -> int:
        return self._size

    @property
    def variables(self) -> Dict[str, slice]:
        return dict(self._variables)

    def add_variable(self, name: str, size: int = 1) -> slice:
        if name in self._variables:
            raise ConeProgramError(f"variable '{name}' declared twice")
        if size < 1:
            raise ConeProgramError(f"variable '{name}' needs a positive size")
        var = slice(self._size, self._size + size)
        self._variables[name] = var
        self._size += size
        return var

    def constrain(self, tag: str, block: Cone, terms: Sequence[Tuple[slice, object]], rhs=0.0) -> None:
        """Add rows s = rhs − Σ matrix·x[var] with s ∈ block"""
        rows = block.dim
        pieces = []
        for var, matrix in terms:
            matrix = sparse.coo_matrix(np.atleast_2d(matrix) if not sparse.issparse(matrix) else matrix)
            width = var.stop - var.start
            if matrix.shape != (rows, width):
                raise ConeProgramError(
                    f"constraint '{tag}': term of shape {matrix.shape} for a {width}-wide variable in a {rows}-row block"
                )
            pieces.append((matrix.row, matrix.col + var.start, matrix.data))
        if pieces:
            r = np.concatenate([p[0] for p in pieces])
            col = np.concatenate([p[1] for p in pieces])
            data = np.concatenate([p[2] for p in pieces])
        else:
            r = col = np.zeros(0, dtype=int)
            data = np.zeros(0)
        # columns may still grow, so keep the width open until build()
        matrix = sparse.csr_matrix((data, (r, col)), shape=(rows, max(self._size, 1)))
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        rhs = np.broadcast_to(np.asarray(rhs, dtype=float), (rows,)).copy()
        self._rows.append(_Rows(tag=tag, block=block, matrix=matrix, rhs=rhs))

    def build(self, objective: Sequence[Tuple[slice, object]] = ()) -> Tuple[ConeProgram, Dict[str, List[slice]]]:
        n = self._size
        c = np.zeros(n)
        for var, coeffs in objective:
            c[var] += np.asarray(coeffs, dtype=float)

        ordered = sorted(self._rows, key=lambda rows: _ORDER.index(type(rows.block)))
        blocks: List[Cone] = []
        matrices = []
        rhs_parts = []
        row_map: Dict[str, List[slice]] = {}
        offset = 0

        for kind in _ORDER:
            group = [rows for rows in ordered if type(rows.block) is kind]
            merged_dim = 0
            for rows in group:
                matrix = rows.matrix
                matrix = sparse.csr_matrix((matrix.data, matrix.indices, matrix.indptr), shape=(matrix.shape[0], n))
                rhs = rows.rhs
                if kind in (Zero, NonNeg):
                    matrix, rhs = self._drop_empty_rows(rows.tag, kind, matrix, rhs)
                    if matrix.shape[0] == 0:
                        continue
                count = matrix.shape[0]
                matrices.append(matrix)
                rhs_parts.append(rhs)
                row_map.setdefault(rows.tag, []).append(slice(offset, offset + count))
                offset += count
                if kind in _MERGED:
                    merged_dim += count
                else:
                    blocks.append(rows.block)
            if kind in _MERGED and merged_dim:
                blocks.append(kind(merged_dim // 3) if kind is Exp else kind(merged_dim))

        if not matrices:
            raise ConeProgramError("program has no constraints")
        A = sparse.vstack(matrices, format="csc")
        b = np.concatenate(rhs_parts)
        program = ConeProgram(c=c, A=A, b=b, cones=ConeSpec(blocks))
        logger.debug(f"Built cone program n={n} m={b.shape[0]} nnz={A.nnz} blocks={len(blocks)}")
        return program, row_map

    @staticmethod
    def _drop_empty_rows(tag, kind, matrix, rhs):
        counts = np.diff(matrix.indptr)
        empty = counts == 0
        if not np.any(empty):
            return matrix, rhs
        consistent = np.abs(rhs[empty]) <= 1e-12 if kind is Zero else rhs[empty] >= 0.0
        if not np.all(consistent):
            raise ConeProgramError(f"constraint '{tag}' has a variable-free row that can never hold")
        keep = ~empty
        return matrix[keep], rhs[keep]


def _format_cones(cones: ConeSpec) -> str:
    parts = []
    for block in cones:
        if isinstance(block, PSD):
            parts.append(f"psd:{block.side}")
        elif isinstance(block, Exp):
            parts.append(f"exp:{block.count}")
        elif isinstance(block, SecondOrder):
            parts.append(f"soc:{block.size}")
        elif isinstance(block, NonNeg):
            parts.append(f"nonneg:{block.size}")
        else:
            parts.append(f"zero:{block.size}")
    return " ".join(parts)


_CONE_NAMES = {"zero": Zero, "nonneg": NonNeg, "soc": SecondOrder, "psd": PSD, "exp": Exp}


def dump_program(program: ConeProgram, path: Union[str, Path, None] = None) -> str:
    """
    Sparse triplet text format:

        dims <m> <n> <nnz>
        cones zero:<d> nonneg:<d> soc:<d> psd:<side> exp:<count> ...
        c <j> <value>        (nonzeros only)
        b <i> <value>        (nonzeros only)
        A <i> <j> <value>
    """
    A = program.A.tocoo()
    lines = [
        "# trisrsma cone program: minimize c'x s.t. Ax + s = b, s in K",
        f"dims {program.num_constraints} {program.num_variables} {A.nnz}",
        f"cones {_format_cones(program.cones)}",
    ]
    lines += [f"c {j} {program.c[j]:.17g}" for j in np.flatnonzero(program.c)]
    lines += [f"b {i} {program.b[i]:.17g}" for i in np.flatnonzero(program.b)]
    order = np.lexsort((A.col, A.row))
    lines += [f"A {A.row[k]} {A.col[k]} {A.data[k]:.17g}" for k in order]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.info(f"Wrote cone program to {path}")
    return text


def load_program(source: Union[str, Path]) -> ConeProgram:
    """Inverse of dump_program; accepts a path or the dump text itself"""
    text = source
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text(encoding="utf-8")

    dims: Optional[Tuple[int, int, int]] = None
    blocks: List[Cone] = []
    c_entries, b_entries, rows, cols, data = [], [], [], [], []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if fields[0] == "dims":
                dims = (int(fields[1]), int(fields[2]), int(fields[3]))
            elif fields[0] == "cones":
                for item in fields[1:]:
                    name, size = item.split(":")
                    blocks.append(_CONE_NAMES[name](int(size)))
            elif fields[0] == "c":
                c_entries.append((int(fields[1]), float(fields[2])))
            elif fields[0] == "b":
                b_entries.append((int(fields[1]), float(fields[2])))
            elif fields[0] == "A":
                rows.append(int(fields[1]))
                cols.append(int(fields[2]))
                data.append(float(fields[3]))
            else:
                raise ConeProgramError(f"unknown record '{fields[0]}' on line {number}")
        except (IndexError, KeyError, ValueError) as e:
            raise ConeProgramError(f"malformed cone dump on line {number}: {e}") from None

    if dims is None:
        raise ConeProgramError("cone dump has no dims record")
    m, n, _ = dims
    c = np.zeros(n)
    b = np.zeros(m)
    for j, value in c_entries:
        c[j] = value
    for i, value in b_entries:
        b[i] = value
    A = sparse.csc_matrix((data, (rows, cols)), shape=(m, n))
    return ConeProgram(c=c, A=A, b=b, cones=ConeSpec(blocks))
