"""
Real encodings of Hermitian matrix variables.

A Hermitian M×M matrix Q is carried in the cone program as M² reals
``[diag, Re of strict lower, Im of strict lower]`` (strict lower triangle in
np.tril_indices(M, -1) order). Its PSD constraint is imposed on the real
symmetric embedding T(Q) = [[Re Q, −Im Q], [Im Q, Re Q]].
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Sequence

import numpy as np
from scipy import sparse

from ...core.errors import ModelingError
from ..conic.cones import SQRT2, svec_dim
from .config import HERMITIAN_TOL, ZERO_TRACE_WATTS


def packed_size(m: int) -> int:
    return m * m


@lru_cache(maxsize=64)
def _lower(m: int):
    return np.tril_indices(m, -1)


def pack_hermitian(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H)
    m = H.shape[0]
    rows, cols = _lower(m)
    lower = H[rows, cols]
    return np.concatenate((np.real(np.diag(H)), np.real(lower), np.imag(lower))).astype(float)


def unpack_hermitian(q: np.ndarray, m: int) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape[0] != packed_size(m):
        raise ModelingError(f"packed vector of length {q.shape[0]} does not describe a {m}×{m} matrix")
    rows, cols = _lower(m)
    count = rows.shape[0]
    H = np.diag(q[:m]).astype(complex)
    values = q[m:m + count] + 1j * q[m + count:]
    H[rows, cols] = values
    H[cols, rows] = np.conj(values)
    return H


def trace_coefficients(F: np.ndarray) -> np.ndarray:
    """Vector a with a·pack(Q) = Tr(F Q) for Hermitian F and Q"""
    F = np.asarray(F)
    rows, cols = _lower(F.shape[0])
    lower = F[rows, cols]
    return np.concatenate((np.real(np.diag(F)), 2.0 * np.real(lower), 2.0 * np.imag(lower))).astype(float)


def check_hermitian(H: np.ndarray, what: str = "matrix") -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ModelingError(f"{what} must be square, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 1.0)
    if np.max(np.abs(H - H.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise ModelingError(f"{what} is not Hermitian")
    return H


def hermitian_embed(H: np.ndarray) -> np.ndarray:
    """T(H) = [[Re H, −Im H], [Im H, Re H]]"""
    H = check_hermitian(H)
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def complex_from_embedding(T: np.ndarray) -> np.ndarray:
    """Nearest Hermitian matrix whose embedding is T (average of the two copies)"""
    m = T.shape[0] // 2
    re = (T[:m, :m] + T[m:, m:]) / 2.0
    im = (T[m:, :m] - T[:m, m:]) / 2.0
    H = re + 1j * im
    return (H + H.conj().T) / 2.0


def psd_clamp(H: np.ndarray) -> np.ndarray:
    w, U = np.linalg.eigh((H + H.conj().T) / 2.0)
    return (U * np.maximum(w, 0.0)) @ U.conj().T


@lru_cache(maxsize=16)
def embedding_operator(m: int) -> sparse.csc_matrix:
    """
    Sparse map from [pack(Q); g] to svec(T(Q)), g being the M imaginary
    diagonal entries of T's lower-left block. Those are identically zero for a
    Hermitian Q; the builder pins g to zero so that no svec row is empty.
    """
    side = 2 * m
    position = np.full((side, side), -1, dtype=int)
    tri_rows, tri_cols = np.tril_indices(side)
    position[tri_rows, tri_cols] = np.arange(tri_rows.shape[0])

    rows, cols, data = [], [], []

    def put(i, j, column, value):
        # (i, j) lies in the lower triangle of T
        weight = 1.0 if i == j else SQRT2
        rows.append(position[i, j])
        cols.append(column)
        data.append(weight * value)

    for d in range(m):
        put(d, d, d, 1.0)
        put(m + d, m + d, d, 1.0)

    lower_rows, lower_cols = _lower(m)
    count = lower_rows.shape[0]
    for k, (i, j) in enumerate(zip(lower_rows, lower_cols)):
        put(i, j, m + k, 1.0)
        put(m + i, m + j, m + k, 1.0)
        # Im Q_ij sits at (m+i, j); Im Q_ji = −Im Q_ij sits at (m+j, i)
        put(m + i, j, m + count + k, 1.0)
        put(m + j, i, m + count + k, -1.0)

    for d in range(m):
        put(m + d, d, m * m + d, 1.0)

    return sparse.csc_matrix((data, (rows, cols)), shape=(svec_dim(side), m * m + m))


def rank_one_ratio(Q: np.ndarray) -> float:
    """λ_max(Q)/Tr(Q); a switched-off block counts as rank one"""
    trace = float(np.real(np.trace(Q)))
    if trace <= ZERO_TRACE_WATTS:
        return 1.0
    top = float(np.linalg.eigvalsh((Q + Q.conj().T) / 2.0)[-1])
    return min(1.0, max(0.0, top / trace))


def principal_component(Q: np.ndarray):
    """(λ_max, u_max) of a Hermitian matrix"""
    w, U = np.linalg.eigh((Q + Q.conj().T) / 2.0)
    return float(w[-1]), U[:, -1]


@dataclass(frozen=True, eq=False)
class AffineForm:
    """constant + Σ_l coeffs[l]·pack(Q_l)"""

    constant: float
    coeffs: Dict[int, np.ndarray] = field(default_factory=dict)

    def evaluate(self, q_blocks: Sequence[np.ndarray]) -> float:
        value = self.constant
        for block, coeff in self.coeffs.items():
            value += float(coeff @ pack_hermitian(q_blocks[block]))
        return value

    def shifted(self, offset: float) -> "AffineForm":
        return AffineForm(constant=self.constant + offset, coeffs=self.coeffs)
