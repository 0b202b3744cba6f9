"""
Closed convex cones and their Euclidean projections.

PSD blocks are stored as svec: the lower triangle in np.tril_indices order with
off-diagonal entries scaled by √2, so the vectorized cone is self-dual under the
ordinary inner product. Exponential blocks hold ``count`` consecutive triples
(x, y, z) with y·exp(x/y) <= z.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np

from ...core.errors import ConeProgramError

SQRT2 = math.sqrt(2.0)

# |rho| beyond this counts as the face y = 0; exp(2 rho) stays finite
_RHO_LIMIT = 300.0
_BRACKET_DOUBLINGS = 10
_NEWTON_STEPS = 60
_ROOT_TOL = 1e-14


def svec_dim(side: int) -> int:
    return side * (side + 1) // 2


@lru_cache(maxsize=64)
def _svec_layout(side: int):
    rows, cols = np.tril_indices(side)
    weights = np.where(rows == cols, 1.0, SQRT2)
    return rows, cols, weights


def svec(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    rows, cols, weights = _svec_layout(matrix.shape[0])
    return matrix[rows, cols] * weights


def smat(vector: np.ndarray) -> np.ndarray:
    vector = np.asarray(vector, dtype=float)
    side = int(round((math.sqrt(8 * vector.shape[0] + 1) - 1) / 2))
    if svec_dim(side) != vector.shape[0]:
        raise ConeProgramError(f"length {vector.shape[0]} is not a triangular number")
    rows, cols, weights = _svec_layout(side)
    out = np.zeros((side, side))
    out[rows, cols] = vector / weights
    out[cols, rows] = vector / weights
    return out


@dataclass(frozen=True)
class Zero:
    size: int

    uniform_scaling = False

    @property
    def dim(self) -> int:
        return self.size

    def project(self, v: np.ndarray) -> np.ndarray:
        return np.zeros_like(v)

    def contains(self, v: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(v) <= tol))


@dataclass(frozen=True)
class NonNeg:
    size: int

    uniform_scaling = False

    @property
    def dim(self) -> int:
        return self.size

    def project(self, v: np.ndarray) -> np.ndarray:
        return np.maximum(v, 0.0)

    def contains(self, v: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.all(v >= -tol))


@dataclass(frozen=True)
class SecondOrder:
    """{(t, u) : ‖u‖ <= t}"""

    size: int

    uniform_scaling = True

    @property
    def dim(self) -> int:
        return self.size

    def project(self, v: np.ndarray) -> np.ndarray:
        t, u = v[0], v[1:]
        norm = float(np.linalg.norm(u))
        if norm <= t:
            return v.copy()
        if norm <= -t:
            return np.zeros_like(v)
        scale = (t + norm) / 2.0
        out = np.empty_like(v)
        out[0] = scale
        out[1:] = scale * u / norm
        return out

    def contains(self, v: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.linalg.norm(v[1:]) <= v[0] + tol)


@dataclass(frozen=True)
class PSD:
    """Symmetric positive semidefinite matrices of the given side, in svec form"""

    side: int

    uniform_scaling = True

    @property
    def dim(self) -> int:
        return svec_dim(self.side)

    def project(self, v: np.ndarray) -> np.ndarray:
        w, U = np.linalg.eigh(smat(v))
        return svec((U * np.maximum(w, 0.0)) @ U.T)

    def contains(self, v: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.linalg.eigvalsh(smat(v)).min() >= -tol)


def _exp_members(x, y, z):
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        interior = (y > 0) & (y * np.exp(x / np.where(y > 0, y, 1.0)) <= z)
    return interior | ((y == 0) & (x <= 0) & (z >= 0))


def _polar_members(x, y, z):
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        interior = (x > 0) & (x * np.exp(y / np.where(x > 0, x, 1.0)) <= -math.e * z)
    return interior | ((x == 0) & (y <= 0) & (z <= 0))


def _boundary_residual(x, y, z, rho):
    """
    Root function of the exponential projection and its derivative in rho.

    With P = (rho - 1) x + y, D = x - rho y and q = rho^2 - rho + 1 the point
    splits as (P/q)(rho, 1, e^rho) + (D/q) e^-rho (e^rho, (1 - rho) e^rho, -1);
    the z coordinate matches when (e^rho P - e^-rho D)/q = z.
    """
    ep, em = np.exp(rho), np.exp(-rho)
    p = (rho - 1.0) * x + y
    d = x - rho * y
    q = rho * rho - rho + 1.0
    num = ep * p - em * d
    value = num / q - z
    slope = ((ep * (p + x) + em * (d + y)) * q - num * (2.0 * rho - 1.0)) / (q * q)
    return value, slope


def _scaling_interval(x, y):
    """rho range where both P and D are positive; empty rows are flagged"""
    with np.errstate(divide="ignore", invalid="ignore"):
        x_safe = np.where(x != 0, x, 1.0)
        y_safe = np.where(y != 0, y, 1.0)
        lo = np.maximum(np.where(x > 0, 1.0 - y / x_safe, -np.inf), np.where(y < 0, x / y_safe, -np.inf))
        hi = np.minimum(np.where(x < 0, 1.0 - y / x_safe, np.inf), np.where(y > 0, x / y_safe, np.inf))
    valid = ((x > 0) | (y > 0)) & (lo < hi)
    return lo, hi, valid


def _close_interval(x, y, z, lo, hi):
    """Replace an open end by a finite point on the right side of the root"""
    lo_open = ~np.isfinite(lo)
    hi_open = ~np.isfinite(hi)
    lo = np.clip(lo, -_RHO_LIMIT, _RHO_LIMIT)
    hi = np.clip(hi, -_RHO_LIMIT, _RHO_LIMIT)
    width = np.ones_like(lo)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(_BRACKET_DOUBLINGS):
            if not (np.any(lo_open) or np.any(hi_open)):
                break
            down = np.maximum(hi - width, -_RHO_LIMIT)
            up = np.minimum(lo + width, _RHO_LIMIT)
            trial = np.where(lo_open, down, np.where(hi_open, up, lo))
            value, _ = _boundary_residual(x, y, z, trial)
            # the residual increases with rho inside the interval
            below = lo_open & (value > 0) & (trial > -_RHO_LIMIT)
            above = hi_open & (value < 0) & (trial < _RHO_LIMIT)
            hi = np.where(below, trial, hi)
            lo = np.where(above, trial, lo)
            lo = np.where(lo_open & ~below, trial, lo)
            hi = np.where(hi_open & ~above, trial, hi)
            lo_open &= below
            hi_open &= above
            width *= 2.0
    return lo, hi


def _newton_root(x, y, z, lo, hi):
    """Safeguarded Newton on the root function; bisects whenever a step leaves the bracket"""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value_lo, _ = _boundary_residual(x, y, z, lo)
        value_hi, _ = _boundary_residual(x, y, z, hi)
        bracketed = (value_lo <= 0) & (value_hi >= 0)

        # closed-form start: the ray through (y, z) ignoring x
        start = np.log(np.where((y > 0) & (z > 0), z, 1.0) / np.where((y > 0) & (z > 0), y, 1.0))
        rho = np.where((y > 0) & (z > 0) & (start > lo) & (start < hi), start, 0.5 * (lo + hi))
        for _ in range(_NEWTON_STEPS):
            value, slope = _boundary_residual(x, y, z, rho)
            lo = np.where(value < 0, rho, lo)
            hi = np.where(value > 0, rho, hi)
            step = rho - value / slope
            inside = np.isfinite(step) & (step > lo) & (step < hi)
            following = np.where(inside, step, 0.5 * (lo + hi))
            scale = _ROOT_TOL * (1.0 + np.abs(rho))
            settled = (value == 0) | (np.abs(following - rho) <= scale) | (hi - lo <= scale)
            rho = np.where(value == 0, rho, following)
            if np.all(settled):
                break
    return rho, bracketed


def _ray_point(x, y, z, rho):
    """Projection of (x, y, z) onto the boundary ray (rho, 1, e^rho)"""
    e = np.exp(rho)
    ray = np.column_stack((rho, np.ones_like(rho), e))
    inner = np.maximum(x * rho + y + z * e, 0.0)
    return ray * (inner / (rho * rho + 1.0 + e * e))[:, None]


def _project_exp_triples(triples: np.ndarray) -> np.ndarray:
    x, y, z = triples[:, 0], triples[:, 1], triples[:, 2]
    out = np.empty_like(triples)

    inside = _exp_members(x, y, z)
    polar = _polar_members(x, y, z) & ~inside
    corner = (x < 0) & (y < 0) & ~inside & ~polar
    general = ~(inside | polar | corner)

    out[inside] = triples[inside]
    out[polar] = 0.0
    out[corner, 0] = x[corner]
    out[corner, 1] = 0.0
    out[corner, 2] = np.maximum(z[corner], 0.0)

    if np.any(general):
        gx, gy, gz = x[general], y[general], z[general]
        point = triples[general]
        face = np.column_stack((np.minimum(gx, 0.0), np.zeros_like(gx), np.maximum(gz, 0.0)))
        ray = np.zeros_like(point)

        lo, hi, valid = _scaling_interval(gx, gy)
        if np.any(valid):
            vx, vy, vz = gx[valid], gy[valid], gz[valid]
            lo, hi = _close_interval(vx, vy, vz, lo[valid], hi[valid])
            rho, bracketed = _newton_root(vx, vy, vz, lo, hi)
            rho = np.where(bracketed, rho, 0.0)
            ray[valid] = np.where(bracketed[:, None], _ray_point(vx, vy, vz, rho), 0.0)

        candidates = np.stack((ray, face, np.zeros_like(face)))
        distances = np.linalg.norm(candidates - point[None, :, :], axis=2)
        choice = np.argmin(distances, axis=0)
        out[general] = candidates[choice, np.arange(point.shape[0])]
    return out


@dataclass(frozen=True)
class Exp:
    """``count`` exponential-cone triples"""

    count: int

    uniform_scaling = True

    @property
    def dim(self) -> int:
        return 3 * self.count

    def project(self, v: np.ndarray) -> np.ndarray:
        return _project_exp_triples(v.reshape(self.count, 3)).ravel()

    def contains(self, v: np.ndarray, tol: float = 0.0) -> bool:
        triples = v.reshape(self.count, 3)
        if np.all(_exp_members(triples[:, 0], triples[:, 1], triples[:, 2])):
            return True
        return bool(np.linalg.norm(self.project(v) - v) <= tol)


Cone = Union[Zero, NonNeg, SecondOrder, PSD, Exp]


def _check(block: Cone, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != block.dim:
        raise ConeProgramError(f"{type(block).__name__} of dimension {block.dim} got a vector of shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ConeProgramError(f"non-finite input to {type(block).__name__} projection")
    return v


def project(block: Cone, v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``block``"""
    return block.project(_check(block, v))


def project_dual(block: Cone, v: np.ndarray) -> np.ndarray:
    """Projection onto the dual cone, via Moreau: Π_K*(v) = v + Π_K(−v)"""
    v = _check(block, v)
    return v + block.project(-v)


def project_polar(block: Cone, v: np.ndarray) -> np.ndarray:
    v = _check(block, v)
    return v - block.project(v)


class ConeSpec:
    """Ordered product of cone blocks"""

    def __init__(self, blocks: Sequence[Cone]):
        self.blocks: Tuple[Cone, ...] = tuple(blocks)
        for block in self.blocks:
            if block.dim <= 0:
                raise ConeProgramError(f"{block!r} has non-positive dimension")
        self.offsets = np.concatenate(([0], np.cumsum([block.dim for block in self.blocks]))).astype(int)

    @property
    def dim(self) -> int:
        return int(self.offsets[-1])

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConeSpec) and self.blocks == other.blocks

    def __repr__(self) -> str:
        return f"ConeSpec({list(self.blocks)!r})"

    def slices(self):
        for block, start, stop in zip(self.blocks, self.offsets[:-1], self.offsets[1:]):
            yield block, slice(int(start), int(stop))

    def project(self, v: np.ndarray) -> np.ndarray:
        out = np.empty_like(v)
        for block, rows in self.slices():
            out[rows] = block.project(v[rows])
        return out

    def project_dual(self, v: np.ndarray) -> np.ndarray:
        return v + self.project(-v)

    def zero_rows(self) -> np.ndarray:
        mask = np.zeros(self.dim, dtype=bool)
        for block, rows in self.slices():
            if isinstance(block, Zero):
                mask[rows] = True
        return mask

    def scaling_groups(self) -> np.ndarray:
        """Row -> group id; rows sharing an id must share one scaling factor"""
        groups = np.empty(self.dim, dtype=int)
        next_id = 0
        for block, rows in self.slices():
            length = rows.stop - rows.start
            if not block.uniform_scaling:
                groups[rows] = np.arange(next_id, next_id + length)
                next_id += length
            elif isinstance(block, Exp):
                groups[rows] = next_id + np.arange(length) // 3
                next_id += block.count
            else:
                groups[rows] = next_id
                next_id += 1
        return groups
