"""
Operator-splitting solver for standard-form cone programs.

Each iteration solves one quasi-definite linear system (factored once and reused
until rho changes) and projects onto the cone product. Infeasibility is
detected from the successive differences of the iterates.
"""

import logging
from typing import Optional, Union

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ...core.errors import ConeProgramError, SolverBreakdown
from ...core.timing import Stopwatch
from .config import (
    INFEASIBILITY_WARMUP,
    RHO_MAX,
    RHO_MIN,
    SCALING_MAX,
    SCALING_MIN,
    SolverSettings,
)
from .program import ConeProgram, ConeSolution, SolverStatus

logger = logging.getLogger(__name__)


def _inf_norm(v: np.ndarray) -> float:
    return float(np.max(np.abs(v))) if v.size else 0.0


class ConeSolver:
    """Single-use solver bound to one program"""

    def __init__(self, program: ConeProgram, settings: Optional[SolverSettings] = None):
        self.program = program
        self.settings = settings or SolverSettings()
        self.m, self.n = program.A.shape

        self._equilibrate()
        self._zero_rows = program.cones.zero_rows()
        self.rho = self.settings.rho
        self._lu = None
        self.factorizations = 0

    def _equilibrate(self):
        program = self.program
        D = np.ones(self.m)
        E = np.ones(self.n)
        if self.settings.scaling:
            groups = program.cones.scaling_groups()
            num_groups = int(groups.max()) + 1 if groups.size else 0
            A_abs = abs(program.A).tocsc()
            for _ in range(self.settings.ruiz_iterations):
                scaled = sparse.diags(D) @ A_abs @ sparse.diags(E)
                col_norm = np.asarray(scaled.max(axis=0).todense()).ravel()
                row_norm = np.asarray(scaled.max(axis=1).todense()).ravel()
                group_norm = np.zeros(num_groups)
                np.maximum.at(group_norm, groups, row_norm)
                row_norm = group_norm[groups]

                d = np.where(row_norm > 0, 1.0 / np.sqrt(np.where(row_norm > 0, row_norm, 1.0)), 1.0)
                e = np.where(col_norm > 0, 1.0 / np.sqrt(np.where(col_norm > 0, col_norm, 1.0)), 1.0)
                D = np.clip(D * d, SCALING_MIN, SCALING_MAX)
                E = np.clip(E * e, SCALING_MIN, SCALING_MAX)

        self.D = D
        self.E = E
        self.A_hat = (sparse.diags(D) @ program.A @ sparse.diags(E)).tocsc()
        self.b_hat = D * program.b
        c_hat = E * program.c
        c_norm = _inf_norm(c_hat)
        self.c_scale = float(np.clip(1.0 / c_norm, SCALING_MIN, SCALING_MAX)) if self.settings.scaling and c_norm > 0 else 1.0
        self.c_hat = self.c_scale * c_hat

    def _rho_vector(self) -> np.ndarray:
        rho = np.full(self.m, self.rho)
        rho[self._zero_rows] *= self.settings.rho_eq_scale
        return rho

    def _factorize(self):
        sigma = self.settings.sigma
        self._rho_vec = self._rho_vector()
        kkt = sparse.bmat(
            [
                [sigma * sparse.identity(self.n, format="csc"), self.A_hat.T],
                [self.A_hat, sparse.diags(-1.0 / self._rho_vec)],
            ],
            format="csc",
        )
        self._lu = splu(kkt)
        self.factorizations += 1

    def _unscaled(self, x_hat, s_hat, y_hat):
        """Original-space iterates; the internal dual lives in the polar cone"""
        return self.E * x_hat, s_hat / self.D, -self.D * y_hat / self.c_scale

    def _residuals(self, x, s, y):
        A, b, c = self.program.A, self.program.b, self.program.c
        Ax = A @ x
        Aty = A.T @ y
        primal = _inf_norm(Ax + s - b) / (1.0 + max(_inf_norm(Ax), _inf_norm(s), _inf_norm(b)))
        dual = _inf_norm(Aty + c) / (1.0 + max(_inf_norm(Aty), _inf_norm(c)))
        cx, by = float(c @ x), float(b @ y)
        gap = abs(cx + by) / (1.0 + abs(cx) + abs(by))
        return primal, dual, gap

    def _primal_certificate(self, dy_hat):
        """A dual ray y ∈ K*, Aᵀy = 0, bᵀy < 0 proves Ax + s = b, s ∈ K empty"""
        cert = -dy_hat
        norm = _inf_norm(cert)
        if norm <= 0:
            return None
        cert = cert / norm
        eps = self.settings.infeasibility_tol
        cones = self.program.cones
        if (_inf_norm(self.A_hat.T @ cert) <= eps and float(self.b_hat @ cert) <= -eps
                and _inf_norm(cert - cones.project_dual(cert)) <= eps):
            return cert
        return None

    def _dual_certificate(self, dx_hat):
        """A ray x with cᵀx < 0 and −Ax ∈ K proves the objective unbounded"""
        norm = _inf_norm(dx_hat)
        if norm <= 0:
            return None
        cert = dx_hat / norm
        eps = self.settings.infeasibility_tol
        image = -(self.A_hat @ cert)
        if float(self.c_hat @ cert) <= -eps and _inf_norm(image - self.program.cones.project(image)) <= eps:
            return cert
        return None

    def _adapt_rho(self, x, s, y) -> bool:
        Ax = self.A_hat @ x
        Aty = self.A_hat.T @ y
        primal = _inf_norm(Ax + s - self.b_hat) / max(_inf_norm(Ax), _inf_norm(s), _inf_norm(self.b_hat), 1e-10)
        dual = _inf_norm(Aty - self.c_hat) / max(_inf_norm(Aty), _inf_norm(self.c_hat), 1e-10)
        proposal = float(np.clip(self.rho * np.sqrt(primal / max(dual, 1e-10)), RHO_MIN, RHO_MAX))
        threshold = self.settings.adapt_threshold
        if proposal > threshold * self.rho or proposal < self.rho / threshold:
            logger.debug(f"rho {self.rho:.3e} -> {proposal:.3e}")
            self.rho = proposal
            return True
        return False

    def _initial_point(self, warm_start):
        """Scaled (x, s, y); a previous solution restores all three and its rho"""
        cones = self.program.cones
        x = np.zeros(self.n)
        y = np.zeros(self.m)
        if warm_start is None or not self.settings.warm_start:
            return x, cones.project(self.b_hat - self.A_hat @ x), y

        previous = warm_start if isinstance(warm_start, ConeSolution) else None
        x0 = np.asarray(previous.x if previous is not None else warm_start, dtype=float).ravel()
        if x0.shape[0] != self.n:
            raise ConeProgramError(f"warm start has {x0.shape[0]} entries for {self.n} variables")
        x = x0 / self.E
        if previous is None or previous.status in (SolverStatus.PRIMAL_INFEASIBLE, SolverStatus.DUAL_INFEASIBLE):
            return x, cones.project(self.b_hat - self.A_hat @ x), y
        if previous.s.shape[0] != self.m or previous.y.shape[0] != self.m:
            raise ConeProgramError(f"warm start has {previous.s.shape[0]} rows for {self.m} constraints")

        s = cones.project(self.D * previous.s)
        y = -previous.y * self.c_scale / self.D
        if previous.rho > 0 and self.settings.adaptive_rho:
            self.rho = float(np.clip(previous.rho, RHO_MIN, RHO_MAX))
            self._lu = None
        return x, s, y

    def solve(self, warm_start: Union[np.ndarray, ConeSolution, None] = None) -> ConeSolution:
        watch = Stopwatch()
        settings = self.settings
        cones = self.program.cones
        n = self.n

        x, s, y = self._initial_point(warm_start)
        if self._lu is None:
            self._factorize()

        alpha, sigma = settings.alpha, settings.sigma
        status = SolverStatus.ITERATION_LIMIT
        residuals = (np.inf, np.inf, np.inf)
        iteration = 0
        certificate = None

        for iteration in range(1, settings.max_iters + 1):
            rho = self._rho_vec
            rhs = np.concatenate((sigma * x - self.c_hat, self.b_hat - s + y / rho))
            x_tilde = self._lu.solve(rhs)[:n]
            s_tilde = self.b_hat - self.A_hat @ x_tilde

            x_next = alpha * x_tilde + (1.0 - alpha) * x
            s_relaxed = alpha * s_tilde + (1.0 - alpha) * s
            s_next = cones.project(s_relaxed + y / rho)
            y_next = y + rho * (s_relaxed - s_next)

            if not (np.all(np.isfinite(x_next)) and np.all(np.isfinite(y_next))):
                raise SolverBreakdown("non-finite iterate", iteration)

            dx, dy = x_next - x, y_next - y
            x, s, y = x_next, s_next, y_next

            last = iteration == settings.max_iters
            if iteration % settings.check_interval == 0 or last:
                residuals = self._residuals(*self._unscaled(x, s, y))
                if max(residuals) <= settings.tol:
                    status = SolverStatus.OPTIMAL
                    break
                if iteration >= INFEASIBILITY_WARMUP:
                    certificate = self._primal_certificate(dy)
                    if certificate is not None:
                        status = SolverStatus.PRIMAL_INFEASIBLE
                        break
                    certificate = self._dual_certificate(dx)
                    if certificate is not None:
                        status = SolverStatus.DUAL_INFEASIBLE
                        break

            if settings.adaptive_rho and iteration % settings.adapt_interval == 0 and not last:
                if self._adapt_rho(x, s, y):
                    self._factorize()

        x_out, s_out, y_out = self._unscaled(x, s, y)
        objective = float(self.program.c @ x_out)
        if status is SolverStatus.PRIMAL_INFEASIBLE:
            y_out = self.D * certificate
            y_out /= _inf_norm(y_out)
            objective = np.inf
        elif status is SolverStatus.DUAL_INFEASIBLE:
            x_out = self.E * certificate
            x_out /= _inf_norm(x_out)
            objective = -np.inf

        solution = ConeSolution(
            x=x_out,
            s=s_out,
            y=y_out,
            status=status,
            primal_residual=residuals[0],
            dual_residual=residuals[1],
            gap=residuals[2],
            iterations=iteration,
            objective=objective,
            solve_ms=watch.elapsed_ms,
            rho=self.rho,
        )
        logger.debug(
            f"Cone solve {status.value} after {iteration} iterations "
            f"(primal {residuals[0]:.2e}, dual {residuals[1]:.2e}, gap {residuals[2]:.2e})"
        )
        return solution


def solve(program: ConeProgram, settings: Optional[SolverSettings] = None,
          warm_start: Union[np.ndarray, ConeSolution, None] = None) -> ConeSolution:
    return ConeSolver(program, settings).solve(warm_start=warm_start)
