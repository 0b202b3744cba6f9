import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from ...core.errors import ConfigValidationError
from ..conic.config import SolverSettings
from ..modeling.builder import AccessScheme
from ..modeling.config import RANDOMIZATION_COUNT, RANK_ONE_TARGET
from ..scenario.config import SystemConfig

# the SROCR step is not halved below this
MIN_SROC_STEP = 1e-3


@dataclass(frozen=True)
class OptimizerSettings:
    eps0: Optional[float] = None
    max_outer_iters: int = 100
    sroc_step: float = 0.1
    sroc_ratio_target: float = RANK_ONE_TARGET
    randomization_count: int = RANDOMIZATION_COUNT
    inner_tol: float = 1e-6
    # an iteration-limited subproblem is accepted once every residual is below this
    inexact_tol: float = 1e-4
    solver_retries: int = 1
    floor_margin: float = 1e-5
    solver: SolverSettings = field(default_factory=SolverSettings)
    access: AccessScheme = AccessScheme.RSMA

    def __post_init__(self):
        if self.eps0 is not None and not self.eps0 > 0:
            raise ConfigValidationError(f"eps0 must be positive, got {self.eps0}")
        if self.max_outer_iters < 1 or self.randomization_count < 0:
            raise ConfigValidationError("iteration and candidate counts must be positive")
        if not self.sroc_step > 0 or not self.inner_tol > 0 or self.floor_margin < 0:
            raise ConfigValidationError("sroc_step and inner_tol must be positive, floor_margin nonnegative")
        if self.inexact_tol < self.inner_tol or self.solver_retries < 0:
            raise ConfigValidationError(
                f"inexact_tol ({self.inexact_tol}) must be at least inner_tol ({self.inner_tol}), retries nonnegative"
            )
        if not 0.0 < self.sroc_ratio_target <= 1.0:
            raise ConfigValidationError(f"sroc_ratio_target must lie in (0, 1], got {self.sroc_ratio_target}")

    def resolved_eps0(self, cfg: SystemConfig) -> float:
        return cfg.eps0 if self.eps0 is None else self.eps0

    @property
    def solver_settings(self) -> SolverSettings:
        return dataclasses.replace(self.solver, tol=self.inner_tol)

    def with_updates(self, **changes) -> "OptimizerSettings":
        return dataclasses.replace(self, **changes)
