from dataclasses import dataclass

from ...core.errors import ConeProgramError


@dataclass(frozen=True)
class SolverSettings:
    """ADMM settings; defaults favour robustness on small programs"""

    tol: float = 1e-6
    max_iters: int = 50_000
    scaling: bool = True
    sigma: float = 1e-6
    rho: float = 0.1
    alpha: float = 1.6
    rho_eq_scale: float = 1e3
    adaptive_rho: bool = True
    adapt_interval: int = 25
    adapt_threshold: float = 5.0
    check_interval: int = 10
    infeasibility_tol: float = 1e-5
    ruiz_iterations: int = 15
    warm_start: bool = True

    def __post_init__(self):
        if not self.tol > 0 or not self.infeasibility_tol > 0:
            raise ConeProgramError("solver tolerances must be positive")
        if self.max_iters < 1 or self.check_interval < 1 or self.adapt_interval < 1:
            raise ConeProgramError("iteration counts must be positive")
        if not 0.0 < self.alpha < 2.0:
            raise ConeProgramError(f"relaxation alpha must lie in (0, 2), got {self.alpha}")
        if not self.rho > 0 or not self.sigma > 0:
            raise ConeProgramError("rho and sigma must be positive")


# scaling factors are clipped to this range at every Ruiz pass
SCALING_MIN = 1e-4
SCALING_MAX = 1e4

# adaptive rho stays inside this range
RHO_MIN = 1e-6
RHO_MAX = 1e6

# certificates are only tested once the iterates have settled a little
INFEASIBILITY_WARMUP = 100
