from dataclasses import dataclass

from ...core.errors import TmaRangeError


@dataclass(frozen=True)
class TmaParams:
    """Code element time T_p (seconds) and maximum amplitude A_max"""

    t_p: float
    a_max: float

    def __post_init__(self):
        if not self.t_p > 0:
            raise TmaRangeError(f"code element time must be positive, got {self.t_p!r}")
        if not self.a_max > 0:
            raise TmaRangeError(f"maximum amplitude must be positive, got {self.a_max!r}")


@dataclass(frozen=True)
class ControlTiming:
    """0-state start time t_on in [0, t_p) and 0-state duration tau in [0, t_p]"""

    t_on: float
    tau: float
