class TrisError(Exception):
    """Base error class"""
    pass


class ConfigError(TrisError):
    """Scenario configuration errors"""
    pass


class ConfigParseError(ConfigError):
    """Malformed configuration document"""

    def __init__(self, message: str, key: str = None, line: int = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ConfigValidationError(ConfigError):
    """Configuration values outside their valid range"""
    pass


class ChannelError(TrisError):
    """Channel synthesis and channel dump errors"""
    pass


class TmaRangeError(TrisError):
    """Amplitude outside the time-modulated array range"""

    def __init__(self, message: str, element: int = None):
        self.element = element
        super().__init__(message if element is None else f"{message} (element {element})")


class RatesError(TrisError):
    """Rate evaluation errors"""
    pass


class ConeProgramError(TrisError):
    """Malformed cone program or cone input"""
    pass


class SolverBreakdown(TrisError):
    """Non-finite iterate inside the conic solver"""

    def __init__(self, message: str, iteration: int):
        self.iteration = iteration
        super().__init__(f"{message} at iteration {iteration}")


class ModelingError(TrisError):
    """Subproblem construction errors"""
    pass


class InfeasibleError(TrisError):
    """Problem infeasible for a named constraint family"""

    def __init__(self, message: str, family: str = "unknown"):
        self.family = family
        super().__init__(f"{message} [{family}]")


class RecoveryError(TrisError):
    """No feasible rank-one precoder could be recovered"""

    def __init__(self, message: str, best_candidate=None):
        self.best_candidate = best_candidate
        super().__init__(message)


class SchemeError(TrisError):
    """Unknown or misconfigured benchmark scheme"""
    pass


class SweepError(TrisError):
    """Experiment sweep errors"""
    pass
