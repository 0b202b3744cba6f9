import dataclasses
import logging
from enum import Enum
from typing import Iterable, List, Optional

import numpy as np

from ...core.errors import InfeasibleError, ModelingError, RecoveryError, SchemeError, SolverBreakdown
from ..channel.models import ChannelSet, single_element_equivalent
from ..modeling.builder import AccessScheme
from ..modeling.recovery import evaluate_precoders
from ..optimizer.config import OptimizerSettings
from ..optimizer.manager import OptimizationManager, dinkelbach_update
from ..optimizer.solution import RsmaSolution
from ..rates.evaluator import Precoders
from ..scenario.config import SystemConfig
from ..scenario.geometry import Substreams, substreams
from .config import BenchmarkConfig

logger = logging.getLogger(__name__)

# failures that mean "no feasible point" rather than a broken setup
_SCHEME_FAILURES = (InfeasibleError, RecoveryError, SolverBreakdown, ModelingError)


class SchemeId(Enum):
    PROPOSED = "proposed"
    EE_MAX_ONLY = "ee_max_only"
    RANDOM_PRECODING = "random"
    FIXED_PRECODING = "fixed"
    SDMA = "sdma"
    NOMA = "noma"
    NO_RIS = "no_ris"

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            known = ", ".join(s.value for s in cls)
            raise SchemeError(f"unknown scheme '{name}' (known: {known})") from None


def parse_schemes(text) -> List[SchemeId]:
    """Comma-separated list (or iterable) of scheme names, order kept, duplicates dropped"""
    names = text.split(",") if isinstance(text, str) else list(text)
    schemes = []
    for name in names:
        if isinstance(name, SchemeId):
            scheme = name
        elif name.strip():
            scheme = SchemeId.parse(name)
        else:
            continue
        if scheme not in schemes:
            schemes.append(scheme)
    if not schemes:
        raise SchemeError("scheme list is empty")
    return schemes


class BenchmarkManager:
    """Runs the proposed design and its comparison schemes on shared channels"""

    def __init__(self, cfg: SystemConfig, settings: Optional[OptimizerSettings] = None):
        self.cfg = cfg
        self.settings = settings or OptimizerSettings()
        self.config = BenchmarkConfig

    def scheme_channels(self, scheme: SchemeId, channels: ChannelSet) -> ChannelSet:
        """Channels a scheme actually transmits over"""
        if scheme is SchemeId.NO_RIS:
            return single_element_equivalent(channels, self.cfg)
        return channels

    def scheme_config(self, scheme: SchemeId) -> SystemConfig:
        if scheme is SchemeId.NO_RIS:
            return self.cfg.with_updates(m_rows=1, m_cols=1)
        return self.cfg

    def scheme_access(self, scheme: SchemeId) -> AccessScheme:
        if scheme is SchemeId.SDMA:
            return AccessScheme.SDMA
        if scheme is SchemeId.NOMA:
            return AccessScheme.NOMA
        return self.settings.access

    def run_scheme(self, scheme: SchemeId, channels: ChannelSet,
                   streams: Optional[Substreams] = None) -> RsmaSolution:
        """Verified solution of one scheme; infeasible schemes come back flagged at zero rate"""
        if not isinstance(scheme, SchemeId):
            scheme = SchemeId.parse(str(scheme))
        streams = streams if streams is not None else substreams(self.cfg.rng_seed)
        digest = channels.digest()
        link = self.scheme_channels(scheme, channels)
        cfg = self.scheme_config(scheme)

        try:
            solution = self._dispatch(scheme, link, cfg, streams)
        except _SCHEME_FAILURES as e:
            logger.warning(f"{scheme.value}: no feasible point ({e})")
            return RsmaSolution.infeasible(scheme.value, link, cfg, str(e), digest=digest)

        if solution.channel_digest != digest:
            solution = dataclasses.replace(solution, channel_digest=digest)
        return solution

    def run_all(self, schemes: Iterable[SchemeId], channels: ChannelSet,
                streams_for=None) -> List[RsmaSolution]:
        """Every scheme on the same channels; streams_for(scheme) supplies fresh streams per scheme"""
        results = []
        for scheme in schemes:
            streams = streams_for(scheme) if streams_for is not None else None
            results.append(self.run_scheme(scheme, channels, streams))
        return results

    def _dispatch(self, scheme: SchemeId, channels: ChannelSet, cfg: SystemConfig,
                  streams: Substreams) -> RsmaSolution:
        rng = streams.recovery
        if scheme in (SchemeId.PROPOSED, SchemeId.NO_RIS):
            return OptimizationManager(cfg, self.settings).optimize(channels, rng=rng, scheme=scheme.value)[0]
        if scheme is SchemeId.EE_MAX_ONLY:
            unfloored = cfg.with_updates(eta0_fraction=0.0)
            return OptimizationManager(unfloored, self.settings).optimize(channels, rng=rng, scheme=scheme.value)[0]
        if scheme in (SchemeId.SDMA, SchemeId.NOMA):
            settings = self.settings.with_updates(access=self.scheme_access(scheme))
            return OptimizationManager(cfg, settings).optimize(channels, rng=rng, scheme=scheme.value)[0]
        if scheme is SchemeId.RANDOM_PRECODING:
            return self.power_scan(scheme.value, channels, random_directions(channels, streams.precoding))
        if scheme is SchemeId.FIXED_PRECODING:
            base = OptimizationManager(cfg, self.settings).initial_precoders(channels)
            return self.power_scan(scheme.value, channels, base)
        raise SchemeError(f"scheme '{scheme.value}' has no runner")

    def power_grid(self) -> np.ndarray:
        budget = self.cfg.transmit_budget_watts
        return np.geomspace(self.config.POWER_GRID_FLOOR, 1.0, self.config.POWER_GRID_POINTS) * budget

    def power_scan(self, name: str, channels: ChannelSet, directions: Precoders) -> RsmaSolution:
        """
        Fixed beam directions, only the total power scaled. The SE floor is
        eta0_fraction of the best SE the scan reaches; among feasible levels
        that meet it, the most energy-efficient one wins.
        """
        power = directions.transmit_power
        if power <= 0:
            raise InfeasibleError(f"{name}: precoder directions carry no power", family="power")
        unit = directions.scaled(1.0 / np.sqrt(power))

        feasible = []
        for level in self.power_grid():
            precoders = unit.scaled(np.sqrt(level))
            split, report = evaluate_precoders(channels, precoders, self.cfg)
            if report.feasible:
                feasible.append((precoders, split, report))
        if not feasible:
            raise InfeasibleError(f"{name}: no power level satisfies every constraint", family="qos_or_interference")

        se_max = max(report.se for _, _, report in feasible)
        eta0 = self.cfg.eta0_fraction * se_max
        candidates = [item for item in feasible if item[2].meets_se_floor(eta0)]
        precoders, split, report = max(candidates, key=lambda item: item[2].ee)
        logger.info(f"{name}: SE {report.se:.4f} bps/Hz, EE {report.ee:.4g} bps/W at P {precoders.transmit_power:.4g} W")
        return RsmaSolution(
            scheme=name,
            precoders=precoders,
            c_split=split,
            lam=dinkelbach_update(report),
            report=report,
            eta0=eta0,
            eta_se_max=se_max,
            rank_ratio=1.0,
            converged=True,
            feasible=True,
            iterations=len(feasible),
            channel_digest=channels.digest(),
        )


def random_directions(channels: ChannelSet, rng: np.random.Generator) -> Precoders:
    """i.i.d. complex Gaussian columns, each normalized"""
    m, k = channels.num_elements, channels.num_cus
    P = (rng.standard_normal((m, k + 1)) + 1j * rng.standard_normal((m, k + 1))) / np.sqrt(2.0)
    P /= np.linalg.norm(P, axis=0, keepdims=True)
    return Precoders.from_matrix(P)


def run_scheme(scheme, channels: ChannelSet, cfg: SystemConfig, settings: Optional[OptimizerSettings] = None,
               streams: Optional[Substreams] = None) -> RsmaSolution:
    return BenchmarkManager(cfg, settings).run_scheme(scheme, channels, streams)
