"""Classical coherent-state benchmarks: homodyne with coherent integration, Marcum."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfun
from .asymmetric import RocPoint
from .errors import DomainError, OutOfRange


@dataclass(frozen=True)
class ClassicalRocParams:
    m: float
    kappa: float
    n_s: float
    n_b: float

    def __post_init__(self):
        if self.m < 1:
            raise OutOfRange("m must be >= 1")
        if not 0.0 <= self.kappa < 1.0:
            raise OutOfRange("kappa must lie in [0, 1)")
        if self.n_s < 0 or self.n_b < 0:
            raise OutOfRange("photon numbers must be non-negative")

    @property
    def signal(self) -> float:
        return self.m * math.sqrt(2.0 * self.kappa * self.n_s)

    @property
    def noise_scale(self) -> float:
        return math.sqrt(self.m * (2.0 * self.n_b + 1.0))


def _check_pfa(p_fa: float) -> None:
    if not 0.0 < p_fa < 1.0:
        raise DomainError(f"false-alarm probability must lie in (0, 1), got {p_fa}")


def homodyne_threshold(p_fa: float, params: ClassicalRocParams) -> float:
    _check_pfa(p_fa)
    return params.noise_scale * specfun.erfc_inv(2.0 * p_fa)


def homodyne_pfa(threshold: float, params: ClassicalRocParams) -> float:
    return 0.5 * math.erfc(threshold / params.noise_scale)


def homodyne_roc(p_fa: float, params: ClassicalRocParams) -> RocPoint:
    """Mis-detection of a threshold test on the summed homodyne outcomes."""
    x = homodyne_threshold(p_fa, params)
    arg = (params.signal - x) / params.noise_scale
    log_p_md = specfun.log_erfc(arg) - math.log(2.0)
    return RocPoint(p_fa, min(log_p_md, 0.0), "homodyne")


def marcum_roc(p_fa: float, m_gamma: float) -> RocPoint:
    """Marcum curve for a single pulse carrying the total SNR ``m_gamma``.

    This over-estimates non-coherent integration of M pulses, so it is a
    lower bound to the Marcum classical performance.
    """
    _check_pfa(p_fa)
    if m_gamma < 0:
        raise DomainError("total SNR must be non-negative")
    x = math.sqrt(2.0 * m_gamma)
    y = math.sqrt(-2.0 * math.log(p_fa))
    p_md = specfun.one_minus_marcum_q1(x, y)
    log_p_md = math.log(p_md) if p_md > 0.0 else -math.inf
    return RocPoint(p_fa, min(log_p_md, 0.0), "marcum_lower_bound")
