"""Transmitter family, return-plus-idler hypothesis states and link budget."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import NotInHighLossRegime, OutOfRange, ValidationError
from .gaussian import GaussianState, direct_sum_qp, validate_state

# CODATA 2018 exact values
PLANCK_H = 6.62607015e-34
BOLTZMANN_K = 1.380649e-23


def c_quantum(n_s: float) -> float:
    """Maximal (TMSV) correlation sqrt(N_s (N_s + 1))."""
    return math.sqrt(n_s * (n_s + 1.0))


def c_separable(n_s: float) -> float:
    """Correlation at the just-separable border, C_d = N_s."""
    return float(n_s)


@dataclass(frozen=True)
class SourceSpec:
    kind: Literal["generic_gaussian", "coherent"]
    n_s: float
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in ("generic_gaussian", "coherent"):
            raise ValidationError(f"unknown source kind {self.kind!r}")
        if self.n_s < 0:
            raise OutOfRange("n_s must be >= 0")
        if self.kind == "generic_gaussian":
            if self.c < 0 or self.c > c_quantum(self.n_s) * (1 + 1e-12):
                raise OutOfRange(
                    f"correlation {self.c} outside [0, {c_quantum(self.n_s)}]")

    @classmethod
    def generic(cls, n_s: float, c: float) -> "SourceSpec":
        return cls("generic_gaussian", n_s, c)

    @classmethod
    def from_p(cls, n_s: float, p: float) -> "SourceSpec":
        return cls("generic_gaussian", n_s, correlation_of_p(n_s, p))

    @classmethod
    def coherent(cls, n_s: float) -> "SourceSpec":
        return cls("coherent", n_s)


@dataclass(frozen=True)
class ChannelSpec:
    kappa: float
    n_b: float

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise OutOfRange(f"kappa must lie in (0, 1), got {self.kappa}")
        if not self.n_b > 0.0:
            raise OutOfRange(f"n_b must be > 0, got {self.n_b}")


@dataclass(frozen=True)
class LinkBudget:
    freq_hz: float
    temp_k: float
    area_rx_m2: float
    range_m: float
    pulses: int = 1
    form_factor: float = 1.0
    priors: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        for name in ("freq_hz", "temp_k", "area_rx_m2", "range_m", "pulses"):
            if not getattr(self, name) > 0:
                raise OutOfRange(f"{name} must be positive")
        if self.form_factor != 1.0:
            raise ValidationError("only F = 1 (no propagation loss) is modelled")
        if self.priors != (0.5, 0.5):
            raise ValidationError("only equal priors are supported")

    @property
    def n_b(self) -> float:
        return planck_occupation(self.freq_hz, self.temp_k)

    @property
    def kappa(self) -> float:
        return kappa_of_range(self.area_rx_m2, self.range_m)

    def channel(self) -> ChannelSpec:
        return ChannelSpec(self.kappa, self.n_b)


@dataclass(frozen=True)
class HypothesisPair:
    """Return(-plus-idler) states under H0 (target absent) and H1."""

    rho0: GaussianState
    rho1: GaussianState
    label: str = "generic"

    def __post_init__(self):
        if self.rho0.n_modes != self.rho1.n_modes:
            raise ValidationError("hypothesis states have different mode counts")
        validate_state(self.rho0)
        validate_state(self.rho1)

    def swapped(self) -> "HypothesisPair":
        return HypothesisPair(self.rho1, self.rho0, self.label)


def correlation_of_p(n_s: float, p: float) -> float:
    """Interpolate C(p) = p C_d + (1 - p) C_q between separable and TMSV."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p must lie in [0, 1], got {p}")
    if n_s < 0:
        raise OutOfRange("n_s must be >= 0")
    return p * n_s + (1.0 - p) * c_quantum(n_s)


def generic_source_state(n_s: float, c: float) -> GaussianState:
    """Zero-mean signal-idler state with local noise S = N_s + 1/2."""
    if n_s < 0 or c < 0:
        raise OutOfRange("n_s and c must be >= 0")
    s = n_s + 0.5
    cov = direct_sum_qp([[s, c], [c, s]], [[s, -c], [-c, s]])
    return validate_state(GaussianState(np.zeros(4), cov))


def hypothesis_pair_generic(source: SourceSpec, channel: ChannelSpec) -> HypothesisPair:
    if source.kind != "generic_gaussian":
        raise ValidationError("hypothesis_pair_generic needs a generic source")
    n_s, c = source.n_s, source.c
    kappa, n_b = channel.kappa, channel.n_b
    s = n_s + 0.5
    b = n_b + 0.5
    a = kappa * n_s + b
    off = math.sqrt(kappa) * c
    cov0 = direct_sum_qp([[b, 0.0], [0.0, s]], [[b, 0.0], [0.0, s]])
    cov1 = direct_sum_qp([[a, off], [off, s]], [[a, -off], [-off, s]])
    return HypothesisPair(
        GaussianState(np.zeros(4), cov0),
        GaussianState(np.zeros(4), cov1),
        "generic",
    )


def hypothesis_pair_coherent(n_s: float, channel: ChannelSpec) -> HypothesisPair:
    if n_s < 0:
        raise OutOfRange("n_s must be >= 0")
    cov = (channel.n_b + 0.5) * np.eye(2)
    mean1 = np.array([math.sqrt(2.0 * channel.kappa * n_s), 0.0])
    return HypothesisPair(
        GaussianState(np.zeros(2), cov),
        GaussianState(mean1, cov),
        "coherent",
    )


def planck_occupation(freq_hz: float, temp_k: float) -> float:
    """Bose-Einstein mean occupation of a mode at frequency and temperature."""
    if freq_hz <= 0 or temp_k < 0:
        raise OutOfRange("frequency must be > 0 and temperature >= 0")
    if temp_k == 0:
        return 0.0
    x = PLANCK_H * freq_hz / (BOLTZMANN_K * temp_k)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def kappa_of_range(area_rx_m2: float, range_m: float) -> float:
    """Ideal pencil-beam radar equation: kappa = A_R / (4 pi R)^2."""
    if area_rx_m2 <= 0 or range_m <= 0:
        raise OutOfRange("area and range must be positive")
    kappa = area_rx_m2 / (4.0 * math.pi * range_m) ** 2
    if kappa >= 1.0:
        raise NotInHighLossRegime(f"kappa = {kappa:.4g} >= 1 at R = {range_m} m")
    return kappa


def range_of_kappa(area_rx_m2: float, kappa: float) -> float:
    if area_rx_m2 <= 0 or kappa <= 0:
        raise OutOfRange("area and kappa must be positive")
    if kappa >= 1.0:
        raise NotInHighLossRegime(f"kappa = {kappa} >= 1")
    return math.sqrt(area_rx_m2 / kappa) / (4.0 * math.pi)


def link_budget_convert(area_rx_m2: float, *, range_m: float | None = None,
                        kappa: float | None = None) -> dict:
    """Convert between range and reflectivity for an ideal pencil beam.

    Exactly one of ``range_m`` and ``kappa`` must be given. The antenna gain
    is reported symbolically since the target cross-section cancels out.
    """
    if (range_m is None) == (kappa is None):
        raise ValidationError("give exactly one of range_m and kappa")
    if range_m is None:
        range_m = range_of_kappa(area_rx_m2, kappa)
    else:
        kappa = kappa_of_range(area_rx_m2, range_m)
    return {
        "kappa": kappa,
        "range_m": range_m,
        "gain": "4*pi*R^2/sigma",
        "gain_times_sigma_m2": 4.0 * math.pi * range_m ** 2,
    }


def snr(kappa: float, n_s: float, n_b: float) -> dict:
    if kappa <= 0 or n_s <= 0 or n_b <= 0:
        raise OutOfRange("kappa, n_s and n_b must be positive")
    gamma = kappa * n_s / n_b
    return {"gamma": gamma, "gamma_db": 10.0 * math.log10(gamma)}
