"""RF interface catalog and the physical-layer rate model.

Units throughout: Hz for bandwidth, bits/s for rates, metres for distance,
dBm / dB for power.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, InvalidArgument

UNBOUNDED = math.inf


class RfClass(str, enum.Enum):
    M2M = "M2M"
    M2B = "M2B"


@dataclass(frozen=True)
class RfInterface:
    """One radio technology available on machines (and on BSs for M2B)."""

    id: str
    rf_class: RfClass
    channel_bw: float
    max_rate: float = UNBOUNDED
    num_channels: int = 1
    bs_total_bw: float = 0.0
    bs_conn_cap: int = 0
    carrier_freq: float = 2.4e9
    tx_power: float = 23.0

    def __post_init__(self):
        object.__setattr__(self, "rf_class", RfClass(self.rf_class))
        if self.channel_bw <= 0:
            raise InvalidArgument(f"{self.id}: channel_bw must be positive")
        if not self.max_rate > 0:
            raise InvalidArgument(f"{self.id}: max_rate must be positive or unbounded")
        if self.num_channels < 1:
            raise InvalidArgument(f"{self.id}: num_channels must be >= 1")
        if self.rf_class is RfClass.M2M and self.num_channels != 1:
            raise InvalidArgument(f"{self.id}: M2M interfaces carry exactly one channel")
        if self.rf_class is RfClass.M2B:
            if self.bs_total_bw < self.channel_bw:
                raise InvalidArgument(f"{self.id}: bs_total_bw must be >= channel_bw")
            if self.bs_conn_cap < 0:
                raise InvalidArgument(f"{self.id}: bs_conn_cap must be >= 0")


@dataclass(frozen=True)
class ChannelModel:
    path_loss_exponent: float = 4.0
    shadowing_std_db: float = 8.0
    rayleigh_scale: float = 1.0
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0
    reference_distance_m: float = 1.0
    reference_loss_db: float = 40.0

    def __post_init__(self):
        if not self.path_loss_exponent > 0:
            raise InvalidArgument("path_loss_exponent must be positive")
        for name, value in vars(self).items():
            if not math.isfinite(value):
                raise InvalidArgument(f"{name} must be finite")
        if self.reference_distance_m <= 0:
            raise InvalidArgument("reference_distance_m must be positive")


@dataclass(frozen=True)
class FadingDraw:
    """Shadowing (dB) and Rayleigh power gain; scalars or equal-shape arrays."""

    shadow_db: float | np.ndarray
    rayleigh_gain: float | np.ndarray


NO_FADING = FadingDraw(0.0, 1.0)


def default_catalog() -> list[RfInterface]:
    # Parameters are not given by the source model; these are typical values
    # ordered so that WiFi and LTE are the broadband members of each class.
    m2m = RfClass.M2M
    m2b = RfClass.M2B
    return [
        RfInterface("zwave", m2m, channel_bw=200e3, max_rate=100e3, carrier_freq=868e6),
        RfInterface("bluetooth", m2m, channel_bw=1e6, max_rate=2e6, carrier_freq=2.4e9),
        RfInterface("wifi", m2m, channel_bw=20e6, max_rate=54e6, carrier_freq=2.4e9),
        RfInterface("nbiot", m2b, channel_bw=200e3, max_rate=250e3, num_channels=10,
                    bs_total_bw=2e6, bs_conn_cap=50, carrier_freq=900e6),
        RfInterface("ltem", m2b, channel_bw=1.4e6, max_rate=1e6, num_channels=3,
                    bs_total_bw=5e6, bs_conn_cap=50, carrier_freq=900e6),
        RfInterface("lte", m2b, channel_bw=20e6, max_rate=100e6, num_channels=1,
                    bs_total_bw=20e6, bs_conn_cap=100, carrier_freq=1.8e9),
    ]


def sample_fading(rng: np.random.Generator, size=None, cm: ChannelModel | None = None) -> FadingDraw:
    """Draw log-normal shadowing and a Rayleigh power gain.

    ``shadow_db ~ N(0, std**2)`` and ``rayleigh_gain = |h|**2`` with
    ``|h| ~ Rayleigh(scale)``; defaults give N(0, 64) dB and Rayleigh(1),
    so ``E[rayleigh_gain] = 2``. Shadowing is drawn before the Rayleigh
    sample, always in that order.
    """
    cm = cm or ChannelModel()
    shadow = rng.normal(0.0, cm.shadowing_std_db, size)
    h = rng.rayleigh(cm.rayleigh_scale, size)
    if size is None:
        return FadingDraw(float(shadow), float(h * h))
    return FadingDraw(shadow, h * h)


def link_sinr(distance_m, rf: RfInterface, cm: ChannelModel, fading: FadingDraw, bw_hz: float):
    """Linear SINR of one link (vectorised over ``distance_m`` and ``fading``).

    No interference term: interfaces are non-overlapping and each channel is
    used exclusively, so this is the SNR.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise DegenerateGeometry("link distance must be strictly positive")
    if bw_hz <= 0:
        raise InvalidArgument("bandwidth must be positive")
    gain = np.asarray(fading.rayleigh_gain, dtype=float)
    with np.errstate(divide="ignore"):
        fade_db = 10.0 * np.log10(gain)
    rx = (rf.tx_power - cm.reference_loss_db
          - 10.0 * cm.path_loss_exponent * np.log10(d / cm.reference_distance_m)
          + fading.shadow_db + fade_db)
    noise = cm.noise_psd_dbm_hz + 10.0 * math.log10(bw_hz) + cm.noise_figure_db
    sinr = np.power(10.0, (rx - noise) / 10.0)
    if sinr.ndim == 0:
        return float(sinr)
    return sinr


def shannon_rate(bw_hz, sinr_linear):
    """Shannon-Hartley rate ``bw * log2(1 + sinr)`` in bits/s."""
    bw = np.asarray(bw_hz, dtype=float)
    s = np.asarray(sinr_linear, dtype=float)
    if np.any(bw < 0) or np.any(s < 0):
        raise InvalidArgument("bandwidth and SINR must be non-negative")
    out = bw * np.log2(1.0 + s)
    return float(out) if out.ndim == 0 else out


def capped_link_rate(sh_rate, rf: RfInterface):
    out = np.minimum(sh_rate, rf.max_rate)
    return float(out) if np.ndim(out) == 0 else out


def df_two_hop_rate(c_first_hop, c_second_hop):
    """End-to-end decode-and-forward rate: the weaker hop."""
    out = np.minimum(c_first_hop, c_second_hop)
    return float(out) if np.ndim(out) == 0 else out


def rf_eligible(rf: RfInterface, requested_bw: float) -> bool:
    if requested_bw <= 0:
        raise InvalidArgument("requested bandwidth must be positive")
    return rf.channel_bw >= requested_bw


def link_bandwidth(rf: RfInterface, requested_bw: float) -> float:
    return min(requested_bw, rf.channel_bw)
