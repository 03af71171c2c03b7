"""Geometry-to-CQI channel model, multicast/sidelink rates, and TDD airtime.

The narrowband downlink and the wide sidelink share one model: log-distance
path loss with optional per-link lognormal shadowing, an SNR-to-CQI threshold
table, and a CQI-to-spectral-efficiency table. Multicast rate is pinned to
the worst directly-served group member; sidelink rate scales with the
resource blocks granted to the pair. Airtime walks the TDD frame pattern so
downlink traffic only ever occupies downlink subframes and sidelink traffic
only uplink subframes.
"""

import math
from dataclasses import dataclass, field
from random import Random

NBIOT_CARRIER_HZ = 180_000.0
SIDELINK_TOTAL_RBS = 100
TTI_SECONDS = 0.001

# Minimum SNR (dB) for CQI 1..15; below the first entry is CQI 0 (no service).
SNR_THRESHOLDS_DB = [
    -6.7, -4.7, -2.3, 0.2, 2.4, 4.3, 5.9, 8.1,
    10.3, 11.7, 14.1, 16.3, 18.7, 21.0, 22.7,
]

# Spectral efficiency (bit/s/Hz) indexed by CQI 0..15.
SPECTRAL_EFFICIENCY = [
    0.0, 0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766,
    1.9141, 2.4063, 2.7305, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547,
]

TDD_CONFIG3_PATTERN = "DSUUUDDDDD"


class UnreachableError(Exception):
    """No usable rate toward the destination."""


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class ChannelParams:
    """Link budget for one link type (downlink or sidelink)."""

    tx_power_dbm: float
    ref_loss_db: float = 32.4       # path loss at 1 m
    exponent: float = 3.5
    noise_dbm: float = -110.9
    shadowing_sigma_db: float = 0.0
    snr_thresholds_db: list[float] = field(default_factory=lambda: list(SNR_THRESHOLDS_DB))
    efficiency: list[float] = field(default_factory=lambda: list(SPECTRAL_EFFICIENCY))

    def validate(self) -> None:
        if len(self.snr_thresholds_db) != 15:
            raise ValueError("snr threshold table must have 15 entries (CQI 1..15)")
        if sorted(self.snr_thresholds_db) != list(self.snr_thresholds_db):
            raise ValueError("snr thresholds must be non-decreasing")
        if len(self.efficiency) != 16:
            raise ValueError("efficiency table must have 16 entries (CQI 0..15)")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing sigma must be >= 0")


# Defaults sized so a 1000 m cell edge sits at CQI 2 and the serve-direct
# CQI 3 boundary falls near 980 m.
DOWNLINK_DEFAULTS = ChannelParams(tx_power_dbm=24.0)
SIDELINK_DEFAULTS = ChannelParams(tx_power_dbm=23.0)


def snr_db(distance_m: float, params: ChannelParams, shadow_db: float = 0.0) -> float:
    d = max(distance_m, 1.0)
    path_loss = params.ref_loss_db + 10.0 * params.exponent * math.log10(d)
    return params.tx_power_dbm - path_loss - params.noise_dbm - shadow_db


def snr_to_cqi(snr: float, params: ChannelParams) -> int:
    cqi = 0
    for threshold in params.snr_thresholds_db:
        if snr >= threshold:
            cqi += 1
        else:
            break
    return cqi


def link_shadowing(seed: int, id_a: str, id_b: str, sigma_db: float) -> float:
    """Fixed per-link shadowing draw; symmetric in the endpoints."""
    if sigma_db == 0.0:
        return 0.0
    lo, hi = sorted((id_a, id_b))
    return Random(f"{seed}:shadow:{lo}:{hi}").gauss(0.0, sigma_db)


def cqi_from_geometry(
    tx: Position, rx: Position, params: ChannelParams, shadow_db: float = 0.0
) -> int:
    """Map link geometry to CQI 0..15; coincident positions clamp to 1 m."""
    return snr_to_cqi(snr_db(tx.distance_to(rx), params, shadow_db), params)


@dataclass(frozen=True)
class CqiReport:
    device: str
    downlink_cqi: int
    d2d_cqi: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label, value in [("downlink", self.downlink_cqi), *self.d2d_cqi.items()]:
            if not 0 <= value <= 15:
                raise ValueError(f"CQI {value} for {label} outside [0, 15]")


@dataclass(frozen=True)
class FrameConfig:
    """10-subframe TDD pattern; the special subframe carries downlink at a
    reduced capacity factor."""

    pattern: str = TDD_CONFIG3_PATTERN
    special_dl_factor: float = 0.5

    def __post_init__(self) -> None:
        if len(self.pattern) != 10 or set(self.pattern) - set("DSU"):
            raise ValueError(f"bad frame pattern {self.pattern!r}")

    @property
    def dl_subframes(self) -> set[int]:
        return {i for i, c in enumerate(self.pattern) if c in "DS"}

    @property
    def ul_subframes(self) -> set[int]:
        return {i for i, c in enumerate(self.pattern) if c == "U"}

    def capacity(self, subframe: int, direction: str) -> float:
        """TTI-equivalents this subframe offers to a DL or UL transmission."""
        char = self.pattern[subframe % 10]
        if direction == "DL":
            if char == "D":
                return 1.0
            if char == "S":
                return self.special_dl_factor
            return 0.0
        if direction == "UL":
            return 1.0 if char == "U" else 0.0
        raise ValueError(f"direction must be 'DL' or 'UL', got {direction!r}")


def cms_rate(group) -> float:
    """Multicast rate pinned to the worst downlink CQI in the served group."""
    reports = list(group)
    if not reports:
        raise ValueError("multicast group is empty")
    worst = min(report.downlink_cqi for report in reports)
    return NBIOT_CARRIER_HZ * SPECTRAL_EFFICIENCY[worst]


def d2d_rate(cqi: int, rbs: int) -> float:
    """Sidelink rate over `rbs` resource blocks at the given CQI."""
    if not 0 <= rbs <= SIDELINK_TOTAL_RBS:
        raise ValueError(f"resource blocks {rbs} outside [0, {SIDELINK_TOTAL_RBS}]")
    if not 0 <= cqi <= 15:
        raise ValueError(f"CQI {cqi} outside [0, 15]")
    return rbs * NBIOT_CARRIER_HZ * SPECTRAL_EFFICIENCY[cqi]


def airtime(bits: float, rate: float, frame: FrameConfig, direction: str) -> int:
    """TTIs of the requested direction needed to move `bits` at `rate`.

    Counts only subframes of that direction; the trailing partially-filled
    TTI rounds up.
    """
    if bits < 0:
        raise ValueError("bits must be >= 0")
    if rate <= 0:
        raise UnreachableError("rate is zero: destination unreachable")
    if bits == 0:
        return 0
    per_frame = sum(frame.capacity(i, direction) for i in range(10))
    if per_frame <= 0:
        raise UnreachableError(f"frame pattern has no {direction} capacity")
    ttis_per_frame = sum(1 for i in range(10) if frame.capacity(i, direction) > 0)
    needed = bits / (rate * TTI_SECONDS)  # TTI-equivalents
    whole_frames = max(0, int((needed - 1e-9) // per_frame))
    used = whole_frames * ttis_per_frame
    acc = whole_frames * per_frame
    while acc < needed - 1e-9:
        for subframe in range(10):
            cap = frame.capacity(subframe, direction)
            if cap <= 0:
                continue
            used += 1
            acc += cap
            if acc >= needed - 1e-9:
                break
    return used


def finish_tti(
    bits: float, rate: float, frame: FrameConfig, direction: str, start_tti: int
) -> int:
    """Absolute TTI at which a transfer starting at `start_tti` completes.

    The transfer occupies only subframes of its direction; the returned time
    is the first TTI after the last occupied subframe.
    """
    if bits < 0:
        raise ValueError("bits must be >= 0")
    if rate <= 0:
        raise UnreachableError("rate is zero: destination unreachable")
    if bits == 0:
        return start_tti
    per_frame = sum(frame.capacity(i, direction) for i in range(10))
    if per_frame <= 0:
        raise UnreachableError(f"frame pattern has no {direction} capacity")
    needed = bits / (rate * TTI_SECONDS)
    acc = 0.0
    tti = start_tti
    # Walk to the next frame boundary, skip whole frames, walk the tail.
    while tti % 10 != 0 and acc < needed - 1e-9:
        cap = frame.capacity(tti % 10, direction)
        acc += cap
        tti += 1
        if cap > 0 and acc >= needed - 1e-9:
            return tti
    whole_frames = max(0, int((needed - acc - 1e-9) // per_frame))
    acc += whole_frames * per_frame
    tti += whole_frames * 10
    while acc < needed - 1e-9:
        cap = frame.capacity(tti % 10, direction)
        acc += cap
        tti += 1
        if cap > 0 and acc >= needed - 1e-9:
            return tti
    return tti
