"""Experiment configuration and deterministic scenario generation.

A scenario is a pure function of (config, seed): device positions in the
cell-edge annulus, the exact malicious head-count, per-device social scores,
per-link CQIs, and per-device key material all derive from named substreams
of the seed, so no consumer can perturb another by drawing in a different
order.
"""

import hashlib
import math
from dataclasses import dataclass, field
from random import Random

from .crypto import DEFAULT_GENERATOR, DEFAULT_PRIME, DhkeParams, SymmetricKey
from .energy import EnergyModel
from .protocol import ProtocolConfig
from .radio import (
    DOWNLINK_DEFAULTS,
    SIDELINK_DEFAULTS,
    ChannelParams,
    FrameConfig,
    Position,
    cqi_from_geometry,
    link_shadowing,
)
from .trust import RelationshipKind, SocialGraph, compute_srf, sample_srf

VARIANTS = ("cms", "unicast", "d2d", "sd2d", "std2d")

SRF_SOURCES = ("sampled", "graph")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class AdversaryModel:
    malicious_fraction: float = 0.0
    tamper_probability: float = 1.0

    def validate(self) -> None:
        if not 0.0 <= self.malicious_fraction <= 1.0:
            raise ConfigError(
                f"adversary.malicious_fraction must be in [0, 1], got {self.malicious_fraction}"
            )
        if not 0.0 <= self.tamper_probability <= 1.0:
            raise ConfigError(
                f"adversary.tamper_probability must be in [0, 1], got {self.tamper_probability}"
            )


@dataclass
class TrustConfig:
    srf_source: str = "sampled"           # sampled | graph
    social_graph_file: str | None = None
    kind_coefficients: dict[str, float] = field(default_factory=dict)

    def validate(self) -> None:
        if self.srf_source not in SRF_SOURCES:
            raise ConfigError(f"trust.srf_source must be one of {SRF_SOURCES}, got {self.srf_source!r}")
        if self.srf_source == "graph" and not self.social_graph_file:
            raise ConfigError("trust.social_graph_file is required when trust.srf_source is 'graph'")
        for kind in self.kind_coefficients:
            try:
                RelationshipKind(kind.lower())
            except ValueError:
                raise ConfigError(f"trust.kind_coefficients has unknown relationship kind {kind!r}")

    def coefficients(self) -> dict[RelationshipKind, float]:
        return {RelationshipKind(k.lower()): v for k, v in self.kind_coefficients.items()}


@dataclass
class CryptoConfig:
    q: int = DEFAULT_PRIME
    alpha: int = DEFAULT_GENERATOR
    cipher: str = "aes-256-gcm"
    signature_scheme: str = "ed25519"
    mac: str = "hmac-sha256"

    def validate(self) -> None:
        try:
            self.dhke_params().validate()
        except ValueError as exc:
            raise ConfigError(f"crypto.q/crypto.alpha invalid: {exc}") from exc
        if self.cipher != "aes-256-gcm":
            raise ConfigError(f"crypto.cipher: only 'aes-256-gcm' is built in, got {self.cipher!r}")
        if self.signature_scheme != "ed25519":
            raise ConfigError(f"crypto.signature_scheme: only 'ed25519' is built in, got {self.signature_scheme!r}")
        if self.mac != "hmac-sha256":
            raise ConfigError(f"crypto.mac: only 'hmac-sha256' is built in, got {self.mac!r}")

    def dhke_params(self) -> DhkeParams:
        return DhkeParams(q=self.q, alpha=self.alpha)


@dataclass
class RadioConfig:
    downlink: ChannelParams = field(default_factory=lambda: DOWNLINK_DEFAULTS)
    sidelink: ChannelParams = field(default_factory=lambda: SIDELINK_DEFAULTS)
    frame: FrameConfig = field(default_factory=FrameConfig)

    def validate(self) -> None:
        try:
            self.downlink.validate()
            self.sidelink.validate()
        except ValueError as exc:
            raise ConfigError(f"radio: {exc}") from exc


@dataclass
class ScenarioConfig:
    n_devices: int = 1000
    cell_radius_m: float = 1000.0
    edge_inner_fraction: float = 0.7
    d2d_range_m: float = 500.0
    file_bits: int = 500_000
    variant: str = "std2d"
    seed: int = 1
    n_drx_groups: int = 1
    drx_base_ttis: int = 32
    adversary: AdversaryModel = field(default_factory=AdversaryModel)
    trust: TrustConfig = field(default_factory=TrustConfig)
    crypto: CryptoConfig = field(default_factory=CryptoConfig)
    energy: EnergyModel = field(default_factory=EnergyModel)
    radio: RadioConfig = field(default_factory=RadioConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)

    def validate(self) -> None:
        if self.n_devices < 1:
            raise ConfigError(f"n_devices must be >= 1, got {self.n_devices}")
        if self.cell_radius_m <= 0:
            raise ConfigError(f"cell_radius_m must be positive, got {self.cell_radius_m}")
        if not 0.0 <= self.edge_inner_fraction < 1.0:
            raise ConfigError(
                f"edge_inner_fraction must be in [0, 1), got {self.edge_inner_fraction}"
            )
        if self.d2d_range_m <= 0:
            raise ConfigError(f"d2d_range_m must be positive, got {self.d2d_range_m}")
        if self.file_bits < 0:
            raise ConfigError(f"file_bits must be >= 0, got {self.file_bits}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.n_drx_groups < 1:
            raise ConfigError(f"n_drx_groups must be >= 1, got {self.n_drx_groups}")
        if self.drx_base_ttis < 1:
            raise ConfigError(f"drx_base_ttis must be >= 1, got {self.drx_base_ttis}")
        self.adversary.validate()
        self.trust.validate()
        self.crypto.validate()
        self.radio.validate()
        try:
            self.energy.validate()
            self.protocol.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class DeviceInfo:
    device_id: str
    position: Position
    malicious: bool
    srf: float
    drx_group: int


@dataclass
class Scenario:
    config: ScenarioConfig
    devices: list[DeviceInfo]
    downlink_cqi: dict[str, int]
    neighbor_cqi: dict[str, dict[str, int]]
    subscription_seeds: dict[str, bytes]

    def device_ids(self) -> list[str]:
        return [d.device_id for d in self.devices]

    def malicious_ids(self) -> set[str]:
        return {d.device_id for d in self.devices if d.malicious}

    def subscription_key(self, device: str) -> SymmetricKey:
        return SymmetricKey(key=self.subscription_seeds[device])


def _substream(seed: int, label: str) -> Random:
    return Random(f"{seed}:{label}")


def generate_scenario(config: ScenarioConfig) -> Scenario:
    """Build the deterministic scenario the run executes against."""
    config.validate()
    n = config.n_devices
    width = max(3, len(str(n - 1)))
    ids = [f"dev{i:0{width}d}" for i in range(n)]

    pos_rng = _substream(config.seed, "positions")
    inner = config.edge_inner_fraction * config.cell_radius_m
    outer = config.cell_radius_m
    positions: dict[str, Position] = {}
    for device in ids:
        # Uniform over the annulus area.
        radius = math.sqrt(pos_rng.uniform(inner**2, outer**2))
        angle = pos_rng.uniform(0.0, 2.0 * math.pi)
        positions[device] = Position(x=radius * math.cos(angle), y=radius * math.sin(angle))

    mal_rng = _substream(config.seed, "malicious")
    n_malicious = round(config.adversary.malicious_fraction * n)
    malicious = set(mal_rng.sample(ids, n_malicious))

    srf_rng = _substream(config.seed, "srf")
    srf: dict[str, float] = {}
    if config.trust.srf_source == "graph":
        graph = SocialGraph.from_csv(config.trust.social_graph_file)
        coeffs = config.trust.coefficients()
        for device in ids:
            srf[device] = compute_srf(device, graph, coeffs) if device in graph.nodes else 0.0
    else:
        for device in ids:
            srf[device] = sample_srf(device in malicious, srf_rng)

    henb_pos = Position(0.0, 0.0)
    dl = config.radio.downlink
    sl = config.radio.sidelink
    downlink_cqi = {
        device: cqi_from_geometry(
            henb_pos,
            positions[device],
            dl,
            link_shadowing(config.seed, "henb", device, dl.shadowing_sigma_db),
        )
        for device in ids
    }

    neighbor_cqi: dict[str, dict[str, int]] = {device: {} for device in ids}
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            if positions[a].distance_to(positions[b]) > config.d2d_range_m:
                continue
            cqi = cqi_from_geometry(
                positions[a],
                positions[b],
                sl,
                link_shadowing(config.seed, a, b, sl.shadowing_sigma_db),
            )
            neighbor_cqi[a][b] = cqi
            neighbor_cqi[b][a] = cqi

    subscription_seeds = {
        device: hashlib.sha256(f"{config.seed}:subkey:{device}".encode()).digest()
        for device in ids
    }

    devices = [
        DeviceInfo(
            device_id=device,
            position=positions[device],
            malicious=device in malicious,
            srf=srf[device],
            drx_group=i % config.n_drx_groups,
        )
        for i, device in enumerate(ids)
    ]
    return Scenario(
        config=config,
        devices=devices,
        downlink_cqi=downlink_cqi,
        neighbor_cqi=neighbor_cqi,
        subscription_seeds=subscription_seeds,
    )
