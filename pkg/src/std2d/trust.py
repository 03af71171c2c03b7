"""Social-relationship graph, reliability scoring, and the misbehaviour ledger.

A device's reliability value (NRV) is its social-relationships factor (SRF)
until the first detected malicious forwarding, after which the malicious
counter (MDC) takes over and the device is banned from the relay role.
"""

import csv
from dataclasses import dataclass, field
from enum import Enum
from random import Random

DEFAULT_CLASS_THRESHOLDS = (1.0 / 3.0, 2.0 / 3.0)

MALICIOUS_SRF_CEILING = 0.4


class RelationshipKind(Enum):
    POR = "por"      # same producer, same period
    CLOR = "clor"    # co-located
    CWOR = "cwor"    # co-working
    OOR = "oor"      # same owner
    SOR = "sor"      # social contact between owners


@dataclass(frozen=True)
class SocialEdge:
    node_a: str
    node_b: str
    kind: RelationshipKind
    weight: float

    def __post_init__(self) -> None:
        if self.node_a == self.node_b:
            raise ValueError(f"self-edge on {self.node_a}")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"edge weight {self.weight} outside [0, 1]")


class SocialGraph:
    """Undirected relationship graph over device ids."""

    def __init__(self) -> None:
        self._nodes: set[str] = set()
        self._incident: dict[str, list[SocialEdge]] = {}

    def add_node(self, device: str) -> None:
        self._nodes.add(device)
        self._incident.setdefault(device, [])

    def add_edge(self, edge: SocialEdge) -> None:
        for node in (edge.node_a, edge.node_b):
            self.add_node(node)
            self._incident[node].append(edge)

    @property
    def nodes(self) -> set[str]:
        return set(self._nodes)

    def edges_of(self, device: str) -> list[SocialEdge]:
        if device not in self._nodes:
            raise KeyError(f"unknown device id: {device}")
        return list(self._incident[device])

    @classmethod
    def from_csv(cls, path) -> "SocialGraph":
        """Load one edge per record: node_a, node_b, kind, weight."""
        graph = cls()
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                a, b, kind, weight = (cell.strip() for cell in row[:4])
                graph.add_edge(SocialEdge(a, b, RelationshipKind(kind.lower()), float(weight)))
        return graph


def compute_srf(
    device: str,
    graph: SocialGraph,
    kind_coefficients: dict[RelationshipKind, float] | None = None,
) -> float:
    """Mean of incident edge weights scaled by per-kind coefficients.

    Coefficients default to 1.0 for every relationship kind, keeping the
    result in [0, 1]. Isolated devices score 0.
    """
    edges = graph.edges_of(device)
    if not edges:
        return 0.0
    coeffs = kind_coefficients or {}
    total = sum(e.weight * coeffs.get(e.kind, 1.0) for e in edges)
    return total / len(edges)


@dataclass
class TrustProfile:
    device: str
    srf: float
    mdc: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.srf <= 1.0:
            raise ValueError(f"srf {self.srf} outside [0, 1]")
        if self.mdc < 0:
            raise ValueError("mdc must be non-negative")

    @property
    def nrv(self) -> float:
        return compute_nrv(self)


def compute_nrv(profile: TrustProfile) -> float:
    """Reliability value: the SRF while the record is clean, the MDC afterwards."""
    if profile.mdc == 0:
        return profile.srf
    return float(profile.mdc)


class ReliabilityClass(Enum):
    BANNED = "banned"
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


def classify(
    nrv: float,
    mdc: int,
    thresholds: tuple[float, float] = DEFAULT_CLASS_THRESHOLDS,
) -> ReliabilityClass:
    """Ban any device caught misbehaving at least once, tercile-split the rest.

    The ban keys on the counter rather than on nrv > 1: a single detected
    incident gives nrv exactly 1, which a strict reading would let through.
    """
    if mdc >= 1:
        return ReliabilityClass.BANNED
    mid_lo, hi_lo = thresholds
    if nrv >= hi_lo:
        return ReliabilityClass.HIGH
    if nrv >= mid_lo:
        return ReliabilityClass.MEDIUM
    return ReliabilityClass.LOW


@dataclass
class TrustLedger:
    """Single-owner store of trust profiles; snapshots are safe to share."""

    profiles: dict[str, TrustProfile] = field(default_factory=dict)

    def add(self, device: str, srf: float, mdc: int = 0) -> None:
        self.profiles[device] = TrustProfile(device=device, srf=srf, mdc=mdc)

    def get(self, device: str) -> TrustProfile:
        if device not in self.profiles:
            raise KeyError(f"unknown device id: {device}")
        return self.profiles[device]

    def record_malicious(self, device: str) -> TrustProfile:
        profile = self.get(device)
        profile.mdc += 1
        return profile

    def classify_device(
        self, device: str, thresholds: tuple[float, float] = DEFAULT_CLASS_THRESHOLDS
    ) -> ReliabilityClass:
        profile = self.get(device)
        return classify(profile.nrv, profile.mdc, thresholds)

    def snapshot(self) -> dict[str, TrustProfile]:
        return {
            device: TrustProfile(device=p.device, srf=p.srf, mdc=p.mdc)
            for device, p in self.profiles.items()
        }


def sample_srf(is_malicious: bool, rng: Random) -> float:
    """Draw a ground-truth-correlated SRF: malicious nodes cap at 0.4."""
    if is_malicious:
        return rng.uniform(0.0, MALICIOUS_SRF_CEILING)
    return rng.uniform(0.0, 1.0)
