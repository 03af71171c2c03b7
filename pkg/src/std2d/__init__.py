"""Secure, trust-aware device-to-device multicast offloading simulator.

A femtocell delivers one multicast payload to a population of constrained
devices; cell-edge devices are offloaded to encrypted sidelink relays picked
by social reputation and past behaviour, and tampering relays are detected,
attributed, and banned. The package bundles the crypto and trust primitives,
the radio model, the protocol state machines, a deterministic event-driven
simulator, and a CLI for runs, sweeps, and figure extraction.
"""

from .crypto import (
    DhkeParams,
    KeyPair,
    SharedSecret,
    SigningRegistry,
    SymmetricKey,
    dhke_keypair,
    dhke_shared,
    derive_key,
)
from .scenario import ScenarioConfig, generate_scenario
from .simulate import RunResult, run_scenario
from .sweep import SweepGrid, sweep
from .trust import ReliabilityClass, TrustLedger, TrustProfile, classify, compute_nrv

__version__ = "0.1.0"

__all__ = [
    "DhkeParams",
    "KeyPair",
    "SharedSecret",
    "SigningRegistry",
    "SymmetricKey",
    "dhke_keypair",
    "dhke_shared",
    "derive_key",
    "ScenarioConfig",
    "generate_scenario",
    "RunResult",
    "run_scenario",
    "SweepGrid",
    "sweep",
    "ReliabilityClass",
    "TrustLedger",
    "TrustProfile",
    "classify",
    "compute_nrv",
    "__version__",
]
