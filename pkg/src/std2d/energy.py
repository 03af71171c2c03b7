"""Per-device energy model and ledger.

Radio costs scale with on-air time: a per-bit figure quoted at a reference
rate is multiplied by (reference_rate / actual_rate), which is exactly
power x duration. Crypto costs are flat per operation except the per-bit
cipher work. Every charge lands in one of three buckets per device; the
total is their sum by construction.

Defaults are order-of-magnitude picks for a constrained terminal; all the
comparison metrics are trend-based, never absolute joules, and the full
model is echoed with every result file.
"""

from dataclasses import dataclass, field, fields

CATEGORIES = ("useful", "malicious", "security")


@dataclass
class EnergyModel:
    reference_rate_bps: float = 1.0e6
    tx_j_per_bit: float = 100e-9      # at the reference rate
    rx_j_per_bit: float = 50e-9       # at the reference rate
    per_message_j: float = 2e-6       # flat cost per message sent or received
    encrypt_j_per_bit: float = 5e-10
    decrypt_j_per_bit: float = 5e-10
    sign_j: float = 2e-5
    verify_j: float = 1e-5
    tag_j: float = 2e-6
    dhke_exp_j: float = 2e-4          # one modular exponentiation

    def validate(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"energy.{f.name} must be >= 0")
        if self.reference_rate_bps <= 0:
            raise ValueError("energy.reference_rate_bps must be positive")

    def tx_energy(self, bits: float, rate_bps: float) -> float:
        return bits * self.tx_j_per_bit * (self.reference_rate_bps / rate_bps)

    def rx_energy(self, bits: float, rate_bps: float) -> float:
        return bits * self.rx_j_per_bit * (self.reference_rate_bps / rate_bps)

    def crypto_energy(self, op: str, bits: float = 0.0) -> float:
        if op == "encrypt":
            return bits * self.encrypt_j_per_bit
        if op == "decrypt":
            return bits * self.decrypt_j_per_bit
        if op == "sign":
            return self.sign_j
        if op == "verify":
            return self.verify_j
        if op == "tag":
            return self.tag_j
        if op == "dhke":
            return self.dhke_exp_j
        raise ValueError(f"unknown crypto op {op!r}")


@dataclass
class DeviceEnergy:
    e_useful: float = 0.0
    e_malicious: float = 0.0
    e_security: float = 0.0

    @property
    def e_total(self) -> float:
        return self.e_useful + self.e_malicious + self.e_security


@dataclass
class EnergyLedger:
    devices: dict[str, DeviceEnergy] = field(default_factory=dict)

    def entry(self, device: str) -> DeviceEnergy:
        if device not in self.devices:
            self.devices[device] = DeviceEnergy()
        return self.devices[device]

    def charge(self, device: str, joules: float, category: str) -> None:
        if joules < 0:
            raise ValueError("cannot charge negative energy")
        if category == "useful":
            self.entry(device).e_useful += joules
        elif category == "malicious":
            self.entry(device).e_malicious += joules
        elif category == "security":
            self.entry(device).e_security += joules
        else:
            raise ValueError(f"unknown energy category {category!r}")


class EnergyAccountant:
    """Bridges protocol entities and radio events to the ledger.

    Implements the meter interface the state machines call for crypto work
    (always the security bucket) and offers tx/rx helpers for the runner.
    """

    def __init__(self, model: EnergyModel, ledger: EnergyLedger | None = None):
        self.model = model
        self.ledger = ledger if ledger is not None else EnergyLedger()

    def crypto(self, device: str, op: str, bits: float = 0.0) -> None:
        self.ledger.charge(device, self.model.crypto_energy(op, bits), "security")

    def message_tx(self, device: str, bits: float, rate_bps: float, category: str) -> None:
        joules = self.model.tx_energy(bits, rate_bps) + self.model.per_message_j
        self.ledger.charge(device, joules, category)

    def message_rx(self, device: str, bits: float, rate_bps: float, category: str) -> None:
        joules = self.model.rx_energy(bits, rate_bps) + self.model.per_message_j
        self.ledger.charge(device, joules, category)
