"""Wire messages exchanged during a multicast session.

One dataclass per sub-procedure message. Device/base-station messages carry
a per-device sequence number and an HMAC tag under that device's
subscription key; `tag_base` builds the canonical bytes the tag covers.
Payload-bearing messages keep their logical size separate from the Python
byte strings so airtime and energy accounting stay exact.
"""

import hashlib
from dataclasses import dataclass, field

from .crypto import AuthTag, Signature

HENB_ID = "henb"
CORE_ID = "core"
GW_SIGNER = "mtms-gw"


@dataclass(frozen=True)
class Page:
    subgroup_index: int
    devices: tuple[str, ...]

    variant = "page"


@dataclass(frozen=True)
class RachReport:
    device: str
    downlink_cqi: int
    d2d_cqi: dict[str, int]
    srf: float
    seq: int
    tag: AuthTag | None = None

    variant = "rach_report"


@dataclass(frozen=True)
class ServiceRequest:
    device: str
    y_public: int
    seq: int
    tag: AuthTag | None = None

    variant = "service_request"


@dataclass(frozen=True)
class PairAnnouncement:
    to_device: str
    receiver: str
    relay: str
    peer_public: int | None  # receiver's public value, present only toward the relay
    seq: int
    tag: AuthTag | None = None

    variant = "pair_announcement"


@dataclass(frozen=True)
class MulticastData:
    payload: bytes
    payload_bits: int
    gw_signature: Signature | None

    variant = "multicast_data"


@dataclass(frozen=True)
class SidelinkData:
    relay_id: str
    receiver_id: str
    ciphertext: bytes
    payload_bits: int
    relay_signature: Signature | None

    variant = "sidelink_data"

    def envelope_bytes(self) -> bytes:
        """Bytes the relay signature covers; reconstructible from a digest."""
        return sidelink_envelope(self.relay_id, hashlib.sha256(self.ciphertext).digest())


def sidelink_envelope(relay_id: str, ciphertext_digest: bytes) -> bytes:
    return b"sidelink:" + relay_id.encode() + b":" + ciphertext_digest


@dataclass(frozen=True)
class RelayReport:
    relay: str
    receiver: str
    y_public: int
    seq: int
    tag: AuthTag | None = None

    variant = "relay_report"


@dataclass(frozen=True)
class PublicKeyRequest:
    receiver: str
    relay: str
    seq: int
    tag: AuthTag | None = None

    variant = "pubkey_request"


@dataclass(frozen=True)
class PublicKeyResponse:
    receiver: str
    y_public: int
    seq: int
    tag: AuthTag | None = None

    variant = "pubkey_response"


@dataclass(frozen=True)
class AlarmEvidence:
    """Digest-level evidence: enough to re-check both signatures without the
    full ciphertext."""

    relay_id: str
    ciphertext_digest: bytes
    relay_signature: Signature | None
    claimed_payload_digest: bytes
    claimed_gw_signature: Signature | None


@dataclass(frozen=True)
class AlarmBeacon:
    receiver: str
    evidence: AlarmEvidence
    seq: int
    tag: AuthTag | None = None

    variant = "alarm_beacon"


@dataclass
class MessageSizes:
    """Logical on-air sizes in bits; data messages add overhead to the payload."""

    page_bits: int = 144
    rach_report_bits: int = 512
    service_request_bits: int = 832
    pair_announcement_bits: int = 512
    relay_report_bits: int = 832
    pubkey_request_bits: int = 320
    pubkey_response_bits: int = 576
    alarm_beacon_bits: int = 1600
    data_overhead_bits: int = 704

    def size_of(self, msg) -> int:
        if isinstance(msg, (MulticastData, SidelinkData)):
            return msg.payload_bits + self.data_overhead_bits
        fixed = {
            Page: self.page_bits,
            RachReport: self.rach_report_bits,
            ServiceRequest: self.service_request_bits,
            PairAnnouncement: self.pair_announcement_bits,
            RelayReport: self.relay_report_bits,
            PublicKeyRequest: self.pubkey_request_bits,
            PublicKeyResponse: self.pubkey_response_bits,
            AlarmBeacon: self.alarm_beacon_bits,
        }
        return fixed[type(msg)]


def tag_base(msg) -> bytes:
    """Canonical bytes covered by a message's HMAC tag."""
    if isinstance(msg, RachReport):
        pairs = ",".join(f"{k}={v}" for k, v in sorted(msg.d2d_cqi.items()))
        body = f"rach:{msg.device}:{msg.downlink_cqi}:{pairs}:{msg.srf!r}:{msg.seq}"
    elif isinstance(msg, ServiceRequest):
        body = f"srq:{msg.device}:{msg.y_public}:{msg.seq}"
    elif isinstance(msg, PairAnnouncement):
        body = f"ann:{msg.to_device}:{msg.receiver}:{msg.relay}:{msg.peer_public}:{msg.seq}"
    elif isinstance(msg, RelayReport):
        body = f"rep:{msg.relay}:{msg.receiver}:{msg.y_public}:{msg.seq}"
    elif isinstance(msg, PublicKeyRequest):
        body = f"pkr:{msg.receiver}:{msg.relay}:{msg.seq}"
    elif isinstance(msg, PublicKeyResponse):
        body = f"pks:{msg.receiver}:{msg.y_public}:{msg.seq}"
    elif isinstance(msg, AlarmBeacon):
        ev = msg.evidence
        sig_hex = ev.relay_signature.sig.hex() if ev.relay_signature else ""
        gw_hex = ev.claimed_gw_signature.sig.hex() if ev.claimed_gw_signature else ""
        body = (
            f"alarm:{msg.receiver}:{ev.relay_id}:{ev.ciphertext_digest.hex()}"
            f":{sig_hex}:{ev.claimed_payload_digest.hex()}:{gw_hex}:{msg.seq}"
        )
    else:
        raise TypeError(f"message type {type(msg).__name__} carries no tag")
    return body.encode()


@dataclass(frozen=True)
class TraceRecord:
    """One delivered message: when, between whom, what, and how big."""

    time_tti: int
    source: str
    destination: str
    variant: str
    size_bits: int


TRACE_COLUMNS = ("time_tti", "source", "destination", "variant", "size_bits")
