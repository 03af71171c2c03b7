"""State machines for the secure multicast session.

Covers the full procedure chain: subscription and payload signing at the
core, DRX-based group paging, random access, trust-aware pair selection,
key mediation through the base station, the encrypted sidelink transfer,
and the alarm loop that feeds the misbehaviour ledger.

Entities are passive: handlers take a message plus the current TTI and
return messages to send. All timing, airtime, and delivery live in the
simulation layer, so every cross-entity interaction flows through the
event queue.
"""

import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from random import Random

from . import crypto
from .crypto import (
    DhkeParams,
    KeyPair,
    Signature,
    SigningRegistry,
    SymmetricKey,
    payload_digest,
)
from .messages import (
    GW_SIGNER,
    AlarmBeacon,
    AlarmEvidence,
    MessageSizes,
    Page,
    PairAnnouncement,
    PublicKeyRequest,
    PublicKeyResponse,
    RachReport,
    RelayReport,
    ServiceRequest,
    SidelinkData,
    sidelink_envelope,
    tag_base,
)
from .radio import CqiReport
from .trust import (
    DEFAULT_CLASS_THRESHOLDS,
    ReliabilityClass,
    TrustLedger,
    TrustProfile,
    classify,
)


class ProcedureError(Exception):
    """A procedure was invoked outside its phase or against its guards."""


class SessionPhase(Enum):
    SUBSCRIPTION = "subscription"
    INITIALIZATION = "initialization"
    JOINING = "joining"
    DATA_TRANSFER = "data_transfer"
    SESSION_STOP = "session_stop"


# Message variants admissible while a subgroup sits in each phase.
_PHASE_VARIANTS = {
    SessionPhase.JOINING: {"rach_report", "service_request"},
    SessionPhase.DATA_TRANSFER: {"relay_report", "pubkey_request", "alarm_beacon"},
}

SELECTION_MODES = ("cqi_only", "mdc_only", "srf_mdc")


@dataclass
class ProtocolConfig:
    delta_t_ttis: int = 100            # alarm/response window
    r_max: int = 1                     # receivers a relay may serve per session
    serve_direct_cqi: int = 3          # downlink CQI at or above which a device is served directly
    sidelink_cqi_threshold: int = 3    # minimum sidelink CQI for a feasible pair
    class_thresholds: tuple[float, float] = DEFAULT_CLASS_THRESHOLDS
    request_delay_ttis: int = 8        # device think-time between random access and service request
    control_rate_bps: float = 250_000.0  # latency model for control-plane messages
    sizes: MessageSizes = field(default_factory=MessageSizes)

    def validate(self) -> None:
        if self.delta_t_ttis <= 0:
            raise ValueError("protocol.delta_t_ttis must be positive")
        if self.r_max < 1:
            raise ValueError("protocol.r_max must be at least 1")
        if self.control_rate_bps <= 0:
            raise ValueError("protocol.control_rate_bps must be positive")
        lo, hi = self.class_thresholds
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError("protocol.class_thresholds must satisfy 0 <= low < high <= 1")


class NullMeter:
    """Energy meter stub; the simulation layer substitutes a real one."""

    def crypto(self, device: str, op: str, bits: int = 0) -> None:
        pass


@dataclass(frozen=True)
class Subscription:
    service_id: str
    devices: tuple[str, ...]


@dataclass(frozen=True)
class SignedPayload:
    payload: bytes
    payload_bits: int
    gw_signature: Signature | None

    def package(self) -> bytes:
        """Plaintext forwarded over the sidelink: payload plus trailing signature."""
        if self.gw_signature is None:
            return self.payload
        return self.payload + self.gw_signature.sig


GW_SIG_BYTES = 64  # Ed25519 signature length


def split_package(package: bytes) -> tuple[bytes, Signature | None]:
    if len(package) < GW_SIG_BYTES:
        return package, None
    return package[:-GW_SIG_BYTES], Signature(signer=GW_SIGNER, sig=package[-GW_SIG_BYTES:])


class CoreNetwork:
    """Logical core roles: session setup, content signing, joining coordination."""

    def __init__(self, registry: SigningRegistry, registered: set[str]):
        self.registry = registry
        self.registered = set(registered)
        self.subscription: Subscription | None = None

    def subscribe(self, service_id: str, devices) -> Subscription:
        devices = tuple(sorted(devices))
        unknown = [d for d in devices if d not in self.registered]
        if unknown:
            raise ProcedureError(f"unregistered devices in subscription: {unknown}")
        self.subscription = Subscription(service_id=service_id, devices=devices)
        return self.subscription

    def initialize(self, payload: bytes, payload_bits: int, sign: bool = True) -> SignedPayload:
        if self.subscription is None:
            raise ProcedureError("no active subscription")
        signature = None
        if sign:
            signature = self.registry.sign(payload_digest(payload), GW_SIGNER)
        return SignedPayload(payload=payload, payload_bits=payload_bits, gw_signature=signature)


@dataclass
class PairAssignment:
    relay_of: dict[str, str]
    fallback: bool
    direct: tuple[str, ...]
    receivers: tuple[str, ...]

    def relays(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.relay_of.values())))


def select_d2d_pairs(
    reports: dict[str, CqiReport],
    profiles: dict[str, TrustProfile],
    cqi_threshold: int = 3,
    r_max: int = 1,
    serve_direct_cqi: int = 3,
    class_thresholds: tuple[float, float] = DEFAULT_CLASS_THRESHOLDS,
    selection_mode: str = "srf_mdc",
) -> PairAssignment:
    """Split devices into direct and D2D-served, then match relays to receivers.

    Relay candidates are the directly served devices minus anyone banned.
    Reliability classes are scanned best-first; a worse class is consulted
    only for receivers still unmatched. Within a class, the pending
    (receiver, relay) pair with the best sidelink CQI is assigned first,
    ties broken by lower relay id then lower receiver id, honouring each
    relay's load limit. If anyone is left unmatched after the lowest class,
    the assignment collapses to multicast-for-all.
    """
    if selection_mode not in SELECTION_MODES:
        raise ValueError(f"selection_mode must be one of {SELECTION_MODES}")
    direct = tuple(sorted(d for d, r in reports.items() if r.downlink_cqi >= serve_direct_cqi))
    receivers = tuple(sorted(d for d in reports if d not in set(direct)))
    if not receivers:
        return PairAssignment(relay_of={}, fallback=False, direct=direct, receivers=receivers)

    by_class: dict[ReliabilityClass, list[str]] = {
        ReliabilityClass.HIGH: [],
        ReliabilityClass.MEDIUM: [],
        ReliabilityClass.LOW: [],
    }
    for relay in direct:
        if selection_mode == "cqi_only":
            by_class[ReliabilityClass.LOW].append(relay)
            continue
        profile = profiles[relay]
        if selection_mode == "mdc_only":
            nrv = 0.0 if profile.mdc == 0 else float(profile.mdc)
        else:
            nrv = profile.nrv
        cls = classify(nrv, profile.mdc, class_thresholds)
        if cls is not ReliabilityClass.BANNED:
            by_class[cls].append(relay)

    load: dict[str, int] = {}
    relay_of: dict[str, str] = {}
    unmatched = list(receivers)

    def link_cqi(receiver: str, relay: str) -> int:
        return reports[receiver].d2d_cqi.get(relay, 0)

    for cls in (ReliabilityClass.HIGH, ReliabilityClass.MEDIUM, ReliabilityClass.LOW):
        pool = sorted(by_class[cls])
        while unmatched and pool:
            best = None
            for receiver in unmatched:
                for relay in pool:
                    if load.get(relay, 0) >= r_max:
                        continue
                    cqi = link_cqi(receiver, relay)
                    if cqi < cqi_threshold:
                        continue
                    key = (-cqi, relay, receiver)
                    if best is None or key < best[0]:
                        best = (key, receiver, relay)
            if best is None:
                break
            _, receiver, relay = best
            relay_of[receiver] = relay
            load[relay] = load.get(relay, 0) + 1
            unmatched.remove(receiver)
        if not unmatched:
            break

    if unmatched:
        return PairAssignment(relay_of={}, fallback=True, direct=direct, receivers=receivers)
    return PairAssignment(relay_of=relay_of, fallback=False, direct=direct, receivers=receivers)


@dataclass(frozen=True)
class AuditRecord:
    time_tti: int
    event: str
    detail: str


@dataclass(frozen=True)
class MdcEvent:
    time_tti: int
    relay: str
    receiver: str


class Henb:
    """Base-station state machine: paging, selection, key mediation, alarms."""

    def __init__(
        self,
        config: ProtocolConfig,
        registry: SigningRegistry,
        subscription_keys: dict[str, SymmetricKey],
        registered: set[str],
        trust_ledger: TrustLedger,
        meter=None,
        secure: bool = True,
    ):
        self.config = config
        self.registry = registry
        self.subscription_keys = subscription_keys
        self.registered = set(registered)
        self.trust = trust_ledger
        self.meter = meter or NullMeter()
        self.secure = secure
        self.phase = SessionPhase.SUBSCRIPTION
        self.audit: list[AuditRecord] = []
        self.mdc_events: list[MdcEvent] = []
        self._seq_in: dict[str, int] = {}
        self._seq_out: dict[str, int] = {}
        self._reset_subgroup_state(())

    # -- subgroup lifecycle -------------------------------------------------

    def _reset_subgroup_state(self, members: tuple[str, ...]) -> None:
        self.members = tuple(members)
        self.paged: set[str] = set()
        self.reports: dict[str, RachReport] = {}
        self.assignment: PairAssignment | None = None
        self.receiver_public: dict[str, int] = {}
        self.relay_public: dict[tuple[str, str], int] = {}
        self.deferred_requests: list[ServiceRequest] = []
        self.deferred_key_requests: list[PublicKeyRequest] = []
        self.alarm_deadline: dict[str, int] = {}
        self.announced: set[str] = set()

    def page(self, subscribers, drx_group: dict[str, int], drx_base_ttis: int) -> list[tuple[str, ...]]:
        """Partition subscribers into DRX subgroups ordered by next wake instant."""
        groups: dict[int, list[str]] = {}
        for device in sorted(subscribers):
            groups.setdefault(drx_group.get(device, 0), []).append(device)
        # Wake instant of group g is (g + 1) * base cycle: lower index wakes first.
        ordered = sorted(groups.items(), key=lambda item: (item[0] + 1) * drx_base_ttis)
        return [tuple(devs) for _, devs in ordered]

    def begin_subgroup(self, members: tuple[str, ...], now: int) -> Page:
        self._reset_subgroup_state(members)
        self.phase = SessionPhase.JOINING
        self.paged = set(members)
        return Page(subgroup_index=0, devices=tuple(members))

    # -- tagging helpers ----------------------------------------------------

    def _key_for(self, device: str) -> SymmetricKey:
        return self.subscription_keys[device]

    def tag_outbound(self, msg, device: str):
        # Base-station side: mains-powered, so no energy metering here.
        seq = self._seq_out.get(device, 0) + 1
        self._seq_out[device] = seq
        msg = replace(msg, seq=seq)
        return replace(msg, tag=crypto.auth_tag(tag_base(msg), self._key_for(device)))

    def _accept_inbound(self, msg, device: str, now: int) -> bool:
        """Tag, registration, replay, and phase checks for device messages."""
        if device not in self.registered or device not in self.subscription_keys:
            self.audit.append(AuditRecord(now, "unregistered", device))
            return False
        allowed = _PHASE_VARIANTS.get(self.phase, set())
        if msg.variant not in allowed:
            self.audit.append(AuditRecord(now, "out_of_phase", f"{msg.variant} from {device}"))
            return False
        if self.secure and (
            msg.tag is None or not crypto.verify_tag(tag_base(msg), self._key_for(device), msg.tag)
        ):
            self.audit.append(AuditRecord(now, "bad_tag", f"{msg.variant} from {device}"))
            return False
        if msg.seq <= self._seq_in.get(device, 0):
            self.audit.append(AuditRecord(now, "replay", f"{msg.variant} from {device}"))
            return False
        self._seq_in[device] = msg.seq
        return True

    # -- joining ------------------------------------------------------------

    def receive_rach(self, report: RachReport, now: int) -> bool:
        if report.device not in self.paged:
            self.audit.append(AuditRecord(now, "unpaged_rach", report.device))
            return False
        if not self._accept_inbound(report, report.device, now):
            return False
        self.reports[report.device] = report
        return True

    def all_reports_in(self) -> bool:
        return set(self.reports) == set(self.paged)

    def run_selection(self, selection_mode: str) -> PairAssignment:
        if not self.all_reports_in():
            raise ProcedureError("selection before all random-access reports arrived")
        profiles = {}
        for device, report in self.reports.items():
            ledger_profile = self.trust.profiles.get(device)
            mdc = ledger_profile.mdc if ledger_profile else 0
            profiles[device] = TrustProfile(device=device, srf=report.srf, mdc=mdc)
        cqi_reports = {
            device: CqiReport(
                device=device,
                downlink_cqi=report.downlink_cqi,
                d2d_cqi=dict(report.d2d_cqi),
            )
            for device, report in self.reports.items()
        }
        self.assignment = select_d2d_pairs(
            cqi_reports,
            profiles,
            cqi_threshold=self.config.sidelink_cqi_threshold,
            r_max=self.config.r_max,
            serve_direct_cqi=self.config.serve_direct_cqi,
            class_thresholds=self.config.class_thresholds,
            selection_mode=selection_mode,
        )
        return self.assignment

    def handle_service_request(self, request: ServiceRequest, now: int) -> list[PairAnnouncement]:
        """Authenticate the requester and, once selection is done, announce the pair.

        Requests racing ahead of the selection are parked and replayed by the
        caller after selection; unknown or unassigned devices are dropped with
        an audit record.
        """
        if not self._accept_inbound(request, request.device, now):
            return []
        if self.assignment is None:
            self.deferred_requests.append(request)
            return []
        return self._announce(request, now)

    def flush_deferred_requests(self, now: int) -> list[PairAnnouncement]:
        out: list[PairAnnouncement] = []
        for request in self.deferred_requests:
            out.extend(self._announce(request, now))
        self.deferred_requests.clear()
        return out

    def _announce(self, request: ServiceRequest, now: int) -> list[PairAnnouncement]:
        assert self.assignment is not None
        receiver = request.device
        relay = self.assignment.relay_of.get(receiver)
        if relay is None:
            self.audit.append(AuditRecord(now, "unassigned_request", receiver))
            return []
        self.receiver_public[receiver] = request.y_public
        self.announced.add(receiver)
        to_receiver = PairAnnouncement(
            to_device=receiver, receiver=receiver, relay=relay, peer_public=None, seq=0
        )
        to_relay = PairAnnouncement(
            to_device=relay, receiver=receiver, relay=relay, peer_public=request.y_public, seq=0
        )
        return [self.tag_outbound(to_receiver, receiver), self.tag_outbound(to_relay, relay)]

    def announce_pairs_plain(self, now: int) -> list[PairAnnouncement]:
        """Pair notifications without key material (non-secure variant)."""
        assert self.assignment is not None
        out = []
        for receiver in sorted(self.assignment.relay_of):
            relay = self.assignment.relay_of[receiver]
            self.announced.add(receiver)
            out.append(
                self.tag_outbound(
                    PairAnnouncement(
                        to_device=receiver, receiver=receiver, relay=relay, peer_public=None, seq=0
                    ),
                    receiver,
                )
            )
            out.append(
                self.tag_outbound(
                    PairAnnouncement(
                        to_device=relay, receiver=receiver, relay=relay, peer_public=None, seq=0
                    ),
                    relay,
                )
            )
        return out

    def all_assigned_announced(self) -> bool:
        assert self.assignment is not None
        return self.announced >= set(self.assignment.relay_of)

    def enter_data_transfer(self) -> None:
        self.phase = SessionPhase.DATA_TRANSFER

    # -- data transfer ------------------------------------------------------

    def handle_relay_report(self, report: RelayReport, now: int) -> list[PublicKeyResponse]:
        if not self._accept_inbound(report, report.relay, now):
            return []
        self.relay_public[(report.relay, report.receiver)] = report.y_public
        ready = [r for r in self.deferred_key_requests if r.relay == report.relay and r.receiver == report.receiver]
        self.deferred_key_requests = [r for r in self.deferred_key_requests if r not in ready]
        return [resp for req in ready for resp in self._respond_key_request(req, now)]

    def handle_pubkey_request(self, request: PublicKeyRequest, now: int) -> list[PublicKeyResponse]:
        if not self._accept_inbound(request, request.receiver, now):
            return []
        if (request.relay, request.receiver) not in self.relay_public:
            self.deferred_key_requests.append(request)
            return []
        return self._respond_key_request(request, now)

    def _respond_key_request(self, request: PublicKeyRequest, now: int) -> list[PublicKeyResponse]:
        y_j = self.relay_public[(request.relay, request.receiver)]
        self.alarm_deadline[request.receiver] = now + self.config.delta_t_ttis
        response = PublicKeyResponse(receiver=request.receiver, y_public=y_j, seq=0)
        return [self.tag_outbound(response, request.receiver)]

    def handle_alarm(self, beacon: AlarmBeacon, now: int) -> str | None:
        """Validate evidence and charge the relay's misbehaviour counter.

        Returns the banned relay id when the beacon holds up, else None.
        """
        if not self._accept_inbound(beacon, beacon.receiver, now):
            return None
        deadline = self.alarm_deadline.get(beacon.receiver)
        if deadline is None or now > deadline:
            self.audit.append(AuditRecord(now, "alarm_late", beacon.receiver))
            return None
        evidence = beacon.evidence
        if evidence.claimed_gw_signature is not None and self.registry.verify(
            evidence.claimed_payload_digest, evidence.claimed_gw_signature, GW_SIGNER
        ):
            self.audit.append(AuditRecord(now, "false_alarm", beacon.receiver))
            return None
        envelope = sidelink_envelope(evidence.relay_id, evidence.ciphertext_digest)
        if evidence.relay_signature is None or not self.registry.verify(
            envelope, evidence.relay_signature, evidence.relay_id
        ):
            self.audit.append(AuditRecord(now, "unattributable_alarm", beacon.receiver))
            return None
        self.trust.record_malicious(evidence.relay_id)
        self.mdc_events.append(MdcEvent(time_tti=now, relay=evidence.relay_id, receiver=beacon.receiver))
        return evidence.relay_id


@dataclass
class _RelayPeer:
    """Per-receiver relay state: the mediated key agreement for one pair."""

    receiver: str
    peer_public: int | None
    keypair: KeyPair | None = None
    sidelink_key: SymmetricKey | None = None


class Device:
    """A subscriber terminal; may act as direct member, relay, or D2D receiver.

    With `secure` off (plain-D2D and multicast baselines) the device skips
    all tagging, key agreement, and signature work.
    """

    def __init__(
        self,
        device_id: str,
        subscription_key: SymmetricKey,
        dhke: DhkeParams,
        registry: SigningRegistry,
        rng: Random,
        meter=None,
        malicious: bool = False,
        secure: bool = True,
    ):
        self.id = device_id
        self.subscription_key = subscription_key
        self.dhke = dhke
        self.registry = registry
        self.rng = rng
        self.meter = meter or NullMeter()
        self.malicious = malicious
        self.secure = secure

        self.paged = False
        self._seq = 0
        self._seq_in = 0
        # receiver-side state
        self.expected_relay: str | None = None
        self.keypair: KeyPair | None = None
        self.held_data: SidelinkData | None = None
        self.key_requested_at: int | None = None
        self.resolved = False
        # relay-side state, one entry per receiver this device forwards to
        self.relay_peers: dict[str, _RelayPeer] = {}
        self.payload: SignedPayload | None = None

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _tagged(self, msg):
        if not self.secure:
            return msg
        self.meter.crypto(self.id, "tag")
        return replace(msg, tag=crypto.auth_tag(tag_base(msg), self.subscription_key))

    def _verify_henb(self, msg, now: int) -> bool:
        if not self.secure:
            if msg.seq <= self._seq_in:
                return False
            self._seq_in = msg.seq
            return True
        if msg.tag is None or not crypto.verify_tag(tag_base(msg), self.subscription_key, msg.tag):
            return False
        if msg.seq <= self._seq_in:
            return False
        self._seq_in = msg.seq
        self.meter.crypto(self.id, "tag")
        return True

    # -- joining ------------------------------------------------------------

    def on_page(self, page: Page) -> None:
        if self.id in page.devices:
            self.paged = True

    def build_rach_report(self, downlink_cqi: int, d2d_cqi: dict[str, int], srf: float) -> RachReport:
        if not self.paged:
            raise ProcedureError(f"{self.id} attempted random access without paging")
        report = RachReport(
            device=self.id,
            downlink_cqi=downlink_cqi,
            d2d_cqi=dict(sorted(d2d_cqi.items())),
            srf=srf,
            seq=self._next_seq(),
        )
        return self._tagged(report)

    def build_service_request(self) -> ServiceRequest:
        self.meter.crypto(self.id, "dhke")
        self.keypair = crypto.dhke_keypair(self.dhke, self.rng)
        request = ServiceRequest(device=self.id, y_public=self.keypair.y_public, seq=self._next_seq())
        return self._tagged(request)

    def on_announcement(self, ann: PairAnnouncement, now: int) -> None:
        if not self._verify_henb(ann, now):
            return
        if ann.to_device != self.id:
            return
        if ann.receiver == self.id:
            self.expected_relay = ann.relay
            return
        peer = _RelayPeer(receiver=ann.receiver, peer_public=ann.peer_public)
        if ann.peer_public is not None:
            self.meter.crypto(self.id, "dhke")
            peer.keypair = crypto.dhke_keypair(self.dhke, self.rng)
            self.meter.crypto(self.id, "dhke")
            shared = crypto.dhke_shared(ann.peer_public, peer.keypair.x_secret, self.dhke)
            peer.sidelink_key = crypto.derive_key(shared)
        self.relay_peers[ann.receiver] = peer

    # -- relay side ---------------------------------------------------------

    def on_multicast_payload(self, signed: SignedPayload) -> None:
        self.payload = signed

    def make_sidelink(self, receiver: str, tamper: bool) -> tuple[SidelinkData, RelayReport | None]:
        """Encrypt, sign, and emit one sidelink transfer plus the key report.

        A tampering relay swaps the payload before encrypting, keeping the
        original provider signature; detection happens downstream.
        """
        if self.payload is None:
            raise ProcedureError(f"{self.id} has no multicast payload to forward")
        if receiver not in self.relay_peers:
            raise ProcedureError(f"{self.id} was never announced as relay for {receiver}")
        peer = self.relay_peers[receiver]
        signed = self.payload
        if tamper:
            signed = replace(signed, payload=_mutate(signed.payload))
        secure = peer.sidelink_key is not None
        if secure:
            package = signed.package()
            self.meter.crypto(self.id, "encrypt", bits=len(package) * 8)
            ciphertext = crypto.encrypt(package, peer.sidelink_key)
            envelope = sidelink_envelope(self.id, hashlib.sha256(ciphertext).digest())
            self.meter.crypto(self.id, "sign")
            signature = self.registry.sign(envelope, self.id)
        else:
            ciphertext = signed.payload
            signature = None
        data = SidelinkData(
            relay_id=self.id,
            receiver_id=receiver,
            ciphertext=ciphertext,
            payload_bits=signed.payload_bits,
            relay_signature=signature,
        )
        report = None
        if secure:
            report = self._tagged(
                RelayReport(
                    relay=self.id,
                    receiver=receiver,
                    y_public=peer.keypair.y_public,
                    seq=self._next_seq(),
                )
            )
        return data, report

    # -- receiver side ------------------------------------------------------

    def on_sidelink(self, data: SidelinkData, now: int, secure: bool) -> PublicKeyRequest | None:
        """Check transmitter identity and signature, then ask for its public key.

        Returns None when the packet is dropped (identity mismatch or bad
        signature) or when the variant runs without security.
        """
        self.held_data = data
        if not secure:
            return None
        if data.relay_id != self.expected_relay:
            self.held_data = None
            return None
        self.meter.crypto(self.id, "verify")
        if data.relay_signature is None or not self.registry.verify(
            data.envelope_bytes(), data.relay_signature, data.relay_id
        ):
            self.held_data = None
            return None
        self.key_requested_at = now
        return self._tagged(
            PublicKeyRequest(receiver=self.id, relay=data.relay_id, seq=self._next_seq())
        )

    def on_pubkey_response(self, response: PublicKeyResponse, now: int):
        """Decrypt and check provenance: accept, or raise an alarm with evidence.

        Returns ("accept", payload_bits) or ("alarm", AlarmBeacon). A
        decryption failure walks the alarm path like an invalid signature.
        """
        if not self._verify_henb(response, now):
            return None
        if self.held_data is None or self.keypair is None or self.resolved:
            return None
        self.resolved = True
        data = self.held_data
        self.meter.crypto(self.id, "dhke")
        shared = crypto.dhke_shared(response.y_public, self.keypair.x_secret, self.dhke)
        key = crypto.derive_key(shared)
        self.meter.crypto(self.id, "decrypt", bits=len(data.ciphertext) * 8)
        gw_signature = None
        payload = None
        try:
            package = crypto.decrypt(data.ciphertext, key)
            payload, gw_signature = split_package(package)
        except crypto.DecryptError:
            payload = None
        self.meter.crypto(self.id, "verify")
        if (
            payload is not None
            and gw_signature is not None
            and self.registry.verify(payload_digest(payload), gw_signature, GW_SIGNER)
        ):
            return ("accept", data.payload_bits)
        evidence = AlarmEvidence(
            relay_id=data.relay_id,
            ciphertext_digest=hashlib.sha256(data.ciphertext).digest(),
            relay_signature=data.relay_signature,
            claimed_payload_digest=payload_digest(payload if payload is not None else b""),
            claimed_gw_signature=gw_signature,
        )
        beacon = AlarmBeacon(receiver=self.id, evidence=evidence, seq=self._next_seq())
        return ("alarm", self._tagged(beacon))


def _mutate(payload: bytes) -> bytes:
    if not payload:
        return b"\x00"
    return bytes([payload[0] ^ 0xFF]) + payload[1:]
