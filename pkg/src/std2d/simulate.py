"""Session execution for every delivery variant, plus the run metrics.

A run is one multicast session under one of five variants:

  cms      everyone in one multicast pinned to the worst member's rate
  unicast  cell-edge devices served individually at their own rate
  d2d      sidelink offloading, relays picked by link quality only, no security
  sd2d     secure sidelinks, relay reliability from the misbehaviour counter only
  std2d    secure sidelinks, reliability from social score plus counter

Everything is event-driven over the deterministic queue; repeated runs with
the same config and seed replay identically, message for message.
"""

from dataclasses import dataclass, field
from enum import Enum
from random import Random

from .config import config_hash
from .crypto import SigningRegistry
from .energy import EnergyAccountant, EnergyLedger
from .engine import Simulator
from .messages import GW_SIGNER, HENB_ID, MulticastData, TraceRecord
from .protocol import CoreNetwork, Device, Henb
from .radio import (
    NBIOT_CARRIER_HZ,
    SIDELINK_TOTAL_RBS,
    SPECTRAL_EFFICIENCY,
    CqiReport,
    cms_rate,
    d2d_rate,
    finish_tti,
)
from .scenario import Scenario, ScenarioConfig, generate_scenario
from .trust import TrustLedger

SECURE_VARIANTS = ("sd2d", "std2d")

_SELECTION_MODE = {"d2d": "cqi_only", "sd2d": "mdc_only", "std2d": "srf_mdc"}

RESULT_COLUMNS = (
    "seed",
    "variant",
    "malicious_pct",
    "file_bits",
    "wasted_capacity_pct",
    "mean_noncorrupted_kbits",
    "wasted_energy_frac",
    "relay_sec_pct",
    "receiver_sec_pct",
    "download_energy_j",
    "fallback_flag",
)


class Outcome(Enum):
    ACCEPTED = "accepted"
    CORRUPTED = "corrupted"
    UNSERVED = "unserved"


@dataclass
class TransferRecord:
    """One payload delivery attempt toward a cell-edge device."""

    receiver: str
    relay: str | None
    payload_bits: int
    via: str                 # sidelink | cms | unicast
    corrupted: bool = False
    accepted: bool = False
    verified: bool = False   # reached the provenance check at the receiver


@dataclass
class RunTrace:
    messages: list[TraceRecord] = field(default_factory=list)
    transfers: list[TransferRecord] = field(default_factory=list)
    statuses: dict[str, Outcome] = field(default_factory=dict)
    receivers: tuple[str, ...] = ()
    relays: tuple[str, ...] = ()
    direct: tuple[str, ...] = ()
    fallback: bool = False
    mdc_events: list = field(default_factory=list)
    audit: list = field(default_factory=list)


@dataclass
class RunResult:
    seed: int
    variant: str
    malicious_pct: float
    file_bits: int
    wasted_capacity_pct: float
    mean_noncorrupted_kbits: float
    wasted_energy_frac: float
    relay_sec_pct: float
    receiver_sec_pct: float
    download_energy_j: float
    fallback_flag: int
    n_unserved: int
    config_hash: str
    trace: RunTrace
    ledger: EnergyLedger

    def csv_row(self) -> dict[str, str]:
        return {
            "seed": str(self.seed),
            "variant": self.variant,
            "malicious_pct": _fmt(self.malicious_pct),
            "file_bits": str(self.file_bits),
            "wasted_capacity_pct": _fmt(self.wasted_capacity_pct),
            "mean_noncorrupted_kbits": _fmt(self.mean_noncorrupted_kbits),
            "wasted_energy_frac": _fmt(self.wasted_energy_frac),
            "relay_sec_pct": _fmt(self.relay_sec_pct),
            "receiver_sec_pct": _fmt(self.receiver_sec_pct),
            "download_energy_j": _fmt(self.download_energy_j),
            "fallback_flag": str(self.fallback_flag),
        }


def _fmt(value: float) -> str:
    return f"{value:.10g}"


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def metric_wasted_capacity(trace: RunTrace) -> float:
    """Corrupted sidelink payload bits over all sidelink payload bits, in percent."""
    sidelink = [t for t in trace.transfers if t.via == "sidelink"]
    total = sum(t.payload_bits for t in sidelink)
    if total == 0:
        return 0.0
    corrupted = sum(t.payload_bits for t in sidelink if t.corrupted)
    return corrupted / total * 100.0


def metric_noncorrupted_kbits(trace: RunTrace) -> float:
    """Mean clean payload kilobits landed per cell-edge device."""
    if not trace.receivers:
        return 0.0
    per_receiver = {r: 0.0 for r in trace.receivers}
    for t in trace.transfers:
        if t.accepted and not t.corrupted and t.receiver in per_receiver:
            per_receiver[t.receiver] += t.payload_bits / 1000.0
    return sum(per_receiver.values()) / len(per_receiver)


def metric_wasted_energy(ledger: EnergyLedger, variant: str, receivers) -> float:
    """Mean wasted-energy fraction over cell-edge devices.

    Without security the waste is the energy burnt on corrupted payloads;
    with security the cost of the protection machinery counts too.
    """
    receivers = list(receivers)
    if not receivers:
        return 0.0
    fractions = []
    for device in receivers:
        entry = ledger.entry(device)
        total = entry.e_total
        if total == 0:
            fractions.append(0.0)
            continue
        wasted = entry.e_malicious
        if variant in SECURE_VARIANTS:
            wasted += entry.e_security
        fractions.append(wasted / total)
    return sum(fractions) / len(fractions)


def metric_security_energy_pct(ledger: EnergyLedger, relays, receivers) -> tuple[float, float]:
    """Security share of total energy, averaged within the relay and receiver roles."""

    def role_pct(devices) -> float:
        devices = list(devices)
        if not devices:
            return 0.0
        shares = []
        for device in devices:
            entry = ledger.entry(device)
            shares.append(0.0 if entry.e_total == 0 else entry.e_security / entry.e_total * 100.0)
        return sum(shares) / len(shares)

    return role_pct(relays), role_pct(receivers)


def metric_download_energy(ledger: EnergyLedger, trace: RunTrace) -> tuple[float, int]:
    """Mean total energy per cell-edge device that obtained the payload.

    Devices that never obtained it are excluded from the mean and counted
    separately.
    """
    served = [r for r in trace.receivers if trace.statuses.get(r) is Outcome.ACCEPTED]
    excluded = len(trace.receivers) - len(served)
    if not served:
        return 0.0, excluded
    mean_j = sum(ledger.entry(r).e_total for r in served) / len(served)
    return mean_j, excluded


# ---------------------------------------------------------------------------
# session runner
# ---------------------------------------------------------------------------


@dataclass
class _PairState:
    receiver: str
    relay: str
    relay_ready: bool = False
    receiver_ready: bool = False
    payload_ready: bool = False
    started: bool = False


class SessionRunner:
    """Drives one multicast session over the event queue."""

    def __init__(self, scenario: Scenario, trust_ledger: TrustLedger | None = None):
        cfg = scenario.config
        self.scenario = scenario
        self.cfg = cfg
        self.variant = cfg.variant
        self.secure = cfg.variant in SECURE_VARIANTS
        self.sim = Simulator()
        self.frame = cfg.radio.frame
        self.sizes = cfg.protocol.sizes
        self.control_rate = cfg.protocol.control_rate_bps
        self.accountant = EnergyAccountant(cfg.energy)

        seed = cfg.seed
        ids = scenario.device_ids()
        self.registry = SigningRegistry()
        self.registry.register(GW_SIGNER, f"{seed}:gw".encode())
        for device in ids:
            self.registry.register(device, f"{seed}:dev:{device}".encode())

        sub_keys = {device: scenario.subscription_key(device) for device in ids}
        self.trust_ledger = trust_ledger if trust_ledger is not None else TrustLedger()
        for info in scenario.devices:
            if info.device_id not in self.trust_ledger.profiles:
                self.trust_ledger.add(info.device_id, srf=info.srf)

        self.henb = Henb(
            cfg.protocol,
            self.registry,
            sub_keys,
            set(ids),
            self.trust_ledger,
            meter=self.accountant,
            secure=self.secure,
        )
        self.core = CoreNetwork(self.registry, set(ids))
        dhke = cfg.crypto.dhke_params()
        malicious = scenario.malicious_ids()
        self.devices = {
            device: Device(
                device,
                sub_keys[device],
                dhke,
                self.registry,
                Random(f"{seed}:key:{device}"),
                meter=self.accountant,
                malicious=device in malicious,
                secure=self.secure,
            )
            for device in ids
        }
        self.srf = {info.device_id: info.srf for info in scenario.devices}
        self.dl_rate = {
            device: NBIOT_CARRIER_HZ * SPECTRAL_EFFICIENCY[scenario.downlink_cqi[device]]
            for device in ids
        }

        self.trace = RunTrace()
        self.transfer_of: dict[str, TransferRecord] = {}
        self.all_receivers: list[str] = []
        self.all_relays: set[str] = set()
        self.all_direct: set[str] = set()
        self.signed = None
        self.subgroups: list[tuple[str, ...]] = []
        self.sub_idx = -1
        self._reset_subgroup_state(())

    # -- bookkeeping ----------------------------------------------------

    def _reset_subgroup_state(self, members) -> None:
        self.sg_members = tuple(members)
        self.sg_receivers: set[str] = set()
        self.pairs: dict[str, _PairState] = {}
        self.multicast_started = False
        self.sg_deliveries_expected = 0
        self.sg_deliveries_done = 0
        self.pending_alarms = 0
        self.sg_done = False
        self.sidelink_queue: list[str] = []
        self.sidelink_active = 0
        self.max_concurrent = 0
        self.rb_per_pair = 0

    def _trace(self, source: str, destination: str, msg, size_bits: int) -> None:
        self.trace.messages.append(
            TraceRecord(
                time_tti=self.sim.now,
                source=source,
                destination=destination,
                variant=msg.variant,
                size_bits=size_bits,
            )
        )

    def _tamper_draw(self, relay: str, receiver: str) -> bool:
        p = self.cfg.adversary.tamper_probability
        if p >= 1.0:
            return True
        if p <= 0.0:
            return False
        return Random(f"{self.cfg.seed}:tamper:{relay}:{receiver}").random() < p

    # -- control-plane transport -----------------------------------------

    def _send_dl_control(self, msg, device: str, category: str, handler) -> int:
        bits = self.sizes.size_of(msg)
        finish = finish_tti(bits, self.control_rate, self.frame, "DL", self.sim.now)
        self.sim.schedule(finish, self._arrive_dl_control, msg, device, bits, category, handler)
        return finish

    def _arrive_dl_control(self, msg, device: str, bits: int, category: str, handler) -> None:
        self.accountant.message_rx(device, bits, self.control_rate, category)
        self._trace(HENB_ID, device, msg, bits)
        handler(device, msg)

    def _send_ul_control(self, msg, device: str, category: str, handler) -> int:
        bits = self.sizes.size_of(msg)
        self.accountant.message_tx(device, bits, self.control_rate, category)
        finish = finish_tti(bits, self.control_rate, self.frame, "UL", self.sim.now)
        self.sim.schedule(finish, self._arrive_ul_control, msg, device, bits, handler)
        return finish

    def _arrive_ul_control(self, msg, device: str, bits: int, handler) -> None:
        self._trace(device, HENB_ID, msg, bits)
        handler(device, msg)

    # -- session ----------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.cfg
        ids = sorted(self.devices)
        self.core.subscribe("mtms-session", ids)
        payload = self._make_payload()
        self.signed = self.core.initialize(payload, cfg.file_bits, sign=self.variant != "d2d")
        drx_map = {info.device_id: info.drx_group for info in self.scenario.devices}
        self.subgroups = self.henb.page(ids, drx_map, cfg.drx_base_ttis)
        if self.subgroups:
            self.sim.schedule(cfg.drx_base_ttis, self._start_subgroup, 0)
        self.sim.run()
        return self._finalize()

    def _make_payload(self) -> bytes:
        n_bytes = (self.cfg.file_bits + 7) // 8
        return Random(f"{self.cfg.seed}:payload").randbytes(n_bytes)

    def _start_subgroup(self, index: int) -> None:
        self.sub_idx = index
        members = self.subgroups[index]
        self._reset_subgroup_state(members)
        page = self.henb.begin_subgroup(members, self.sim.now)
        for device in members:
            self._send_dl_control(page, device, "useful", self._on_page)

    # -- joining -----------------------------------------------------------

    def _on_page(self, device: str, page) -> None:
        dev = self.devices[device]
        dev.on_page(page)
        cqi = self.scenario.downlink_cqi[device]
        report = dev.build_rach_report(cqi, self.scenario.neighbor_cqi[device], self.srf[device])
        arrival = self._send_ul_control(report, device, "useful", self._on_rach)
        if self.secure and cqi < self.cfg.protocol.serve_direct_cqi:
            self.sim.schedule(
                arrival + self.cfg.protocol.request_delay_ttis, self._send_service_request, device
            )

    def _on_rach(self, device: str, report) -> None:
        if self.henb.receive_rach(report, self.sim.now) and self.henb.all_reports_in():
            self._run_selection()

    def _send_service_request(self, device: str) -> None:
        request = self.devices[device].build_service_request()
        self._send_ul_control(request, device, "security", self._on_service_request)

    def _run_selection(self) -> None:
        if self.variant == "cms":
            self._classify_edge()
            self._serve_all_cms()
            return
        if self.variant == "unicast":
            self._classify_edge()
            self._serve_unicast()
            return
        assignment = self.henb.run_selection(_SELECTION_MODE[self.variant])
        self.sg_receivers = set(assignment.receivers)
        self.all_receivers.extend(assignment.receivers)
        self.all_direct.update(assignment.direct)
        if assignment.fallback:
            self.trace.fallback = True
            self._serve_all_cms()
            return
        self.all_relays.update(assignment.relays())
        self.pairs = {
            receiver: _PairState(receiver=receiver, relay=relay)
            for receiver, relay in sorted(assignment.relay_of.items())
        }
        n_pairs = len(self.pairs)
        if n_pairs:
            self.max_concurrent = min(n_pairs, SIDELINK_TOTAL_RBS)
            self.rb_per_pair = SIDELINK_TOTAL_RBS // self.max_concurrent
        if self.variant == "d2d":
            for ann in self.henb.announce_pairs_plain(self.sim.now):
                self._send_dl_control(ann, ann.to_device, "useful", self._on_announcement)
        else:
            for ann in self.henb.flush_deferred_requests(self.sim.now):
                self._send_dl_control(ann, ann.to_device, "useful", self._on_announcement)
        self._maybe_start_multicast()

    def _classify_edge(self) -> None:
        """Direct/edge split for the variants that skip pair selection."""
        threshold = self.cfg.protocol.serve_direct_cqi
        receivers = sorted(
            d for d in self.sg_members if self.scenario.downlink_cqi[d] < threshold
        )
        self.sg_receivers = set(receivers)
        self.all_receivers.extend(receivers)
        self.all_direct.update(d for d in self.sg_members if d not in self.sg_receivers)

    def _on_service_request(self, device: str, request) -> None:
        for ann in self.henb.handle_service_request(request, self.sim.now):
            self._send_dl_control(ann, ann.to_device, "useful", self._on_announcement)
        self._maybe_start_multicast()

    def _on_announcement(self, device: str, ann) -> None:
        self.devices[device].on_announcement(ann, self.sim.now)
        state = self.pairs.get(ann.receiver)
        if state is None:
            return
        if device == state.relay:
            state.relay_ready = True
        if device == state.receiver:
            state.receiver_ready = True
        self._maybe_start_sidelink(state)

    def _maybe_start_multicast(self) -> None:
        if self.multicast_started or self.henb.assignment is None or self.henb.assignment.fallback:
            return
        if self.henb.all_assigned_announced():
            direct = self.henb.assignment.direct
            self._start_multicast(rate_group=direct, audience=direct)

    # -- data transfer -------------------------------------------------------

    def _cms_rate_for(self, devices) -> float:
        reports = [
            CqiReport(device=d, downlink_cqi=self.scenario.downlink_cqi[d]) for d in devices
        ]
        return cms_rate(reports)

    def _start_multicast(self, rate_group, audience) -> None:
        """One multicast transmission at the worst rate of `rate_group`,
        delivered to every device in `audience`."""
        self.multicast_started = True
        self.henb.enter_data_transfer()
        audience = sorted(audience)
        if not audience:
            self._check_subgroup_done()
            return
        rate = self._cms_rate_for(rate_group)
        if rate <= 0:
            # Group unschedulable: someone sits at CQI 0.
            for device in audience:
                self.trace.statuses.setdefault(device, Outcome.UNSERVED)
            self.sg_deliveries_expected = 0
            self._check_subgroup_done()
            return
        msg = MulticastData(
            payload=self.signed.payload,
            payload_bits=self.signed.payload_bits,
            gw_signature=self.signed.gw_signature,
        )
        bits = self.sizes.size_of(msg)
        finish = finish_tti(bits, rate, self.frame, "DL", self.sim.now + 1)
        self.sg_deliveries_expected = len(audience)
        for device in audience:
            self.sim.schedule(finish, self._on_multicast_delivery, device, msg, bits, rate)

    def _serve_all_cms(self) -> None:
        """Fallback and plain-multicast path: one transmission reaches everyone."""
        self._start_multicast(rate_group=self.sg_members, audience=self.sg_members)

    def _serve_unicast(self) -> None:
        """Direct group by multicast, cell-edge devices one by one at their own rate."""
        self.multicast_started = True
        self.henb.enter_data_transfer()
        direct = sorted(d for d in self.sg_members if d not in self.sg_receivers)
        receivers = sorted(self.sg_receivers)
        self.sg_deliveries_expected = len(direct) + len(receivers)
        msg = MulticastData(
            payload=self.signed.payload,
            payload_bits=self.signed.payload_bits,
            gw_signature=self.signed.gw_signature,
        )
        bits = self.sizes.size_of(msg)
        start = self.sim.now + 1
        if direct:
            rate = self._cms_rate_for(direct)
            finish = finish_tti(bits, rate, self.frame, "DL", start)
            for device in direct:
                self.sim.schedule(finish, self._on_multicast_delivery, device, msg, bits, rate)
            start = finish
        for device in receivers:
            rate = self.dl_rate[device]
            if rate <= 0:
                self.trace.statuses[device] = Outcome.UNSERVED
                self.sg_deliveries_expected -= 1
                continue
            finish = finish_tti(bits, rate, self.frame, "DL", start)
            self.sim.schedule(finish, self._on_unicast_delivery, device, msg, bits, rate)
            start = finish
        self._check_subgroup_done()

    def _on_multicast_delivery(self, device: str, msg, bits: int, rate: float) -> None:
        self.accountant.message_rx(device, bits, rate, "useful")
        self._trace(HENB_ID, device, msg, bits)
        self.devices[device].on_multicast_payload(self.signed)
        self.sg_deliveries_done += 1
        self.trace.statuses[device] = Outcome.ACCEPTED
        if device in self.sg_receivers:
            record = TransferRecord(
                receiver=device,
                relay=None,
                payload_bits=msg.payload_bits,
                via="cms",
                accepted=True,
            )
            self.trace.transfers.append(record)
        for state in self.pairs.values():
            if state.relay == device:
                state.payload_ready = True
                self._maybe_start_sidelink(state)
        self._check_subgroup_done()

    def _on_unicast_delivery(self, device: str, msg, bits: int, rate: float) -> None:
        self.accountant.message_rx(device, bits, rate, "useful")
        self._trace(HENB_ID, device, msg, bits)
        self.devices[device].on_multicast_payload(self.signed)
        self.sg_deliveries_done += 1
        self.trace.statuses[device] = Outcome.ACCEPTED
        self.trace.transfers.append(
            TransferRecord(
                receiver=device,
                relay=None,
                payload_bits=msg.payload_bits,
                via="unicast",
                accepted=True,
            )
        )
        self._check_subgroup_done()

    # -- sidelink -------------------------------------------------------------

    def _maybe_start_sidelink(self, state: _PairState) -> None:
        if state.started:
            return
        if not (state.relay_ready and state.receiver_ready and state.payload_ready):
            return
        state.started = True
        self.sidelink_queue.append(state.receiver)
        self._pump_sidelink()

    def _pump_sidelink(self) -> None:
        while self.sidelink_queue and self.sidelink_active < self.max_concurrent:
            receiver = self.sidelink_queue.pop(0)
            state = self.pairs[receiver]
            self.sidelink_active += 1
            relay_dev = self.devices[state.relay]
            tamper = relay_dev.malicious and self._tamper_draw(state.relay, receiver)
            data, report = relay_dev.make_sidelink(receiver, tamper)
            record = TransferRecord(
                receiver=receiver,
                relay=state.relay,
                payload_bits=data.payload_bits,
                via="sidelink",
                corrupted=tamper,
            )
            self.trace.transfers.append(record)
            self.transfer_of[receiver] = record
            bits = self.sizes.size_of(data)
            cqi = self.scenario.neighbor_cqi[receiver][state.relay]
            rate = d2d_rate(cqi, self.rb_per_pair)
            self.accountant.message_tx(state.relay, bits, rate, "useful")
            finish = finish_tti(bits, rate, self.frame, "UL", self.sim.now)
            self.sim.schedule(finish, self._on_sidelink_delivery, receiver, data, bits, rate)
            if report is not None:
                self._send_ul_control(report, state.relay, "security", self._on_relay_report)

    def _on_sidelink_delivery(self, receiver: str, data, bits: int, rate: float) -> None:
        self.sidelink_active -= 1
        self._pump_sidelink()
        record = self.transfer_of[receiver]
        self.accountant.message_rx(
            receiver, bits, rate, "malicious" if record.corrupted else "useful"
        )
        self._trace(data.relay_id, receiver, data, bits)
        dev = self.devices[receiver]
        if not self.secure:
            dev.held_data = data
            record.accepted = True
            self.trace.statuses[receiver] = Outcome.ACCEPTED
            self._check_subgroup_done()
            return
        request = dev.on_sidelink(data, self.sim.now, secure=True)
        if request is None:
            self.trace.statuses[receiver] = Outcome.UNSERVED
            self._check_subgroup_done()
            return
        self._send_ul_control(request, receiver, "security", self._on_pubkey_request)
        self.sim.schedule(
            self.sim.now + self.cfg.protocol.delta_t_ttis, self._on_receiver_timeout, receiver
        )

    def _on_relay_report(self, relay: str, report) -> None:
        for response in self.henb.handle_relay_report(report, self.sim.now):
            self._send_dl_control(response, response.receiver, "security", self._on_pubkey_response)

    def _on_pubkey_request(self, receiver: str, request) -> None:
        for response in self.henb.handle_pubkey_request(request, self.sim.now):
            self._send_dl_control(response, response.receiver, "security", self._on_pubkey_response)

    def _on_pubkey_response(self, receiver: str, response) -> None:
        result = self.devices[receiver].on_pubkey_response(response, self.sim.now)
        if result is None:
            return
        kind, obj = result
        record = self.transfer_of[receiver]
        record.verified = True
        if kind == "accept":
            record.accepted = True
            self.trace.statuses[receiver] = Outcome.ACCEPTED
        else:
            self.trace.statuses[receiver] = Outcome.CORRUPTED
            self.pending_alarms += 1
            self._send_ul_control(obj, receiver, "security", self._on_alarm)
        self._check_subgroup_done()

    def _on_alarm(self, receiver: str, beacon) -> None:
        self.henb.handle_alarm(beacon, self.sim.now)
        self.pending_alarms -= 1
        self._check_subgroup_done()

    def _on_receiver_timeout(self, receiver: str) -> None:
        if self.trace.statuses.get(receiver) is None:
            self.devices[receiver].resolved = True
            self.trace.statuses[receiver] = Outcome.UNSERVED
            self._check_subgroup_done()

    # -- completion ------------------------------------------------------------

    def _check_subgroup_done(self) -> None:
        if self.sg_done or not self.multicast_started:
            return
        if self.sg_deliveries_done < self.sg_deliveries_expected:
            return
        if any(self.trace.statuses.get(r) is None for r in self.sg_receivers):
            return
        if self.pending_alarms > 0:
            return
        self.sg_done = True
        if self.sub_idx + 1 < len(self.subgroups):
            self.sim.schedule_in(self.cfg.drx_base_ttis, self._start_subgroup, self.sub_idx + 1)

    def _finalize(self) -> RunResult:
        trace = self.trace
        for receiver in self.all_receivers:
            trace.statuses.setdefault(receiver, Outcome.UNSERVED)
        trace.receivers = tuple(sorted(set(self.all_receivers)))
        trace.relays = tuple(sorted(self.all_relays))
        trace.direct = tuple(sorted(self.all_direct))
        trace.mdc_events = list(self.henb.mdc_events)
        trace.audit = list(self.henb.audit)

        ledger = self.accountant.ledger
        download_j, n_unserved = metric_download_energy(ledger, trace)
        relay_pct, receiver_pct = metric_security_energy_pct(
            ledger, trace.relays, trace.receivers
        )
        return RunResult(
            seed=self.cfg.seed,
            variant=self.variant,
            malicious_pct=self.cfg.adversary.malicious_fraction * 100.0,
            file_bits=self.cfg.file_bits,
            wasted_capacity_pct=metric_wasted_capacity(trace),
            mean_noncorrupted_kbits=metric_noncorrupted_kbits(trace),
            wasted_energy_frac=metric_wasted_energy(ledger, self.variant, trace.receivers),
            relay_sec_pct=relay_pct,
            receiver_sec_pct=receiver_pct,
            download_energy_j=download_j,
            fallback_flag=int(trace.fallback),
            n_unserved=n_unserved,
            config_hash=config_hash(self.cfg),
            trace=trace,
            ledger=ledger,
        )


def run_scenario(config: ScenarioConfig, trust_ledger: TrustLedger | None = None) -> RunResult:
    """Generate the scenario for `config` and execute one session."""
    scenario = generate_scenario(config)
    return SessionRunner(scenario, trust_ledger).run()
