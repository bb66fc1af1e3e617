"""
Where does the vanilla path reallocate twice?

A closed-form predicate answers that per configuration; every enumeration
re-runs the vanilla simulation as a cross-check and refuses to report a
value the two disagree on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .buffer_model import (
    CpuProfile,
    NetDevice,
    NicProfile,
    align_up,
    ll_reserved_space,
    rx_socket_buffer,
)
from .errors import InvalidArgument, InvariantViolation
from .header_codecs import IOAM_PTO_MAX, IOAM_PTO_MIN, SRV6_MAX_SEGMENTS, Mode
from .lwt_pipeline import (
    LEGAL_MODES,
    EncapConfig,
    Protocol,
    Resolver,
    encap_vanilla,
    hdrlen,
    resolve_dst,
)

IOAM_PTO_RANGE = range(IOAM_PTO_MIN, IOAM_PTO_MAX + 1, 4)
SRV6_SEGMENT_RANGE = range(1, SRV6_MAX_SEGMENTS + 1)
RPL_ADDRESS_RANGE = range(1, 64)

PARAM_NAMES = {
    Protocol.IOAM: "PTO bytes",
    Protocol.SRV6: "segments",
    Protocol.RPL: "addresses",
}

TABLE1_ROWS = (
    (Protocol.IOAM, Mode.INLINE),
    (Protocol.IOAM, Mode.ENCAP),
    (Protocol.SRV6, Mode.INLINE),
    (Protocol.SRV6, Mode.ENCAP),
    (Protocol.SRV6, Mode.L2ENCAP),
    (Protocol.SRV6, Mode.ENCAP_RED),
    (Protocol.SRV6, Mode.L2ENCAP_RED),
    (Protocol.RPL, Mode.INLINE),
)


@dataclass(frozen=True)
class TriggerCase:
    config: object
    cpu: CpuProfile
    nic: NicProfile
    dev: NetDevice
    triggers: bool
    hdrlen: int
    initial_headroom: int
    grown_headroom: int
    post_push_headroom: int
    reserved: int


def predict_trigger(config, cpu: CpuProfile, nic: NicProfile, dev: NetDevice,
                    resolver: Optional[Resolver] = None) -> TriggerCase:
    """Closed-form double-reallocation check for the vanilla path.

    ``config`` may be an :class:`EncapConfig` or a raw header length.
    """
    length = hdrlen(config)
    initial = nic.initial_headroom(dev, cpu)
    first = length + dev.hard_header_len
    grown = initial
    if first > initial:
        grown = initial + align_up(first - initial, cpu.cache_line_bytes)
    post_push = grown - length
    reserved = ll_reserved_space(resolve_dst(config, resolver, dev))
    return TriggerCase(
        config=config, cpu=cpu, nic=nic, dev=dev,
        triggers=first > initial and post_push < reserved,
        hdrlen=length, initial_headroom=initial, grown_headroom=grown,
        post_push_headroom=post_push, reserved=reserved,
    )


def simulated_realloc_count(config, cpu, nic, dev, resolver=None) -> int:
    skb = rx_socket_buffer(nic, dev, cpu)
    return encap_vanilla(skb, config, cpu, resolver, dev)[1].realloc_count


def check_trigger(config, cpu, nic, dev, resolver=None) -> TriggerCase:
    """``predict_trigger`` plus the simulation cross-check."""
    case = predict_trigger(config, cpu, nic, dev, resolver)
    count = simulated_realloc_count(config, cpu, nic, dev, resolver)
    if case.triggers != (count == 2):
        raise InvariantViolation(
            f"closed form says triggers={case.triggers} but simulation "
            f"reallocated {count} times for {config!r}"
        )
    return case


def default_range(protocol: Protocol) -> range:
    return {
        Protocol.IOAM: IOAM_PTO_RANGE,
        Protocol.SRV6: SRV6_SEGMENT_RANGE,
        Protocol.RPL: RPL_ADDRESS_RANGE,
    }[Protocol(protocol)]


def enumerate_triggers(protocol, mode, param_range: Optional[Iterable[int]],
                       cpu: CpuProfile, nic: NicProfile, dev: NetDevice,
                       cmpr_i: int = 0, cmpr_e: int = 0,
                       resolver: Optional[Resolver] = None) -> List[int]:
    """Sorted parameter values whose vanilla encap reallocates twice."""
    protocol = Protocol(protocol)
    params = default_range(protocol) if param_range is None else param_range
    hits = set()
    for p in params:
        config = EncapConfig(protocol, Mode(mode), p, cmpr_i, cmpr_e)
        if check_trigger(config, cpu, nic, dev, resolver).triggers:
            hits.add(p)
    return sorted(hits)


@dataclass
class TriggerReport:
    profile: str
    # (protocol, mode) -> triggering parameter values
    sections: Dict[Tuple[Protocol, Mode], List[int]] = field(default_factory=dict)

    def add(self, protocol, mode, values):
        self.sections[(Protocol(protocol), Mode(mode))] = sorted(set(values))

    def rows(self):
        for (protocol, mode), values in self.sections.items():
            yield protocol.value, mode.value, PARAM_NAMES[protocol], values

    def to_text(self) -> str:
        lines = [self.profile]
        for protocol, mode, kind, values in self.rows():
            shown = ", ".join(map(str, values)) if values else "none"
            lines.append(f"{protocol:<5} {mode:<12} {kind:<10} {shown}")
        return "\n".join(lines) + "\n"


def describe_profile(cpu, nic, dev) -> str:
    rx = "cache line" if nic.rx_headroom is None else f"{nic.rx_headroom} B"
    return (f"# cache line {cpu.cache_line_bytes} B; NIC {nic.name} (rx headroom {rx}"
            f"{', mac pulled' if nic.mac_pulled else ''}); device {dev.name} "
            f"(hard header {dev.hard_header_len} B, needed headroom {dev.needed_headroom} B)")


def table1_report(cpu: CpuProfile, nic: NicProfile, dev: NetDevice) -> TriggerReport:
    """Every protocol/mode row, each over its full parameter range.

    RPL is swept uncompressed; see :func:`rpl_theoretical_triggers` for the
    compressed case.
    """
    report = TriggerReport(describe_profile(cpu, nic, dev))
    for protocol, mode in TABLE1_ROWS:
        report.add(protocol, mode, enumerate_triggers(protocol, mode, None, cpu, nic, dev))
    return report


def rpl_theoretical_triggers(cmpr_i: int, cmpr_e: int, n_range: Iterable[int],
                             cpu: CpuProfile, nic: NicProfile,
                             dev: Optional[NetDevice] = None) -> List[int]:
    """Triggering RPL address counts under compression.

    Not limited by what iproute2 can actually configure.
    """
    dev = dev or NetDevice()
    return enumerate_triggers(Protocol.RPL, Mode.INLINE, n_range, cpu, nic, dev,
                              cmpr_i, cmpr_e)


def report_for(protocol, modes: Sequence[Mode], param_range, cpu, nic, dev,
               cmpr_i=0, cmpr_e=0) -> TriggerReport:
    protocol = Protocol(protocol)
    report = TriggerReport(describe_profile(cpu, nic, dev))
    for mode in modes:
        if Mode(mode) not in LEGAL_MODES[protocol]:
            raise InvalidArgument(f"{protocol.value} does not support {Mode(mode).value} mode")
        report.add(protocol, mode, enumerate_triggers(protocol, mode, param_range, cpu,
                                                      nic, dev, cmpr_i, cmpr_e))
    return report
