"""
LWT encapsulation paths over the buffer model.

``encap_vanilla`` asks for ``hdrlen + mac_len`` before pushing the header
and only then checks the output device's reserved space.  ``encap_patched``
consults the per-route dst cache first so that, once warm, the first request
already covers the device and a second reallocation cannot happen.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .buffer_model import (
    CpuProfile,
    NetDevice,
    NicProfile,
    ReallocEvent,
    SocketBuffer,
    cow_head,
    ll_reserved_space,
    push_header,
    rx_socket_buffer,
)
from .errors import ConfigurationError, InvalidArgument
from .header_codecs import Mode, ioam_overhead, rpl_overhead, srv6_overhead


class Protocol(str, enum.Enum):
    IOAM = "ioam"
    SRV6 = "srv6"
    RPL = "rpl"


class Strategy(str, enum.Enum):
    VANILLA = "vanilla"
    PATCHED = "patched"


LEGAL_MODES = {
    Protocol.IOAM: (Mode.INLINE, Mode.ENCAP, Mode.AUTO),
    Protocol.SRV6: (Mode.INLINE, Mode.ENCAP, Mode.ENCAP_RED, Mode.L2ENCAP, Mode.L2ENCAP_RED),
    Protocol.RPL: (Mode.INLINE,),
}


@dataclass(frozen=True)
class EncapConfig:
    """One LWT route: protocol, mode and the parameter that sizes the header.

    ``param`` is the PTO size for IOAM, the segment count for SRv6 and the
    address count for RPL.
    """

    protocol: Protocol
    mode: Mode
    param: int
    cmpr_i: int = 0
    cmpr_e: int = 0

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode not in LEGAL_MODES[self.protocol]:
            raise InvalidArgument(
                f"{self.protocol.value} does not support {self.mode.value} mode"
            )
        hdrlen(self)

    @property
    def route_key(self) -> str:
        return f"{self.protocol.value}/{self.mode.value}"

    def with_param(self, param: int) -> "EncapConfig":
        return EncapConfig(self.protocol, self.mode, param, self.cmpr_i, self.cmpr_e)


def ioam(pto_bytes, mode=Mode.INLINE):
    return EncapConfig(Protocol.IOAM, Mode(mode), pto_bytes)


def srv6(n_segments, mode=Mode.ENCAP):
    return EncapConfig(Protocol.SRV6, Mode(mode), n_segments)


def rpl(n_addresses, cmpr_i=0, cmpr_e=0):
    return EncapConfig(Protocol.RPL, Mode.INLINE, n_addresses, cmpr_i, cmpr_e)


def hdrlen(config: Union[EncapConfig, int]) -> int:
    """Bytes the encapsulation prepends.

    A bare ``int`` is taken as an already known header length, which lets
    callers sweep header sizes that no protocol produces.
    """
    if isinstance(config, int):
        if config < 0:
            raise InvalidArgument(f"header length must be >= 0, got {config}")
        return config
    if config.protocol is Protocol.IOAM:
        # forwarded traffic only, so auto always picks the tunnel
        mode = Mode.ENCAP if config.mode is Mode.AUTO else config.mode
        return ioam_overhead(config.param, mode)
    if config.protocol is Protocol.SRV6:
        return srv6_overhead(config.param, config.mode)
    return rpl_overhead(config.param, config.cmpr_i, config.cmpr_e)[0]


@dataclass(frozen=True)
class DstCache:
    device: Optional[NetDevice] = None

    @property
    def resolved(self) -> bool:
        return self.device is not None


EMPTY_CACHE = DstCache()


@dataclass(frozen=True)
class Resolver:
    """Maps a route to its post-encapsulation output device.

    Routes missing from ``routes`` go out the ingress device unless
    ``strict`` is set, in which case they are a configuration error.
    """

    routes: Mapping[str, NetDevice] = field(default_factory=dict)
    strict: bool = False


IDENTITY = Resolver()


def resolve_dst(config, resolver: Optional[Resolver], ingress: NetDevice) -> NetDevice:
    resolver = resolver or IDENTITY
    key = config.route_key if isinstance(config, EncapConfig) else "raw"
    try:
        return resolver.routes[key]
    except KeyError:
        if resolver.strict:
            raise ConfigurationError(f"no output device for route {key}") from None
        return ingress


def dst_dev_overhead(cache: DstCache, skb: SocketBuffer) -> int:
    if cache.device is not None:
        return ll_reserved_space(cache.device)
    return skb.mac_len


@dataclass(frozen=True)
class PacketTrace:
    strategy: Strategy
    hdrlen: int
    events: Tuple[ReallocEvent, ...]
    final_headroom: int
    # headroom right after each step: first cow, push, second cow
    checkpoints: Tuple[int, int, int] = (0, 0, 0)

    @property
    def realloc_count(self) -> int:
        return len(self.events)

    @property
    def bytes_copied(self) -> int:
        return sum(e.bytes_copied for e in self.events)


def _encap(skb, config, cpu, first_request, dev_of, strategy):
    length = hdrlen(config)
    start = len(skb.realloc_events)
    skb = cow_head(skb, length + first_request, cpu)
    after_cow = skb.headroom
    skb = push_header(skb, length)
    after_push = skb.headroom
    dev = dev_of()
    skb = cow_head(skb, ll_reserved_space(dev), cpu)
    trace = PacketTrace(
        strategy=strategy,
        hdrlen=length,
        events=skb.realloc_events[start:],
        final_headroom=skb.headroom,
        checkpoints=(after_cow, after_push, skb.headroom),
    )
    return skb, trace, dev


def encap_vanilla(skb: SocketBuffer, config, cpu: CpuProfile,
                  resolver: Optional[Resolver] = None,
                  ingress: Optional[NetDevice] = None):
    """Run the unpatched encap; returns ``(skb, trace)``."""
    ingress = ingress or NetDevice(hard_header_len=skb.mac_len)
    skb, trace, _ = _encap(skb, config, cpu, skb.mac_len,
                           lambda: resolve_dst(config, resolver, ingress),
                           Strategy.VANILLA)
    return skb, trace


def encap_patched(skb: SocketBuffer, config, cpu: CpuProfile, cache: DstCache,
                  resolver: Optional[Resolver] = None,
                  ingress: Optional[NetDevice] = None):
    """Run the patched encap; returns ``(skb, trace, cache)``."""
    ingress = ingress or NetDevice(hard_header_len=skb.mac_len)

    def dev_of():
        if cache.device is not None:
            return cache.device
        return resolve_dst(config, resolver, ingress)

    skb, trace, dev = _encap(skb, config, cpu, dst_dev_overhead(cache, skb),
                             dev_of, Strategy.PATCHED)
    return skb, trace, DstCache(dev)


def run_flow(config, cpu: CpuProfile, nic: NicProfile, dev: NetDevice,
             resolver: Optional[Resolver] = None,
             strategy: Strategy = Strategy.VANILLA, n_packets: int = 1,
             payload_len: int = 0) -> List[PacketTrace]:
    """Push ``n_packets`` fresh RX buffers through one route."""
    if n_packets < 1:
        raise InvalidArgument(f"a flow needs at least one packet, got {n_packets}")
    strategy = Strategy(strategy)
    cache = EMPTY_CACHE
    traces = []
    while len(traces) < n_packets:
        skb = rx_socket_buffer(nic, dev, cpu, payload_len)
        if strategy is Strategy.VANILLA:
            _, trace = encap_vanilla(skb, config, cpu, resolver, dev)
            steady = True
        else:
            _, trace, new_cache = encap_patched(skb, config, cpu, cache, resolver, dev)
            steady = new_cache == cache
            cache = new_cache
        traces.append(trace)
        if steady:
            # every input of the next packet equals this one's
            traces.extend([trace] * (n_packets - len(traces)))
    return traces
