"""
Socket buffer headroom model.

Byte accounting for a simulated ``sk_buff``: headroom, data and tailroom,
the cache-line stepped growth of ``skb_cow_head()`` and the 16-byte aligned
reserved space a device asks for.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from .errors import HeadroomUnderflow, InvalidArgument

CACHE_LINE_SIZES = (32, 64, 128, 256)
LL_ALIGN = 16


def align_up(value: int, multiple: int) -> int:
    """Smallest multiple of ``multiple`` that is >= ``value``."""
    if multiple <= 0:
        raise InvalidArgument(f"alignment multiple must be positive, got {multiple}")
    return -(-value // multiple) * multiple


@dataclass(frozen=True)
class CpuProfile:
    cache_line_bytes: int = 64

    def __post_init__(self):
        if self.cache_line_bytes not in CACHE_LINE_SIZES:
            raise InvalidArgument(
                f"cache line must be one of {CACHE_LINE_SIZES}, got {self.cache_line_bytes}"
            )


@dataclass(frozen=True)
class NetDevice:
    name: str = "eth0"
    hard_header_len: int = 14
    needed_headroom: int = 0

    def __post_init__(self):
        if self.hard_header_len < 0 or self.needed_headroom < 0:
            raise InvalidArgument(f"negative header sizes on device {self.name!r}")


@dataclass(frozen=True)
class NicProfile:
    """Driver RX headroom policy.

    ``rx_headroom`` is a fixed byte count, or ``None`` for a headroom of one
    cache line (the i40e legacy-rx behaviour).  When ``mac_pulled`` is set the
    data pointer already sits past the link-layer header, so that header
    counts as headroom too.
    """

    name: str
    rx_headroom: Optional[int] = 192
    mac_pulled: bool = True

    def __post_init__(self):
        if self.rx_headroom is not None and self.rx_headroom < 0:
            raise InvalidArgument(f"negative rx headroom on NIC {self.name!r}")

    @property
    def cache_line_sized(self) -> bool:
        return self.rx_headroom is None

    def initial_headroom(self, dev: NetDevice, cpu: CpuProfile) -> int:
        base = cpu.cache_line_bytes if self.rx_headroom is None else self.rx_headroom
        return base + (dev.hard_header_len if self.mac_pulled else 0)


@dataclass(frozen=True)
class ReallocEvent:
    requested: int
    old_headroom: int
    new_headroom: int
    bytes_copied: int


@dataclass(frozen=True)
class SocketBuffer:
    headroom: int
    data_len: int
    tailroom: int = 0
    mac_len: int = 0
    realloc_events: Tuple[ReallocEvent, ...] = field(default=())

    def __post_init__(self):
        for name in ("headroom", "data_len", "tailroom", "mac_len"):
            if getattr(self, name) < 0:
                raise InvalidArgument(f"{name} must be >= 0")


def cow_head(skb: SocketBuffer, requested: int, cpu: CpuProfile) -> SocketBuffer:
    """Ensure at least ``requested`` bytes of headroom.

    Growth starts from the current headroom and adds whole cache lines until
    the request fits; each call that grows appends exactly one event.
    """
    if requested < 0:
        raise InvalidArgument(f"requested headroom must be >= 0, got {requested}")
    if skb.headroom >= requested:
        return skb
    grown = skb.headroom + align_up(requested - skb.headroom, cpu.cache_line_bytes)
    event = ReallocEvent(
        requested=requested,
        old_headroom=skb.headroom,
        new_headroom=grown,
        bytes_copied=skb.data_len,
    )
    return replace(skb, headroom=grown, realloc_events=skb.realloc_events + (event,))


def ll_reserved_space(dev: NetDevice) -> int:
    return align_up(dev.hard_header_len + dev.needed_headroom, LL_ALIGN)


def push_header(skb: SocketBuffer, n: int) -> SocketBuffer:
    if n < 0:
        raise InvalidArgument(f"cannot push a negative header length {n}")
    if n > skb.headroom:
        raise HeadroomUnderflow(f"push of {n} bytes with only {skb.headroom} bytes of headroom")
    return replace(skb, headroom=skb.headroom - n, data_len=skb.data_len + n)


def rx_socket_buffer(nic: NicProfile, dev: NetDevice, cpu: CpuProfile,
                     payload_len: int = 0) -> SocketBuffer:
    """Buffer as handed to the LWT hook right after driver RX."""
    if payload_len < 0:
        raise InvalidArgument(f"payload length must be >= 0, got {payload_len}")
    return SocketBuffer(
        headroom=nic.initial_headroom(dev, cpu),
        data_len=payload_len,
        mac_len=dev.hard_header_len,
    )
