"""
Wire codecs and overhead arithmetic for the IPv6 headers an LWT encap adds.

Covers the fixed IPv6 header, a Hop-by-Hop header carrying an IOAM
pre-allocated trace option, the Segment Routing Header and the RPL source
routing header.  Everything is network byte order.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from ipaddress import IPv6Address
from typing import Optional, Tuple, Union

from .buffer_model import align_up
from .errors import InvalidArgument, ParseError

IPV6_HEADER_LEN = 40
IOAM_PREAMBLE_LEN = 16
IOAM_PTO_MIN = 4
IOAM_PTO_MAX = 244
SRV6_MAX_SEGMENTS = 127
EXT_HDR_MAX_LEN = 8 + 255 * 8

IPV6_TLV_PAD1 = 0
IPV6_TLV_PADN = 1
IPV6_TLV_IOAM = 0x31
IOAM_PREALLOC_TRACE = 0
IPV6_SRCRT_TYPE_3 = 3  # RPL source routing
IPV6_SRCRT_TYPE_4 = 4  # SRH

NEXTHDR_IPV6 = 41
NEXTHDR_NONE = 59


class Mode(str, enum.Enum):
    INLINE = "inline"
    ENCAP = "encap"
    AUTO = "auto"
    ENCAP_RED = "encap-red"
    L2ENCAP = "l2encap"
    L2ENCAP_RED = "l2encap-red"


def _addr(value) -> IPv6Address:
    if isinstance(value, IPv6Address):
        return value
    if isinstance(value, (bytes, bytearray)):
        return IPv6Address(bytes(value))
    return IPv6Address(value)


def _check_range(name, value, lo, hi):
    if not lo <= value <= hi:
        raise InvalidArgument(f"{name} must be in [{lo}, {hi}], got {value}")


# -- overhead arithmetic -----------------------------------------------------

def _check_pto(pto_bytes):
    if pto_bytes % 4 or not IOAM_PTO_MIN <= pto_bytes <= IOAM_PTO_MAX:
        raise InvalidArgument(
            f"PTO size must be a multiple of 4 in [{IOAM_PTO_MIN}, {IOAM_PTO_MAX}], got {pto_bytes}"
        )


def ioam_overhead(pto_bytes: int, mode: Mode) -> int:
    _check_pto(pto_bytes)
    size = align_up(IOAM_PREAMBLE_LEN + pto_bytes, 8)
    if mode is Mode.INLINE:
        return size
    if mode is Mode.ENCAP:
        return size + IPV6_HEADER_LEN
    raise InvalidArgument(f"IOAM has no {mode.value} mode here")


def srv6_overhead(n_segments: int, mode: Mode) -> int:
    _check_range("segment count", n_segments, 1, SRV6_MAX_SEGMENTS)
    srh = 8 + 16 * n_segments
    if mode is Mode.INLINE:
        return srh
    if mode in (Mode.ENCAP, Mode.L2ENCAP):
        return IPV6_HEADER_LEN + srh
    if mode in (Mode.ENCAP_RED, Mode.L2ENCAP_RED):
        return IPV6_HEADER_LEN + srh - 16
    raise InvalidArgument(f"SRv6 has no {mode.value} mode")


def rpl_overhead(n_addresses: int, cmpr_i: int, cmpr_e: int) -> Tuple[int, int]:
    """Return ``(size, pad)`` of an RPL source routing header."""
    if n_addresses < 1:
        raise InvalidArgument(f"RPL header needs at least one address, got {n_addresses}")
    _check_range("CmprI", cmpr_i, 0, 15)
    _check_range("CmprE", cmpr_e, 0, 15)
    raw = 8 + (n_addresses - 1) * (16 - cmpr_i) + (16 - cmpr_e)
    size = align_up(raw, 8)
    if size > EXT_HDR_MAX_LEN:
        raise InvalidArgument(f"RPL header of {size} bytes overflows Hdr Ext Len")
    return size, size - raw


# -- header values -----------------------------------------------------------

@dataclass(frozen=True)
class Ipv6Header:
    source: IPv6Address
    destination: IPv6Address
    next_header: int = NEXTHDR_NONE
    payload_length: int = 0
    hop_limit: int = 64
    traffic_class: int = 0
    flow_label: int = 0

    _FMT = struct.Struct("!IHBB16s16s")

    def __post_init__(self):
        object.__setattr__(self, "source", _addr(self.source))
        object.__setattr__(self, "destination", _addr(self.destination))
        _check_range("next_header", self.next_header, 0, 0xFF)
        _check_range("payload_length", self.payload_length, 0, 0xFFFF)
        _check_range("hop_limit", self.hop_limit, 0, 0xFF)
        _check_range("traffic_class", self.traffic_class, 0, 0xFF)
        _check_range("flow_label", self.flow_label, 0, 0xFFFFF)

    def to_bytes(self) -> bytes:
        word = 6 << 28 | self.traffic_class << 20 | self.flow_label
        return self._FMT.pack(word, self.payload_length, self.next_header,
                              self.hop_limit, self.source.packed,
                              self.destination.packed)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Ipv6Header":
        if len(data) < IPV6_HEADER_LEN:
            raise ParseError(f"truncated IPv6 header: {len(data)} of 40 bytes",
                             "header", len(data))
        if len(data) > IPV6_HEADER_LEN:
            raise ParseError(f"{len(data) - IPV6_HEADER_LEN} trailing bytes after IPv6 header",
                             "header", IPV6_HEADER_LEN)
        word, plen, nxt, hlim, src, dst = cls._FMT.unpack(data)
        if word >> 28 != 6:
            raise ParseError(f"IP version {word >> 28}, expected 6", "version", 0)
        return cls(source=IPv6Address(src), destination=IPv6Address(dst),
                   next_header=nxt, payload_length=plen, hop_limit=hlim,
                   traffic_class=(word >> 20) & 0xFF, flow_label=word & 0xFFFFF)


@dataclass(frozen=True)
class IoamPtoHbh:
    """Hop-by-Hop header holding one IOAM pre-allocated trace option.

    Only the trace preamble is carried; the ``pto_bytes`` of node data are
    reserved and encoded as zeros.
    """

    pto_bytes: int
    namespace_id: int = 0
    node_len: int = 0
    flags: int = 0
    remaining_len: int = 0
    trace_type: int = 0
    next_header: int = NEXTHDR_IPV6

    def __post_init__(self):
        _check_pto(self.pto_bytes)
        _check_range("namespace_id", self.namespace_id, 0, 0xFFFF)
        _check_range("node_len", self.node_len, 0, 0x1F)
        _check_range("flags", self.flags, 0, 0xF)
        _check_range("remaining_len", self.remaining_len, 0, 0x7F)
        _check_range("trace_type", self.trace_type, 0, 0xFFFFFF)
        _check_range("next_header", self.next_header, 0, 0xFF)
        if self.remaining_len * 4 > self.pto_bytes:
            raise InvalidArgument(
                f"remaining_len {self.remaining_len} exceeds {self.pto_bytes} bytes of node data"
            )

    @property
    def size(self) -> int:
        return align_up(IOAM_PREAMBLE_LEN + self.pto_bytes, 8)

    def to_bytes(self) -> bytes:
        size = self.size
        out = bytearray(size)
        # bytes 2-3 stay zero: two Pad1 options
        out[0] = self.next_header
        out[1] = (size - 8) // 8
        out[4:8] = bytes((IPV6_TLV_IOAM, 10 + self.pto_bytes, 0, IOAM_PREALLOC_TRACE))
        bits = self.node_len << 11 | self.flags << 7 | self.remaining_len
        struct.pack_into("!HHI", out, 8, self.namespace_id, bits, self.trace_type << 8)
        tail = IOAM_PREAMBLE_LEN + self.pto_bytes
        if size - tail == 1:
            out[tail] = IPV6_TLV_PAD1
        elif size > tail:
            out[tail:tail + 2] = bytes((IPV6_TLV_PADN, size - tail - 2))
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "IoamPtoHbh":
        _check_ext_len(data, "Hop-by-Hop")
        if len(data) < IOAM_PREAMBLE_LEN:
            raise ParseError(f"{len(data)} bytes cannot hold the IOAM trace preamble",
                             "Hdr Ext Len", 1)
        _check_padding(data, 2, 4)
        if data[4] != IPV6_TLV_IOAM:
            raise ParseError(f"option type {data[4]:#04x} is not IOAM", "Option-Type", 4)
        if data[7] != IOAM_PREALLOC_TRACE:
            raise ParseError(f"IOAM option type {data[7]} is not a pre-allocated trace",
                             "IOAM Opt-Type", 7)
        pto = data[5] - 10
        if pto < IOAM_PTO_MIN or pto % 4 or IOAM_PREAMBLE_LEN + pto > len(data):
            raise ParseError(f"Opt Data Len {data[5]} does not fit a trace in {len(data)} bytes",
                             "Opt Data Len", 5)
        tail = IOAM_PREAMBLE_LEN + pto
        if len(data) - tail >= 8:
            raise ParseError(f"{len(data) - tail} bytes after the trace option",
                             "Hdr Ext Len", 1)
        _check_padding(data, tail, len(data))
        namespace_id, bits, tt = struct.unpack_from("!HHI", data, 8)
        try:
            return cls(pto_bytes=pto, namespace_id=namespace_id,
                       node_len=bits >> 11, flags=(bits >> 7) & 0xF,
                       remaining_len=bits & 0x7F, trace_type=tt >> 8,
                       next_header=data[0])
        except InvalidArgument as exc:
            raise ParseError(str(exc), "RemainingLen", 10) from None


@dataclass(frozen=True)
class Srv6Header:
    """Segment Routing Header.

    ``segments`` is in wire order, so ``segments[-1]`` is the first segment
    visited.  With ``reduced`` set that segment is left out of the encoding;
    it travels in the outer destination address instead.
    """

    segments: Tuple[IPv6Address, ...]
    segments_left: int = 0
    flags: int = 0
    tag: int = 0
    reduced: bool = False
    next_header: int = NEXTHDR_IPV6

    _FIXED = struct.Struct("!BBBBBBH")

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(_addr(s) for s in self.segments))
        _check_range("segment count", len(self.segments), 1, SRV6_MAX_SEGMENTS)
        _check_range("segments_left", self.segments_left, 0, len(self.segments) - 1)
        _check_range("flags", self.flags, 0, 0xFF)
        _check_range("tag", self.tag, 0, 0xFFFF)
        _check_range("next_header", self.next_header, 0, 0xFF)

    @property
    def encoded_segments(self) -> Tuple[IPv6Address, ...]:
        return self.segments[:-1] if self.reduced else self.segments

    @property
    def last_entry(self) -> int:
        return max(len(self.encoded_segments) - 1, 0)

    @property
    def size(self) -> int:
        return 8 + 16 * len(self.encoded_segments)

    def to_bytes(self) -> bytes:
        head = self._FIXED.pack(self.next_header, (self.size - 8) // 8,
                                IPV6_SRCRT_TYPE_4, self.segments_left,
                                self.last_entry, self.flags, self.tag)
        return head + b"".join(s.packed for s in self.encoded_segments)

    @classmethod
    def from_bytes(cls, data: bytes, first_segment=None) -> "Srv6Header":
        """Parse an SRH; pass ``first_segment`` to rebuild a reduced one."""
        _check_ext_len(data, "SRH")
        nxt, hel, rtype, sl, last, flags, tag = cls._FIXED.unpack_from(data)
        if rtype != IPV6_SRCRT_TYPE_4:
            raise ParseError(f"routing type {rtype} is not SRH", "Routing Type", 2)
        if hel % 2:
            raise ParseError(f"Hdr Ext Len {hel} is not a whole number of segments",
                             "Hdr Ext Len", 1)
        count = hel // 2
        if last != max(count - 1, 0):
            raise ParseError(f"Last Entry {last} disagrees with {count} encoded segments",
                             "Last Entry", 4)
        segments = [IPv6Address(data[8 + 16 * i:24 + 16 * i]) for i in range(count)]
        reduced = first_segment is not None
        if reduced:
            segments.append(_addr(first_segment))
        if not segments:
            raise ParseError("SRH carries no segments", "Hdr Ext Len", 1)
        if sl > len(segments) - 1:
            raise ParseError(f"Segments Left {sl} beyond {len(segments)} segments",
                             "Segments Left", 3)
        return cls(segments=tuple(segments), segments_left=sl, flags=flags,
                   tag=tag, reduced=reduced, next_header=nxt)


@dataclass(frozen=True)
class RplHeader:
    """RPL source routing header.

    Prefix elision is relative to the packet's destination address, so that
    address is needed both to encode and to decode compressed headers.
    """

    addresses: Tuple[IPv6Address, ...]
    cmpr_i: int = 0
    cmpr_e: int = 0
    segments_left: int = 0
    next_header: int = NEXTHDR_IPV6

    def __post_init__(self):
        object.__setattr__(self, "addresses", tuple(_addr(a) for a in self.addresses))
        _check_range("next_header", self.next_header, 0, 0xFF)
        _check_range("segments_left", self.segments_left, 0, len(self.addresses))
        rpl_overhead(len(self.addresses), self.cmpr_i, self.cmpr_e)

    @property
    def size(self) -> int:
        return rpl_overhead(len(self.addresses), self.cmpr_i, self.cmpr_e)[0]

    @property
    def pad(self) -> int:
        return rpl_overhead(len(self.addresses), self.cmpr_i, self.cmpr_e)[1]

    def to_bytes(self, destination=None) -> bytes:
        if destination is None:
            if self.cmpr_i or self.cmpr_e:
                raise InvalidArgument("compressed RPL header needs the destination address")
            dst = bytes(16)
        else:
            dst = _addr(destination).packed
        n = len(self.addresses)
        out = bytearray(struct.pack("!BBBBI", self.next_header, (self.size - 8) // 8,
                                    IPV6_SRCRT_TYPE_3, self.segments_left,
                                    self.cmpr_i << 28 | self.cmpr_e << 24 | self.pad << 20))
        for i, a in enumerate(self.addresses):
            elide = self.cmpr_e if i == n - 1 else self.cmpr_i
            raw = a.packed
            if raw[:elide] != dst[:elide]:
                raise InvalidArgument(
                    f"address {a} does not share {elide} prefix octets with {_addr(dst)}"
                )
            out += raw[elide:]
        out += bytes(self.pad)
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes, destination=None) -> "RplHeader":
        _check_ext_len(data, "RPL")
        nxt, _, rtype, sl, word = struct.unpack_from("!BBBBI", data)
        if rtype != IPV6_SRCRT_TYPE_3:
            raise ParseError(f"routing type {rtype} is not RPL", "Routing Type", 2)
        cmpr_i, cmpr_e, pad = word >> 28, (word >> 24) & 0xF, (word >> 20) & 0xF
        if pad > 7:
            raise ParseError(f"Pad {pad} exceeds 7 octets", "Pad", 5)
        body = len(data) - 8 - pad - (16 - cmpr_e)
        if body < 0:
            raise ParseError(f"CmprE {cmpr_e} and Pad {pad} imply a negative address size",
                             "CmprE", 4)
        if body % (16 - cmpr_i):
            raise ParseError(f"{body} bytes are not a whole number of {16 - cmpr_i}-octet addresses",
                             "CmprI", 4)
        n = body // (16 - cmpr_i) + 1
        if sl > n:
            raise ParseError(f"Segments Left {sl} beyond {n} addresses", "Segments Left", 3)
        if destination is None:
            if cmpr_i and n > 1 or cmpr_e:
                raise InvalidArgument("compressed RPL header needs the destination address")
            dst = bytes(16)
        else:
            dst = _addr(destination).packed
        addresses = []
        offset = 8
        for i in range(n):
            elide = cmpr_e if i == n - 1 else cmpr_i
            width = 16 - elide
            addresses.append(IPv6Address(dst[:elide] + data[offset:offset + width]))
            offset += width
        return cls(addresses=tuple(addresses), cmpr_i=cmpr_i, cmpr_e=cmpr_e,
                   segments_left=sl, next_header=nxt)


Header = Union[Ipv6Header, IoamPtoHbh, Srv6Header, RplHeader]

HEADER_KINDS = {
    "ipv6": Ipv6Header,
    "ioam": IoamPtoHbh,
    "srv6": Srv6Header,
    "rpl": RplHeader,
}


def _check_ext_len(data, what):
    if len(data) < 8:
        raise ParseError(f"truncated {what} header: {len(data)} bytes", "Hdr Ext Len",
                         min(len(data), 1))
    expected = (data[1] + 1) * 8
    if len(data) < expected:
        raise ParseError(f"truncated {what} header: {len(data)} of {expected} bytes",
                         "Hdr Ext Len", len(data))
    if len(data) > expected:
        raise ParseError(f"Hdr Ext Len {data[1]} says {expected} bytes, got {len(data)}",
                         "Hdr Ext Len", 1)


def _check_padding(data, start, end):
    i = start
    while i < end:
        if data[i] == IPV6_TLV_PAD1:
            i += 1
        elif data[i] == IPV6_TLV_PADN and i + 1 < end and i + 2 + data[i + 1] <= end:
            i += 2 + data[i + 1]
        else:
            raise ParseError(f"byte {data[i]:#04x} is not a padding option", "Padding", i)


def encode_header(h: Header, destination=None) -> bytes:
    if isinstance(h, RplHeader):
        return h.to_bytes(destination)
    return h.to_bytes()


def decode_header(kind: str, data: bytes, destination=None, first_segment=None) -> Header:
    """Parse ``data`` as a header of ``kind`` (``ipv6``, ``ioam``, ``srv6`` or ``rpl``)."""
    data = bytes(data)
    if kind == "ipv6":
        return Ipv6Header.from_bytes(data)
    if kind == "ioam":
        return IoamPtoHbh.from_bytes(data)
    if kind == "srv6":
        return Srv6Header.from_bytes(data, first_segment)
    if kind == "rpl":
        return RplHeader.from_bytes(data, destination)
    raise InvalidArgument(f"unknown header kind {kind!r}")


def to_hex(data: bytes) -> str:
    return data.hex(" ")


def from_hex(text: str) -> bytes:
    digits = "".join(text.split())
    if len(digits) % 2:
        raise ParseError("odd number of hex digits", "hex", len(digits) // 2)
    try:
        return bytes.fromhex(digits)
    except ValueError as exc:
        raise ParseError(f"bad hex input: {exc}", "hex", 0) from None


def header_fields(h: Header):
    """Ordered ``(name, value)`` pairs describing ``h``, wire fields first."""
    if isinstance(h, Ipv6Header):
        names = ("traffic_class", "flow_label", "payload_length", "next_header",
                 "hop_limit", "source", "destination")
        return [(n, getattr(h, n)) for n in names]
    if isinstance(h, IoamPtoHbh):
        names = ("next_header", "namespace_id", "node_len", "flags",
                 "remaining_len", "trace_type", "pto_bytes", "size")
        return [(n, getattr(h, n)) for n in names]
    if isinstance(h, Srv6Header):
        rows = [(n, getattr(h, n)) for n in ("next_header", "segments_left",
                                              "last_entry", "flags", "tag",
                                              "reduced", "size")]
        rows += [(f"segment[{i}]", s) for i, s in enumerate(h.segments)]
        return rows
    if isinstance(h, RplHeader):
        rows = [(n, getattr(h, n)) for n in ("next_header", "segments_left",
                                              "cmpr_i", "cmpr_e", "pad", "size")]
        rows += [(f"address[{i}]", a) for i, a in enumerate(h.addresses)]
        return rows
    raise InvalidArgument(f"not a header: {h!r}")
