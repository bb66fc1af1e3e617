from ipaddress import IPv6Address

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from lwt_headroom.errors import InvalidArgument, ParseError
from lwt_headroom.header_codecs import (
    IoamPtoHbh,
    Ipv6Header,
    Mode,
    RplHeader,
    Srv6Header,
    decode_header,
    encode_header,
    from_hex,
    ioam_overhead,
    rpl_overhead,
    srv6_overhead,
    to_hex,
)

A1 = IPv6Address("fc00::1")
A2 = IPv6Address("fc00::2")


@pytest.mark.parametrize(
    "pto, mode, expected",
    [(236, Mode.INLINE, 256), (240, Mode.INLINE, 256), (196, Mode.ENCAP, 256),
     (200, Mode.ENCAP, 256), (4, Mode.INLINE, 24)],
)
def test_ioam_overhead(pto, mode, expected):
    assert ioam_overhead(pto, mode) == expected


@pytest.mark.parametrize("pto", [0, 2, 246, 248, 237])
def test_ioam_overhead_rejects(pto):
    with pytest.raises(InvalidArgument):
        ioam_overhead(pto, Mode.INLINE)


def test_ioam_overhead_matches_oracle():
    for pto in range(4, 245, 4):
        assert ioam_overhead(pto, Mode.INLINE) == oracle.ioam_len(pto, False)
        assert ioam_overhead(pto, Mode.ENCAP) == oracle.ioam_len(pto, True)


@pytest.mark.parametrize(
    "n, mode, expected",
    [(21, Mode.ENCAP, 384), (14, Mode.ENCAP_RED, 256), (1, Mode.INLINE, 24),
     (13, Mode.L2ENCAP, 256), (14, Mode.L2ENCAP_RED, 256)],
)
def test_srv6_overhead(n, mode, expected):
    assert srv6_overhead(n, mode) == expected


@pytest.mark.parametrize("n", [0, 128])
def test_srv6_overhead_range(n):
    with pytest.raises(InvalidArgument):
        srv6_overhead(n, Mode.ENCAP)


def test_srv6_overhead_matches_oracle():
    for mode in ("inline", "encap", "encap-red", "l2encap", "l2encap-red"):
        for n in range(1, 128):
            assert srv6_overhead(n, Mode(mode)) == oracle.srv6_len(n, mode)


@pytest.mark.parametrize(
    "n, ci, ce, expected",
    [(3, 0, 0, (56, 0)), (3, 8, 8, (32, 0)), (31, 8, 8, (256, 0)), (2, 3, 2, (40, 5))],
)
def test_rpl_overhead(n, ci, ce, expected):
    assert rpl_overhead(n, ci, ce) == expected


@pytest.mark.parametrize("args", [(0, 0, 0), (3, 16, 0), (3, 0, -1)])
def test_rpl_overhead_rejects(args):
    with pytest.raises(InvalidArgument):
        rpl_overhead(*args)


def test_rpl_overhead_matches_oracle():
    for ci in range(16):
        for ce in range(16):
            for n in range(1, 40):
                size, pad = rpl_overhead(n, ci, ce)
                assert size == oracle.rpl_len(n, ci, ce)
                assert 0 <= pad <= 7


def test_ipv6_layout():
    h = Ipv6Header("2001:db8::1", "2001:db8::2", next_header=43, payload_length=1280,
                   hop_limit=63, traffic_class=0xAB, flow_label=0x12345)
    raw = encode_header(h)
    assert len(raw) == 40
    assert raw[:8] == bytes([0x6A, 0xB1, 0x23, 0x45, 0x05, 0x00, 43, 63])
    assert raw[8:24] == IPv6Address("2001:db8::1").packed
    assert decode_header("ipv6", raw) == h


def test_ipv6_bad_version():
    raw = bytearray(encode_header(Ipv6Header("::1", "::2")))
    raw[0] = 0x40
    with pytest.raises(ParseError) as err:
        decode_header("ipv6", bytes(raw))
    assert err.value.field == "version"


def test_srh_two_segments_layout():
    raw = encode_header(Srv6Header((A1, A2), segments_left=1, tag=0x0102, flags=3))
    expected = bytes([41, 4, 4, 1, 1, 3, 0x01, 0x02]) + A1.packed + A2.packed
    assert raw == expected


def test_srh_reduced_drops_first_hop():
    h = Srv6Header((A1, A2), segments_left=1, reduced=True)
    raw = encode_header(h)
    assert raw == bytes([41, 2, 4, 1, 0, 0, 0, 0]) + A1.packed
    assert decode_header("srv6", raw, first_segment=A2) == h


def test_ioam_layout_pto_236():
    h = IoamPtoHbh(236, namespace_id=0x0123, node_len=3, flags=0b1010,
                   remaining_len=59, trace_type=0xF00000)
    raw = encode_header(h)
    assert len(raw) == 256
    assert raw[1] == 31
    assert raw[4:8] == bytes([0x31, 246, 0, 0])
    bits = 3 << 11 | 0b1010 << 7 | 59
    assert raw[8:16] == bytes([0x01, 0x23, bits >> 8, bits & 0xFF, 0xF0, 0, 0, 0])
    assert raw[16:252] == bytes(236)
    # 4-byte PadN closing the header
    assert raw[252:] == bytes([1, 2, 0, 0])
    assert decode_header("ioam", raw) == h


def test_ioam_no_trailing_pad_when_aligned():
    raw = encode_header(IoamPtoHbh(240))
    assert len(raw) == 256 and raw[5] == 250


def test_ioam_remaining_len_bound():
    with pytest.raises(InvalidArgument):
        IoamPtoHbh(8, remaining_len=3)


def test_rpl_compressed_layout():
    dst = IPv6Address("2001:db8:0:1::100")
    addrs = (IPv6Address("2001:db8:0:1::5"), IPv6Address("2001:db8:0:1::6"),
             IPv6Address("2001:db8:0:1::7"))
    h = RplHeader(addrs, cmpr_i=8, cmpr_e=8, segments_left=3)
    raw = encode_header(h, dst)
    assert raw[:8] == bytes([41, 3, 3, 3, 0x88, 0, 0, 0])
    assert raw[8:] == b"".join(a.packed[8:] for a in addrs)
    assert decode_header("rpl", raw, destination=dst) == h


def test_rpl_pad_bytes():
    dst = IPv6Address("2001:db8::ff")
    h = RplHeader((IPv6Address("2001:db8::1"), IPv6Address("2001:db8::2")), cmpr_i=3, cmpr_e=2)
    raw = encode_header(h, dst)
    assert len(raw) == 40 and raw[4:6] == bytes([0x32, 0x50])
    assert raw[-5:] == bytes(5)
    assert decode_header("rpl", raw, destination=dst) == h


def test_rpl_prefix_mismatch():
    h = RplHeader((IPv6Address("2001:db8::1"),), cmpr_e=4)
    with pytest.raises(InvalidArgument):
        encode_header(h, "2001:db9::1")


def test_rpl_uncompressed_roundtrip_without_destination():
    h = RplHeader((A1, A2, IPv6Address("fc00::3")))
    assert decode_header("rpl", encode_header(h)) == h


# -- decode errors -----------------------------------------------------------

def test_truncated_srh():
    raw = encode_header(Srv6Header((A1, A2)))
    with pytest.raises(ParseError) as err:
        decode_header("srv6", raw[:30])
    assert err.value.field == "Hdr Ext Len" and err.value.offset == 30


def test_srh_with_excess_bytes():
    raw = encode_header(Srv6Header((A1,)))
    with pytest.raises(ParseError):
        decode_header("srv6", raw + bytes(8))


def test_srh_wrong_routing_type():
    raw = bytearray(encode_header(Srv6Header((A1,))))
    raw[2] = 3
    with pytest.raises(ParseError) as err:
        decode_header("srv6", bytes(raw))
    assert err.value.offset == 2


def test_srh_last_entry_mismatch():
    raw = bytearray(encode_header(Srv6Header((A1, A2))))
    raw[4] = 0
    with pytest.raises(ParseError) as err:
        decode_header("srv6", bytes(raw))
    assert err.value.field == "Last Entry"


def test_rpl_negative_address_size():
    raw = bytes([41, 0, 3, 0, 0x00, 0x30, 0, 0])  # 8 bytes can hold no last address
    with pytest.raises(ParseError) as err:
        decode_header("rpl", raw)
    assert err.value.field == "CmprE"


def test_rpl_uneven_addresses():
    # CmprI=2 means 14-byte addresses; 8 + 10 + 6 bytes cannot split evenly
    raw = bytes([41, 2, 3, 0, 0x2A, 0, 0, 0]) + bytes(16)
    with pytest.raises(ParseError) as err:
        decode_header("rpl", raw, destination="::")
    assert err.value.field == "CmprI"


def test_ioam_bad_option_type():
    raw = bytearray(encode_header(IoamPtoHbh(4)))
    raw[4] = 0x32
    with pytest.raises(ParseError) as err:
        decode_header("ioam", bytes(raw))
    assert err.value.field == "Option-Type"


def test_ioam_opt_data_len_inconsistent():
    raw = bytearray(encode_header(IoamPtoHbh(8)))
    raw[5] = 10 + 32
    with pytest.raises(ParseError) as err:
        decode_header("ioam", bytes(raw))
    assert err.value.field == "Opt Data Len"


def test_hex_roundtrip_and_errors():
    data = bytes(range(10))
    assert to_hex(data) == "00 01 02 03 04 05 06 07 08 09"
    assert from_hex(to_hex(data)) == data
    with pytest.raises(ParseError):
        from_hex("0a 1")
    with pytest.raises(ParseError):
        from_hex("zz")


# -- properties --------------------------------------------------------------

addresses = st.binary(min_size=16, max_size=16).map(IPv6Address)


@st.composite
def srv6_headers(draw):
    segs = draw(st.lists(addresses, min_size=1, max_size=127))
    return Srv6Header(tuple(segs), segments_left=draw(st.integers(0, len(segs) - 1)),
                      flags=draw(st.integers(0, 255)), tag=draw(st.integers(0, 0xFFFF)),
                      reduced=draw(st.booleans()), next_header=draw(st.integers(0, 255)))


@st.composite
def rpl_cases(draw):
    dst = draw(st.binary(min_size=16, max_size=16))
    ci, ce = draw(st.integers(0, 15)), draw(st.integers(0, 15))
    n = draw(st.integers(1, 40))
    addrs = []
    for i in range(n):
        keep = ce if i == n - 1 else ci
        addrs.append(IPv6Address(dst[:keep] + draw(st.binary(min_size=16 - keep, max_size=16 - keep))))
    h = RplHeader(tuple(addrs), ci, ce, segments_left=draw(st.integers(0, n)),
                  next_header=draw(st.integers(0, 255)))
    return h, IPv6Address(dst)


ioam_headers = st.builds(
    lambda pto, ns, nl, fl, rl, tt, nh: IoamPtoHbh(pto, ns, nl, fl, min(rl, pto // 4), tt, nh),
    st.sampled_from(range(4, 245, 4)), st.integers(0, 0xFFFF), st.integers(0, 31),
    st.integers(0, 15), st.integers(0, 127), st.integers(0, 0xFFFFFF), st.integers(0, 255),
)

ipv6_headers = st.builds(Ipv6Header, addresses, addresses, st.integers(0, 255),
                         st.integers(0, 0xFFFF), st.integers(0, 255), st.integers(0, 255),
                         st.integers(0, 0xFFFFF))


@settings(max_examples=300)
@given(srv6_headers())
def test_srv6_roundtrip(h):
    raw = encode_header(h)
    assert len(raw) % 8 == 0 and raw[1] == (len(raw) - 8) // 8
    assert decode_header("srv6", raw, first_segment=h.segments[-1] if h.reduced else None) == h


@settings(max_examples=300)
@given(rpl_cases())
def test_rpl_roundtrip(case):
    h, dst = case
    raw = encode_header(h, dst)
    assert len(raw) % 8 == 0 and len(raw) == h.size
    assert decode_header("rpl", raw, destination=dst) == h


@settings(max_examples=300)
@given(ioam_headers)
def test_ioam_roundtrip(h):
    raw = encode_header(h)
    assert len(raw) == ioam_overhead(h.pto_bytes, Mode.INLINE)
    assert decode_header("ioam", raw) == h


@settings(max_examples=300)
@given(ipv6_headers)
def test_ipv6_roundtrip(h):
    assert decode_header("ipv6", encode_header(h)) == h


@given(st.integers(1, 127), st.booleans())
def test_srh_size_law_against_overhead(n, reduced):
    h = Srv6Header(tuple(IPv6Address(i) for i in range(1, n + 1)), reduced=reduced)
    mode = Mode.ENCAP_RED if reduced else Mode.ENCAP
    assert len(encode_header(h)) == srv6_overhead(n, mode) - 40
