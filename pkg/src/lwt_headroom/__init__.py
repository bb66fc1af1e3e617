"""Socket buffer headroom simulator for lightweight-tunnel encapsulation."""

from .buffer_model import (
    CpuProfile,
    NetDevice,
    NicProfile,
    ReallocEvent,
    SocketBuffer,
    align_up,
    cow_head,
    ll_reserved_space,
    push_header,
    rx_socket_buffer,
)
from .errors import (
    ConfigurationError,
    HeadroomUnderflow,
    InvalidArgument,
    InvariantViolation,
    ParseError,
)
from .header_codecs import (
    IoamPtoHbh,
    Ipv6Header,
    Mode,
    RplHeader,
    Srv6Header,
    decode_header,
    encode_header,
    ioam_overhead,
    rpl_overhead,
    srv6_overhead,
)
from .lwt_pipeline import (
    DstCache,
    EncapConfig,
    PacketTrace,
    Protocol,
    Resolver,
    Strategy,
    dst_dev_overhead,
    encap_patched,
    encap_vanilla,
    hdrlen,
    resolve_dst,
    run_flow,
)
from .perf_harness import CostModel, SimResult, compare, emit_report, simulate_stream
from .trigger_analysis import (
    TriggerCase,
    TriggerReport,
    enumerate_triggers,
    predict_trigger,
    rpl_theoretical_triggers,
    table1_report,
)

__version__ = "0.1.0"
