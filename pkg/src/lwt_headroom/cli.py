"""
Command line front end.

    lwt-headroom triggers --table1
    lwt-headroom triggers --protocol srv6 --mode encap --cache-line 32 --max-seg 25
    lwt-headroom simulate --protocol ioam --mode inline --pto 236 --strategy patched -n 1000
    lwt-headroom compare --protocol srv6 --mode encap --max-seg 34 --format csv --figure srv6.png
    lwt-headroom codec encode --protocol srv6 --segments fc00::1 fc00::2

Exit status is 0 on success, 1 on runtime or parse failures and 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigurationError, InvariantViolation, ParseError
from .header_codecs import (
    HEADER_KINDS,
    IoamPtoHbh,
    Ipv6Header,
    Mode,
    RplHeader,
    Srv6Header,
    decode_header,
    encode_header,
    from_hex,
    header_fields,
    to_hex,
)
from .lwt_pipeline import LEGAL_MODES, EncapConfig, Protocol, Strategy
from .perf_harness import CostModel, compare, emit_report, result_row, simulate_stream
from .profiles import CPUS, DEVICES, NICS, build_profile, parse_profile_file
from .trigger_analysis import (
    PARAM_NAMES,
    TriggerReport,
    default_range,
    describe_profile,
    report_for,
    rpl_theoretical_triggers,
    table1_report,
)


class UsageError(Exception):
    pass


def _pair(text):
    try:
        i, e = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers 'I,E', got {text!r}") from None
    return i, e


def _profile_parent():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("hardware profile")
    g.add_argument("--cpu", choices=sorted(CPUS))
    g.add_argument("--nic", choices=sorted(NICS))
    g.add_argument("--device", choices=sorted(DEVICES))
    g.add_argument("--cache-line", type=int, help="cache line size in bytes")
    g.add_argument("--rx-headroom", help="driver RX headroom in bytes, or 'cacheline'")
    g.add_argument("--mac-pulled", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("--hard-header", type=int, help="link-layer header length")
    g.add_argument("--needed-headroom", type=int, help="extra headroom the NIC needs")
    g.add_argument("--profile-file", type=Path, help="'key = value' profile file")
    return p


def _format_arg(p, default="table"):
    p.add_argument("--format", choices=("table", "csv", "json"), default=default)


def _config_args(p):
    p.add_argument("--protocol", choices=[x.value for x in Protocol])
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--cmpr", type=_pair, default=(0, 0), metavar="I,E",
                   help="RPL CmprI,CmprE")


def build_parser():
    profile = _profile_parent()
    parser = argparse.ArgumentParser(
        prog="lwt-headroom",
        description="Socket buffer headroom simulator for LWT encapsulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("triggers", parents=[profile],
                       help="list configurations that reallocate twice")
    p.add_argument("--table1", action="store_true",
                   help="every protocol and mode over its full range")
    _config_args(p)
    p.add_argument("--max-seg", type=int, help="largest SRv6 segment count")
    p.add_argument("--max-addr", type=int, help="largest RPL address count")
    _format_arg(p)
    p.set_defaults(func=cmd_triggers)

    p = sub.add_parser("simulate", parents=[profile], help="run one stream")
    _config_args(p)
    p.add_argument("--pto", type=int, help="IOAM PTO size in bytes")
    p.add_argument("--nseg", type=int, help="SRv6 segment count")
    p.add_argument("--naddr", type=int, help="RPL address count")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="vanilla")
    p.add_argument("-n", "--packets", type=int, default=1000)
    p.add_argument("--payload-len", type=int, default=0)
    p.add_argument("--cost-realloc", type=float, default=1.0)
    p.add_argument("--cost-byte", type=float, default=0.0)
    _format_arg(p)
    p.add_argument("--output", type=Path, help="write the report here instead of stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", parents=[profile],
                       help="sweep a parameter, vanilla against patched")
    _config_args(p)
    p.add_argument("--max-seg", type=int)
    p.add_argument("--max-addr", type=int)
    p.add_argument("--pto-max", type=int)
    p.add_argument("-n", "--packets", type=int, default=100)
    p.add_argument("--payload-len", type=int, default=0)
    p.add_argument("--cost-realloc", type=float, default=1.0)
    p.add_argument("--cost-byte", type=float, default=0.0)
    _format_arg(p, default="csv")
    p.add_argument("--output", type=Path)
    p.add_argument("--figure", type=Path, help="also render the sweep to this image")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("codec", help="encode or decode extension headers")
    codec = p.add_subparsers(dest="action", required=True)
    enc = codec.add_parser("encode")
    enc.add_argument("--protocol", choices=sorted(HEADER_KINDS), required=True)
    enc.add_argument("--next-header", type=int)
    enc.add_argument("--src", default="::")
    enc.add_argument("--dst", default="::")
    enc.add_argument("--payload-length", type=int, default=0)
    enc.add_argument("--hop-limit", type=int, default=64)
    enc.add_argument("--traffic-class", type=int, default=0)
    enc.add_argument("--flow-label", type=int, default=0)
    enc.add_argument("--pto", type=int)
    enc.add_argument("--namespace", type=int, default=0)
    enc.add_argument("--node-len", type=int, default=0)
    enc.add_argument("--remaining-len", type=int, default=0)
    enc.add_argument("--trace-type", type=lambda s: int(s, 0), default=0)
    enc.add_argument("--flags", type=int, default=0)
    enc.add_argument("--segments", nargs="+")
    enc.add_argument("--segments-left", type=int, default=0)
    enc.add_argument("--tag", type=int, default=0)
    enc.add_argument("--reduced", action="store_true")
    enc.add_argument("--addresses", nargs="+")
    enc.add_argument("--destination")
    enc.add_argument("--cmpr", type=_pair, default=(0, 0), metavar="I,E")
    enc.set_defaults(func=cmd_codec_encode)
    dec = codec.add_parser("decode")
    dec.add_argument("--protocol", choices=sorted(HEADER_KINDS), required=True)
    dec.add_argument("--hex", help="hex bytes; read from stdin when omitted")
    dec.add_argument("--destination", help="destination address for RPL prefix elision")
    dec.add_argument("--first-segment", help="segment omitted by a reduced SRH")
    dec.set_defaults(func=cmd_codec_decode)
    return parser


# -- helpers -----------------------------------------------------------------

def _profile(args):
    settings = {}
    if args.profile_file is not None:
        try:
            text = args.profile_file.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"cannot read {args.profile_file}: {exc.strerror}")
        settings.update(parse_profile_file(text))
    for key in ("cpu", "nic", "device", "cache_line", "rx_headroom", "mac_pulled",
                "hard_header", "needed_headroom"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    return build_profile(settings)


def _require(args, name):
    if getattr(args, name) is None:
        raise UsageError(f"--{name.replace('_', '-')} is required here")
    return Protocol(args.protocol) if name == "protocol" else getattr(args, name)


def _modes(args, protocol):
    if args.mode is None:
        return list(LEGAL_MODES[protocol])
    return [Mode(args.mode)]


def _write(text, output=None):
    if output is None:
        sys.stdout.write(text)
    else:
        emit_path = Path(output)
        try:
            emit_path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {emit_path}: {exc.strerror}") from exc


def _positive(value, flag):
    if value is not None and value < 1:
        raise UsageError(f"{flag} must be >= 1, got {value}")


# -- commands ----------------------------------------------------------------

def _trigger_output(report, fmt):
    if fmt == "table":
        return report.to_text()
    rows = [{"protocol": p, "mode": m, "param": k, "values": v} for p, m, k, v in report.rows()]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    lines = ["protocol,mode,param,values"]
    lines += [f"{r['protocol']},{r['mode']},{r['param']},{' '.join(map(str, r['values']))}"
              for r in rows]
    return "\n".join(lines) + "\n"


def cmd_triggers(args):
    cpu, nic, dev = _profile(args)
    if args.table1:
        report = table1_report(cpu, nic, dev)
    else:
        protocol = _require(args, "protocol")
        _positive(args.max_seg, "--max-seg")
        _positive(args.max_addr, "--max-addr")
        params = None
        if protocol is Protocol.SRV6 and args.max_seg is not None:
            params = range(1, args.max_seg + 1)
        if protocol is Protocol.RPL:
            params = range(1, (args.max_addr or 63) + 1)
        if protocol is Protocol.RPL and args.cmpr != (0, 0):
            report = TriggerReport(describe_profile(cpu, nic, dev)
                                   + f"; RPL CmprI={args.cmpr[0]} CmprE={args.cmpr[1]}")
            report.add(protocol, Mode.INLINE,
                       rpl_theoretical_triggers(*args.cmpr, params, cpu, nic, dev))
        else:
            report = report_for(protocol, _modes(args, protocol), params, cpu, nic, dev)
    sys.stdout.write(_trigger_output(report, args.format))
    return 0


def _single_config(args):
    protocol = _require(args, "protocol")
    mode = Mode(args.mode) if args.mode else LEGAL_MODES[protocol][0]
    param = {Protocol.IOAM: args.pto, Protocol.SRV6: args.nseg,
             Protocol.RPL: args.naddr}[protocol]
    if param is None:
        flag = {Protocol.IOAM: "--pto", Protocol.SRV6: "--nseg", Protocol.RPL: "--naddr"}
        raise UsageError(f"{flag[protocol]} is required for {protocol.value}")
    return EncapConfig(protocol, mode, param, *args.cmpr)


def cmd_simulate(args):
    _positive(args.packets, "-n")
    cpu, nic, dev = _profile(args)
    config = _single_config(args)
    cost = CostModel(args.cost_realloc, args.cost_byte)
    result = simulate_stream(config, cpu, nic, dev, Strategy(args.strategy),
                             args.packets, args.payload_len, cost)
    if args.format == "table":
        row = result_row(result)
        text = "".join(f"{k:<26} {v:.6f}\n" if isinstance(v, float) else f"{k:<26} {v}\n"
                       for k, v in row.items() if k != "flagged")
    else:
        text = emit_report([result], args.format)
    _write(text, args.output)
    return 0


def _sweep(args, protocol, mode):
    if protocol is Protocol.IOAM:
        top = args.pto_max if args.pto_max is not None else 244
        params = [p for p in default_range(protocol) if p <= top]
    elif protocol is Protocol.SRV6:
        params = range(1, (args.max_seg or 127) + 1)
    else:
        params = range(1, (args.max_addr or 63) + 1)
    return [EncapConfig(protocol, mode, p, *args.cmpr) for p in params]


def cmd_compare(args):
    _positive(args.packets, "-n")
    _positive(args.max_seg, "--max-seg")
    _positive(args.max_addr, "--max-addr")
    cpu, nic, dev = _profile(args)
    protocol = _require(args, "protocol")
    mode = Mode(args.mode) if args.mode else LEGAL_MODES[protocol][0]
    configs = _sweep(args, protocol, mode)
    if not configs:
        raise UsageError("the sweep selects no parameter values")
    cost = CostModel(args.cost_realloc, args.cost_byte)
    report = compare(configs, cpu, nic, dev, args.packets, cost, args.payload_len)
    if args.format == "table":
        lines = [f"{PARAM_NAMES[protocol]:>10}  vanilla  patched  flagged"]
        lines += [f"{p.param:>10}  {p.vanilla.total_reallocs:>7}  {p.patched.total_reallocs:>7}"
                  f"  {'*' if p.flagged else ''}" for p in report.points]
        lines.append(f"flagged: {', '.join(map(str, report.flagged_params)) or 'none'}")
        text = "\n".join(lines) + "\n"
    else:
        text = emit_report(report, args.format)
    _write(text, args.output)
    if args.figure is not None:
        from .plotting import plot_comparison

        plot_comparison(report, args.figure, xlabel=PARAM_NAMES[protocol],
                        title=f"{protocol.value} {mode.value}, cache line {cpu.cache_line_bytes} B, {nic.name}")
    return 0


def _header_from_args(args):
    kind = args.protocol
    extra = {} if args.next_header is None else {"next_header": args.next_header}
    if kind == "ipv6":
        return Ipv6Header(args.src, args.dst, payload_length=args.payload_length,
                          hop_limit=args.hop_limit, traffic_class=args.traffic_class,
                          flow_label=args.flow_label, **extra)
    if kind == "ioam":
        if args.pto is None:
            raise UsageError("--pto is required for ioam")
        return IoamPtoHbh(args.pto, namespace_id=args.namespace, node_len=args.node_len,
                          flags=args.flags, remaining_len=args.remaining_len,
                          trace_type=args.trace_type, **extra)
    if kind == "srv6":
        if not args.segments:
            raise UsageError("--segments is required for srv6")
        return Srv6Header(tuple(args.segments), segments_left=args.segments_left,
                          flags=args.flags, tag=args.tag, reduced=args.reduced, **extra)
    if not args.addresses:
        raise UsageError("--addresses is required for rpl")
    return RplHeader(tuple(args.addresses), cmpr_i=args.cmpr[0], cmpr_e=args.cmpr[1],
                     segments_left=args.segments_left, **extra)


def format_fields(header):
    return "".join(f"{name:<16} {value}\n" for name, value in header_fields(header))


def cmd_codec_encode(args):
    header = _header_from_args(args)
    sys.stdout.write(to_hex(encode_header(header, args.destination)) + "\n")
    return 0


def cmd_codec_decode(args):
    text = args.hex if args.hex is not None else sys.stdin.read()
    header = decode_header(args.protocol, from_hex(text), args.destination,
                           args.first_segment)
    sys.stdout.write(format_fields(header))
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ConfigurationError, InvariantViolation, OSError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError) as exc:
        # InvalidArgument and malformed addresses land here
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
