"""
Vanilla versus patched over packet streams.

Throughput is hardware bound, so streams are scored by reallocation count,
bytes copied and a linear cost model instead of packets per second.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from .buffer_model import CpuProfile, NetDevice, NicProfile
from .errors import InvalidArgument
from .lwt_pipeline import EncapConfig, Resolver, Strategy, run_flow

REPORT_COLUMNS = (
    "param",
    "strategy",
    "n_packets",
    "total_reallocs",
    "total_bytes_copied",
    "mean_reallocs_per_packet",
    "modeled_cost",
    "flagged",
)
FLOAT_COLUMNS = ("mean_reallocs_per_packet", "modeled_cost")


@dataclass(frozen=True)
class CostModel:
    fixed_cost_per_realloc: float = 1.0
    cost_per_copied_byte: float = 0.0

    def __post_init__(self):
        if self.fixed_cost_per_realloc < 0 or self.cost_per_copied_byte < 0:
            raise InvalidArgument("cost model terms must be >= 0")


DEFAULT_COST = CostModel()


@dataclass(frozen=True)
class SimResult:
    config: EncapConfig
    strategy: Strategy
    n_packets: int
    total_reallocs: int
    total_bytes_copied: int
    modeled_cost: float
    realloc_counts: tuple = ()

    @property
    def mean_reallocs_per_packet(self) -> float:
        return self.total_reallocs / self.n_packets


def simulate_stream(config: EncapConfig, cpu: CpuProfile, nic: NicProfile,
                    dev: NetDevice, strategy: Strategy, n_packets: int,
                    payload_len: int = 0, cost: CostModel = DEFAULT_COST,
                    resolver: Optional[Resolver] = None) -> SimResult:
    traces = run_flow(config, cpu, nic, dev, resolver, strategy, n_packets, payload_len)
    events = [e for t in traces for e in t.events]
    copied = sum(e.bytes_copied for e in events)
    return SimResult(
        config=config,
        strategy=Strategy(strategy),
        n_packets=n_packets,
        total_reallocs=len(events),
        total_bytes_copied=copied,
        modeled_cost=len(events) * cost.fixed_cost_per_realloc + copied * cost.cost_per_copied_byte,
        realloc_counts=tuple(t.realloc_count for t in traces),
    )


@dataclass(frozen=True)
class ComparisonPoint:
    param: int
    vanilla: SimResult
    patched: SimResult

    @property
    def flagged(self) -> bool:
        """Vanilla pays for reallocations the patch avoids (a rate drop)."""
        return self.vanilla.total_reallocs > self.patched.total_reallocs

    @property
    def realloc_reduction(self) -> float:
        if self.vanilla.total_reallocs == 0:
            return 0.0
        return 1.0 - self.patched.total_reallocs / self.vanilla.total_reallocs


@dataclass
class ComparisonReport:
    points: List[ComparisonPoint]

    @property
    def flagged_params(self) -> List[int]:
        return [p.param for p in self.points if p.flagged]

    def rows(self):
        for point in self.points:
            for result in (point.vanilla, point.patched):
                yield result_row(result, point.param, point.flagged)


def compare(configs: Sequence[EncapConfig], cpu: CpuProfile, nic: NicProfile,
            dev: NetDevice, n_packets: int, cost: CostModel = DEFAULT_COST,
            payload_len: int = 0, resolver: Optional[Resolver] = None) -> ComparisonReport:
    if not configs:
        raise InvalidArgument("comparison sweep is empty")
    points = []
    for config in sorted(configs, key=lambda c: c.param):
        runs = [simulate_stream(config, cpu, nic, dev, s, n_packets, payload_len, cost, resolver)
                for s in (Strategy.VANILLA, Strategy.PATCHED)]
        points.append(ComparisonPoint(config.param, *runs))
    return ComparisonReport(points)


def result_row(result: SimResult, param=None, flagged=None) -> dict:
    if param is None:
        param = result.config.param
    return {
        "param": param,
        "strategy": result.strategy.value,
        "n_packets": result.n_packets,
        "total_reallocs": result.total_reallocs,
        "total_bytes_copied": result.total_bytes_copied,
        "mean_reallocs_per_packet": result.mean_reallocs_per_packet,
        "modeled_cost": result.modeled_cost,
        "flagged": bool(flagged),
    }


def _cell(key, value):
    if key in FLOAT_COLUMNS:
        return f"{value:.6f}"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow([_cell(k, row[k]) for k in REPORT_COLUMNS])
    return buf.getvalue()


def render_json(rows) -> str:
    # floats are written as fixed 6-digit literals, so assemble by hand
    items = []
    for row in rows:
        parts = []
        for k in REPORT_COLUMNS:
            v = row[k]
            text = _cell(k, v) if k in FLOAT_COLUMNS or isinstance(v, bool) else json.dumps(v)
            parts.append(f"{json.dumps(k)}: {text}")
        items.append("  {" + ", ".join(parts) + "}")
    if not items:
        return "[]\n"
    return "[\n" + ",\n".join(items) + "\n]\n"


def emit_report(results, fmt: str = "csv", destination=None) -> str:
    """Serialise ``results`` as CSV or JSON.

    ``results`` is a :class:`ComparisonReport`, or an iterable of
    :class:`SimResult` or row dicts.  The text is written to
    ``destination`` (a path or a writable stream) when given, and returned.
    """
    if isinstance(results, ComparisonReport):
        rows = list(results.rows())
    else:
        rows = [r if isinstance(r, dict) else result_row(r) for r in results]
    if fmt == "csv":
        text = render_csv(rows)
    elif fmt == "json":
        text = render_json(rows)
    else:
        raise InvalidArgument(f"unknown report format {fmt!r}")
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
        return text
    path = Path(destination)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc
    return text
