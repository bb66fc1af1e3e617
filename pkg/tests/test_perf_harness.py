import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwt_headroom.buffer_model import CpuProfile, NetDevice
from lwt_headroom.errors import InvalidArgument
from lwt_headroom.lwt_pipeline import Strategy, ioam, rpl, srv6
from lwt_headroom.perf_harness import (
    REPORT_COLUMNS,
    CostModel,
    compare,
    emit_report,
    simulate_stream,
)
from lwt_headroom.profiles import NICS

CPU = CpuProfile(64)
NIC = NICS["i40e-default"]
ETH = NetDevice("eth0", 14, 0)
TRIGGER = ioam(236)


def test_trigger_stream_vanilla():
    r = simulate_stream(TRIGGER, CPU, NIC, ETH, Strategy.VANILLA, 1000)
    assert r.total_reallocs == 2000 and r.modeled_cost == 2000
    assert r.mean_reallocs_per_packet == 2.0


def test_trigger_stream_patched():
    r = simulate_stream(TRIGGER, CPU, NIC, ETH, Strategy.PATCHED, 1000)
    assert r.total_reallocs == 1001
    assert r.realloc_counts[:3] == (2, 1, 1)


@pytest.mark.parametrize("strategy", list(Strategy))
def test_quiet_stream(strategy):
    r = simulate_stream(ioam(4), CPU, NIC, ETH, strategy, 1000, cost=CostModel(5, 0.5))
    assert r.total_reallocs == 0 and r.modeled_cost == 0


def test_bytes_copied_tracks_data_len():
    # first cow copies the payload, second copies payload plus the pushed header
    r = simulate_stream(TRIGGER, CPU, NIC, ETH, Strategy.VANILLA, 2, payload_len=100,
                        cost=CostModel(0, 1))
    assert r.total_bytes_copied == 2 * (100 + 356)
    assert r.modeled_cost == r.total_bytes_copied


def test_cost_model_rejects_negative():
    with pytest.raises(InvalidArgument):
        CostModel(-1, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 127), st.sampled_from(["encap", "encap-red", "inline"]), st.integers(2, 50))
def test_patched_saves_n_minus_one_on_triggers(n, mode, packets):
    cfg = srv6(n, mode)
    van = simulate_stream(cfg, CPU, NIC, ETH, Strategy.VANILLA, packets)
    pat = simulate_stream(cfg, CPU, NIC, ETH, Strategy.PATCHED, packets)
    assert pat.total_reallocs <= van.total_reallocs
    triggers = van.realloc_counts[0] == 2
    assert (van.total_reallocs - pat.total_reallocs) == (packets - 1 if triggers else 0)


@given(st.floats(0, 10), st.floats(0, 10), st.floats(0, 10), st.floats(0, 1))
def test_cost_monotone(a, b, extra_a, extra_b):
    lo = simulate_stream(TRIGGER, CPU, NIC, ETH, Strategy.VANILLA, 3, 64, CostModel(a, b))
    hi = simulate_stream(TRIGGER, CPU, NIC, ETH, Strategy.VANILLA, 3, 64,
                         CostModel(a + extra_a, b + extra_b))
    assert hi.modeled_cost >= lo.modeled_cost


def test_compare_srv6_encap_flags():
    report = compare([srv6(n) for n in range(1, 35)], CPU, NIC, ETH, 50)
    assert report.flagged_params == [13, 17, 21, 25, 29, 33]
    assert report.points[12].realloc_reduction == pytest.approx(1 - 51 / 100)


def test_compare_ioam_inline_flags():
    report = compare([ioam(p) for p in range(4, 245, 4)], CPU, NIC, ETH, 10)
    assert report.flagged_params == [236, 240]


def test_compare_rpl_flat():
    report = compare([rpl(n) for n in range(1, 64)], CPU, NIC, ETH, 10)
    assert report.flagged_params == []
    assert all(p.vanilla.realloc_counts == p.patched.realloc_counts for p in report.points)


def test_compare_empty():
    with pytest.raises(InvalidArgument):
        compare([], CPU, NIC, ETH, 10)


def test_csv_single_result():
    r = simulate_stream(TRIGGER, CPU, NIC, ETH, Strategy.PATCHED, 1000)
    lines = emit_report([r], "csv").splitlines()
    assert lines == [",".join(REPORT_COLUMNS), "236,patched,1000,1001,256,1.001000,1001.000000,false"]


def test_csv_comparison_rows():
    report = compare([srv6(n) for n in range(1, 35)], CPU, NIC, ETH, 10)
    lines = emit_report(report, "csv").splitlines()
    assert len(lines) == 1 + 68
    flagged = {int(l.split(",")[0]) for l in lines[1:] if l.endswith("true")}
    assert flagged == {13, 17, 21, 25, 29, 33}


def test_csv_empty():
    assert emit_report([], "csv") == ",".join(REPORT_COLUMNS) + "\n"


def test_json_matches_csv():
    report = compare([srv6(n) for n in range(12, 15)], CPU, NIC, ETH, 10)
    rows = json.loads(emit_report(report, "json"))
    assert [list(r) for r in rows] == [list(REPORT_COLUMNS)] * 6
    assert rows[2]["param"] == 13 and rows[2]["flagged"] is True
    assert '"mean_reallocs_per_packet": 2.000000' in emit_report(report, "json")


def test_report_is_deterministic(tmp_path):
    def run():
        return emit_report(compare([srv6(n) for n in range(1, 35)], CPU, NIC, ETH, 20), "json")
    assert run() == run()
    out = tmp_path / "r.csv"
    emit_report([simulate_stream(TRIGGER, CPU, NIC, ETH, "vanilla", 5)], "csv", out)
    assert out.read_text().startswith("param,")
    buf = io.StringIO()
    emit_report([], "json", buf)
    assert buf.getvalue() == "[]\n"


def test_report_io_error(tmp_path):
    with pytest.raises(OSError, match="missing"):
        emit_report([], "csv", tmp_path / "missing" / "r.csv")


def test_unknown_format():
    with pytest.raises(InvalidArgument):
        emit_report([], "xml")
