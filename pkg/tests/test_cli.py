"""End-to-end tests for the command-line interface.

Every test drives ``bvlab.cli.main`` in-process and inspects the exit
code plus captured stdout/stderr, so the full argument-parsing ->
request-building -> handler -> rendering pipeline is exercised exactly
as a shell user would see it.  Exit-code contract: 0 success, 1 a check
reported a violation (or routes disagreed), 2 usage/domain error,
3 capacity exceeded.
"""

from __future__ import annotations

import json

import pytest

import bvlab.cli as cli
from bvlab.bounds import BoundCheckReport
from bvlab.errors import ConsistencyError
from bvlab.harness import bv_discrepancy_sum
from bvlab.progressions import f_R_decomposition, psi_progression
from bvlab.reports import BV_CSV_HEADER, REPORT_CSV_HEADER, report_to_dict
from bvlab.service import schemas


def run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run_cli(capsys, argv)
    assert code == 0, f"expected success, stderr: {err!r}"
    return json.loads(out)


# -- constants command -----------------------------------------------------


def test_constants_single_recomputed_id(capsys):
    payload = run_json(capsys, ["constants", "C2", "--cutoff", "100000"])
    (entry,) = payload["entries"]
    assert entry["id"] == "C2"
    value = entry["value"]
    assert 1.943 < value["lo"] <= value["hi"] < 1.944
    assert value["width"] < 1e-9
    assert entry["cutoff"] == 100000
    assert isinstance(entry["meets_precision_target"], bool)
    assert "Euler factors to 100000" in entry["note"]


def test_constants_fixture_ids(capsys):
    payload = run_json(capsys, ["constants", "T[A=2]", "gamma"])
    by_id = {e["id"]: e for e in payload["entries"]}
    assert set(by_id) == {"T[A=2]", "gamma"}
    t_entry = by_id["T[A=2]"]
    assert t_entry["value"]["lo"] == t_entry["value"]["hi"] == 6978.0
    assert t_entry["cutoff"] is None
    assert t_entry["meets_precision_target"] is None
    gamma = by_id["gamma"]["value"]
    assert 0.577 < gamma["lo"] <= gamma["hi"] < 0.578


def test_constants_default_covers_catalog(capsys):
    payload = run_json(capsys, ["constants", "--cutoff", "100000"])
    ids = [e["id"] for e in payload["entries"]]
    assert len(ids) == len(set(ids))
    # 11 recomputed ids + B1(1) + B2(1) + 53 catalog fixtures
    assert len(ids) == 66
    for expected in ("C2", "B3", "zeta(3/2)", "B1(1)", "B2(1)", "gamma",
                     "T[A=2]", "C1p[A=7]"):
        assert expected in ids


def test_constants_unknown_id_exits_2(capsys):
    code, out, err = run_cli(capsys, ["constants", "BOGUS"])
    assert code == 2
    assert out == ""
    assert "unknown constant id" in err
    # the error names the valid ids so the user can self-correct
    assert "C2" in err and "T[A=2]" in err and "B1(l)" in err


def test_constants_csv_format(capsys):
    code, out, err = run_cli(
        capsys, ["--format", "csv", "constants", "C2", "--cutoff", "100000"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ("id,lo,hi,mid,width,cutoff,"
                        "meets_precision_target,note")
    assert len(lines) == 2
    assert lines[1].startswith("C2,")
    assert "\r" not in out and out.endswith("\n")


# -- verify command --------------------------------------------------------


def test_verify_full_suite_passes(capsys):
    payload = run_json(capsys, ["verify", "--N", "20000"])
    assert payload["ok"] is True
    reports = payload["reports"]
    assert all(r["passed"] for r in reports)
    ids = {r["check_id"] for r in reports}
    # every family of checks contributes at least one report
    for expected in ("classical_mertens_product", "classical_q_over_phi",
                     "mu_over_phi", "squarefree_remainders",
                     "misc_divisor_bound", "dyadic_partition",
                     "large_sieve", "convolution_identity",
                     "truncation_estimate"):
        assert expected in ids
    sums = payload["partition_sums"]
    assert set(sums) == {"sum_sqrtMN", "sum_MsqrtN", "sum_sqrtMN2", "sum_MN"}


def test_verify_partition_sums_values(capsys):
    payload = run_json(
        capsys, ["verify", "partition", "--X", "16", "--Y", "16", "--K", "3"])
    assert payload["ok"] is True
    sums = payload["partition_sums"]
    assert sums["sum_MN"] == 34.0
    assert sums["sum_sqrtMN"] == pytest.approx(12.242640687119284, rel=1e-9)
    assert sums["sum_MsqrtN"] == pytest.approx(25.798989873223334, rel=1e-9)
    assert sums["sum_sqrtMN2"] == pytest.approx(15.899494936611664, rel=1e-9)
    (report,) = payload["reports"]
    assert report["check_id"] == "dyadic_partition"
    assert report["passed"] is True


def test_verify_single_remainder_modulus(capsys):
    payload = run_json(capsys, ["verify", "remainders", "--l", "30",
                                "--x1", "100", "--x", "1000"])
    (report,) = payload["reports"]
    assert report["check_id"] == "squarefree_remainders"
    assert report["params"]["l"] == 30
    assert report["params"]["x1"] == 100.0
    assert report["params"]["x"] == 1000.0
    assert report["points"] == 2


def test_verify_csv_format(capsys):
    code, out, err = run_cli(
        capsys,
        ["--format", "csv", "verify", "partition", "--X", "16", "--Y", "16",
         "--K", "3"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(REPORT_CSV_HEADER)
    assert len(lines) == 2
    assert "\r" not in out


def test_verify_unknown_check_exits_2(capsys):
    code, out, err = run_cli(capsys, ["verify", "bogus_check"])
    assert code == 2
    assert "unknown check id" in err
    for valid in ("classical", "mu_over_phi", "partition", "suite"):
        assert valid in err


def test_verify_mu_over_phi_below_floor_exits_2(capsys):
    code, out, err = run_cli(capsys, ["verify", "mu_over_phi",
                                      "--N", "7919"])
    assert code == 2
    assert "7920" in err


def test_verify_over_tables_limit_exits_3(capsys):
    code, out, err = run_cli(
        capsys, ["--limit", "20000", "verify", "--N", "50000"])
    assert code == 3
    assert err.startswith("capacity error:")
    assert "raise --limit" in err


# -- chars command ---------------------------------------------------------


def test_chars_q8_table(capsys):
    payload = run_json(capsys, ["chars", "--q", "8"])
    assert payload["q"] == 8
    assert payload["count"] == 4
    assert payload["primitive_count"] == 2
    chars = payload["characters"]
    assert [c["index"] for c in chars] == [0, 1, 2, 3]
    assert sorted(c["conductor"] for c in chars) == [1, 4, 8, 8]
    principal = [c for c in chars if c["is_principal"]]
    assert len(principal) == 1 and principal[0]["conductor"] == 1
    assert all(c["is_real"] for c in chars)  # (Z/8)* has exponent 2


def test_chars_csv_format(capsys):
    code, out, err = run_cli(capsys, ["--format", "csv", "chars", "--q", "8"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ("q,index,exponents,conductor,order,"
                        "is_principal,is_primitive,is_real")
    assert len(lines) == 5
    assert "true" in out and "false" in out  # lowercase booleans
    assert "True" not in out and "False" not in out


def test_chars_over_cap_exits_3(capsys):
    code, out, err = run_cli(capsys, ["chars", "--q", "20000"])
    assert code == 3
    assert err.startswith("capacity error:")


# -- psi command -----------------------------------------------------------


def test_psi_matches_library(capsys):
    payload = run_json(capsys, ["psi", "--x", "1000", "--q", "5",
                                "--a", "2", "--R", "2"])
    sums = psi_progression(1000.0, 5, 2)
    f_r = f_R_decomposition(1000.0, 5, 2, 2)
    assert payload["x"] == 1000.0
    assert payload["q"] == 5 and payload["a"] == 2
    assert payload["phi_q"] == 4
    assert payload["expected"] == 250.0
    assert payload["psi"] == pytest.approx(sums.psi, rel=1e-9)
    assert payload["discrepancy"] == pytest.approx(sums.discrepancy,
                                                   rel=1e-9)
    assert payload["f_R"] == pytest.approx(f_r, rel=1e-9)
    assert payload["r_cut"] == 2


def test_psi_without_r_cut(capsys):
    payload = run_json(capsys, ["psi", "--x", "1000", "--q", "5", "--a", "2"])
    assert payload["f_R"] is None
    assert payload["r_cut"] is None


def test_psi_csv_format(capsys):
    code, out, err = run_cli(
        capsys, ["--format", "csv", "psi", "--x", "1000", "--q", "5",
                 "--a", "2"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,q,a,phi_q,psi,expected,discrepancy,f_R,R"
    assert len(lines) == 2


def test_psi_noncoprime_exits_2(capsys):
    code, out, err = run_cli(capsys, ["psi", "--x", "1000", "--q", "6",
                                      "--a", "3"])
    assert code == 2
    assert err.startswith("error:")


# -- bv command ------------------------------------------------------------


def test_bv_fixed_mode_values(capsys):
    payload = run_json(capsys, ["bv", "--x", "2000", "--Q", "12"])
    assert payload["x"] == 2000.0
    assert payload["Q"] == 12
    assert payload["mode"] == "y-fixed"
    assert payload["total"] == pytest.approx(167.05090285445635, rel=1e-9)
    assert len(payload["records"]) == 12


def test_bv_grid_mode_values(capsys):
    payload = run_json(capsys, ["bv", "--x", "2000", "--Q", "12",
                                "--y-mode", "grid"])
    assert payload["mode"] == "y-sup-grid"
    assert payload["total"] == pytest.approx(239.4824390970428, rel=1e-9)


def test_bv_filters_follow_library(capsys):
    payload = run_json(capsys, ["bv", "--x", "2000", "--Q", "12",
                                "--squarefree", "--exclude-q0", "4"])
    oracle = bv_discrepancy_sum(2000.0, 12, squarefree_only=True,
                                exclude_q0=4)
    assert payload["squarefree_only"] is True
    assert payload["exclude_q0"] == 4
    # stdout values carry 10 significant digits
    assert payload["total"] == pytest.approx(oracle.total, rel=1e-9)
    flagged = {r["q"]: r["flags"] for r in payload["records"]}
    assert flagged[4]["excluded"] is True and flagged[4]["squarefree"] is False
    assert flagged[7]["excluded"] is False and flagged[7]["squarefree"] is True


def test_bv_csv_format(capsys):
    code, out, err = run_cli(
        capsys, ["--format", "csv", "bv", "--x", "2000", "--Q", "12"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(BV_CSV_HEADER)
    assert len(lines) == 13  # header + one row per modulus


def test_bv_over_tables_limit_exits_3(capsys):
    code, out, err = run_cli(
        capsys, ["--limit", "10000", "bv", "--x", "50000", "--Q", "12"])
    assert code == 3
    assert err.startswith("capacity error:")


def test_bv_bad_mode_exits_2(capsys):
    code, out, err = run_cli(capsys, ["bv", "--x", "2000", "--Q", "12",
                                      "--y-mode", "diagonal"])
    assert code == 2
    assert "invalid choice" in err


# -- report command --------------------------------------------------------


def test_report_trend_rows(capsys):
    payload = run_json(
        capsys, ["report", "trend", "--x-list", "1e4,1e5",
                 "--q-override", "10,30"])
    assert payload["a_param"] == 2
    assert payload["squarefree_only"] is True
    assert "desk-scale" in payload["note"]
    rows = payload["rows"]
    assert [r["x"] for r in rows] == [10000.0, 100000.0]
    assert [r["Q"] for r in rows] == [10, 30]
    assert rows[0]["total"] == pytest.approx(172.6094453589469, rel=1e-9)
    assert rows[1]["normalized"] == pytest.approx(0.42417598406107, rel=1e-9)
    assert all(r["degenerate"] and r["overridden"] for r in rows)


def test_report_trend_csv(capsys):
    code, out, err = run_cli(
        capsys, ["--format", "csv", "report", "trend", "--x-list", "1e4",
                 "--q-override", "10"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,Q,total,normalized,degenerate,overridden"
    assert len(lines) == 2


def test_report_trend_override_mismatch_exits_2(capsys):
    code, out, err = run_cli(
        capsys, ["report", "trend", "--x-list", "1e4,1e5",
                 "--q-override", "10"])
    assert code == 2
    assert "one modulus bound per x value" in err


def test_report_trend_bad_x_list_exits_2(capsys):
    code, out, err = run_cli(
        capsys, ["report", "trend", "--x-list", "1e4,apple"])
    assert code == 2
    assert "--x-list" in err


def test_report_probe_observational_exit_0(capsys):
    payload = run_json(capsys, ["report", "probe", "--Q", "20", "--R", "3",
                                "--M", "64", "--Nlen", "64"])
    report = payload["report"]
    assert report["check_id"] == "bilinear_probe"
    assert report["observational"] is True
    assert report["passed"] is True
    assert "lhs=" in report["notes"]


# -- violation exit code ---------------------------------------------------


def _patched_route(monkeypatch, key, handler):
    path, builder, _, model = cli._ROUTES[key]
    monkeypatch.setitem(cli._ROUTES, key, (path, builder, handler, model))


def test_verify_violation_exits_1(monkeypatch, capsys):
    # No genuine in-domain violation exists at desk scale (that is the
    # point of the suite), so force a failing response to pin down the
    # exit-code mapping.
    failing = BoundCheckReport(
        check_id="classical_mertens_product",
        params={"N": 100},
        domain="integer n in [2, 100]",
        points=99,
        violations=((17, 2.0, 1.5),),
        worst_margin=-0.5,
    )

    def fake_handler(req):
        return schemas.VerifyResponse(
            ok=False,
            reports=[schemas.ReportModel(**report_to_dict(failing))],
            partition_sums=None,
        )

    _patched_route(monkeypatch, "verify", fake_handler)
    code, out, err = run_cli(capsys, ["verify", "classical"])
    assert code == 1
    payload = json.loads(out)
    assert payload["ok"] is False
    (report,) = payload["reports"]
    assert report["passed"] is False
    assert report["violations"] == [{"at": 17, "lhs": 2.0, "rhs": 1.5}]


def test_probe_violation_exits_1(monkeypatch, capsys):
    failing = BoundCheckReport(
        check_id="bilinear_probe",
        params={},
        domain="probe",
        points=1,
        violations=((1, 2.0, 1.0),),
        worst_margin=-1.0,
    )

    def fake_handler(req):
        return schemas.ProbeResponse(
            report=schemas.ReportModel(**report_to_dict(failing)))

    _patched_route(monkeypatch, "report/probe", fake_handler)
    code, out, err = run_cli(capsys, ["report", "probe"])
    assert code == 1


def test_consistency_error_exits_1(monkeypatch, capsys):
    def fake_handler(req):
        raise ConsistencyError("dual evaluation routes disagree")

    _patched_route(monkeypatch, "verify", fake_handler)
    code, out, err = run_cli(capsys, ["verify", "classical"])
    assert code == 1
    assert err.startswith("consistency violation:")
    assert "dual evaluation routes disagree" in err


# -- usage errors ----------------------------------------------------------


def test_no_subcommand_exits_2(capsys):
    code, out, err = run_cli(capsys, [])
    assert code == 2
    assert "error:" in err


def test_unknown_flag_exits_2(capsys):
    code, out, err = run_cli(capsys, ["bv", "--x", "100", "--Q", "5",
                                      "--frobnicate"])
    assert code == 2


def test_missing_required_flag_exits_2(capsys):
    code, out, err = run_cli(capsys, ["bv", "--x", "100"])
    assert code == 2
    assert "--Q" in err or "usage" in err.lower()


def test_help_exits_0(capsys):
    with pytest.raises(SystemExit) as exc_info:
        cli.main(["--help"])
    assert exc_info.value.code == 0
    out = capsys.readouterr().out
    for command in ("constants", "verify", "bv", "psi", "chars", "report",
                    "serve"):
        assert command in out


# -- determinism and reproducibility ---------------------------------------


def test_same_argv_byte_identical(capsys):
    argv = ["bv", "--x", "2000", "--Q", "12"]
    _, out1, _ = run_cli(capsys, argv)
    _, out2, _ = run_cli(capsys, argv)
    assert out1 == out2


def test_worker_count_never_changes_output(capsys):
    base = ["verify", "classical", "--N", "20000"]
    code1, out1, _ = run_cli(capsys, ["--workers", "1"] + base)
    code4, out4, _ = run_cli(capsys, ["--workers", "4"] + base)
    assert code1 == code4 == 0
    assert out1 == out4


def test_seed_changes_large_sieve_but_stays_reproducible(capsys):
    argv = ["verify", "large_sieve", "--trials", "5"]
    _, out_a1, _ = run_cli(capsys, ["--seed", "1"] + argv)
    _, out_a2, _ = run_cli(capsys, ["--seed", "1"] + argv)
    _, out_b, _ = run_cli(capsys, ["--seed", "2"] + argv)
    assert out_a1 == out_a2
    assert out_a1 != out_b


# -- config file handling --------------------------------------------------


def test_config_file_sets_format(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# workbench settings\noutput_format=csv\nseed=999\n")
    code, out, err = run_cli(
        capsys, ["--config", str(cfg), "bv", "--x", "2000", "--Q", "12"])
    assert code == 0
    assert out.splitlines()[0] == ",".join(BV_CSV_HEADER)


def test_flag_overrides_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("output_format=csv\n")
    code, out, err = run_cli(
        capsys, ["--config", str(cfg), "--format", "json",
                 "bv", "--x", "2000", "--Q", "12"])
    assert code == 0
    assert out.startswith("{")
    json.loads(out)


def test_config_unknown_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("frobnication_level=9\n")
    code, out, err = run_cli(
        capsys, ["--config", str(cfg), "chars", "--q", "8"])
    assert code == 2
    assert "frobnication_level" in err


def test_config_missing_file_exits_2(capsys):
    code, out, err = run_cli(
        capsys, ["--config", "/nonexistent/run.cfg", "chars", "--q", "8"])
    assert code == 2


def test_config_limit_enforced(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("tables_limit=2e4\n")
    code, out, err = run_cli(
        capsys, ["--config", str(cfg), "verify", "--N", "50000"])
    assert code == 3


# -- --server transport parity ---------------------------------------------


def test_server_flag_byte_identical_with_in_process(monkeypatch, capsys):
    """--server must produce byte-identical output to the in-process path.

    The HTTP hop is routed through the ASGI test client, so this covers
    request serialization, service dispatch, and response re-parsing
    without opening a socket.
    """
    fastapi_testclient = pytest.importorskip("fastapi.testclient")
    import httpx

    from bvlab.service.app import app

    client = fastapi_testclient.TestClient(app)

    def fake_post(url, json=None, timeout=None):
        assert url.startswith("http://workbench")
        return client.post(url[len("http://workbench"):], json=json)

    monkeypatch.setattr(httpx, "post", fake_post)

    for argv in (["chars", "--q", "8"],
                 ["psi", "--x", "1000", "--q", "5", "--a", "2", "--R", "2"],
                 ["bv", "--x", "2000", "--Q", "12"],
                 ["constants", "T[A=3]", "gamma"]):
        code_local, out_local, _ = run_cli(capsys, argv)
        code_remote, out_remote, _ = run_cli(
            capsys, ["--server", "http://workbench"] + argv)
        assert code_local == code_remote == 0
        assert out_local == out_remote


def test_server_flag_maps_error_kinds(monkeypatch, capsys):
    fastapi_testclient = pytest.importorskip("fastapi.testclient")
    import httpx

    from bvlab.service.app import app

    client = fastapi_testclient.TestClient(app)

    def fake_post(url, json=None, timeout=None):
        return client.post(url[len("http://workbench"):], json=json)

    monkeypatch.setattr(httpx, "post", fake_post)

    code, out, err = run_cli(
        capsys, ["--server", "http://workbench", "chars", "--q", "20000"])
    assert code == 3
    assert err.startswith("capacity error:")

    code, out, err = run_cli(
        capsys, ["--server", "http://workbench", "psi", "--x", "1000",
                 "--q", "6", "--a", "3"])
    assert code == 2
    assert err.startswith("error:")
