import json
import math

import pytest

from geoeq import ModelParams, PenaltySpec, find_equilibria, mu_d, phi_b
from geoeq.cli import main


def _read_csv(path):
    text = path.read_text(encoding="utf-8")
    assert "\r" not in text and text.endswith("\n")
    lines = text.splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    assert all(len(r) == len(header) for r in rows)
    return header, rows


# ---------------------------------------------------------------------------
# exit codes


def test_missing_sigma_is_a_config_error(tmp_path, capsys):
    code = main(["shortrun", "--out", str(tmp_path)])
    assert code == 2
    assert "sigma" in capsys.readouterr().err


def test_unknown_format_is_a_config_error(tmp_path, capsys):
    code = main(["shortrun", "--sigma", "2", "--phi", "0.5",
                 "--out", str(tmp_path), "--format", "csv,bogus"])
    assert code == 2
    assert "bogus" in capsys.readouterr().err


def test_bad_grid_is_a_config_error(tmp_path):
    assert main(["shortrun", "--sigma", "2", "--phi", "0.5", "--grid", "1",
                 "--out", str(tmp_path)]) == 2


def test_argparse_rejects_non_numeric_flags():
    with pytest.raises(SystemExit) as exc:
        main(["shortrun", "--sigma", "two"])
    assert exc.value.code == 2


def test_missing_command_exits_via_argparse():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_out_directory_collision_is_an_io_error(tmp_path, capsys):
    blocker = tmp_path / "out"
    blocker.write_text("in the way")
    code = main(["shortrun", "--sigma", "2", "--phi", "0.5",
                 "--grid", "8", "--out", str(blocker)])
    assert code == 4
    assert "i/o failure" in capsys.readouterr().err


def test_solver_domain_failures_are_config_errors(tmp_path):
    # parameter validation happens before any solve
    assert main(["shortrun", "--sigma", "0.5", "--phi", "0.5",
                 "--out", str(tmp_path)]) == 2
    assert main(["shortrun", "--sigma", "2", "--phi", "1.5",
                 "--out", str(tmp_path)]) == 2
    assert main(["shortrun", "--sigma", "2", "--phi", "0.5", "--tau", "2",
                 "--out", str(tmp_path)]) == 2


# ---------------------------------------------------------------------------
# shortrun


def test_shortrun_csv_schema_and_pinned_rows(tmp_path, capsys):
    code = main(["shortrun", "--sigma", "2", "--phi", "0.5", "--grid", "65",
                 "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert f"wrote {tmp_path / 'shortrun.csv'}" in out
    header, rows = _read_csv(tmp_path / "shortrun.csv")
    assert header == ["h", "w", "P_L", "P_R", "C_L", "C_R", "n_L", "n_R"]
    assert len(rows) == 65
    values = [[float(c) for c in r] for r in rows]
    assert values[0][0] == 0.0 and values[-1][0] == 1.0
    assert values[0][1] == pytest.approx(math.sqrt(0.5), rel=1e-11)
    assert values[-1][1] == pytest.approx(1.0 / math.sqrt(0.5), rel=1e-11)
    mid = values[32]
    assert mid[0] == 0.5 and mid[1] == 1.0
    assert mid[2] == pytest.approx(4.0 / 3.0, rel=1e-11)  # sigma=2, phi=0.5
    assert mid[2] == mid[3]
    doc = json.loads((tmp_path / "shortrun.json").read_text())
    shadow = doc["shadow_checks"]
    assert shadow["roundtrip_max_err"] <= 1e-12
    assert shadow["wage_monotone"] is True


def test_shortrun_svg_only_when_requested(tmp_path):
    main(["shortrun", "--sigma", "2", "--phi", "0.5", "--grid", "16",
          "--out", str(tmp_path), "--format", "svg"])
    assert (tmp_path / "shortrun.svg").exists()
    assert not (tmp_path / "shortrun.csv").exists()
    assert not (tmp_path / "shortrun.json").exists()
    svg = (tmp_path / "shortrun.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


# ---------------------------------------------------------------------------
# equilibria


def test_equilibria_csv_matches_library_results(tmp_path, capsys):
    code = main(["equilibria", "--sigma", "2.5", "--phi", "0.3", "--theta", "0",
                 "--mu", "0.2", "--out", str(tmp_path)])
    assert code == 0
    header, rows = _read_csv(tmp_path / "equilibria.csv")
    assert header == ["h_star", "w", "kind", "stability", "slope", "residual"]
    params = ModelParams(sigma=2.5, phi=0.3, theta=0.0)
    eqs = find_equilibria(params, PenaltySpec(kind="logit", mu=0.2))
    assert len(rows) == len(eqs) == 3
    for row, eq in zip(rows, eqs):
        assert float(row[0]) == pytest.approx(eq.h_star, abs=1e-11)
        assert row[2] == eq.kind and row[3] == eq.stability
    table = capsys.readouterr().out
    assert "symmetric_dispersion" in table
    assert "partial_agglomeration" in table


def test_equilibria_shadow_checks_cross_validate_slopes(tmp_path):
    main(["equilibria", "--sigma", "2.5", "--phi", "0.3", "--theta", "0",
          "--mu", "0.2", "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "equilibria.json").read_text())
    checks = doc["shadow_checks"]["slope_cross_checks"]
    assert len(checks) == 3
    for check in checks:
        assert check["abs_gap"] <= 1e-5 * max(1.0, abs(check["closed_form_slope"]))
    convention = doc["shadow_checks"]["symmetric_slope_convention"]
    assert convention["ratio"] == pytest.approx(2.0, rel=1e-12)


# ---------------------------------------------------------------------------
# thresholds


def test_thresholds_json_reproduces_closed_forms(tmp_path):
    code = main(["thresholds", "--sigma", "2", "--phi", "0.4", "--mu", "0.2",
                 "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "thresholds.json").read_text())
    res = doc["results"]
    assert res["mu_d"] == pytest.approx(mu_d(2.0, 0.4), rel=1e-12)
    assert res["phi_b"] == pytest.approx(phi_b(2.0, 0.2), rel=1e-12)
    # default curvature is logarithmic, where detection matches the closed form
    assert res["mu_pitchfork_detected"] == pytest.approx(res["mu_d"], rel=1e-12)
    assert res["dispersion_threshold"] == pytest.approx(res["mu_d"], rel=1e-12)
    crossings = res["phi_crossings_detected"]
    assert len(crossings) == 1
    assert crossings[0] == pytest.approx(0.75, abs=1e-9)


def test_thresholds_without_mu_skips_inversion(tmp_path):
    main(["thresholds", "--sigma", "2", "--phi", "0.4", "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "thresholds.json").read_text())
    assert "phi_b" not in doc["results"]
    header, rows = _read_csv(tmp_path / "thresholds.csv")
    assert len(rows) == 1
    assert rows[0][header.index("mu")] == ""
    assert rows[0][header.index("phi_b")] == ""


def test_thresholds_reports_absent_closed_form_inverse(tmp_path):
    main(["thresholds", "--sigma", "2", "--phi", "0.4", "--mu", "1.5",
          "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "thresholds.json").read_text())
    assert doc["results"]["phi_b"] is None
    assert doc["results"]["phi_crossings_detected"] == []


# ---------------------------------------------------------------------------
# sweep


def test_sweep_csv_and_pitchfork_report(tmp_path, capsys):
    code = main(["sweep", "--param", "mu", "--min", "0.2", "--max", "0.6",
                 "--steps", "11", "--sigma", "2", "--phi", "0.4",
                 "--theta", "0", "--out", str(tmp_path)])
    assert code == 0
    header, rows = _read_csv(tmp_path / "sweep.csv")
    assert header == ["parameter", "h_star", "stability", "kind"]
    sweep_values = sorted({float(r[0]) for r in rows})
    assert len(sweep_values) == 11
    assert sweep_values[0] == 0.2 and sweep_values[-1] == 0.6
    out = capsys.readouterr().out
    assert "pitchfork at mu = 0.370588" in out
    doc = json.loads((tmp_path / "sweep.json").read_text())
    assert len(doc["results"]["bifurcations"]) == 1
    match = doc["shadow_checks"]["threshold_match"]["matches"][0]
    assert match["matched"] == "curvature_adjusted"


def test_phi_sweep_needs_no_base_phi(tmp_path, capsys):
    code = main(["sweep", "--param", "phi", "--min", "0.6", "--max", "0.9",
                 "--steps", "7", "--sigma", "2", "--out", str(tmp_path)])
    assert code == 0
    assert "pitchfork at phi = 0.7" in capsys.readouterr().out
    doc = json.loads((tmp_path / "sweep.json").read_text())
    assert doc["results"]["bifurcations"][0]["value"] == pytest.approx(
        0.75, abs=1e-9)


def test_sweep_requires_param_and_range(tmp_path):
    assert main(["sweep", "--sigma", "2", "--phi", "0.4",
                 "--out", str(tmp_path)]) == 2
    assert main(["sweep", "--param", "mu", "--sigma", "2", "--phi", "0.4",
                 "--out", str(tmp_path)]) == 2


# ---------------------------------------------------------------------------
# config file


def test_config_file_supplies_defaults_and_flags_win(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"sigma": 2.0, "phi": 0.3, "grid": 32}))
    out = tmp_path / "out"
    code = main(["--config", str(config), "shortrun", "--phi", "0.5",
                 "--out", str(out)])
    assert code == 0
    doc = json.loads((out / "shortrun.json").read_text())
    assert doc["config"]["effective_model"]["phi"] == 0.5  # flag beats config
    assert doc["config"]["sigma"] == 2.0
    _, rows = _read_csv(out / "shortrun.csv")
    assert len(rows) == 32  # grid came from the config


def test_unknown_config_key_is_rejected(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"sigma": 2.0, "gird": 32}))
    code = main(["--config", str(config), "shortrun", "--phi", "0.5",
                 "--out", str(tmp_path / "out")])
    assert code == 2
    assert "gird" in capsys.readouterr().err


def test_malformed_config_is_rejected(tmp_path):
    config = tmp_path / "run.json"
    config.write_text("{not json")
    assert main(["--config", str(config), "shortrun", "--sigma", "2",
                 "--phi", "0.5", "--out", str(tmp_path / "out")]) == 2
    assert main(["--config", str(tmp_path / "absent.json"), "shortrun",
                 "--sigma", "2", "--phi", "0.5",
                 "--out", str(tmp_path / "out")]) == 2


# ---------------------------------------------------------------------------
# figures


def test_fig1_is_deterministic_and_pins_endpoints(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["figure", "fig1", "--grid", "65", "--out", str(out)]) == 0
    assert (a / "fig1.csv").read_bytes() == (b / "fig1.csv").read_bytes()
    assert (a / "fig1.svg").read_bytes() == (b / "fig1.svg").read_bytes()
    header, rows = _read_csv(a / "fig1.csv")
    assert header == ["h", "w_phi_0.1", "w_phi_0.5", "w_phi_0.7"]
    first = [float(c) for c in rows[0]]
    last = [float(c) for c in rows[-1]]
    for idx, phi in ((1, 0.1), (2, 0.5), (3, 0.7)):
        assert first[idx] == pytest.approx(math.sqrt(phi), rel=1e-11)
        assert last[idx] == pytest.approx(1.0 / math.sqrt(phi), rel=1e-11)
        assert first[idx] * last[idx] == pytest.approx(1.0, rel=1e-11)


def test_fig2_balanced_row_is_exactly_zero(tmp_path):
    main(["figure", "fig2", "--grid", "65", "--out", str(tmp_path)])
    header, rows = _read_csv(tmp_path / "fig2.csv")
    assert header == ["h", "delta_u_theta_0", "delta_u_theta_1", "delta_u_theta_2"]
    mid = rows[32]
    assert float(mid[0]) == 0.5
    assert mid[1:] == ["0", "0", "0"]
    doc = json.loads((tmp_path / "fig2.json").read_text())
    assert doc["shadow_checks"]["curvature_amplifies_at_0.8"] is True


def test_fig5_crossings_cohere_with_equilibria(tmp_path):
    main(["figure", "fig5", "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "fig5.json").read_text())
    shadow = doc["shadow_checks"]
    assert shadow["net_sign_changes_phi_0.3"] == 3
    assert shadow["net_sign_changes_phi_0.5"] == 3
    assert shadow["net_sign_changes_phi_0.9"] == 1
    eqs = doc["results"]["equilibria"]
    assert [e["kind"] for e in eqs["phi_0.9"]] == ["symmetric_dispersion"]
    tops = {k: max(e["h_star"] for e in v) for k, v in eqs.items()}
    assert tops["phi_0.3"] == pytest.approx(0.963425737484033, abs=1e-9)
    assert tops["phi_0.5"] == pytest.approx(0.859121243611137, abs=1e-9)
    header, _ = _read_csv(tmp_path / "fig5.csv")
    assert header == ["h", "delta_u_phi_0.3", "delta_u_phi_0.5",
                      "delta_u_phi_0.9", "delta_t"]


def test_fig6_left_parallel_run_matches_serial(tmp_path):
    serial, parallel = tmp_path / "s", tmp_path / "p"
    assert main(["figure", "fig6-left", "--steps", "41",
                 "--out", str(serial)]) == 0
    assert main(["figure", "fig6-left", "--steps", "41", "--workers", "2",
                 "--out", str(parallel)]) == 0
    assert (serial / "fig6-left.csv").read_bytes() == \
        (parallel / "fig6-left.csv").read_bytes()
    docs = []
    for out in (serial, parallel):
        doc = json.loads((out / "fig6-left.json").read_text())
        doc.pop("config")  # echoes the differing --out and --workers flags
        docs.append(doc)
    assert docs[0] == docs[1]


def test_fig6_right_reports_the_freeness_pitchfork(tmp_path, capsys):
    assert main(["figure", "fig6-right", "--steps", "25",
                 "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "pitchfork at phi = 0.7107935" in out
