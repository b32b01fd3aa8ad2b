import json

import pytest

from pairctx.cli import main
from pairctx.dataio import load_raw_counts


class TestExitCodes:
    def test_missing_phi_s_is_usage_error(self, tmp_path, capsys):
        assert main(["optimize"]) == 2

    def test_bad_grid_is_usage_error(self):
        assert main(["sweep", "--grid", "bogus", "--no-figures"]) == 2

    def test_conflicting_noise_flags(self):
        assert main(["sweep", "--ideal", "--noise-from", "0.9,0.8", "--no-figures"]) == 2

    def test_bad_noise_pair(self):
        assert main(["sweep", "--noise-from", "0.9", "--no-figures"]) == 2

    def test_missing_input_file_is_io_error(self, tmp_path):
        missing = tmp_path / "nope.csv"
        assert main(["analyze", "--a1", str(missing), "--a2", str(missing)]) == 3

    def test_malformed_table_is_usage_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("phi_s_deg,n_hh\n1,2\n")
        assert main(["analyze", "--a1", str(bad), "--a2", str(bad)]) == 2

    def test_single_raw_table_rejected(self, tmp_path):
        assert main(["analyze", "--a1", str(tmp_path / "x.csv")]) == 2

    def test_unknown_subcommand(self):
        assert main(["transmogrify"]) == 2


class TestAnalyzeCommand:
    def test_bundled_report_with_figures(self, tmp_path):
        out = tmp_path / "analysis.json"
        assert main(["analyze", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["rows"]) == 9
        names = {p.name for p in tmp_path.iterdir()}
        assert "analysis_visibilities.png" in names
        assert "analysis_probabilities.png" in names
        assert "analysis_contrast.png" in names

    def test_no_figures_flag(self, tmp_path):
        out = tmp_path / "analysis.csv"
        assert main(["analyze", "--out", str(out), "--no-figures"]) == 0
        assert {p.name for p in tmp_path.iterdir()} == {"analysis.csv"}
        header = out.read_text().splitlines()[0]
        assert header.startswith("phi_s_deg,c_hv,")

    def test_figures_redirect(self, tmp_path):
        out = tmp_path / "analysis.json"
        figdir = tmp_path / "figs"
        assert main(["analyze", "--out", str(out), "--figures", str(figdir)]) == 0
        assert (figdir / "analysis_contrast.png").exists()

    def test_stdout_json(self, capfdbinary):
        assert main(["analyze", "--format", "json"]) == 0
        out, _ = capfdbinary.readouterr()
        payload = json.loads(out)
        assert len(payload["rows"]) == 9


class TestSimulateCommand:
    def test_writes_parseable_tables(self, tmp_path, capsys):
        prefix = tmp_path / "sim"
        code = main([
            "simulate", "--grid", "20,22.5", "--budget", "2000",
            "--seed", "7", "--raw-out", str(prefix),
        ])
        assert code == 0
        a1 = load_raw_counts(tmp_path / "sim_a1.csv", "A1")
        a2 = load_raw_counts(tmp_path / "sim_a2.csv", "A2")
        assert a1.phi_values() == (20.0, 22.5)
        assert a2.phi_values() == (20.0, 22.5)
        listed = capsys.readouterr().out.splitlines()
        assert str(tmp_path / "sim_a1.csv") in listed

    def test_simulated_tables_analyze_cleanly(self, tmp_path):
        prefix = tmp_path / "sim"
        assert main([
            "simulate", "--grid", "22.5", "--budget", "2000",
            "--seed", "1", "--raw-out", str(prefix),
        ]) == 0
        out = tmp_path / "rep.json"
        assert main([
            "analyze", "--a1", str(tmp_path / "sim_a1.csv"),
            "--a2", str(tmp_path / "sim_a2.csv"),
            "--out", str(out), "--no-figures",
        ]) == 0
        payload = json.loads(out.read_text())
        assert payload["rows"][0]["phi_s_deg"] == 22.5


class TestSweepCommand:
    def test_exact_sweep_report(self, tmp_path):
        out = tmp_path / "sweep.json"
        assert main(["sweep", "--grid", "table2", "--out", str(out), "--no-figures"]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["rows"]) == 9
        assert payload["meta"]["config"]["mode"] == "exact"
        ks = {row["phi_s_deg"]: row["k"] for row in payload["rows"]}
        assert max(ks, key=ks.get) == 22.5

    def test_budget_switches_to_counted(self, tmp_path):
        out = tmp_path / "sweep.json"
        assert main([
            "sweep", "--grid", "22.5", "--budget", "2000", "--seed", "3",
            "--out", str(out), "--no-figures",
        ]) == 0
        payload = json.loads(out.read_text())
        assert payload["meta"]["config"]["mode"] == "counted"
        assert payload["rows"][0]["k_err"] > 0

    def test_byte_deterministic_reports(self, tmp_path):
        args = ["sweep", "--grid", "20", "--budget", "2000", "--seed", "5", "--no-figures"]
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_figures_rendered_next_to_report(self, tmp_path):
        out = tmp_path / "sweep.json"
        assert main(["sweep", "--grid", "0,22.5", "--out", str(out)]) == 0
        assert (tmp_path / "sweep_probabilities.png").exists()
        assert (tmp_path / "sweep_contrast.png").exists()

    def test_raw_out_tables_match_report(self, tmp_path):
        out = tmp_path / "sweep.json"
        prefix = tmp_path / "raw"
        assert main([
            "sweep", "--grid", "22.5", "--budget", "2000", "--seed", "3",
            "--out", str(out), "--no-figures", "--raw-out", str(prefix),
        ]) == 0
        payload = json.loads(out.read_text())
        a2 = load_raw_counts(tmp_path / "raw_a2.csv", "A2")
        row = a2.row_for(22.5)
        ww_total = row["n_aa"] + row["n_ab"] + row["n_ba"] + row["n_bb"]
        assert payload["rows"][0]["p_aa"] == pytest.approx(row["n_aa"] / ww_total, rel=1e-5)


class TestOptimizeCommand:
    def test_exact_single_setting(self, tmp_path):
        out = tmp_path / "opt.json"
        assert main(["optimize", "--phi-s", "22.5", "--out", str(out), "--no-figures"]) == 0
        payload = json.loads(out.read_text())
        assert payload["rows"][0]["phi_m_deg"] == pytest.approx(31.283440582, abs=1e-6)

    def test_counted_renders_fit_figure(self, tmp_path):
        out = tmp_path / "opt.json"
        assert main([
            "optimize", "--phi-s", "22.5", "--budget", "2000", "--seed", "3",
            "--out", str(out),
        ]) == 0
        assert (tmp_path / "opt_balance_fit.png").exists()

    def test_ideal_flag(self, tmp_path):
        out = tmp_path / "opt.json"
        assert main(["optimize", "--phi-s", "0", "--ideal", "--out", str(out), "--no-figures"]) == 0
        payload = json.loads(out.read_text())
        assert payload["rows"][0]["phi_m_deg"] == pytest.approx(45.0, abs=1e-9)


class TestConfigFile:
    def test_config_supplies_defaults_and_cli_overrides(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"grid": [20.0], "seed": 9, "budget": 2000}))
        out = tmp_path / "sweep.json"
        assert main([
            "sweep", "--config", str(cfg), "--seed", "0",
            "--out", str(out), "--no-figures",
        ]) == 0
        payload = json.loads(out.read_text())
        assert payload["meta"]["seed"] == 0
        assert payload["meta"]["config"]["grid_deg"] == [20.0]
        assert payload["meta"]["config"]["mode"] == "counted"

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"gird": [20.0]}))
        assert main(["sweep", "--config", str(cfg), "--no-figures"]) == 2

    def test_non_object_config_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text("[1, 2]")
        assert main(["sweep", "--config", str(cfg), "--no-figures"]) == 2

    def test_missing_config_is_io_error(self, tmp_path):
        assert main(["sweep", "--config", str(tmp_path / "none.json"), "--no-figures"]) == 3

    def test_noise_from_config_list(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"noise_from": [0.97, 0.9], "grid": [45.0]}))
        out = tmp_path / "sweep.json"
        assert main(["sweep", "--config", str(cfg), "--out", str(out), "--no-figures"]) == 0
        payload = json.loads(out.read_text())
        assert payload["meta"]["config"]["source"]["white_noise_w"] == pytest.approx(0.03)
