import pytest

from ffreval.cli import main


def run(args):
    return main(args)


class TestCoverageCommand:
    def test_small_run_passes_and_reproduces(self, tmp_path):
        out = tmp_path / "cov.csv"
        args = [
            "coverage", "--scheme", "strict-ffr", "--class", "edge",
            "--tffr-db", "1", "--delta", "3", "--alpha", "4", "--no-noise",
            "--trials", "4000", "--seed", "7", "--t-grid-db", "-6:18:6",
            "--out", str(out),
        ]
        assert run(args) == 0
        first = out.read_bytes()
        assert run(args) == 0
        assert out.read_bytes() == first

        text = first.decode()
        assert text.startswith("# ffreval coverage")
        assert "# seed=7" in text
        assert "t_db,analytic,mc,mc_halfwidth,pass3sigma" in text
        rows = [l for l in text.splitlines() if l and not l.startswith("#") and "," in l]
        assert len(rows) == 6  # header + 5 grid points
        assert all(r.endswith(",1") for r in rows[1:])

    def test_missing_tffr_is_config_error(self, tmp_path):
        code = run(["coverage", "--scheme", "strict-ffr", "--class", "edge",
                    "--trials", "10", "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_baseline_rejects_edge_class(self, tmp_path):
        code = run(["coverage", "--scheme", "no-reuse", "--class", "edge",
                    "--trials", "10", "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_analytic_only_with_zero_trials(self, tmp_path):
        out = tmp_path / "cov.csv"
        assert run(["coverage", "--scheme", "no-reuse", "--trials", "0",
                    "--t-grid-db", "0:10:5", "--out", str(out)]) == 0
        text = out.read_text()
        assert "t_db,analytic" in text and "mc" not in text.split("\n")[-3]

    def test_plot_rendered(self, tmp_path):
        out = tmp_path / "cov.csv"
        assert run(["coverage", "--scheme", "no-reuse", "--trials", "500",
                    "--t-grid-db", "0:10:5", "--seed", "1",
                    "--out", str(out), "--plot"]) == 0
        assert (tmp_path / "cov.png").stat().st_size > 0

    def test_bad_deployment_file_is_oracle_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("nonsense\n")
        code = run(["coverage", "--scheme", "no-reuse", "--trials", "100",
                    "--deployment", str(bad), "--out", str(tmp_path / "x.csv")])
        assert code == 3

    def test_sfr_theorem_denominator_reachable(self, tmp_path):
        out = tmp_path / "cov.csv"
        code = run(["coverage", "--scheme", "sfr", "--class", "edge",
                    "--beta", "4", "--tffr-db", "1", "--trials", "0",
                    "--t-grid-db", "0:6:3", "--denominator", "theorem",
                    "--out", str(out)])
        assert code == 0


class TestRateCommand:
    def test_analytic_only(self, tmp_path):
        out = tmp_path / "rate.csv"
        assert run(["rate", "--scheme", "strict-ffr", "--trials", "0",
                    "--t-grid-db", "0:5:5", "--out", str(out)]) == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "tffr_db,rate_analytic_nats,rate_mc_nats,halfwidth"
        assert all(l.split(",")[2] == "nan" for l in lines[1:])

    def test_monotone_analytic_column(self, tmp_path):
        out = tmp_path / "rate.csv"
        assert run(["rate", "--scheme", "strict-ffr", "--trials", "0",
                    "--t-grid-db", "-10:10:10", "--out", str(out)]) == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")][1:]
        values = [float(l.split(",")[1]) for l in lines]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_baseline_scheme_rejected(self):
        with pytest.raises(SystemExit):
            run(["rate", "--scheme", "no-reuse", "--trials", "0"])


class TestSumrateCommand:
    def test_edge_band_sweep(self, tmp_path):
        out = tmp_path / "sum.csv"
        assert run(["sumrate", "--sweep", "edge-bands", "--n-edge-list", "2,16",
                    "--n-band", "48", "--tffr-db", "3", "--beta", "2",
                    "--trials", "2000", "--seed", "5", "--out", str(out)]) == 0
        text = out.read_text()
        assert "n_edge,scheme,sum_rate,edge_rate,interior_rate,feasible" in text
        assert "# trend_strict_decreasing=" in text
        rows = [l for l in text.splitlines() if l and not l.startswith("#")][1:]
        assert len(rows) == 8  # 2 sweep points x 4 schemes

    def test_tffr_sweep_reports_crossover(self, tmp_path):
        out = tmp_path / "sum.csv"
        assert run(["sumrate", "--sweep", "tffr", "--t-grid-db", "0:5:5",
                    "--n-band", "48", "--tffr-db", "0", "--beta", "2",
                    "--trials", "1500", "--seed", "5", "--out", str(out)]) == 0
        text = out.read_text()
        assert "# sign_changes_sfr_minus_strict=" in text
        assert "# crossover_tffr_db=" in text

    def test_infeasible_rows_flagged(self, tmp_path):
        out = tmp_path / "sum.csv"
        assert run(["sumrate", "--sweep", "edge-bands", "--n-edge-list", "17",
                    "--n-band", "48", "--tffr-db", "3", "--trials", "800",
                    "--seed", "5", "--out", str(out)]) == 0
        rows = [l for l in out.read_text().splitlines()
                if l.startswith("17,strict-ffr") or l.startswith("17,sfr")]
        assert all(r.endswith(",0") for r in rows)


class TestAllocateCommand:
    def test_plan_printed(self, capsys):
        assert run(["allocate", "--scheme", "strict-ffr", "--n-band", "48",
                    "--tffr-db", "0", "--delta", "3", "--alpha", "4"]) == 0
        text = capsys.readouterr().out
        assert "n_edge=16" in text
        assert "scheme=strict-ffr" in text

    def test_plan_written_to_file(self, tmp_path):
        out = tmp_path / "plan.txt"
        assert run(["allocate", "--scheme", "sfr", "--beta", "2",
                    "--n-band", "48", "--tffr-db", "0", "--out", str(out)]) == 0
        assert "utilized=48" in out.read_text()


def test_grid_deployment_flag(tmp_path):
    out = tmp_path / "cov.csv"
    assert run(["coverage", "--scheme", "no-reuse", "--grid", "25:10",
                "--trials", "600", "--seed", "2", "--t-grid-db", "0:6:6",
                "--out", str(out)]) in (0, 1)  # grid differs from the PPP analytic line
    assert "# deployment=grid:25:10" in out.read_text()


def test_conflicting_deployment_flags(tmp_path):
    code = run(["coverage", "--scheme", "no-reuse", "--grid", "25:10",
                "--deployment", "odd.csv", "--trials", "10",
                "--out", str(tmp_path / "x.csv")])
    assert code == 2
