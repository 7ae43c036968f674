"""CLI surface: artifacts, manifests, ingestion, determinism, exit codes."""

import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from drivenfluct import cli
from drivenfluct import nonequil_observables as no


def run_cli(args, outdir):
    return cli.main([*args, "--outdir", str(outdir)])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_fixture(tmp_path, records, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    data = tmp_path / "data.csv"
    meta = tmp_path / "meta.csv"
    with open(data, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["liquid", "T_K", "eta_Pa_s"])
        for liquid, abar, t_l, eta_l, temps in records:
            for t in temps:
                eta = no.viscosity_predict(float(t), t_l, abar, eta_l)
                if noise:
                    eta *= math.exp(noise * rng.normal())
                writer.writerow([liquid, repr(float(t)), repr(eta)])
    with open(meta, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["liquid", "T_liquidus_K", "eta_liquidus_Pa_s"])
        for liquid, _, t_l, eta_l, _ in records:
            writer.writerow([liquid, repr(t_l), repr(eta_l)])
    return data, meta


class TestSpinCommands:
    def test_spin_sigma_worked_row(self, tmp_path):
        assert run_cli(
            ["spin-sigma", "--n", "4", "--stot", "2", "--m", "0", "--bz", "1", "--theta", "1.5707963"],
            tmp_path,
        ) == 0
        rows = read_csv(tmp_path / "spin_sigma.csv")
        assert float(rows[0]["sigma"]) == pytest.approx(0.433013, abs=1e-6)
        manifest = read_json(tmp_path / "spin-sigma_manifest.json")
        assert manifest["subcommand"] == "spin-sigma"
        assert manifest["outputs"] == ["spin_sigma.csv"]
        assert manifest["tool_version"]

    def test_spin_dist_summary(self, tmp_path):
        assert run_cli(
            ["spin-dist", "--n", "40", "--stot", "20", "--m", "0", "--theta", "1.0"],
            tmp_path,
        ) == 0
        summary = read_json(tmp_path / "spin_dist.json")
        assert summary["sigma_empirical"] == pytest.approx(summary["sigma_analytic"], abs=1e-10)
        assert summary["ks_to_arcsine"] < 0.3

    def test_exact_check_passes(self, tmp_path):
        assert run_cli(
            ["exact-check", "--n-min", "2", "--n-max", "4", "--thetas", "5"], tmp_path
        ) == 0
        summary = read_json(tmp_path / "exact_check.json")
        assert summary["ok"] and summary["max_abs_diff"] < 1e-10

    def test_bose_dual(self, tmp_path):
        assert run_cli(["bose-dual", "--n", "5", "--sets", "4"], tmp_path) == 0
        assert read_json(tmp_path / "bose_dual.json")["all_ok"]

    def test_moment_compare(self, tmp_path):
        assert run_cli(["moment-compare", "--sigma", "1.0", "--g-max", "3"], tmp_path) == 0
        rows = read_csv(tmp_path / "moment_compare.csv")
        assert float(rows[1]["arcsine"]) == 1.5
        assert float(rows[1]["gaussian"]) == 3.0


class TestPhysicsCommands:
    def test_magnus_check(self, tmp_path):
        assert run_cli(["magnus-check", "--count", "5"], tmp_path) == 0
        summary = read_json(tmp_path / "magnus_check.json")
        assert summary["slope_ok"]
        assert summary["commuting_error"] < 1e-12

    def test_variance_rate(self, tmp_path):
        assert run_cli(["variance-rate", "--count", "3"], tmp_path) == 0
        assert read_json(tmp_path / "variance_rate.json")["ok"]

    def test_bounds_check(self, tmp_path):
        assert run_cli(["bounds-check", "--n", "4", "--m", "1"], tmp_path) == 0
        payload = read_json(tmp_path / "bounds_check.json")
        assert payload["robertson"]["satisfied"]
        assert payload["energy-rate"]["lhs"] == pytest.approx(0.625, abs=1e-6)

    def test_rate_threshold_si(self, tmp_path):
        assert run_cli(
            ["rate-threshold", "--temperature", "300", "--cv-total", "1e-3",
             "--cv-subsystem", "1e-6", "--si"],
            tmp_path,
        ) == 0
        payload = read_json(tmp_path / "rate_threshold.json")
        assert payload["threshold_natural"] == pytest.approx(2 * 300**2 * math.sqrt(1e-9))
        expected_watts = 2 * cli.KB_SI * 300**2 * math.sqrt(1e-9) / cli.HBAR_SI
        assert payload["threshold_watts"] == pytest.approx(expected_watts)

    def test_ising_corr(self, tmp_path):
        assert run_cli(
            ["ising-corr", "--length", "12", "--walls", "4", "--distances", "1", "2", "3"],
            tmp_path,
        ) == 0
        rows = read_csv(tmp_path / "ising_corr.csv")
        for row in rows:
            assert float(row["enumeration"]) == pytest.approx(
                float(row["hypergeometric"]), abs=1e-15
            )

    def test_dicke_entropy(self, tmp_path):
        assert run_cli(["dicke-entropy", "--n", "16", "32", "64", "--m", "0"], tmp_path) == 0
        payload = read_json(tmp_path / "dicke_entropy.json")
        assert payload["ln_slope"] == pytest.approx(0.5, abs=0.15)

    def test_multiplicity_table(self, tmp_path):
        assert run_cli(["multiplicity", "--n", "4"], tmp_path) == 0
        rows = read_csv(tmp_path / "multiplicity.csv")
        assert [row["exact"] for row in rows] == ["1", "3", "2"]

    def test_smear_green(self, tmp_path):
        assert run_cli(
            ["smear-green", "--kernel", "gauss:0.0,0.5", "--count", "11", "--z", "0.8"],
            tmp_path,
        ) == 0
        summary = read_json(tmp_path / "smear_green.json")
        assert summary["sum_rule_gap"] < 1e-6

    def test_smear_planck(self, tmp_path):
        assert run_cli(
            ["smear-planck", "--nu", "1.0", "3.0", "--kernel", "delta:1.0"], tmp_path
        ) == 0
        rows = read_csv(tmp_path / "smear_planck.csv")
        assert float(rows[0]["radiance_natural"]) == pytest.approx(1 / (math.e - 1), rel=1e-12)


class TestViscosityPipeline:
    def test_fit_round_trip(self, tmp_path):
        data, meta = write_fixture(
            tmp_path, [("glassa", 0.085, 1000.0, 2.0, np.linspace(620.0, 1000.0, 14))]
        )
        assert run_cli(
            ["viscosity-fit", "--data", str(data), "--meta", str(meta)], tmp_path
        ) == 0
        payload = read_json(tmp_path / "viscosity_fit.json")
        assert payload["glassa"]["abar"] == pytest.approx(0.085, abs=1e-6)
        manifest = read_json(tmp_path / "viscosity-fit_manifest.json")
        assert set(manifest["input_digests"]) == {"data.csv", "meta.csv"}

    def test_collapse_points(self, tmp_path):
        data, meta = write_fixture(
            tmp_path,
            [
                ("a", 0.06, 900.0, 1.0, np.linspace(580.0, 900.0, 12)),
                ("b", 0.11, 1300.0, 1.0, np.linspace(830.0, 1300.0, 12)),
            ],
        )
        assert run_cli(["collapse", "--data", str(data), "--meta", str(meta)], tmp_path) == 0
        rows = read_csv(tmp_path / "collapse.csv")
        assert {row["liquid"] for row in rows} == {"a", "b"}
        for row in rows:
            x, y = float(row["x"]), float(row["y"])
            assert y * no.kernel_average(no.DeltaKernel(x), lambda q: 1.0) > 0
            assert math.log10(y) == pytest.approx(
                math.log10(no.master_curve(x)), abs=1e-6
            )


class TestIngest:
    def test_two_liquid_fixture(self, tmp_path):
        data, meta = write_fixture(
            tmp_path,
            [
                ("a", 0.07, 900.0, 1.0, np.linspace(600.0, 900.0, 5)),
                ("b", 0.09, 1100.0, 2.0, np.linspace(700.0, 1100.0, 5)),
            ],
        )
        dataset = cli.ingest(data, meta)
        assert len(dataset.records) == 2
        assert all(not record.flagged_rows for record in dataset.records)

    def test_nonpositive_viscosity_rejected_with_line(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text("liquid,T_K,eta_Pa_s\nx,500.0,1.0\nx,510.0,-2.0\n", encoding="utf-8")
        meta = tmp_path / "meta.csv"
        meta.write_text("liquid,T_liquidus_K,eta_liquidus_Pa_s\nx,600.0,1.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match="data.csv:3"):
            cli.ingest(data, meta)

    def test_malformed_row_reported_with_line(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text("liquid,T_K,eta_Pa_s\nx,500.0,1.0\nx,oops,1.0\n", encoding="utf-8")
        meta = tmp_path / "meta.csv"
        meta.write_text("liquid,T_liquidus_K,eta_liquidus_Pa_s\nx,600.0,1.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match="data.csv:3"):
            cli.ingest(data, meta)

    def test_above_liquidus_flagged(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text(
            "liquid,T_K,eta_Pa_s\nx,650.0,5.0\nx,590.0,9.0\nx,700.0,1.0\nx,550.0,20.0\n",
            encoding="utf-8",
        )
        meta = tmp_path / "meta.csv"
        meta.write_text("liquid,T_liquidus_K,eta_liquidus_Pa_s\nx,600.0,1.0\n", encoding="utf-8")
        dataset = cli.ingest(data, meta)
        record = dataset.records[0]
        assert len(record.flagged_rows) == 2
        assert all(t <= 600.0 for t, _ in record.retained_rows)

    def test_missing_metadata_lists_liquids(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text(
            "liquid,T_K,eta_Pa_s\nalpha,500.0,1.0\nbeta,510.0,2.0\n", encoding="utf-8"
        )
        meta = tmp_path / "meta.csv"
        meta.write_text("liquid,T_liquidus_K,eta_liquidus_Pa_s\nalpha,600.0,1.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match="beta"):
            cli.ingest(data, meta)

    def test_bad_header(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text("liq,T,eta\n", encoding="utf-8")
        meta = tmp_path / "meta.csv"
        meta.write_text("liquid,T_liquidus_K,eta_liquidus_Pa_s\n", encoding="utf-8")
        with pytest.raises(ValueError, match="header"):
            cli.ingest(data, meta)


class TestCliBehavior:
    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["spin-sigma", "--not-a-flag"])
        assert err.value.code == 2

    def test_numerical_failure_exit_1(self, tmp_path, capsys):
        status = run_cli(
            ["spin-sigma", "--n", "4", "--stot", "3", "--m", "0", "--theta", "1.0"], tmp_path
        )
        assert status == 1
        assert "error:" in capsys.readouterr().err

    def test_determinism_byte_identical(self, tmp_path):
        args = ["spin-dist", "--n", "24", "--stot", "12", "--m", "2", "--theta", "0.9"]
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        assert run_cli(args, dir_a) == 0
        assert run_cli(args, dir_b) == 0
        for name in ("spin_dist.csv", "spin_dist.json", "spin-dist_manifest.json"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

    def test_selftest_smoke(self, tmp_path, capsys):
        assert run_cli(["rate-threshold", "--temperature", "1", "--cv-total", "1",
                        "--cv-subsystem", "1", "--selftest"], tmp_path) == 0
        report = read_json(tmp_path / "rate-threshold_selftest.json")
        assert report["ok"]
        out = capsys.readouterr().out
        assert "ok worked-lhs" in out

    def test_kernel_parser(self):
        kernel = cli._parse_kernel("gauss:1.5,0.2")
        assert isinstance(kernel, no.GaussianKernel)
        empirical = cli._parse_kernel("empirical:0.5:0.25,1.5:0.75")
        assert empirical.points == ((0.5, 0.25), (1.5, 0.75))
        with pytest.raises(ValueError):
            cli._parse_kernel("triangle:1.0")

    def test_outdir_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DRIVENFLUCT_OUTDIR", str(tmp_path / "envout"))
        assert cli.main(["moment-compare", "--g-max", "2"]) == 0
        assert (tmp_path / "envout" / "moment_compare.csv").exists()
