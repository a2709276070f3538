"""CLI integration on the bundled fixture (small sample counts; the full
pipeline at the published sample size lives in the acceptance suite)."""

import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from environom.cli import main
from environom.data import bundled_db_dir, bundled_scenario_dir
from environom.scenario_io import load_coefficients


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory, runner):
    """One soo run + one tiny moo run, shared by the read-only CLI tests."""
    out = tmp_path_factory.mktemp("runs")
    scen = str(bundled_scenario_dir())
    r = runner.invoke(main, ["soo", "--scenario", scen, "--out", str(out)])
    assert r.exit_code == 0, r.output
    r = runner.invoke(main, ["moo", "--scenario", scen, "--samples", "6",
                             "--out", str(out)])
    assert r.exit_code == 0, r.output
    return out, scen


class TestValidate:
    def test_bundled_scenario_is_valid(self, runner):
        r = runner.invoke(main, ["validate", "--scenario",
                                 str(bundled_scenario_dir())])
        assert r.exit_code == 0, r.output

    def test_missing_file_exits_2(self, runner, tmp_path):
        broken = tmp_path / "scenario"
        shutil.copytree(bundled_scenario_dir(), broken)
        (broken / "demands.csv").unlink()
        r = runner.invoke(main, ["validate", "--scenario", str(broken)])
        assert r.exit_code == 2
        assert "demands.csv" in r.output

    def test_broken_reference_exits_1_and_names_entity(self, runner, tmp_path):
        broken = tmp_path / "scenario"
        shutil.copytree(bundled_scenario_dir(), broken)
        demands = broken / "demands.csv"
        demands.write_text(demands.read_text().replace("heat_lt", "heat_xx"))
        r = runner.invoke(main, ["validate", "--scenario", str(broken)])
        assert r.exit_code == 1
        assert "heat_xx" in r.output


class TestLci:
    def test_fixture_db_reproduces_bundled_coefficients(self, runner, tmp_path):
        out = tmp_path / "runs"
        r = runner.invoke(main, [
            "lci", "--scenario", str(bundled_scenario_dir()),
            "--db", str(bundled_db_dir()), "--out", str(out)])
        assert r.exit_code == 0, r.output
        produced = next(out.glob("lci-*/lcia_coefficients.csv"))
        fresh_stat, fresh_var = load_coefficients(produced)
        ship_stat, ship_var = load_coefficients(
            bundled_scenario_dir() / "lcia_coefficients.csv")
        assert fresh_stat == ship_stat
        assert fresh_var == ship_var

    def test_unmapped_technologies_warned(self, runner, tmp_path):
        out = tmp_path / "runs"
        r = runner.invoke(main, [
            "lci", "--scenario", str(bundled_scenario_dir()),
            "--db", str(bundled_db_dir()), "--out", str(out)])
        assert r.exit_code == 0
        log = next(out.glob("lci-*/double_counting_log.json")).read_text()
        assert "unmapped" in log

    def test_missing_db_exits_2(self, runner, tmp_path):
        r = runner.invoke(main, [
            "lci", "--scenario", str(bundled_scenario_dir()),
            "--db", str(tmp_path / "nope"), "--out", str(tmp_path / "runs")])
        assert r.exit_code == 2


class TestSooMoo:
    def test_soo_is_idempotent(self, runner, pipeline):
        out, scen = pipeline
        r = runner.invoke(main, ["soo", "--scenario", scen, "--out", str(out)])
        assert r.exit_code == 0
        assert "reusing completed run" in r.output

    def test_soo_artifacts_exist(self, pipeline):
        out, _ = pipeline
        soo_dir = next(out.glob("soo-*"))
        for name in ("objective_values.csv", "bounds.json", "capacities.csv",
                     "compositions.csv", "manifest.json"):
            assert (soo_dir / name).exists(), name

    def test_moo_requires_soo(self, runner, tmp_path):
        r = runner.invoke(main, ["moo", "--scenario", str(bundled_scenario_dir()),
                                 "--samples", "2", "--out", str(tmp_path / "fresh")])
        assert r.exit_code == 1
        assert "soo" in r.output

    def test_moo_rejects_zero_samples(self, runner, pipeline):
        out, scen = pipeline
        r = runner.invoke(main, ["moo", "--scenario", scen, "--samples", "0",
                                 "--out", str(out)])
        assert r.exit_code == 1
        assert "at least 1" in r.output

    def test_moo_artifacts(self, pipeline):
        out, _ = pipeline
        moo_dir = next(out.glob("moo-*"))
        points = (moo_dir / "pareto_points.csv").read_text().strip().splitlines()
        assert len(points) == 1 + 6  # header + samples
        assert (moo_dir / "capacities.csv").exists()


class TestAnalyzeReport:
    def test_analyze_produces_bundle(self, runner, pipeline):
        out, scen = pipeline
        r = runner.invoke(main, ["analyze", "--scenario", scen, "--out", str(out)])
        assert r.exit_code == 0, r.output
        adir = next(out.glob("analyze-*"))
        for name in ("correlation_r.csv", "correlation_p.csv",
                     "correlation_meta.json", "distributions.json",
                     "burden_shift.csv", "cost_composition.csv",
                     "lcia_composition.csv", "sectoral_composition.csv",
                     "pareto_front.csv", "summary.json"):
            assert (adir / name).exists(), name

    def test_report_svg(self, runner, pipeline):
        out, scen = pipeline
        r = runner.invoke(main, ["report", "--scenario", scen, "--out", str(out)])
        assert r.exit_code == 0, r.output
        svg = next(out.glob("report-*/scatter_matrix.svg"))
        assert svg.read_text().startswith("<?xml")

    def test_stale_scenario_hash_is_refused(self, runner, pipeline, tmp_path):
        out, _ = pipeline
        changed = tmp_path / "scenario"
        shutil.copytree(bundled_scenario_dir(), changed)
        meta = changed / "scenario.json"
        meta.write_text(meta.read_text().replace("alpine-desk", "tampered"))
        moo_id = next(out.glob("moo-*")).name
        soo_id = next(out.glob("soo-*")).name
        r = runner.invoke(main, ["analyze", "--scenario", str(changed),
                                 "--soo-run", soo_id, "--moo-run", moo_id,
                                 "--out", str(out)])
        assert r.exit_code == 1
        assert "re-run" in r.output
