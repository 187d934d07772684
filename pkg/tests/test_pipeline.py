import csv
import json

import numpy as np
import pytest

from bicouple.runner.checks import compute_checks, evaluate_check
from bicouple.runner.pipeline import run_pipeline, simulate_coupling
from bicouple.runner.run_config import CheckSpec, RunConfig

SMALL = {
    "name": "small",
    "d_minus": 0.5,
    "d_plus": 1.0,
    "m": 2,
    "n_steps": 4,
    "audit_every": 2,
    "couplings": [
        {"name": "dn", "tag": "dirichlet-neumann"},
        {"name": "fv dn", "tag": "dirichlet-neumann", "scheme": "fv"},
    ],
}


def small_config(**overrides) -> RunConfig:
    return RunConfig.model_validate({**SMALL, **overrides})


def read_csv(path):
    with path.open(encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


class TestSimulate:
    def test_result_fields(self):
        res = simulate_coupling(small_config(), "dn")
        assert res.scheme == "nodal"
        assert res.boundary == "central"
        assert res.stencil is None
        assert res.final.step == 4
        assert [e.step for e in res.ledger.entries] == [0, 2, 4]
        assert res.nu_plus == pytest.approx(0.4)

    def test_flux_coupling_records_stencil(self):
        config = small_config(couplings=[{"name": "h", "tag": "heat", "H": 0.5}])
        assert simulate_coupling(config, "h").stencil == "central"

    def test_initial_error_and_side_delta(self):
        res = simulate_coupling(small_config(initial="piecewise"), "dn")
        # u ≡ 1 и v ≡ 0.06 на узлах: трапеции точны
        assert res.initial_error < 1e-15
        left, right = res.side_delta
        assert left < 0.0 < right
        cbar = [e.cbar for e in res.ledger.entries]
        assert left + right == pytest.approx(cbar[-1] - cbar[0], abs=1e-14)

    def test_build_warnings_are_collected(self, recwarn):
        config = small_config(
            couplings=[{"name": "os", "tag": "dirichlet-neumann", "boundary": "one-sided"}],
            allow_mixed_boundary=True,
        )
        res = simulate_coupling(config, "os")
        assert len(res.warnings) == 1
        assert "неконсервативное" in res.warnings[0]
        assert not [w for w in recwarn if "неконсервативное" in str(w.message)]

    def test_snapshots(self):
        res = simulate_coupling(small_config(snapshot_every=2), "fv dn")
        assert [s.step for s in res.snapshots] == [0, 2, 4]
        assert simulate_coupling(small_config(), "fv dn").snapshots == []

    def test_on_step(self):
        reports = []
        simulate_coupling(small_config(), "dn", on_step=reports.append)
        assert [r.step for r in reports] == [2, 4]


class TestOutputs:
    def test_files(self, tmp_path):
        result = run_pipeline(small_config(), output_dir=tmp_path, verbose=False)
        names = sorted(p.name for p in result.paths)
        assert names == [
            "ledger_dn.csv", "ledger_fv_dn.csv", "profile_dn.csv", "profile_fv_dn.csv",
            "run_manifest.json", "summary.csv",
        ]

    def test_profile_rows(self, tmp_path):
        run_pipeline(small_config(), output_dir=tmp_path, verbose=False)
        nodal = read_csv(tmp_path / "profile_dn.csv")
        fv = read_csv(tmp_path / "profile_fv_dn.csv")
        assert nodal[0] == ["x", "value", "side"]
        assert len(nodal) - 1 == 6
        assert len(fv) - 1 == 4
        # двойной узел: две строки при x = 0.5
        assert [row[2] for row in nodal[1:] if float(row[0]) == 0.5] == ["u", "v"]

    def test_ledger_and_summary(self, tmp_path):
        result = run_pipeline(small_config(), output_dir=tmp_path, verbose=False)
        ledger = read_csv(tmp_path / "ledger_dn.csv")
        assert ledger[0] == ["step", "t", "C", "Cbar", "drift"]
        assert ledger[1][0] == "0" and float(ledger[1][1]) == 0.0 and float(ledger[1][4]) == 0.0
        assert [row[0] for row in ledger[1:]] == ["0", "2", "4"]

        summary = read_csv(tmp_path / "summary.csv")
        assert summary[0] == ["coupling", "C0bar", "CTbar", "abs_drift", "init_error"]
        assert [row[0] for row in summary[1:]] == ["dn", "fv dn"]
        dn = result.by_name()["dn"]
        assert float(summary[1][1]) == dn.ledger.entries[0].cbar

    def test_manifest(self, tmp_path):
        run_pipeline(small_config(), output_dir=tmp_path, verbose=False)
        manifest = json.loads((tmp_path / "run_manifest.json").read_text(encoding="utf-8"))
        assert manifest["config"]["name"] == "small"
        assert [s["coupling"] for s in manifest["summary"]] == ["dn", "fv dn"]
        assert manifest["summary"][1]["scheme"] == "fv"
        assert manifest["checks"]["passed"] is True

    def test_summary_init_error(self, tmp_path):
        config = small_config(initial="sqrt", d_minus=1.0)
        result = run_pipeline(config, output_dir=tmp_path, verbose=False)
        summary = read_csv(tmp_path / "summary.csv")
        dn = result.by_name()["dn"]
        assert float(summary[1][4]) == dn.initial_error
        # сумма трапеций на 5 узлах заметно меньше ∫100·√(x(1 − x)) = 12.5π
        assert dn.initial_error > 1.0

    def test_manifest_side_delta_and_warnings(self, tmp_path):
        run_pipeline(small_config(), output_dir=tmp_path, verbose=False, notes=["замечание"])
        manifest = json.loads((tmp_path / "run_manifest.json").read_text(encoding="utf-8"))
        entry = manifest["summary"][0]
        assert {"init_error", "left_delta", "right_delta", "warnings"} <= set(entry)
        assert manifest["checks"]["warnings"][0] == "замечание"

    def test_snapshot_files(self, tmp_path):
        result = run_pipeline(small_config(snapshot_every=2), output_dir=tmp_path, verbose=False)
        assert tmp_path / "snapshots_fv_dn.csv" in result.paths
        rows = read_csv(tmp_path / "snapshots_dn.csv")
        assert rows[0] == ["step", "t", "x", "value", "side"]
        assert len(rows) - 1 == 3 * 6
        # последний снимок совпадает с профилем
        final = [row[2:] for row in rows[1:] if row[0] == "4"]
        assert final == read_csv(tmp_path / "profile_dn.csv")[1:]

    def test_svg(self, tmp_path):
        result = run_pipeline(small_config(), output_dir=tmp_path, plot=True, verbose=False)
        svg = tmp_path / "profile.svg"
        assert svg in result.paths
        assert "<svg" in svg.read_text(encoding="utf-8")

    def test_csv_deterministic(self, tmp_path):
        run_pipeline(small_config(), output_dir=tmp_path / "a", verbose=False)
        run_pipeline(small_config(), output_dir=tmp_path / "b", verbose=False)
        for name in ("profile_dn.csv", "ledger_fv_dn.csv", "summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_no_output_dir(self):
        result = run_pipeline(small_config(), verbose=False)
        assert result.paths == []


def test_parallel_matches_serial():
    config = small_config(m=8, n_steps=50, couplings=[
        {"name": "dn", "tag": "dirichlet-neumann"},
        {"name": "giles", "tag": "giles-inconsistent"},
        {"name": "membrane", "tag": "membrane", "p_l": 0.02, "p_p": 1.0, "k_d": 0.2},
    ])
    serial = run_pipeline(config, jobs=1, verbose=False).by_name()
    parallel = run_pipeline(config, jobs=2, verbose=False).by_name()
    assert list(serial) == list(parallel)
    for name, res in serial.items():
        np.testing.assert_array_equal(res.final.u, parallel[name].final.u)
        np.testing.assert_array_equal(res.final.v, parallel[name].final.v)


def test_verbose_log(capsys):
    run_pipeline(small_config(), verbose=True)
    out = capsys.readouterr().out
    assert "[run] Шаг 1" in out
    assert "[run] Шаг 2" in out


class TestChecks:
    def results(self):
        config = small_config(couplings=[
            {"name": "dn", "tag": "dirichlet-neumann"},
            {"name": "giles", "tag": "giles-inconsistent"},
        ], initial="piecewise")
        return run_pipeline(config, verbose=False).by_name()

    def test_pass_and_fail(self):
        results = self.results()
        ok = CheckSpec(kind="initial_cbar", coupling="giles", expected=0.53, tolerance=0.1)
        bad = CheckSpec(kind="abs_drift", coupling="giles", upper=0.0)
        report = compute_checks([ok, bad], results)
        assert not report.passed
        assert [r.passed for r in report.results] == [True, False]
        assert report.lines()[1].startswith("FAIL")

    def test_interface_gap(self):
        results = self.results()
        spec = CheckSpec(kind="interface_gap", coupling="dn", other="giles", lower=0.0)
        gap = abs(float(results["dn"].final.u[-1]) - float(results["giles"].final.u[-1]))
        assert evaluate_check(spec, results).observed == gap

    def test_drift_ratio_of_itself(self):
        results = self.results()
        spec = CheckSpec(kind="drift_ratio", coupling="giles", other="giles", lower=0.0)
        observed = evaluate_check(spec, results).observed
        assert observed == pytest.approx(1.0)

    def test_side_deltas(self):
        results = self.results()
        left = CheckSpec(kind="left_delta", coupling="dn", upper=0.0)
        right = CheckSpec(kind="right_delta", coupling="dn", lower=0.0)
        report = compute_checks([left, right], results)
        assert report.passed
        assert report.results[0].observed == results["dn"].side_delta[0]

    def test_missing_coupling_fails(self):
        spec = CheckSpec(kind="abs_drift", coupling="ghost", upper=1.0)
        result = evaluate_check(spec, self.results())
        assert not result.passed
        assert "ghost" in result.message

    def test_no_checks_warns(self):
        report = compute_checks([], self.results())
        assert report.passed
        assert report.warnings


def test_verbose_log_reports_progress_and_warnings(capsys):
    config = small_config(
        n_steps=40, audit_every=4, allow_mixed_boundary=True,
        couplings=[{"name": "os", "tag": "dirichlet-neumann", "boundary": "one-sided"}],
    )
    run_pipeline(config, verbose=True)
    out = capsys.readouterr().out
    assert "[run]     os: шаг 4/40" in out
    assert "шаг 40/40" not in out
    assert "[run]   WARN [os]: неконсервативное граничное условие" in out
    assert "ошибка дискретизации" in out
