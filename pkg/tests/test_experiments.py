import json
import subprocess
import sys

import pytest
import yaml
from smallruns import SMALL

from raymimo.errors import QuadratureAccuracyError
from raymimo.experiments import cli
from raymimo.experiments.config import load_config, parse_angular, parse_geometry, resolve, validate_config
from raymimo.experiments.figures import REGISTRY, Experiment
from raymimo.experiments.runner import run_experiment
from raymimo.angular import Clustered, Laplacian, Uniform, VonMises
from raymimo.array import UPA, ULA
from raymimo.errors import ConfigurationError
from raymimo.metrics import MetricSeries


def _errors(raw):
    return [f for f in validate_config(raw) if f.level == "error"]


def _write(tmp_path, raw, name="c.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(raw))
    return str(path)


def test_validate_examples():
    assert _errors({"experiment": "fig5", "alpha": 2, "users": 4})
    assert _errors({"experiment": "custom", "metric": "eta", "geometry": {"kind": "UPA"},
                    "azimuth": {"type": "uniform"}, "rays": 3, "alpha": 2, "n": [16]})
    assert _errors({"experiment": "fig10", "epsilon": -0.1})
    assert _errors({"experiment": "nope"})
    assert _errors({"experiment": "fig1", "n": [64, 32]})
    assert _errors({"experiment": "fig1", "colour": "red"})
    assert _errors({"experiment": "fig6", "n": [15]})
    assert _errors({"experiment": "custom", "metric": "eta", "azimuth": {"type": "uniform"},
                    "rays": 3, "alpha": 2, "elevation": {"type": "uniform", "lo": 0, "hi": 180}})
    assert not _errors({"experiment": "fig1", "seed": 3})


def test_validate_desk_scale_warnings():
    findings = validate_config({"experiment": "fig4", "n": [10, 200000], "drops": 1})
    assert not [f for f in findings if f.level == "error" and f.field == "n"]
    findings = validate_config({"experiment": "fig1", "n": [64, 200000], "drops": 20000})
    assert {f.field for f in findings if f.level == "warning"} == {"n", "drops"}


def test_parse_angular_degrees():
    assert parse_angular({"type": "uniform", "lo": 0, "hi": 180}) == Uniform(0.0, 3.141592653589793)
    vm = parse_angular({"type": "von_mises", "mu": 30, "kappa": 1.49})
    assert vm == VonMises(0.5235987755982988, 1.49)
    lap = parse_angular({"type": "laplacian", "std": 15})
    assert lap == Laplacian.from_std(0.0, 0.2617993877991494)
    cl = parse_angular({"type": "clustered", "central": {"type": "uniform"},
                        "offset": {"type": "laplacian", "scale": 2}, "clusters": 3, "subrays": 4})
    assert isinstance(cl, Clustered) and cl.rays == 12
    for bad in ({"type": "banana"}, {"kappa": 1}, {"type": "von_mises"},
                {"type": "laplacian", "std": 1, "scale": 1}):
        with pytest.raises(ConfigurationError):
            parse_angular(bad)


def test_parse_geometry():
    assert parse_geometry({"kind": "ULA", "d": 0.25}, 8) == ULA(8, 0.25)
    assert parse_geometry({"kind": "UPA"}, 64) == UPA(8, 8, 0.5, 0.5)
    with pytest.raises(ConfigurationError):
        parse_geometry({"kind": "UPA"}, 60)


def test_resolve_merges_and_overrides():
    cfg = resolve({"experiment": "fig1", "drops": 7}, seed=99, out="x")
    assert cfg.params["drops"] == 7
    assert cfg.seed == 99
    assert cfg.params["n"] == REGISTRY["fig1"].defaults["n"]
    with pytest.raises(ConfigurationError):
        resolve({"experiment": "fig1", "users": 2, "alpha": 3})


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: [unclosed\n")
    with pytest.raises(ConfigurationError):
        load_config(bad)
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.yaml")
    lst = tmp_path / "list.yaml"
    lst.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigurationError):
        load_config(lst)


def test_shipped_configs_validate():
    from pathlib import Path
    configs = sorted(Path(__file__).resolve().parent.parent.joinpath("configs").glob("*.yaml"))
    assert len(configs) >= 11
    for path in configs:
        assert not _errors(load_config(path)), path


def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    for name in REGISTRY:
        assert name in out


def test_cli_validate_exit_codes(tmp_path, capsys):
    assert cli.main(["validate", "--config", _write(tmp_path, {"experiment": "fig1"})]) == 0
    assert cli.main(["validate", "--config", _write(tmp_path, {"experiment": "fig1", "alpha": 2})]) == 2
    assert cli.main(["validate", "--config", str(tmp_path / "absent.yaml")]) == 2
    assert cli.main(["bogus"]) == 2


def test_cli_run_config_error(tmp_path):
    path = _write(tmp_path, {"experiment": "fig10", "epsilon": 5})
    assert cli.main(["run", "--config", path, "--out", str(tmp_path / "o")]) == 2


def test_cli_run_numerical_failure(tmp_path, monkeypatch):
    def explode(cfg, out):
        raise QuadratureAccuracyError("did not converge", 0.0, 1.0)

    monkeypatch.setitem(REGISTRY, "fig3", Experiment("fig3", "x", REGISTRY["fig3"].defaults, explode))
    path = _write(tmp_path, {"experiment": "fig3"})
    assert cli.main(["run", "--config", path, "--out", str(tmp_path / "o")]) == 3


def test_cli_run_writes_csv_and_manifest(tmp_path):
    raw = {"experiment": "custom", "metric": "eta", "n": [16, 32], "drops": 20, "alpha": 2,
           "rays": 4, "azimuth": {"type": "uniform"}}
    out = tmp_path / "run"
    assert cli.main(["run", "--config", _write(tmp_path, raw), "--seed", "5", "--out", str(out)]) == 0
    rows = MetricSeries.read_csv(out / "custom_eta.csv").rows
    assert [r.N for r in rows] == [16, 32]
    assert [r.K for r in rows] == [8, 16]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 5
    assert set(manifest["files"]) == {"custom_eta.csv"}


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "raymimo", "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fig10" in proc.stdout


@pytest.mark.parametrize("metric,extra", [
    ("ch_fp", {"users": 2, "rays": 3, "azimuth": {"type": "uniform"}}),
    ("zeta", {"alpha": 2, "rays": 3, "azimuth": {"type": "von_mises", "kappa": 2}}),
    ("rayleigh", {"alpha": 2}),
    ("mu_ula", {"azimuth": {"type": "wrapped_gaussian", "sigma": 30}, "method": "quadrature-series"}),
    ("mu_upa", {"geometry": {"kind": "UPA"}, "n": [4, 16], "azimuth": {"type": "uniform"},
                "elevation": {"type": "uniform", "lo": 0, "hi": 180}}),
])
def test_custom_metrics_run(tmp_path, metric, extra):
    raw = {"experiment": "custom", "metric": metric, "drops": 10, "n": [16, 32]}
    raw.update(extra)
    result = run_experiment(resolve(raw), tmp_path)
    assert result.files == (f"custom_{metric}.csv",)
    assert (tmp_path / result.files[0]).read_text().count("\n") >= 3


@pytest.mark.parametrize("name", sorted(SMALL))
def test_small_figure_runs_are_deterministic(tmp_path, name):
    raw = {"experiment": name, **SMALL[name]}
    a = run_experiment(resolve(raw), tmp_path / "a")
    run_experiment(resolve(raw), tmp_path / "b")
    assert a.files
    for f in a.files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    c = run_experiment(resolve(raw, seed=12345), tmp_path / "c")
    if name not in ("fig4", "fig8"):  # purely analytic, seed-free
        assert any((tmp_path / "a" / f).read_bytes() != (tmp_path / "c" / f).read_bytes() for f in c.files)
