import json
import math
import os

import numpy as np
import pytest

from gabic.cli import main

GAM = 0.01
LAM = 1.6 * GAM

BASE = {
    "params": {"omega_a": 0.0, "omega_c": 0.0, "xi": 1.0, "g": 0.1,
               "lam": LAM, "phi": 0.0},
    "geometry": {"size": 12, "shift": 4, "n_sites": 400},
}


def write_config(tmp_path, name="cfg.json", **overrides):
    cfg = json.loads(json.dumps(BASE))
    for key, val in overrides.items():
        if isinstance(val, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(val)
        else:
            cfg[key] = val
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        lines = [l.rstrip("\n") for l in fh]
    assert lines[0].startswith("#")
    header = lines[1].split(",")
    rows = [l.split(",") for l in lines[2:]]
    return header, rows


class TestSweep:
    def test_figure_grid_zero_crossings(self, tmp_path):
        cfg = write_config(tmp_path, sweep={"phi_start": 0.0,
                                            "phi_stop": 4 * math.pi,
                                            "steps": 801})
        out = str(tmp_path / "sweep.csv")
        assert main(["sweep", "--config", cfg, "--out", out]) == 0
        header, rows = read_csv(out)
        assert header == ["phi", "re_e1", "im_e1", "re_e2", "im_e2", "n_bics"]
        assert len(rows) == 801
        for j, row in enumerate(rows):
            ims = (abs(float(row[2])), abs(float(row[4])))
            if j % 200 == 0:
                assert int(row[5]) == 1
                assert min(ims) < 1e-12
            else:
                assert int(row[5]) == 0

    def test_vanishing_kernel_columns(self, tmp_path):
        cfg = write_config(tmp_path, geometry={"size": 14, "shift": 4,
                                               "n_sites": 400})
        out = str(tmp_path / "sweep.csv")
        assert main(["sweep", "--config", cfg, "--out", out]) == 0
        _, rows = read_csv(out)
        for row in rows:
            assert abs(float(row[2])) < 1e-9 and abs(float(row[4])) < 1e-9

    def test_empty_grid_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, sweep={"steps": 0})
        assert main(["sweep", "--config", cfg]) == 1
        assert "empty phase grid" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path, sweep={"steps": 101})
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        assert main(["sweep", "--config", cfg, "--out", a]) == 0
        assert main(["sweep", "--config", cfg, "--out", b]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_json_format(self, tmp_path):
        cfg = write_config(tmp_path, sweep={"steps": 11})
        out = str(tmp_path / "sweep.json")
        assert main(["sweep", "--config", cfg, "--out", out,
                     "--format", "json"]) == 0
        doc = json.load(open(out))
        assert doc["columns"][0] == "phi"
        assert len(doc["rows"]) == 11


class TestDynamics:
    def test_markov_long_time_trapping(self, tmp_path):
        cfg = write_config(tmp_path, dynamics={"backend": "markov",
                                               "t_max": 5000.0,
                                               "n_times": 11})
        out = str(tmp_path / "dyn.csv")
        assert main(["dynamics", "--config", cfg, "--out", out]) == 0
        header, rows = read_csv(out)
        last = rows[-1]
        assert abs(float(last[1]) - 0.25) < 1e-6
        assert abs(float(last[2]) - 0.25) < 1e-6
        # lattice columns are empty fields for the markov backend
        assert last[3] == "" and last[4] == "" and last[5] == ""

    def test_both_backends_agree_at_short_times(self, tmp_path):
        cfg = write_config(tmp_path,
                           geometry={"size": 12, "shift": 4, "n_sites": None},
                           dynamics={"backend": "both", "t_max": 40.0,
                                     "n_times": 41})
        out = str(tmp_path / "dyn.csv")
        assert main(["dynamics", "--config", cfg, "--out", out]) == 0
        _, rows = read_csv(out)
        for row in rows:
            assert abs(float(row[1]) - float(row[3])) < 0.12
            total = float(row[3]) + float(row[4]) + float(row[5])
            assert abs(total - 1.0) < 1e-9

    def test_strict_light_cone(self, tmp_path):
        cfg = write_config(tmp_path, dynamics={"backend": "lattice",
                                               "t_max": 1000.0,
                                               "n_times": 5})
        assert main(["dynamics", "--config", cfg, "--strict",
                     "--out", str(tmp_path / "x.csv")]) == 1

    def test_unknown_backend(self, tmp_path):
        cfg = write_config(tmp_path, dynamics={"backend": "exact"})
        assert main(["dynamics", "--config", cfg]) == 1

    def test_tmax_override_sizes_lattice(self, tmp_path, capsys):
        cfg = write_config(tmp_path,
                           geometry={"size": 12, "shift": 4, "n_sites": None},
                           dynamics={"backend": "lattice", "n_times": 3})
        assert main(["dynamics", "--config", cfg, "--tmax", "30",
                     "--print-config",
                     "--out", str(tmp_path / "d.csv")]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["geometry"]["n_sites"] == 16 + 4 * 30 + 40


class TestBic:
    def test_empty_report_for_no_bic_geometry(self, tmp_path):
        cfg = write_config(tmp_path, geometry={"size": 17, "shift": 5,
                                               "n_sites": 400})
        out = str(tmp_path / "bic.json")
        assert main(["bic", "--config", cfg, "--phi", "2.0",
                     "--out", out]) == 0
        report = json.load(open(out))
        assert report["n_bics"] == 0 and report["bics"] == []

    def test_single_bound_state_report_and_profile(self, tmp_path):
        cfg = write_config(tmp_path, geometry={"size": 12, "shift": 4,
                                               "n_sites": 600})
        out = str(tmp_path / "bic.json")
        assert main(["bic", "--config", cfg, "--phi", str(math.pi),
                     "--out", out]) == 0
        report = json.load(open(out))
        assert report["n_bics"] == 1
        b = report["bics"][0]
        assert abs(b["energy"] - LAM) < 0.2 * GAM
        assert b["concurrence"] > 0.9
        rho_re = np.array(b["rho_atoms"]["re"])
        assert rho_re.shape == (4, 4)
        assert abs(np.trace(rho_re) - 1.0) < 1e-12
        header, rows = read_csv(str(tmp_path / "bic_bic0.csv"))
        assert header == ["site", "beta_abs2"]
        assert len(rows) == 600
        total = sum(float(r[1]) for r in rows)
        assert abs(total - b["ground_population"]) < 1e-12


class TestSpectrum:
    def test_row_count_and_decoupled_levels(self, tmp_path):
        cfg = write_config(tmp_path, params={"g": 0.0, "lam": 0.0},
                           geometry={"size": 12, "shift": 4, "n_sites": 80})
        out = str(tmp_path / "spec.csv")
        assert main(["spectrum", "--config", cfg, "--out", out]) == 0
        header, rows = read_csv(out)
        assert header == ["index", "energy", "atomic_weight",
                          "localized_fraction"]
        assert len(rows) == 82
        atomic = [r for r in rows if float(r[2]) > 0.999]
        assert len(atomic) == 2
        assert all(abs(float(r[1])) < 1e-12 for r in atomic)

    def test_nc_override(self, tmp_path):
        cfg = write_config(tmp_path)
        out = str(tmp_path / "spec.csv")
        assert main(["spectrum", "--config", cfg, "--out", out,
                     "--nc", "50"]) == 0
        _, rows = read_csv(out)
        assert len(rows) == 52


class TestErrors:
    def test_missing_config_file(self, tmp_path):
        assert main(["sweep", "--config", str(tmp_path / "nope.json")]) == 3

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["sweep", "--config", str(path)]) == 1

    def test_invalid_geometry(self, tmp_path):
        cfg = write_config(tmp_path, geometry={"n1": 5, "n2": 5, "m1": 9,
                                               "m2": 21, "n_sites": 100})
        assert main(["sweep", "--config", cfg]) == 1

    def test_unwritable_output(self, tmp_path):
        cfg = write_config(tmp_path)
        dest = str(tmp_path / "missing-dir" / "x.csv")
        assert main(["sweep", "--config", cfg, "--out", dest]) == 3


class TestShippedConfigs:
    def test_reference_configs_resolve(self, capsys):
        import gabic
        cfgdir = os.path.join(os.path.dirname(gabic.__file__), "configs")
        names = sorted(os.listdir(cfgdir))
        assert [n for n in names if n.endswith(".json")] == \
            [f"fig{c}.json" for c in "ABCDEF"]
        # phase sweep runs off any of them without touching the lattice
        cfg = os.path.join(cfgdir, "figA.json")
        assert main(["sweep", "--config", cfg, "--print-config"]) == 0
        out = capsys.readouterr().out
        resolved, _ = json.JSONDecoder().raw_decode(out)
        assert resolved["params"]["lam"] == pytest.approx(LAM)
        assert resolved["geometry"]["n_sites"] >= 1200
