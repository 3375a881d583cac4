import json
import subprocess
import sys

import pytest

from gsp_sampling.cli import cli_main
from gsp_sampling.graph import Graph
from gsp_sampling.spectral import load_basis

SMALL = ["--n", "20", "--bandwidth", "3", "--snr", "0.1,1e10"]


def write_config(tmp_path, **kw):
    doc = dict(n_vertices=20, bandwidth=3, n_graph_instances=2, sample_size_range=[0, 6],
               n_signals=20, verify_pairs=10, verify_orderings=2, verify_mc_cells=3,
               verify_mc_signals=400, output_dir=str(tmp_path / "out"))
    doc.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestExitCodes:
    def test_no_command(self, capsys):
        assert cli_main([]) == 2

    def test_unknown_command(self, capsys):
        assert cli_main(["frobnicate"]) == 2

    def test_help(self, capsys):
        assert cli_main(["--help"]) == 0
        out = capsys.readouterr().out
        for word in ("mse-sweep", "tau-sweep", "verify", "gen-graph", "snr_list", "sample_size_range"):
            assert word in out

    def test_subcommand_help_lists_fields(self, capsys):
        assert cli_main(["mse-sweep", "--help"]) == 0
        assert "verify_mc_signals" in capsys.readouterr().out

    def test_missing_config(self, tmp_path, capsys):
        assert cli_main(["verify", "--config", str(tmp_path / "nope.json")]) == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_bundled(self, capsys):
        assert cli_main(["verify", "--config", "not-a-config"]) == 1

    def test_invalid_value(self, tmp_path, capsys):
        assert cli_main(["mse-sweep", "--config", write_config(tmp_path), "--snr", "-1"]) == 1
        assert "SNR" in capsys.readouterr().err

    def test_unknown_key(self, tmp_path, capsys):
        assert cli_main(["mse-sweep", "--config", write_config(tmp_path, colour="red")]) == 1


class TestCommands:
    def test_mse_sweep(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert cli_main(["mse-sweep", "--config", cfg, "--snr", "0.1", "--snr", "1e10"]) == 0
        text = (tmp_path / "out" / "mse_sweep.csv").read_text().splitlines()
        body = [ln for ln in text if not ln.startswith("#")]
        assert body[0] == "scheme,sample_size,snr,metric,value,ci_low,ci_high,instance"
        assert {ln.split(",")[2] for ln in body[1:]} == {"0.1", "10000000000.0"}

    def test_tau_sweep(self, tmp_path):
        cfg = write_config(tmp_path)
        assert cli_main(["tau-sweep", "--config", cfg, "--out", str(tmp_path / "t")]) == 0
        assert (tmp_path / "t" / "tau_sweep.csv").exists()
        assert (tmp_path / "t" / "tau_sweep.svg").exists()

    def test_verify(self, tmp_path, capsys):
        assert cli_main(["verify", "--config", write_config(tmp_path)]) == 0
        report = json.loads((tmp_path / "out" / "verify_report.json").read_text())
        assert report["passed"] and "metadata" in report
        assert "PASS theorem2" in capsys.readouterr().out

    def test_gen_graph(self, tmp_path):
        cfg = write_config(tmp_path)
        assert cli_main(["gen-graph", "--config", cfg, "--cache-basis"]) == 0
        doc = json.loads((tmp_path / "out" / "graph_1.json").read_text())
        g = Graph.from_json(doc)
        assert g.n_vertices == 20 and doc["metadata"]["graph_hash"] == g.digest()
        basis, header = load_basis(tmp_path / "out" / "graph_1.combinatorial.basis", g.digest())
        assert header["n"] == 20
        assert basis.eigenvectors.shape[0] == 20

    def test_seed_changes_output(self, tmp_path):
        cfg = write_config(tmp_path)
        cli_main(["gen-graph", "--config", cfg, "--out", str(tmp_path / "a")])
        cli_main(["gen-graph", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "9"])
        a = json.loads((tmp_path / "a" / "graph_0.json").read_text())
        b = json.loads((tmp_path / "b" / "graph_0.json").read_text())
        assert a["edges"] != b["edges"]


@pytest.mark.slow
def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gsp_sampling", "--version"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip().startswith("gsp-sampling")
