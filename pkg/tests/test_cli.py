import json
import subprocess
import sys

import pytest

from loyalty_cim.cli import main
from loyalty_cim.graph import load_edge_list


def run(*argv):
    return main(list(argv))


class TestGenGraph:
    @pytest.mark.parametrize("model,extra,edges", [("er", ["--p", "1"], 6), ("ba", ["--m", "2"], 4),
                                                   ("ws", ["--k", "2", "--p", "0"], 4)])
    def test_models(self, tmp_path, model, extra, edges):
        out = tmp_path / "g.txt"
        assert run("gen-graph", "--model", model, "--n", "4", *extra, "--out", str(out)) == 0
        assert load_edge_list(out).edge_count == edges

    def test_invalid_parameter_is_usage_error(self, tmp_path, capsys):
        assert run("gen-graph", "--model", "er", "--n", "4", "--p", "2", "--out",
                   str(tmp_path / "g.txt")) == 1
        assert "error" in capsys.readouterr().err


class TestPlay:
    def test_file_graph_with_trace(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        g.write_text("0 1\n1 2\n")
        trace = tmp_path / "t.json"
        code = run("play", "--graph", str(g), "--black", "min-threshold", "--red", "random",
                   "--budget", "2", "--trace", str(trace))
        assert code == 0
        assert capsys.readouterr().out.splitlines()[1].startswith(("black", "red", "draw"))
        data = json.loads(trace.read_text())
        assert data["records"][0]["player"] == "black"

    def test_synthetic_graph_text_trace(self, tmp_path):
        trace = tmp_path / "t.txt"
        assert run("play", "--graph", "sf", "--black", "random", "--red", "max-threshold",
                   "--starter", "red", "--seed", "3", "--trace", str(trace)) == 0
        assert trace.read_text().split("\t")[1] == "red"

    def test_missing_graph_is_data_error(self, tmp_path, capsys):
        assert run("play", "--graph", str(tmp_path / "none.txt")) == 2
        assert "data error" in capsys.readouterr().err

    def test_malformed_graph_is_data_error(self, tmp_path):
        g = tmp_path / "g.txt"
        g.write_text("x y\n")
        assert run("play", "--graph", str(g)) == 2


class TestMatch:
    def test_csv_is_byte_identical(self, tmp_path, capsys):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            assert run("match", "--dataset", "er", "--black", "eps-mcts", "--red", "random",
                       "--iterations", "10", "--games", "3", "--seed", "4", "--out", str(out)) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert outs[0].splitlines()[0] == b"run_id,starter,winner,black_nodes,red_nodes,turns,graph_n,graph_m,seed"
        assert "games=3" in capsys.readouterr().out

    def test_config_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# defaults\ngames = 2\nblack = min-threshold\n--red = random\nseed=1\n")
        assert run("match", "--config", str(cfg)) == 0
        assert "games=2" in capsys.readouterr().out
        assert run("match", "--config", str(cfg), "--games", "3") == 0
        assert "games=3" in capsys.readouterr().out

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour = red\n")
        assert run("match", "--config", str(cfg)) == 1

    def test_missing_config(self, tmp_path):
        assert run("match", "--config", str(tmp_path / "none.cfg")) == 1

    def test_bad_dataset(self):
        assert run("match", "--dataset", "grid", "--games", "1") == 1

    def test_bad_weights(self):
        assert run("match", "--weights", "1,2", "--games", "1") == 1

    def test_json_output(self, tmp_path):
        out = tmp_path / "r.json"
        assert run("match", "--black", "random", "--red", "random", "--games", "2",
                   "--budget", "7", "--out", str(out)) == 0
        assert [r["budget"] for r in json.loads(out.read_text())] == [7, 7]


class TestOtherCommands:
    def test_randomness(self, tmp_path, capsys):
        out = tmp_path / "t.txt"
        assert run("randomness", "--black", "min-threshold", "--red", "max-threshold",
                   "--graphs", "2", "--runs", "3", "--out", str(out)) == 0
        assert out.read_text() == capsys.readouterr().out
        assert out.read_text().startswith("Randomness\tGraph 1\tGraph 2")

    def test_tokens_exp(self, capsys):
        assert run("tokens-exp", "--formation", "fire-vs-choose", "--games", "2",
                   "--iterations", "5") == 0
        assert "games=2" in capsys.readouterr().out

    def test_usage_errors(self):
        for argv in ([], ["bogus"], ["match", "--black", "alphazero"], ["match", "--games", "x"]):
            with pytest.raises(SystemExit) as exc:
                run(*argv)
            assert exc.value.code == 1

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "loyalty_cim", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and "gen-graph" in proc.stdout
