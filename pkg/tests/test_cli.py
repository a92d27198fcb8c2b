import csv
import json

import pytest

from identity_evolution import cli
from identity_evolution.harness import MEDIAN_COLUMNS, SimConfig

FAST = ["--periods", "6", "--agents", "12", "--replications", "2", "--rounds", "4"]


def simulate(tmp_path, name, *extra):
    out = tmp_path / name
    code = cli.main(["simulate", "--out", str(out), "--seed", "42", *FAST, *extra])
    return code, out


def test_simulate_writes_outputs(tmp_path):
    code, out = simulate(tmp_path, "a")
    assert code == 0
    for name in (cli.RAW_CSV, cli.MEDIAN_CSV, cli.MANIFEST):
        assert (out / name).exists()
    rows = list(csv.DictReader((out / cli.RAW_CSV).open()))
    assert len(rows) == 2 * 6
    assert len((out / cli.MEDIAN_CSV).read_text().splitlines()) == 1 + 6


def test_simulate_is_byte_identical(tmp_path):
    _, a = simulate(tmp_path, "a")
    _, b = simulate(tmp_path, "b", "--threads", "3")
    for name in (cli.RAW_CSV, cli.MEDIAN_CSV):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_odd_population_rejected(tmp_path, capsys):
    cfg = tmp_path / "odd.cfg"
    cfg.write_text("agents = 7\n")
    code = cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err
    assert "agents" in err and "N=7" in err


def test_malformed_config_names_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("periods = many\n")
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "periods" in capsys.readouterr().err
    cfg.write_text("colour = blue\n")
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "colour" in capsys.readouterr().err
    assert cli.main(["simulate", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "o")]) == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "an.cfg"
    cfg.write_text("mode = analytic\ninit_policy = uniform_random\n")
    code = cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o"), *FAST])
    assert code == 3
    err = capsys.readouterr().err
    assert "replication=0" in err and "gen=0" in err


def test_config_precedence_and_manifest(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# desk run\nperiods = 5\nbin_size = 0.2\nmode = montecarlo\n")
    out = tmp_path / "m"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out), "--periods", "3",
                     "--agents", "10", "--replications", "1", "--seed", "9"]) == 0
    manifest = cli.RunManifest.from_json((out / cli.MANIFEST).read_text())
    assert manifest.sources["periods"] == "cli"
    assert manifest.sources["bin_size"] == "file"
    assert manifest.sources["p_mut"] == "default"
    assert manifest.config["periods"] == 3 and manifest.config["bin_size"] == 0.2
    assert manifest.master_seed == 9
    assert manifest.sim_config() == SimConfig(periods=3, b=0.2, N=10, replications=1, master_seed=9)
    assert cli.RunManifest.from_json(manifest.to_json()) == manifest
    assert set(manifest.sources) == set(cli.CONFIG_KEYS)


def test_parse_config_text():
    values = cli.parse_config_text("agents = 0x10  # hex ok\n\nmode = analytic\nbin_size=0.05")
    assert values == {"agents": 16, "mode": "analytic_binary", "bin_size": 0.05}
    with pytest.raises(cli.ConfigError, match=":1:"):
        cli.parse_config_text("just words")


def test_analyze_game(capsys):
    assert cli.main(["analyze-game", "--phi", "0"]) == 0
    out = capsys.readouterr().out
    assert "(nonbinary,nonbinary): not THPE" in out
    assert "(binary,binary): THPE" in out
    assert cli.main(["analyze-game", "--phi", "0.5", "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert all(v["weak_dominance"] and v["tremble"] for v in summary["thpe"].values())
    assert cli.main(["analyze-game", "--phi", "1.2"]) == 2


def test_phi_command(capsys):
    assert cli.main(["phi", "--b", "0", "--samples", "1000"]) == 0
    assert capsys.readouterr().out.startswith("phi(0.0) = 0.0 ")
    assert cli.main(["phi", "--b", "1", "--samples", "1000"]) == 0
    assert capsys.readouterr().out.startswith("phi(1.0) = 1.0 ")
    assert cli.main(["phi", "--b", "0.1"]) == 0
    est = float(capsys.readouterr().out.split("=")[1].split("+/-")[0])
    assert abs(est - 0.19) <= 0.002
    assert cli.main(["phi", "--b", "-1"]) == 2
    assert cli.main(["phi", "--b", "0.5", "--samples", "0"]) == 2


def test_plot_data(tmp_path):
    _, out = simulate(tmp_path, "p")
    panels = tmp_path / "panels"
    assert cli.main(["plot-data", str(out / cli.MEDIAN_CSV), "--out", str(panels)]) == 0
    files = sorted(p.name for p in panels.iterdir())
    assert files == sorted(f for f, _ in cli.PANELS.values())
    shares = (panels / "panel_identity_shares.csv").read_text().splitlines()
    assert shares[0] == "gen,prop_zero,prop_one,prop_nonbinary"
    assert len(shares) == 7


def test_plot_data_empty_series(tmp_path):
    src = tmp_path / "empty.csv"
    src.write_text(",".join(MEDIAN_COLUMNS) + "\n")
    assert cli.main(["plot-data", str(src), "--out", str(tmp_path / "e")]) == 0
    for f, cols in cli.PANELS.values():
        assert (tmp_path / "e" / f).read_text() == ",".join(cols) + "\n"


def test_plot_data_renamed_columns(tmp_path, capsys):
    src = tmp_path / "renamed.csv"
    src.write_text(",".join(MEDIAN_COLUMNS).replace("unmatched", "lonely") + "\n0,1,0,0,1,0,1\n")
    assert cli.main(["plot-data", str(src), "--out", str(tmp_path / "r")]) == 2
    err = capsys.readouterr().err
    assert "unmatched" in err and ",".join(MEDIAN_COLUMNS) in err
    assert cli.main(["plot-data", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "r")]) == 2
    assert cli.main(["plot-data", str(src).replace("renamed", "x"), "--out", str(tmp_path / "r"), "--panels", "shares"]) == 2


def test_plot_data_unknown_panel(tmp_path):
    src = tmp_path / "m.csv"
    src.write_text(",".join(MEDIAN_COLUMNS) + "\n")
    assert cli.main(["plot-data", str(src), "--out", str(tmp_path / "u"), "--panels", "shares,pie"]) == 2
