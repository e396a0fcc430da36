import json

from skpsi.harness.cli import build_parser, main


def test_parser():
    args = build_parser().parse_args(["taylor", "--seed", "4", "-vv"])
    assert args.experiment == "taylor"
    assert args.seed == 4
    assert args.verbose == 2


def test_main(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("PSIDO_GRID_K", raising=False)
    out = tmp_path / "taylor"
    assert main(["taylor", "--out", str(out), "--grid-K", "8"]) == 0
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["passed"]
    assert report["config"]["grid"]["K"] == 8
    assert (out / "taylor.csv").exists()
    assert "taylor OK" in capsys.readouterr().out


def test_main_errors(tmp_path, capsys):
    config = tmp_path / "empty.toml"
    config.write_text(
        'experiment = "compose"\n[strip]\nstart = 3\nstop = 1\n',
        encoding="utf-8",
    )
    assert main(["compose", "--config", str(config)]) == 2
    assert "ConfigInvalid" in capsys.readouterr().out

    config.write_text(
        'experiment = "ellipticity"\n[symbol]\nA = "resolvent-reduced"\n',
        encoding="utf-8",
    )
    code = main(
        ["ellipticity", "--config", str(config), "--out", str(tmp_path)]
    )
    # tau e^{i 0} - <xi> is not elliptic on the default strip
    assert code == 1
    assert "FAIL" in capsys.readouterr().out
