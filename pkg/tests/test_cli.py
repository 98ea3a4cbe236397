import csv
import json

import pytest

from ultratree.cli import ConfigError, main, parse_delta, parse_schedule, \
    parse_spec
from ultratree.words import ExplicitWindow, FullShift, SturmianCF, \
    Substitution


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# parsing


def test_parse_spec():
    assert parse_spec("full:3") == FullShift(3)
    assert parse_spec("sturmian:cf=1") == SturmianCF((1,), ("constant", 1))
    assert parse_spec("sturmian:cf=1,2,...") == \
        SturmianCF((1, 2), ("constant", 2))
    assert parse_spec("sturmian:cf=linear") == SturmianCF((), ("linear",))
    assert parse_spec("sturmian:cf=pow2") == SturmianCF((), ("pow2",))
    assert parse_spec("window:abab") == ExplicitWindow("abab")
    assert parse_spec("subst:a=ab,b=ba,seed=a") == \
        Substitution.from_rules({"a": "ab", "b": "ba"}, "a")
    for bad in ("bogus:1", "full:x", "sturmian:1,2", "window:",
                "sturmian:cf=..."):
        with pytest.raises(ConfigError):
            parse_spec(bad)


def test_parse_delta(tmp_path):
    assert parse_delta("exp").name == "exponential"
    assert parse_delta("geom:0.25")[1] == 0.25
    table = tmp_path / "delta.txt"
    table.write_text("1.0\n0.5\n0.2\n")
    assert parse_delta("table:%s" % table)[2] == 0.2
    with pytest.raises(ConfigError):
        parse_delta("table:/no/such/file")
    with pytest.raises(ConfigError):
        parse_delta("fibonacci")


def test_parse_schedule():
    assert parse_schedule(None, 64) == (8, 16, 32, 64)
    assert parse_schedule("4,8,16", 16) == (4, 8, 16)
    with pytest.raises(ConfigError):
        parse_schedule("8,4", 16)
    with pytest.raises(ConfigError):
        parse_schedule("8,32", 16)


# ---------------------------------------------------------------------------
# commands


def test_lang_command(tmp_path):
    out = str(tmp_path / "lang")
    assert main(["lang", "--spec", "full:2", "--depth", "5",
                 "--out", out]) == 0
    rows = read_csv(out + "/language.csv")
    assert rows[0] == ["n", "P", "g", "right_special"]
    assert [r[1] for r in rows[1:]] == [str(2 ** n) for n in range(6)]
    report = read_json(out + "/language_report.json")
    assert report["version"]
    assert "edge_length_convention" in report


def test_lang_sturmian_g_column(tmp_path):
    out = str(tmp_path / "stur")
    assert main(["lang", "--spec", "sturmian:cf=1,1,1,...", "--depth", "32",
                 "--out", out]) == 0
    rows = read_csv(out + "/language.csv")
    assert all(r[2] == "1" for r in rows[1:-1])


def test_lang_window_repetitivity_not_found(tmp_path):
    out = str(tmp_path / "win")
    assert main(["lang", "--spec", "window:abcabc", "--depth", "4",
                 "--out", out]) == 0
    report = read_json(out + "/language_report.json")
    # no length-4 factor contains all three of them
    assert report["repetitivity"]["4"] is None


def test_lipschitz_command(tmp_path):
    out = str(tmp_path / "lip")
    assert main(["lipschitz", "--spec", "full:2", "--delta", "exp",
                 "--depth", "64", "--out", out]) == 0
    rows = read_csv(out + "/lipschitz.csv")
    for row in rows[1:]:
        assert float(row[1]) <= 0.582
    report = read_json(out + "/lipschitz_report.json")
    assert set(report["bounded_trend"]) == {"C", "W", "K"}


def test_zeta_command(tmp_path):
    out = str(tmp_path / "zeta")
    assert main(["zeta", "--spec", "sturmian:cf=1", "--delta", "harmonic",
                 "--depth", "1024", "--schedule", "256,512,1024",
                 "--out", out]) == 0
    report = read_json(out + "/zeta_report.json")
    lo, hi = report["abscissa"]["low"]["bracket"]
    assert lo <= 1.0 <= hi


def test_laplacian_command(tmp_path):
    out = str(tmp_path / "lap")
    assert main(["laplacian", "--spec", "full:2", "--depth", "1",
                 "--rho", "2", "--delta", "geom:0.5", "--out", out]) == 0
    # the table starts at delta_0 = 1 only for a custom table; geom has
    # delta_0 = 1 as well, so the 2x2 example applies
    rows = read_csv(out + "/spectrum.csv")
    assert [float(r[1]) for r in rows[1:]] == [0.0, 4.0]
    report = read_json(out + "/laplacian_report.json")
    assert report["invariants"]["row_ok"]
    assert report["invariants"]["route_difference"] == 0.0


def test_laplacian_pb_and_measure_file(tmp_path):
    measure = tmp_path / "measure.json"
    weights = {"": ["1/3", "2/3"], "a": ["1/2", "1/2"],
               "b": ["1/4", "3/4"]}
    measure.write_text(json.dumps(weights))
    out = str(tmp_path / "lap")
    assert main(["laplacian", "--spec", "sturmian:cf=1", "--depth", "6",
                 "--delta", "harmonic", "--measure", "random",
                 "--seed", "4", "--pb", "--out", out]) == 0
    report = read_json(out + "/laplacian_report.json")
    assert report["pb"]["max_abs_difference_from_full"] == 0.0
    out2 = str(tmp_path / "lap2")
    assert main(["laplacian", "--spec", "full:2", "--depth", "2",
                 "--delta", "harmonic",
                 "--measure", "file:%s" % measure, "--out", out2]) == 0
    index = read_json(out2 + "/index_map.json")
    assert index["0"] == "aa"


def test_json_format_series(tmp_path):
    out = str(tmp_path / "fmt")
    assert main(["lang", "--spec", "full:2", "--depth", "3",
                 "--format", "json", "--out", out]) == 0
    data = read_json(out + "/language.json")
    assert data[0]["P"] == 1


def test_exit_codes(tmp_path):
    out = str(tmp_path / "err")
    assert main(["lang", "--spec", "bogus:2", "--depth", "3",
                 "--out", out]) == 2
    assert main(["laplacian", "--spec", "full:2", "--depth", "2",
                 "--delta", "harmonic", "--measure", "nope",
                 "--out", out]) == 2
    assert main(["lipschitz", "--spec", "full:2", "--delta", "geom:2.0",
                 "--depth", "8", "--out", out]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["lang", "--spec", "full:2"])
    assert exc.value.code == 2


def test_determinism(tmp_path):
    args = ["laplacian", "--spec", "full:3", "--depth", "3",
            "--delta", "harmonic", "--measure", "random", "--seed", "7"]
    outs = []
    for name in ("a", "b"):
        out = str(tmp_path / name)
        assert main(args + ["--out", out]) == 0
        outs.append(out)
    for fname in ("laplacian_matrix.csv", "index_map.json",
                  "spectrum.csv", "laplacian_report.json"):
        with open(outs[0] + "/" + fname, "rb") as fa, \
                open(outs[1] + "/" + fname, "rb") as fb:
            assert fa.read() == fb.read()
