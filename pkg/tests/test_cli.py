import csv
import io
import json

from sumprodlab import energy
from sumprodlab.cli import RunConfig, main
from sumprodlab.report import CSV_FIELDS


def run(args):
    buf = io.StringIO()
    code = main(args, out=buf)
    return code, buf.getvalue()


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_gen_subgroup(tmp_path):
    out = tmp_path / "h.txt"
    assert run(["gen", "--family", "subgroup(order=3)", "--p", "7", "-o", str(out)])[0] == 0
    assert out.read_text() == "p 7\n1\n2\n4\n"


def test_gen_singleton_and_determinism(tmp_path):
    code, text = run(["gen", "--family", "interval(size=1)", "--p", "101"])
    assert code == 0 and text.splitlines()[1:] == ["1"]
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        run(["gen", "--family", "random(size=9,seed=4)", "--p", "1009", "-o", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_many_into_directory(tmp_path):
    code, _ = run(["gen", "--family", "interval(size=3)", "--family", "gp(size=3)", "--p", "7",
                   "--p", "11", "-o", str(tmp_path / "sets")])
    assert code == 0 and len(list((tmp_path / "sets").iterdir())) == 4


def test_gen_bad_spec_exit_2():
    assert run(["gen", "--family", "subgroup(order=4)", "--p", "7"])[0] == 2


def test_compute_examples(tmp_path):
    path = tmp_path / "a.txt"
    path.write_text("p 7\n1\n2\n3\n")
    code, text = run(["compute", "--set-file", str(path), "--quantity", "energy"])
    rows = rows_of(text)
    assert code == 0 and rows[0]["check_name"] == "energy" and rows[0]["lhs"] == "19"
    code, text = run(["compute", "--p", "7", "--family", "interval(size=1)", "--quantity", "triples"])
    assert rows_of(text)[0]["lhs"] == "0"
    code, text = run(["compute", "--p", "13", "--family", "interval(start=0,size=13)",
                      "--quantity", "sumset_size"])
    assert rows_of(text)[0]["lhs"] == "13"


def test_compute_all_quantities(tmp_path):
    from sumprodlab.cli import QUANTITIES
    args = ["compute", "--p", "101", "--family", "random(size=7,seed=2,zero_free=true)"]
    for q in QUANTITIES:
        args += ["--quantity", q]
    code, text = run(args)
    rows = rows_of(text)
    assert code == 0 and [r["check_name"] for r in rows] == list(QUANTITIES)


def test_compute_unknown_quantity_exit_2():
    assert run(["compute", "--p", "7", "--family", "interval(size=2)", "--quantity", "nope"])[0] == 2


def test_csv_schema_and_json_mirror():
    base = ["check", "--p", "101", "--family", "interval(size=6)", "--check", "sp_65"]
    _, text = run(base)
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    _, js = run(base + ["--format", "json"])
    assert json.loads(js) == rows_of(text)


def test_check_cauchy_schwarz_catalogue_all_pass():
    code, text = run(["check", "--check", "cauchy_schwarz_sum"])
    rows = rows_of(text)
    assert code == 0 and len(rows) > 50
    assert all(r["ratio"] and float(r["lhs"]) >= float(r["rhs"]) for r in rows)


def test_check_constraint_violation_row():
    _, text = run(["check", "--p", "101", "--family", "interval(size=20)", "--check", "sp_sum3prod2"])
    assert rows_of(text)[0]["constraint_ok"] == "false"


def test_check_exit_1_on_exact_failure(monkeypatch):
    monkeypatch.setattr(energy, "additive_energy", lambda a, b=None: 0)
    import sumprodlab.harness as h
    monkeypatch.setattr(h, "additive_energy", lambda a, b=None: 0)
    code, _ = run(["check", "--p", "101", "--family", "interval(size=5)", "--check", "cauchy_schwarz_sum"])
    assert code == 1


def test_sweep_sp65_intervals():
    code, text = run(["sweep", "--p", "10007", "--family", "interval(start=1)", "--sizes", "8", "12", "16",
                      "24", "--check", "sp_65"])
    rows = rows_of(text)
    assert code == 0
    data = [r for r in rows if r["check_name"] == "sp_65"]
    lhs = [int(r["lhs"]) for r in data]
    assert lhs == sorted(lhs) and len(lhs) == 4
    fit = [r for r in rows if r["check_name"] == "sp_65#fit"]
    assert len(fit) == 1 and float(fit[0]["lhs"]) >= 6 / 5


def test_sweep_warning_row_when_constraint_never_holds():
    code, text = run(["sweep", "--p", "101", "--family", "interval(start=1)", "--sizes", "20", "24", "28",
                      "--check", "sp_sum3prod2"])
    rows = rows_of(text)
    warn = [r for r in rows if r["check_name"] == "sp_sum3prod2#warning"]
    assert code == 0 and len(warn) == 1 and warn[0]["constraint_ok"] == "false"


def test_sweep_independent_of_jobs():
    args = ["sweep", "--p", "101", "--sizes", "6", "8", "10", "--check", "sp_65", "--check", "beck_lines"]
    assert run(args)[1] == run(args + ["--jobs", "3"])[1]


def test_oracle_defaults_exit_0():
    code, text = run(["oracle"])
    assert code == 0 and "FAIL" not in text


def test_oracle_detects_corrupted_fast_path(monkeypatch):
    real = energy.additive_energy
    monkeypatch.setattr(energy, "additive_energy", lambda a, b=None: real(a, b) + 1)
    code, text = run(["oracle", "--oracle", "energy_additive"])
    assert code == 1 and "FAIL energy_additive" in text


def test_oracle_limits_exit_2():
    assert run(["oracle", "--p", "2003"])[0] == 2
    assert run(["oracle", "--instances", "100000"])[0] == 2
    assert run(["oracle", "--set", "max_size=99"])[0] == 2


def test_usage_errors_exit_2(tmp_path):
    assert run(["frobnicate"])[0] == 2
    assert run(["check", "--check", "nope"])[0] == 2
    assert run(["check", "--set", "bogus=1"])[0] == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("p = seven\n")
    assert run(["check", "--config", str(bad)])[0] == 2


def test_config_roundtrip_and_overrides(tmp_path):
    cfg = RunConfig(command="sweep", p=[101, 1009], families=["ap(start=1,step=3)", "subgroup()"],
                    checks=["sp_65"], sizes=[6, 8], seed=5, jobs=2, format="json")
    assert RunConfig.from_text(cfg.to_text()) == cfg
    path = tmp_path / "run.cfg"
    path.write_text("# sweep config\n" + cfg.to_text())
    saved = tmp_path / "saved.cfg"
    code, _ = run(["sweep", "--config", str(path), "--p", "101", "--jobs", "1", "--set", "format=csv",
                   "--save-config", str(saved)])
    assert code == 0
    eff = RunConfig.from_text(saved.read_text())
    assert eff.p == [101] and eff.format == "csv" and eff.families == cfg.families and eff.seed == 5
