import io
import json
import math
import os

from ratdyn.cli import parse_field, parse_map, run


def run_cli(argv, stdin_text=None):
    out, err = io.StringIO(), io.StringIO()
    rc = run(argv, stdin_text=stdin_text, out=out, err=err)
    return rc, out.getvalue(), err.getvalue()


def test_make_chebyshev_emits_coefficients():
    rc, out, _ = run_cli(["make", "chebyshev", "--d", "3"])
    assert rc == 0
    rep = json.loads(out)
    assert rep["results"]["num"] == ["0", "-3", "0", "1"]
    assert rep["results"]["den"] == ["1"]
    assert rep["schema_version"] == 1


def test_make_pipes_into_cycles():
    rc, made, _ = run_cli(["make", "power", "--d", "2"])
    assert rc == 0
    rc, out, _ = run_cli(["cycles", "--map", "-", "--period", "2"], stdin_text=made)
    assert rc == 0
    rep = json.loads(out)
    cycles = rep["results"]["cycles"]
    assert len(cycles) == 1
    lam = cycles[0]["multiplier"]
    assert abs(lam["re"] - 4) < 1e-9 and abs(lam["im"]) < 1e-9
    assert abs(cycles[0]["char_exponent"] - math.log(2)) < 1e-12


def test_field_check_example():
    rc, out, _ = run_cli(
        ["field-check", "--map", "z^2-1", "--max-period", "1", "--field", "Q"]
    )
    assert rc == 0
    rep = json.loads(out)
    m = rep["results"]["membership"]
    assert not m["all_in_field"]
    assert m["first_violation"]["period"] == 1
    assert m["first_violation"]["factor"] == "λ^2-2λ-4"
    rc, out, _ = run_cli(
        ["field-check", "--map", "z^2-1", "--max-period", "1", "--field", "quad:5"]
    )
    assert json.loads(out)["results"]["membership"]["all_in_field"]


def test_expression_parser_handles_lattes_text():
    f = parse_map("(z^2+1)^2/(4*(z^3-z))")
    assert f.degree == 4 and f.exact
    g = parse_map("lattes:-1:0:2")
    assert list(g.num) == list(f.num) and list(g.den) == list(f.den)


def test_expression_parser_rationals_and_signs():
    f = parse_map("-z^2 + 1/2")
    assert f.degree == 2
    g = parse_map("z^-2")
    assert g.degree == 2
    h = parse_map("chebyshev:3:-")
    assert h.evaluate(2).to_complex() == -2


def test_parse_errors_exit_2():
    rc, _, err = run_cli(["cycles", "--map", "z^&2", "--period", "1"])
    assert rc == 2
    diag = json.loads(err)
    assert diag["error"]["code"] == "map-parse"
    rc, _, err = run_cli(
        ["field-check", "--map", "z^2", "--max-period", "1", "--field", "bogus"]
    )
    assert rc == 2


def test_cap_exceeded_exit_4():
    rc, _, err = run_cli(
        ["spectrum", "--map", "z^2", "--max-period", "30", "--cap", "64"]
    )
    assert rc == 4
    assert json.loads(err)["error"]["code"] == "degree-cap"


def test_numeric_failure_exit_3():
    # homoclinic seed at a superattracting point: numeric failure class
    rc, _, err = run_cli(
        [
            "homoclinic", "--map", "z^2", "--point", "0", "--q", "1",
            "--n-min", "3", "--n-max", "5",
        ]
    )
    assert rc == 3
    assert json.loads(err)["error"]["code"] == "not-repelling"


def test_spectrum_and_classify_payloads():
    rc, out, _ = run_cli(["spectrum", "--map", "z^2", "--max-period", "2"])
    rep = json.loads(out)
    per = rep["results"]["per_period"]
    assert sorted(e["factor"] for e in per["1"]) == ["λ", "λ-2"]
    assert [e["factor"] for e in per["2"]] == ["λ-4"]
    rc, out, _ = run_cli(["classify", "--map", "power:2:+"])
    assert json.loads(out)["results"]["class"] == "power"


def test_cycles_exact_flag_includes_factors():
    rc, out, _ = run_cli(["cycles", "--map", "z^2", "--period", "2", "--exact"])
    assert rc == 0
    rep = json.loads(out)
    facs = rep["results"]["exact_factors"]
    assert facs == [{"factor": "λ-4", "multiplicity": 2}]


def test_determinism_byte_identical_minus_timing():
    args = ["zdunik", "--map", "z^2-1", "--max-period", "3", "--samples", "2000"]
    _, out1, _ = run_cli(args)
    _, out2, _ = run_cli(args)
    r1, r2 = json.loads(out1), json.loads(out2)
    r1.pop("timing")
    r2.pop("timing")
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_csv_flag():
    rc, out, _ = run_cli(
        ["cycles", "--map", "z^2", "--period", "2", "--csv"]
    )
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("period,")
    assert len(lines) == 2


def test_lyapunov_subcommand():
    rc, out, _ = run_cli(
        [
            "lyapunov", "--map", "z^2", "--samples", "5000", "--burn", "30",
            "--seed", "4", "--periodic", "4",
        ]
    )
    assert rc == 0
    rep = json.loads(out)
    assert abs(rep["results"]["monte_carlo"]["value"] - math.log(2)) < 0.02
    assert abs(rep["results"]["periodic_average"]["value"] - math.log(2)) < 1e-9


def test_equidist_subcommand():
    rc, out, _ = run_cli(
        [
            "equidist", "--map", "z^2", "--periods", "4,6", "--test-degree", "2",
            "--samples", "4000",
        ]
    )
    assert rc == 0
    rep = json.loads(out)
    assert rep["results"]["periods"] == [4, 6]
    assert set(rep["results"]["discrepancies"].keys()) == {"4", "6"}


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "conf.json"
    cfg.write_text(json.dumps({"csv": True}))
    rc, out, _ = run_cli(
        ["--config", str(cfg), "cycles", "--map", "z^2", "--period", "1"]
    )
    assert rc == 0
    assert out.startswith("period,")  # csv default applied from the file


def test_homoclinic_subcommand():
    rc, out, err = run_cli(
        [
            "homoclinic", "--map", "z^2-1", "--point", "1.6180339887498949",
            "--q", "1", "--n-min", "9", "--n-max", "13",
        ]
    )
    assert rc == 0, err
    rep = json.loads(out)
    res = rep["results"]
    assert abs(res["target_chi"] - math.log(1 + math.sqrt(5))) < 1e-9
    assert all(e["period_verified"] for e in res["entries"])
    assert res["convergence"]["c_over_n_holds"] is True


def test_thread_env_var_keeps_results_identical(monkeypatch):
    args = ["zdunik", "--map", "z^2-1", "--max-period", "3", "--samples", "1500"]
    _, base, _ = run_cli(args)
    monkeypatch.setenv("RATDYN_THREADS", "4")
    _, threaded, _ = run_cli(args)
    a, b = json.loads(base), json.loads(threaded)
    a.pop("timing")
    b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_parse_field_polynomial_forms():
    K = parse_field("poly:-2,0,0,1")
    assert K.degree == 3
    K2 = parse_field('poly:"x^3-2"')
    assert K2.poly == K.poly


def test_report_schema_document():
    here = os.path.dirname(__file__)
    schema_path = os.path.join(here, "..", "docs", "report_schema.json")
    with open(schema_path) as fh:
        schema = json.load(fh)
    _, out, _ = run_cli(["make", "chebyshev", "--d", "4"])
    rep = json.loads(out)
    for key, typ in schema["top_level"].items():
        assert key in rep, f"missing report key {key}"
        assert type(rep[key]).__name__ == typ, key
