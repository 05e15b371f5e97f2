import json

import jsonschema
import pytest

from bisym.bisingular import external_product, sigma_pair
from bisym.cli import DEMO_SCHEMA, main
from bisym.formats import write_bsym, write_sig, write_sym
from bisym.symbols import X, XI, Z, ZBAR, sh_mul


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, s in {"xi": XI, "x": X, "ann": Z, "cre": ZBAR, "osc": sh_mul(X, X)}.items():
        paths[name] = tmp_path / f"{name}.sym"
        write_sym(paths[name], s)
    paths["pair"] = tmp_path / "pair.sig"
    write_sig(paths["pair"], sigma_pair(external_product(Z, Z)))
    paths["bsym"] = tmp_path / "a.bsym"
    write_bsym(paths["bsym"], external_product(Z, Z))
    paths["mv_id"] = tmp_path / "id.kd"
    paths["mv_id"].write_text(
        'kind = "mv"\n'
        "left = { K0 = { rank = 2 }, K1 = { rank = 1 } }\n"
        "right = { K0 = { rank = 2 }, K1 = { rank = 1 } }\n"
        "M0 = [[1, 0], [0, 1]]\nM1 = [[1]]\n"
    )
    paths["ext"] = tmp_path / "ext.kd"
    paths["ext"].write_text(
        'kind = "sixterm"\n'
        "ideal = { K0 = { rank = 1 }, K1 = { rank = 0 } }\n"
        "quotient = { K0 = { rank = 1 }, K1 = { rank = 1 } }\n"
        "delta = [[1]]\neps = []\n"
    )
    paths["amb"] = tmp_path / "amb.kd"
    paths["amb"].write_text(
        'kind = "sixterm"\n'
        "ideal = { K0 = { rank = 1 }, K1 = { rank = 0 } }\n"
        "quotient = { K0 = { torsion = [2] }, K1 = { rank = 0 } }\n"
    )
    return paths


def test_symbol_compose(capsys, files):
    code, out, _ = run(capsys, "symbol", "compose", files["xi"], files["x"], "--depth", "full")
    assert code == 0 and out.strip() == "xξ - i"


def test_symbol_principal_and_check(capsys, files):
    code, rec = run_json(capsys, "symbol", "principal", files["ann"])
    assert code == 0 and rec["principal"] == "e^{iθ}"
    code, out, _ = run(capsys, "symbol", "check", files["ann"], "--order", "1")
    assert code == 0 and "pass" in out


def test_symbol_bisingular(capsys, files):
    code, rec = run_json(capsys, "symbol", "principal", files["bsym"])
    assert code == 0 and rec["principal"]["compatible"]
    code, rec = run_json(capsys, "symbol", "check", files["bsym"])
    assert code == 0 and rec["report"]["applicable"] is False


def test_index_commands(capsys, files):
    code, rec = run_json(capsys, "index", "analytic", files["ann"], "-N", "64")
    assert code == 0 and rec["report"]["value"] == 1
    code, out, _ = run(capsys, "index", "multiplicativity", files["ann"], files["cre"])
    assert code == 0 and out.strip().startswith("-1 = 1 x -1")
    code, rec = run_json(capsys, "index", "topological", files["pair"], "-m", "2")
    assert code == 0 and rec["report"]["value"] == 1
    code, rec = run_json(capsys, "index", "analytic", files["cre"], "--strategy", "heat_trace")
    assert code == 0 and rec["report"]["value"] == -1


def test_ktheory_commands(capsys, files):
    code, out, _ = run(capsys, "ktheory", "paper")
    assert code == 0
    assert "K0(Σ) ≅ ℤ, K1(Σ) ≅ ℤ" in out
    assert "K0(A^{0,0}) ≅ ℤ, K1(A^{0,0}) ≅ 0" in out
    code, rec = run_json(capsys, "ktheory", "mv", files["mv_id"])
    assert code == 0 and all(g["pretty"] == "0" for g in rec["groups"].values())
    code, rec = run_json(capsys, "ktheory", "sixterm", files["ext"])
    assert code == 0 and [rec["groups"][k]["pretty"] for k in ("K0", "K1")] == ["ℤ", "0"]


def test_ambiguity_is_a_warning(capsys, files):
    code, out, err = run(capsys, "ktheory", "sixterm", files["amb"])
    assert code == 0 and "not determined" in err


def test_exit_codes(capsys, files, tmp_path):
    bad = tmp_path / "bad.sym"
    bad.write_text("1 1 oops\n")
    assert run(capsys, "symbol", "principal", bad)[0] == 2
    assert run(capsys, "index", "analytic", files["ann"], "-N", "9999")[0] == 2
    assert run(capsys, "index", "analytic", files["ann"], "--tau", "-1")[0] == 2
    assert run(capsys, "ktheory", "mv", files["ext"])[0] == 2
    assert run(capsys, "index", "topological", files["osc"])[0] == 4
    with pytest.raises(SystemExit) as exc:
        main(["index", "nonsense"])
    assert exc.value.code == 2


def test_parse_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.bsym"
    bad.write_text("order = [1, 1]\n[[terms]\n")
    code, rec = run_json(capsys, "symbol", "check", bad)
    assert code == 2 and rec["error"]["kind"] == "parse"
    assert "line 2" in rec["error"]["message"]


def test_unreliable_exit(capsys, files):
    # any finite residual exceeds this cap
    code, rec = run_json(capsys, "index", "analytic", files["ann"], "-N", "1", "--residual-cap", "1e-300")
    assert code == 3


def test_demo_quick_schema(capsys):
    code, rec = run_json(capsys, "demo", "--quick")
    assert code == 0 and rec["passed"]
    jsonschema.validate(rec, DEMO_SCHEMA)


@pytest.mark.slow
def test_demo_full(capsys):
    code, rec = run_json(capsys, "demo")
    assert code == 0
    jsonschema.validate(rec, DEMO_SCHEMA)
    assert all(c["passed"] for c in rec["checks"])


def test_structured_output_deterministic(capsys, files):
    assert len({run(capsys, "ktheory", "paper", "--json")[1] for _ in range(3)}) == 1
    assert len({run(capsys, "index", "analytic", files["ann"], "--json")[1] for _ in range(3)}) == 1
