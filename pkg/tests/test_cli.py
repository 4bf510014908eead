import json

import pytest

from tclab import cli


def run_capture(capsys, argv):
    code = cli.run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_field_table_golden(capsys):
    code, out, _ = run_capture(capsys, ["field", "--field", "sqrt5.field"])
    assert code == 0
    assert out == (
        "# field\n"
        "degree: 2\n"
        "discriminant: 5\n"
        'label: "sqrt5"\n'
        "minkowski_bound: 2\n"
        'poly: ["-1", "-1", "1"]\n'
        'signature: ["2", "0"]\n'
    )


def test_json_report_schema(capsys):
    code, out, _ = run_capture(capsys, ["--json", "rayclass", "--field",
                                        "sqrt5.field", "--p", "3",
                                        "--modulus", "5 107 197"])
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "tclab-report/1"
    assert rep["command"] == "rayclass"
    assert rep["inputs"]["p"] == 3
    assert rep["results"]["p_part"] == "Z/27"
    assert rep["results"]["modulus"] == ["5_1", "107_1", "197_1"]
    assert "wall_time_s" in rep


def test_table_is_derived_from_json(capsys):
    code, json_out, _ = run_capture(
        capsys, ["--json", "classgroup", "--field", "sqrt5.field"])
    rep = json.loads(json_out)
    table = cli.emit_table(rep)
    code2, table_out, _ = run_capture(capsys, ["classgroup", "--field", "sqrt5.field"])
    # the table renderer sees only the report, so rerunning must agree
    # except for the wall time, which the table does not print
    assert table_out == table


def test_prime_set_selectors():
    from tclab.fieldfile import parse_field_file
    from importlib import resources
    K = parse_field_file(resources.files("tclab.data") / "sqrt5.field")
    assert [P.label for P in cli.parse_prime_set(K, "11")] == ["11_1"]
    assert [P.label for P in cli.parse_prime_set(K, "11:2")] == ["11_2"]
    assert [P.label for P in cli.parse_prime_set(K, "11:all")] == ["11_1", "11_2"]
    assert [P.label for P in cli.parse_prime_set(K, "5,11:all")] == ["5_1", "11_1", "11_2"]


def test_prime_set_errors():
    from tclab.fieldfile import parse_field_file
    from importlib import resources
    from tclab.numberfield import FieldError
    K = parse_field_file(resources.files("tclab.data") / "sqrt5.field")
    with pytest.raises(FieldError):
        cli.parse_prime_set(K, "6")
    with pytest.raises(FieldError):
        cli.parse_prime_set(K, "11:3")
    with pytest.raises(FieldError):
        cli.parse_prime_set(K, "11:x")


def test_usage_exit_code(capsys):
    code, _, err = run_capture(capsys, ["not-a-command"])
    assert code == 64


def test_precondition_exit_code(capsys):
    code, _, err = run_capture(capsys, ["rayclass", "--field", "sqrt5.field",
                                        "--p", "3", "--modulus", "3"])
    assert code == 2
    rep = json.loads(err.strip())
    assert rep["error"]["kind"] == "precondition"
    assert "wild" in rep["error"]["reason"]


def test_bad_field_file_is_precondition(capsys, tmp_path):
    f = tmp_path / "bad.field"
    f.write_text("poly -1 0 2\n")
    code, _, err = run_capture(capsys, ["field", "--field", str(f)])
    assert code == 2
    rep = json.loads(err.strip())
    assert "monic" in rep["error"]["reason"]


def test_seed_echoed(capsys, monkeypatch):
    monkeypatch.setenv("TCLAB_SEED", "42")
    code, out, _ = run_capture(capsys, ["--json", "field", "--field", "q.field"])
    assert json.loads(out)["seed"] == 42


def test_reproduce_example1(capsys):
    code, out, _ = run_capture(capsys, ["reproduce", "example1"])
    assert code == 0
    assert "match: true" in out
    assert 'rcg_3_parts: ["0", "Z/3", "Z/27"]' in out


def test_reproduce_json_roundtrip(capsys):
    code, out, _ = run_capture(capsys, ["--json", "reproduce", "example1"])
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["match"]
    assert rep["results"]["rcg_3_parts"] == ["0", "Z/3", "Z/27"]
    # rendering the same report twice is byte-identical
    assert cli.emit_table(rep) == cli.emit_table(json.loads(out))


def test_sandwich_twisted_config(capsys):
    code, out, _ = run_capture(capsys, ["--json", "sandwich", "--config",
                                        "example1.ini", "--twisted"])
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["lower"] == 1
    assert rep["results"]["upper"] == 1
    assert rep["results"]["certified"]
