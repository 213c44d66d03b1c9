"""Command-line surface: parsing, subcommand reports, exit-code contract."""

import json

import pytest

from wittram.cli import (
    JobSpec,
    build_parser,
    format_packed_poly,
    main,
    parse_datum,
    run,
)


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_tower_frozen_example(capsys):
    code, out, _ = _run(capsys, "tower", "--p", "2", "--n", "2", "--nu", "3,1")
    assert code == 0
    assert "conductor: 7" in out
    assert "different: 18" in out
    assert "breaks: [3, 9]" in out


def test_conductor_json_report(capsys):
    code, out, _ = _run(
        capsys, "conductor", "--p", "3", "--n", "2", "--nu", "5,7", "--json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["conductor_closed_form"] == 16
    assert doc["conductor_lattice_oracle"] == 16
    assert doc["match"] is True
    assert doc["different"] == 108


def test_json_output_is_stable(capsys):
    argv = ["wbar", "--p", "2", "--n", "3", "--json"]
    code1, out1, _ = _run(capsys, *argv)
    code2, out2, _ = _run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_parse_datum_shorthand():
    d = parse_datum({"p": 2, "n": 2, "nu": [3, 1]})
    assert d.nu == (3, 1)
    assert [e.valuation() for e in d.entries] == [-3, -1]
    # single-monomial expansion with unit coefficient
    assert all(len(e.terms()) == 1 for e in d.entries)


def test_parse_datum_literal():
    d = parse_datum({"p": 2, "n": 1, "u": [[[-3, 1], [-1, 1]]]})
    assert d.nu == (3,)
    assert len(d.entries[0].terms()) == 2


def test_parse_datum_rejects_divisible_order():
    with pytest.raises(ValueError, match="divisible"):
        parse_datum({"p": 2, "n": 1, "nu": [4]})


def test_cli_rejects_divisible_order(capsys):
    code, _out, err = _run(capsys, "conductor", "--p", "2", "--n", "1", "--nu", "4")
    assert code == 2
    assert "error [value-error]" in err
    assert "divisible" in err


def test_missing_inputs_is_usage_error(capsys):
    code, _out, err = _run(capsys, "tower", "--p", "2", "--n", "2")
    assert code == 2
    assert "provide --p, --n and --nu" in err


def test_datum_file_round_trip(tmp_path, capsys):
    doc = {"p": 2, "n": 2, "nu": [3, 1]}
    path = tmp_path / "datum.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, "tower", "--datum", str(path), "--json")
    assert code == 0
    report = json.loads(out)
    assert report["conductor"] == 7
    assert report["breaks"] == [3, 9]


def test_witt_table_dump(capsys):
    code, out, _ = _run(capsys, "witt", "table", "--p", "2", "--n", "2")
    assert code == 0
    assert "S_0: X0 + Y0" in out
    assert "c_1: -X0*Y0" in out
    assert "I_1: -Y0^2 - Y1" in out


def test_witt_eval_ghost_checked(capsys):
    code, out, _ = _run(
        capsys,
        "witt", "add", "--p", "2", "--n", "3",
        "--x", "1,0,1", "--y", "1,1,0", "--mod-digits", "4", "--json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["ghost_check"] is True
    assert doc["mod"] == 16
    code2, out2, _ = _run(
        capsys, "witt", "neg", "--p", "3", "--n", "2", "--x", "1,1", "--json"
    )
    assert code2 == 0
    assert json.loads(out2)["ghost_check"] is True


def test_witt_eval_requires_second_vector(capsys):
    code, _out, err = _run(capsys, "witt", "add", "--p", "2", "--n", "2", "--x", "1,0")
    assert code == 2
    assert "--y is required" in err


def test_wbar_report(capsys):
    code, out, _ = _run(capsys, "wbar", "--p", "2", "--n", "2", "--psi")
    assert code == 0
    assert "pushforward_recursion: 10 = 1 + 9" in out
    assert "ledger_boundary_class: x_2" in out
    assert "pullback_multiplies_by_codim_power: True" in out
    assert "Y_1^2" in out


def test_local_symbol_pairing(capsys):
    code, out, _ = _run(
        capsys,
        "local-symbol", "--p", "2", "--n", "1", "--nu", "1",
        "--alpha", "[[0,1],[1,1]]", "--json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["symbol"] == [[1]]
    assert doc["symbol_zero"] is False


def test_local_symbol_probe(capsys):
    code, out, _ = _run(
        capsys,
        "local-symbol", "--p", "2", "--n", "1", "--nu", "3",
        "--probe", "--trials", "5", "--json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["modulus_bound"] == 3
    assert doc["probe_trials"] == 5
    assert doc["witness_found"] is True


def test_grid_summary(capsys):
    code, out, _ = _run(capsys, "grid", "--p", "2", "--n", "1,2", "--nu-max", "5")
    assert code == 0
    # 3 odd orders once, then squared for n = 2
    assert "all 12 cases: formula = brute force" in out
    header = out.splitlines()[0].split()
    assert header[:3] == ["p", "n", "nu"]


def test_job_spec_dispatch(capsys):
    parser = build_parser()
    args = parser.parse_args(["conductor", "--p", "2", "--n", "2", "--nu", "3,1"])
    job = JobSpec(args.command, args, fmt="human", seed=0)
    report, ok = run(job)
    assert ok
    assert report["conductor_closed_form"] == 7


def test_format_packed_poly_constant_and_signs():
    from wittram import intpoly as ip

    poly = {ip.mono(0, 0): 3, ip.mono(2, 1): -1}
    text = format_packed_poly(poly, 2)
    assert text == "X0^2*Y0 - 3" or text == "-X0^2*Y0 + 3"
    assert format_packed_poly({}, 2) == "0"
