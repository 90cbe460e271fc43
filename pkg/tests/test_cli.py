import json

import pytest

from qdensity.cli import load_config, main, parse_args, run


def run_cli(argv):
    return run(parse_args(argv))


# ----- argument parsing ------------------------------------------------------------


def test_orthogonality_distance_list_parses():
    args = parse_args(["orthogonality", "--d", "1.5,2,4"])
    assert args.command == "orthogonality"
    assert args.d == (1.5, 2.0, 4.0)


def test_dimensions_defaults():
    args = parse_args(["dimensions"])
    assert args.command == "dimensions"
    assert args.format == "json"


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as err:
        parse_args(["bogus"])
    assert err.value.code != 0


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as err:
        parse_args(["dimensions", "--frobnicate"])
    assert err.value.code != 0


def test_bad_distance_list_is_usage_error():
    with pytest.raises(SystemExit) as err:
        parse_args(["orthogonality", "--d", "1.5,two"])
    assert err.value.code != 0


def test_main_propagates_exit_status():
    with pytest.raises(SystemExit) as err:
        main(["dimensions"])
    assert err.value.code == 0


# ----- configuration files -----------------------------------------------------------


def test_config_file_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\n\ne = 0\nd = 2,4\nresolution = 8\n")
    values = load_config(str(path))
    assert values == {"e": "0", "d": "2,4", "resolution": "8"}


def test_config_file_rejects_garbage(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("just some words\n")
    with pytest.raises(ValueError):
        load_config(str(path))


# ----- subcommand outcomes ------------------------------------------------------------


def test_dimensions_passes(capsys):
    assert run_cli(["dimensions"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] spinor_field_dimension" in out
    assert "-3/2" in out


def test_symmetry_passes(capsys):
    assert run_cli(["symmetry"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] kg_density_antisymmetric" in out


def test_derive_reports_the_legendre_discrepancy(capsys):
    # the quoted scalar energy density is not the canonical Legendre
    # transform when e*V != 0, so this suite honestly reports one failure
    assert run_cli(["derive"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL] scalar_hamiltonian_matches_quoted_form" in out
    assert "failing checks: scalar_hamiltonian_matches_quoted_form" in out
    assert "[PASS] scalar_hamiltonian_offset_is_potential_energy" in out


def test_continuity_passes(capsys):
    assert run_cli(["continuity"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] kg_superposition_order" in out


def test_dirac_consistency_passes(capsys):
    assert run_cli(["dirac-consistency"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] constant_potential_shift" in out


def test_orthogonality_with_uncoupled_config_passes(tmp_path, capsys):
    cfg = tmp_path / "uncoupled.cfg"
    cfg.write_text("e = 0\nresolution = 8\n")
    code = run_cli(
        ["orthogonality", "--config", str(cfg), "--d", "2,4"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "[PASS] u_vanishes_d=2" in out


def test_orthogonality_json_report(tmp_path):
    out_path = tmp_path / "report.json"
    code = run_cli(
        [
            "orthogonality",
            "--d",
            "2",
            "--resolution",
            "8",
            "--out",
            str(out_path),
        ]
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["command"] == "orthogonality"
    assert payload["passed"] is True
    experiment = payload["suites"][0]["experiment"]
    assert experiment["sweep"][0]["d"] == 2.0
    assert experiment["sweep"][0]["u_re"] < 0.0


def test_json_report_is_byte_identical_across_runs(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        code = run_cli(
            [
                "orthogonality",
                "--d",
                "2",
                "--resolution",
                "8",
                "--out",
                str(path),
            ]
        )
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_json_floats_carry_17_significant_digits(tmp_path):
    out_path = tmp_path / "report.json"
    run_cli(
        ["orthogonality", "--d", "2", "--resolution", "8", "--out", str(out_path)]
    )
    text = out_path.read_text()
    payload = json.loads(text)
    omega0 = payload["suites"][0]["experiment"]["omega0"]
    # the literal in the file is the 17-significant-digit rendering
    assert f'"omega0": {format(omega0, ".17g")}' in text
    assert len(format(omega0, ".17g").replace(".", "")) >= 16


def test_orthogonality_csv_report(tmp_path):
    out_path = tmp_path / "sweep.csv"
    code = run_cli(
        [
            "orthogonality",
            "--d",
            "2,4",
            "--resolution",
            "8",
            "--format",
            "csv",
            "--out",
            str(out_path),
        ]
    )
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "d,re_u,im_u,error"
    assert len(lines) == 3


def test_generic_csv_report(tmp_path):
    out_path = tmp_path / "checks.csv"
    assert run_cli(["symmetry", "--format", "csv", "--out", str(out_path)]) == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "suite,check,passed,detail"
    assert len(lines) == 5


def test_unwritable_report_path_is_io_error(tmp_path):
    code = run_cli(
        ["symmetry", "--out", str(tmp_path / "missing_dir" / "r.json")]
    )
    assert code == 2


def test_all_runs_every_suite_and_reports_the_red_claim(tmp_path, capsys):
    out_path = tmp_path / "all.json"
    code = run_cli(
        ["all", "--d", "2", "--resolution", "8", "--out", str(out_path)]
    )
    assert code == 1
    out = capsys.readouterr().out
    for suite in ("dimensions", "derive", "symmetry", "continuity",
                  "dirac-consistency", "orthogonality"):
        assert f"== {suite}" in out
    assert "failing checks: scalar_hamiltonian_matches_quoted_form" in out
    payload = json.loads(out_path.read_text())
    assert payload["passed"] is False
    assert len(payload["suites"]) == 6
