"""
Test the command-line entry point end to end on the sample corpus.
"""

import json

import pytest

from src.main import EXIT_INDETERMINATE, EXIT_INPUT, EXIT_INVALID, EXIT_OK, main
from src.utils import corpus
from src.utils.serialization import plmap_to_json


@pytest.fixture
def samples(tmp_path, capsys):
    directory = tmp_path / "samples"
    assert main(["samples", "--dir", str(directory)]) == EXIT_OK
    written = json.loads(capsys.readouterr().out)
    assert "p2/candidate.json" in written["written"]
    return directory


def write(path, document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def test_moduli_check_accepts_p2_lines(samples, capsys):
    p2 = samples / "p2"
    code = main(["moduli", "check", "--fan", str(p2 / "fan.json"), "--psi", str(p2 / "psi.json"),
                 "--cand", str(p2 / "candidate.json")])
    verdict = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert verdict["status"] == "ACCEPTED"
    assert len(verdict["witnesses"]) == 3


def test_moduli_check_indeterminate_exit_code(samples, tmp_path, capsys):
    cube = samples / "cube"
    cand = json.loads((cube / "candidate.json").read_text(encoding="utf-8"))
    cand["flags"][0] = [[[1, 0]], [[1, 0], [0, 1]]]
    flipped = write(tmp_path / "flipped.json", cand)
    code = main(["--no-witnesses", "moduli", "check", "--fan", str(cube / "fan.json"),
                 "--psi", str(cube / "psi.json"), "--cand", flipped])
    verdict = json.loads(capsys.readouterr().out)
    assert code == EXIT_INDETERMINATE
    assert verdict["status"] == "INDETERMINATE"
    assert "basis" not in verdict["witnesses"][0]


def test_moduli_reconstruct(samples, capsys):
    p2 = samples / "p2"
    code = main(["moduli", "reconstruct", "--fan", str(p2 / "fan.json"), "--psi", str(p2 / "psi.json"),
                 "--cand", str(p2 / "candidate.json")])
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out) == json.loads(json.dumps(plmap_to_json(corpus.p2_lines_plmap())))


def test_moduli_reconstruct_refuses_ray_level_acceptance(samples, tmp_path, capsys):
    p2 = samples / "p2"
    cand = json.loads((p2 / "candidate.json").read_text(encoding="utf-8"))
    cand["flags"] = [[[[1, 0]], [[1, 0], [0, 1]]]] * 3
    same_lines = write(tmp_path / "same_lines.json", cand)
    args = ["--fan", str(p2 / "fan.json"), "--psi", str(p2 / "psi.json"), "--cand", same_lines]
    assert main(["moduli", "check"] + args) == EXIT_OK
    capsys.readouterr()
    assert main(["moduli", "reconstruct"] + args) == EXIT_INVALID
    assert "[REJECTED]" in capsys.readouterr().err


def test_census_is_independent_of_parallelism(samples, capsys):
    p2 = samples / "p2"
    args = ["moduli", "census", "--fan", str(p2 / "fan.json"), "--psi", str(p2 / "psi.json")]
    assert main(["--parallel", "1"] + args) == EXIT_OK
    serial = capsys.readouterr().out
    assert main(["--parallel", "4"] + args) == EXIT_OK
    threaded = capsys.readouterr().out
    assert serial == threaded
    assert json.loads(serial)["count"] == 8


def test_census_limit_is_an_input_error(samples, capsys):
    p2 = samples / "p2"
    code = main(["--census-limit", "4", "moduli", "census", "--fan", str(p2 / "fan.json"),
                 "--psi", str(p2 / "psi.json")])
    assert code == EXIT_INPUT
    assert "[ERROR]" in capsys.readouterr().err


def test_fan_validate(samples, tmp_path, capsys):
    assert main(["fan", "validate", str(samples / "p2" / "fan.json")]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report == {"valid": True, "lattice_rank": 2, "maximal_cones": 3, "cones": 7,
                      "simplicial": True, "complete": True}

    overlapping = write(tmp_path / "bad.json", {
        "lattice_rank": 2, "rays": [[1, 0], [0, 1], [1, 1]], "maximal_cones": [[0, 1], [1, 2]],
    })
    assert main(["fan", "validate", overlapping]) == EXIT_INVALID
    assert "NotAFan" in capsys.readouterr().err


def test_fan_complete(tmp_path, capsys):
    quadrant = write(tmp_path / "quadrant.json", {"lattice_rank": 2, "rays": [[1, 0], [0, 1]], "maximal_cones": [[0, 1]]})
    assert main(["fan", "complete", quadrant]) == EXIT_INVALID
    assert json.loads(capsys.readouterr().out) == {"complete": False}


def test_float_input_is_rejected(tmp_path, capsys):
    fan = write(tmp_path / "fan.json", {"lattice_rank": 1, "rays": [[1.0], [-1]], "maximal_cones": [[0], [1]]})
    assert main(["fan", "validate", fan]) == EXIT_INPUT
    assert "$.rays[0][0]" in capsys.readouterr().err


def test_plmap_validate_reports_integrality(tmp_path, capsys):
    fan = write(tmp_path / "fan.json", {"lattice_rank": 2, "rays": [[1, 0], [1, 2]], "maximal_cones": [[0, 1]]})
    phi = write(tmp_path / "plmap.json", {
        "rank": 2,
        "charts": [{"cone": [0, 1], "frame": [[1, 0], [0, 1]], "ray_weights": [[1, 0], [0, 1]]}],
    })
    assert main(["plmap", "validate", "--fan", fan, "--plmap", phi]) == EXIT_INVALID
    report = json.loads(capsys.readouterr().out)
    assert [v["kind"] for v in report["violations"]] == ["IntegralityViolation"]


def test_plmap_validate_reports_non_linear_ray_data(samples, tmp_path, capsys):
    phi = write(tmp_path / "plmap.json", {
        "rank": 1,
        "charts": [{"cone": [0, 1, 2, 3], "frame": [[1]], "ray_weights": [[1], [0], [0], [0]]}],
    })
    code = main(["plmap", "validate", "--fan", str(samples / "cube" / "fan.json"), "--plmap", phi])
    assert code == EXIT_INVALID
    assert json.loads(capsys.readouterr().out)["violations"][0]["kind"] == "LinearityViolation"


def test_psi_rays_on_non_split_class(samples, capsys):
    non_split = samples / "non_split"
    code = main(["psi", "rays", "--fan", str(non_split / "fan.json"), "--psi", str(non_split / "psi.json")])
    assert code == EXIT_INPUT
    assert "NonIntegralOrbit at ray 0" in capsys.readouterr().err


def test_psi_rays(samples, capsys):
    p1 = samples / "p1"
    assert main(["psi", "rays", "--fan", str(p1 / "fan.json"), "--psi", str(p1 / "psi.json")]) == EXIT_OK
    rays = json.loads(capsys.readouterr().out)["rays"]
    assert [r["dominant"] for r in rays] == [[2, 1], [0, 0]]
    assert [r["type"] for r in rays] == [[1, 1], [2]]


def test_chern(samples, capsys):
    p1 = samples / "p1"
    args = ["chern", "--fan", str(p1 / "fan.json"), "--plmap", str(p1 / "plmap.json")]
    assert main(args + ["--generator", "p2"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["generator"] == "p2"
    assert document["pieces"][0] == {"cone": [0], "poly": [[5, [2]]]}
    assert main(args + ["--generator", "q1"]) == EXIT_INPUT


def test_klyachko_export_and_import(tmp_path, capsys):
    flags = write(tmp_path / "flags.json", {
        "rank": 2,
        "flags": [{"steps": [[[1, 0]], [[1, 0], [0, 1]]], "weights": [2, 0]}],
    })
    assert main(["klyachko", "export", "--input", flags]) == EXIT_OK
    exported = write(tmp_path / "klyachko.json", json.loads(capsys.readouterr().out))
    assert main(["klyachko", "import", "--input", exported]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == json.loads((tmp_path / "flags.json").read_text(encoding="utf-8"))


def test_onepar_equiv(tmp_path, capsys):
    first = write(tmp_path / "a.json", {"frame": [[1, 0], [0, 1]], "weights": [2, 1]})
    upper = write(tmp_path / "b.json", {"frame": [[1, 1], [0, 1]], "weights": [2, 1]})
    lower = write(tmp_path / "c.json", {"frame": [[1, 0], [1, 1]], "weights": [2, 1]})
    assert main(["onepar", "equiv", "--first", first, "--second", upper]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["equivalent"] is True
    assert main(["onepar", "equiv", "--first", first, "--second", lower]) == EXIT_INVALID


def test_output_file(samples, tmp_path, capsys):
    target = tmp_path / "verdict.json"
    p2 = samples / "p2"
    code = main(["--output", str(target), "moduli", "check", "--fan", str(p2 / "fan.json"),
                 "--psi", str(p2 / "psi.json"), "--cand", str(p2 / "candidate.json")])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["status"] == "ACCEPTED"


def test_schema(capsys):
    assert main(["--schema", "verdict"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["title"] == "verdict"
    assert main(["--schema", "nothing"]) == EXIT_INPUT


def test_input_errors(tmp_path, capsys):
    assert main(["fan", "validate", str(tmp_path / "missing.json")]) == EXIT_INPUT
    assert main(["moduli", "check", "--fan"]) == EXIT_INPUT
    assert main([]) == EXIT_INPUT
    assert main(["--parallel", "0", "fan", "complete", str(tmp_path / "missing.json")]) == EXIT_INPUT
