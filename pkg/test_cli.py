"""
Tests for the command line front end
"""

import os

import pytest
from PIL import Image

from config.settings import FIXTURE_DIR
from ui.cli import main
from utils.file_utils import write_generators


def fixture_path(filename):
    return os.path.join(FIXTURE_DIR, filename)


def run(capsys, *argv):
    code = main(["--quiet", *argv])
    return code, capsys.readouterr().out.splitlines()


def test_bounds(capsys):
    code, lines = run(capsys, "bounds", "--n-from", "6", "--n-to", "7")
    assert code == 0
    assert lines == ["n=6 upper=93", "n=7 upper=381"]


def test_verify_valid(capsys):
    code, lines = run(capsys, "verify", "--design", fixture_path("p2_2_3_7.blocks"), "--t", "2", "--code")
    assert code == 0
    assert lines[0] == "valid=true size=329 covered=2303 violations=0"
    assert "code=[7,3,4,329]_2 min_distance=4 exhaustive=true" in lines
    assert "steiner=false" in lines


def test_verify_invalid(capsys, tmp_path):
    path = tmp_path / "bad.blocks"
    path.write_text("# q=2 n=4 k=3\n1,2,4\n1,2,8\n")
    code, lines = run(capsys, "verify", "--design", str(path), "--t", "2", "--method", "coverage")
    assert code == 2
    assert lines[0] == "valid=false size=2 covered=13 violations=1"
    assert lines[1] == "violation subspace=[1,2] blocks=0,1"


def test_verify_missing_file(capsys, tmp_path):
    code, lines = run(capsys, "verify", "--design", str(tmp_path / "absent.blocks"))
    assert code == 1
    assert lines == []


def test_km_plain(capsys, tmp_path):
    image = tmp_path / "a.png"
    code, lines = run(capsys, "km", "--n", "4", "--t", "1", "--k", "2", "--image", str(image))
    assert code == 0
    assert lines[0] == "# 15 35"
    assert len(lines) == 1 + 15 + 2
    with Image.open(image) as picture:
        assert picture.width > picture.height


def test_km_requires_n(capsys):
    code, _ = run(capsys, "km", "--t", "1", "--k", "2")
    assert code == 1


def test_km_reduced(capsys, tmp_path):
    out = tmp_path / "ag.mat"
    code, _ = run(capsys, "km", "--generators", fixture_path("example_g4.gens"), "--t", "1", "--k", "2",
                  "--out", str(out))
    assert code == 0
    assert out.read_text().splitlines()[0] == "# 5 9"


def test_solve(capsys, tmp_path):
    out = tmp_path / "spread.blocks"
    code, lines = run(capsys, "solve", "--n", "4", "--t", "1", "--k", "2", "--target-size", "5",
                      "--time-limit-s", "10", "--out", str(out))
    assert code == 0
    assert any(line.startswith("size=5 ") for line in lines)
    code, lines = run(capsys, "verify", "--design", str(out), "--t", "1")
    assert code == 0
    assert lines[0] == "valid=true size=5 covered=15 violations=0"


def test_orbits(capsys):
    code, lines = run(capsys, "orbits", "--generators", fixture_path("example_g4.gens"), "--k", "2")
    assert code == 0
    assert lines[0] == "orbits=9 dim=2"
    assert sum(int(line.split("size=")[1]) for line in lines[1:]) == 35


def test_group_order_mismatch(capsys):
    code, lines = run(capsys, "group-order", "--generators", fixture_path("gen_n11.gens"), "--fixture", "gen_n11")
    assert code == 0
    assert lines == ["order=10230", "table_order_mismatch fixture=gen_n11 computed=10230 table=22517"]


def test_expand(capsys, tmp_path):
    out = tmp_path / "n8.blocks"
    code, lines = run(capsys, "expand", "--generators", fixture_path("gen_n8.gens"), "--subgroup-order", "7",
                      "--reps", fixture_path("p2_2_3_8.reps"), "--t", "2", "--out", str(out))
    assert code == 0
    assert lines == ["blocks=1312"]
    code, lines = run(capsys, "verify", "--design", str(out), "--t", "2")
    assert code == 0


def test_fixtures_listing(capsys):
    code, lines = run(capsys, "fixtures")
    assert code == 0
    assert len(lines) == 16
    assert lines[0].startswith("p2_2_3_7 kind=blocks")


def test_reproduce_example(capsys):
    code, lines = run(capsys, "reproduce", "example")
    assert code == 0
    assert lines[0] == "scenario=example ok=true"
    assert "  beam_extension_size=5" in lines


def test_unknown_scenario(capsys):
    with pytest.raises(SystemExit) as info:
        main(["reproduce", "table3"])
    assert info.value.code == 1
    assert "invalid choice" in capsys.readouterr().err


def test_unknown_option_exits_invalid_input():
    with pytest.raises(SystemExit) as info:
        main(["verify", "--design", fixture_path("p2_2_3_7.blocks"), "--no-such-flag"])
    assert info.value.code == 1


def test_missing_subcommand():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


@pytest.mark.parametrize("position", ["before", "after"])
def test_threads_on_either_side(capsys, position):
    command = ["verify", "--design", fixture_path("p2_2_3_7.blocks"), "--t", "2"]
    argv = ["--threads", "2", *command] if position == "before" else [*command, "--threads", "2"]
    code, lines = run(capsys, *argv)
    assert code == 0
    assert lines[0] == "valid=true size=329 covered=2303 violations=0"


def test_threads_must_be_positive(capsys):
    code, _ = run(capsys, "bounds", "--threads", "0")
    assert code == 1


def test_zoom_with_subgroup_order(capsys, tmp_path):
    out = tmp_path / "spread.blocks"
    code, lines = run(capsys, "zoom", "--generators", fixture_path("example_g4.gens"), "--subgroup-order", "3",
                      "--t", "1", "--k", "2", "--max-rounds", "2", "--out", str(out))
    assert code == 0
    assert lines == [
        "level=0 group=example_g4 matrix=5x9 size=2",
        "level=1 group=example_g4[3] matrix=7x13 excluded=2 translated=2 size=5",
        "size=5",
    ]
    code, lines = run(capsys, "verify", "--design", str(out), "--t", "1")
    assert code == 0
    assert lines[0] == "valid=true size=5 covered=15 violations=0"


def test_zoom_with_subgroup_file(capsys, tmp_path, example_subgroup):
    path = tmp_path / "h.gens"
    write_generators(str(path), example_subgroup)
    code, lines = run(capsys, "zoom", "--generators", fixture_path("example_g4.gens"), "--subgroup", str(path),
                      "--t", "1", "--k", "2", "--max-rounds", "2", "--exchange-rounds", "2")
    assert code == 0
    assert lines[1].startswith("level=1 group=h matrix=7x13 ")
    assert lines[-1] == "size=5"


def test_group_order_of_subgroup(capsys):
    code, lines = run(capsys, "group-order", "--generators", fixture_path("gen_n8.gens"), "--subgroup-order", "7")
    assert code == 0
    assert lines == ["order=7"]


def test_unwritable_output(capsys, tmp_path):
    missing = tmp_path / "no_such_dir"
    code, _ = run(capsys, "km", "--n", "4", "--t", "1", "--k", "2", "--out", str(missing / "a.mat"))
    assert code == 1
    code, _ = run(capsys, "expand", "--generators", fixture_path("gen_n8.gens"), "--subgroup-order", "7",
                  "--reps", fixture_path("p2_2_3_8.reps"), "--t", "2", "--out", str(missing / "n8.blocks"))
    assert code == 1
    code, _ = run(capsys, "km", "--n", "4", "--t", "1", "--k", "2", "--image", str(missing / "a.png"))
    assert code == 1
