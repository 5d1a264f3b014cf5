import re

import pytest
from click.testing import CliRunner

from hoa_format import read_hoa_file
from realize import main


@pytest.fixture
def run(samples):
    runner = CliRunner(mix_stderr=False)

    def invoke(*args):
        argv = [str(samples / a) if a.endswith(".hoa") else a for a in args]
        return runner.invoke(main, argv)

    return invoke


def test_realizable(run):
    result = run("--aut", "a_real.hoa", "--check", "real", "-k", "1")
    assert result.exit_code == 10
    assert result.stdout == "REALIZABLE\n"


def test_unknown_when_schedule_is_exhausted(run):
    result = run("--aut", "a_loop.hoa", "--kmax", "4")
    assert result.exit_code == 0
    assert result.stdout == "UNKNOWN\n"


def test_unrealizable(run):
    result = run("--neg-aut", "forbidden_neg.hoa")
    assert result.exit_code == 20
    assert result.stdout == "UNREALIZABLE\n"


def test_missing_controllable_ap(run):
    result = run("--aut", "a_loop_no_header.hoa")
    assert result.exit_code == 2
    assert "--outs" in result.stderr
    result = run("--aut", "a_loop_no_header.hoa", "--outs", "o", "--kmax", "2")
    assert result.exit_code == 0
    assert result.stdout == "UNKNOWN\n"


def test_ltl_is_reserved(run):
    result = run("--ltl", "G F o")
    assert result.exit_code == 2
    assert result.stdout == ""


def test_check_needs_its_automaton(run):
    result = run("--aut", "copy.hoa", "--check", "unreal")
    assert result.exit_code == 2


def test_bad_option_values(run):
    assert run("--aut", "copy.hoa", "--picker", "random").exit_code == 2
    assert run("--aut", "copy.hoa", "--k-growth", "1").exit_code == 2
    assert run("--aut", "missing.hoa").exit_code == 2


@pytest.mark.parametrize("option", ["-k", "--k-growth", "--kmax", "--timeout", "--step-budget"])
def test_zero_option_values_are_rejected(run, option):
    result = run("--aut", "copy.hoa", option, "0")
    assert result.exit_code == 2
    assert result.stdout == ""


@pytest.mark.parametrize("old,new", [
    (b'"i"', b'"\xff"'),
    (b"AP: 2", b"AP: x"),
    (b"Start: 0", b"Start: zero"),
])
def test_malformed_input_exits_with_usage_code(run, samples, tmp_path, old, new):
    target = tmp_path / "broken.hoa"
    target.write_bytes((samples / "a_loop.hoa").read_bytes().replace(old, new))
    result = run("--aut", str(target))
    assert result.exit_code == 2
    assert result.stdout == ""


def test_backend_options(run):
    result = run("--aut", "copy.hoa", "--check", "real", "--downset", "bins", "--vector", "plain",
                 "--bool-states", "off", "--inputs", "pure", "--precompute", "off",
                 "--picker", "critical-randf", "--seed", "3")
    assert result.exit_code == 10
    assert result.stdout == "REALIZABLE\n"


def test_dump_actions(run):
    result = run("--aut", "copy.hoa", "--dump-actions")
    assert result.exit_code == 0
    assert result.stdout == ""
    assert "input 0" in result.stderr


def test_emit_shifted(run, tmp_path):
    target = tmp_path / "shifted.hoa"
    result = run("--neg-aut", "copy_neg.hoa", "--emit-shifted", str(target), "--kmax", "2")
    assert result.exit_code == 0
    shifted = read_hoa_file(str(target))
    assert shifted.num_states == 3
    assert [v.name for v in shifted.outputs] == ["i"]


def test_trace(run):
    result = run("--aut", "a_loop.hoa", "--check", "real", "--kmax", "1", "--picker", "rr", "--trace")
    assert result.exit_code == 0
    lines = [line for line in result.stderr.splitlines() if line.startswith("iter=")]
    assert lines
    assert all(re.fullmatch(r"iter=\d+ input=\S+ antichain=\d+ changed=[01]", line) for line in lines)


@pytest.mark.slow
@pytest.mark.parametrize("aut,neg,code", [
    ("copy.hoa", "copy_neg.hoa", 10),
    ("forbidden.hoa", "forbidden_neg.hoa", 20),
])
def test_both_checks_race(run, aut, neg, code):
    result = run("--aut", aut, "--neg-aut", neg, "--timeout", "60")
    assert result.exit_code == code
