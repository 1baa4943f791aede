import json

import pytest

from ordlin.cli import main
from ordlin.verify import (ALL_CHECKS, Program, bundled_corpus_dir,
                           load_program, sweep_freelists, verify_program,
                           verify_properties)


def corpus_path(name):
    return str(bundled_corpus_dir() / name)


def test_load_program_reads_directives():
    p = load_program(corpus_path("counterexample_p.ord"))
    assert (p.dialect, p.mode) == ("core", "linear")
    p = load_program(corpus_path("three_alloc_drop.afn"))
    assert (p.dialect, p.mode) == ("affine", "nomove")


def test_sweep_includes_the_empty_freelist():
    assert sweep_freelists(2) == [(), (0,), (0, 1)]


def test_verify_program_record_fields(corpus):
    rec = verify_program(corpus["two_resources"], max_freelist=3)
    assert rec.ok
    assert rec.final_freelist_verdict == "Identical"
    assert rec.freelists == [[], [0], [0, 1], [0, 1, 2]]
    data = rec.to_json()
    for key in ("name", "mode", "dialect", "type", "freelists", "steps",
                "determinism_ok", "subject_reduction_ok", "progress_ok",
                "resource_list_preserved", "final_freelist_verdict"):
        assert key in data
    assert "trace" not in data  # only violations carry traces


def test_violation_carries_the_trace(corpus):
    # run the permuting linear program in a record that demands identity:
    # grading happens against the initial freelist, so the permuted result
    # is merely a Permutation, never silently Identical
    rec = verify_program(corpus["counterexample_p"], max_freelist=3)
    assert rec.final_freelist_verdict == "Permutation"
    assert rec.ok and rec.trace is None


def test_report_round_trips_to_json(tmp_path, corpus):
    report = verify_properties(bundled_corpus_dir(), seeds=1, max_freelist=2)
    assert report.all_ok
    path = tmp_path / "report.json"
    report.write(path)
    data = json.loads(path.read_text())
    assert data["all_ok"] is True
    assert len(data["programs"]) == len(report.records)


def test_cli_check_modes():
    assert main(["check", corpus_path("two_resources.ord")]) == 0
    assert main(["check", corpus_path("counterexample_p.ord")]) == 0
    assert main(["check", corpus_path("counterexample_p.ord"),
                 "--mode", "ordered"]) == 1


def test_cli_run_outputs(capsys):
    assert main(["run", corpus_path("two_resources.ord"),
                 "--freelist", "0,1"]) == 0
    assert "final: () freelist: [0, 1]" in capsys.readouterr().out
    assert main(["run", corpus_path("counterexample_p.ord"),
                 "--mode", "linear", "--freelist", "0,1"]) == 0
    assert "final: () freelist: [1, 0]" in capsys.readouterr().out


def test_cli_run_trace_and_verify(tmp_path):
    trace = tmp_path / "t.json"
    assert main(["run", corpus_path("two_resources.ord"),
                 "--freelist", "0,1", "--trace", str(trace),
                 "--verify", "typing,resources"]) == 0
    entries = json.loads(trace.read_text())
    assert entries and entries[-1]["freelist"] == [0, 1]


def test_cli_elaborate_round_trip(tmp_path):
    out = tmp_path / "three.ord"
    assert main(["elaborate", corpus_path("three_alloc_drop.afn"),
                 "-o", str(out)]) == 0
    assert main(["check", str(out)]) == 0
    assert main(["run", str(out), "--freelist", "0,1,2"]) == 0


def test_cli_verify_reports(tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["verify", "--seeds", "1", "--max-freelist", "2",
                 "--report", str(report)]) == 0
    assert "all ok" in capsys.readouterr().out
    assert json.loads(report.read_text())["all_ok"] is True


def test_cli_usage_errors():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    assert main(["check", "/nonexistent/file.ord"]) == 2
