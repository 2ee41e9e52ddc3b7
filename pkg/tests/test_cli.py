import json

import pytest
from click.testing import CliRunner

from arcmatch.cli import main

from conftest import NESTED_P, NESTED_Q


@pytest.fixture
def files(tmp_path):
    def write(name, *records):
        path = tmp_path / name
        path.write_text("".join(f">{rid}\n{seq}\n{st}\n" for rid, seq, st in records), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def runner():
    return CliRunner()


def test_check_nested_pair(runner, files):
    p = files("p.db", ("nestP", *NESTED_P))
    q = files("q.db", ("nestQ", *NESTED_Q))
    res = runner.invoke(main, ["check", p, q, "--stats"])
    assert res.exit_code == 0
    lines = dict(line.split(": ", 1) for line in res.output.splitlines())
    assert lines["gamma_root"] == "9" and lines["is_subsequence"] == "true"
    assert lines["stats.initialize"] == "8" and lines["stats.spaces_total"] == "11"


def test_check_negative_json(runner, files):
    p = files("p.db", ("au", "AU", ".."))
    q = files("q.db", ("auarc", "AU", "()"))
    res = runner.invoke(main, ["check", p, q, "--json", "--stats"])
    assert res.exit_code == 1
    rec = json.loads(res.output)
    assert rec["is_subsequence"] is False and rec["stats"]["meld"] >= 1


def test_check_malformed(runner, files):
    p = files("p.db", ("broken", "AU", "(."))
    q = files("q.db", ("q", "AU", "()"))
    res = runner.invoke(main, ["check", p, q])
    assert res.exit_code == 2
    assert "broken" in res.output


def test_check_missing_file(runner, tmp_path, files):
    q = files("q.db", ("q", "AU", "()"))
    res = runner.invoke(main, ["check", str(tmp_path / "nope.db"), q])
    assert res.exit_code == 2


def test_mode_from_environment(runner, files):
    p = files("p.db", ("nestP", *NESTED_P))
    q = files("q.db", ("nestQ", *NESTED_Q))
    res = runner.invoke(main, ["check", p, q, "--json", "--stats"], env={"ARCMATCH_MODE": "compress-decompress"})
    rec = json.loads(res.output)
    assert rec["mode"] == "compress-decompress" and rec["stats"]["encode"] == rec["stats"]["decode"]


def test_prefix(runner, files):
    cases = [
        (("p", *NESTED_P), ("q", *NESTED_Q), "9"),
        (("p", "GAU", "(.)"), ("q", "GA", ".."), "0"),
        (("p", "AAU", ".()"), ("q", "A", "."), "1"),
    ]
    for pr, qr, want in cases:
        res = runner.invoke(main, ["prefix", files("p.db", pr), files("q.db", qr)])
        assert res.exit_code == 0 and res.output.strip() == want


def test_fuzz_agrees(runner):
    res = runner.invoke(main, ["fuzz", "--count", "1000", "--max-m", "8", "--max-n", "10", "--seed", "42"])
    assert res.exit_code == 0
    assert "1000/1000 agree" in res.output


def test_fuzz_vacuous(runner):
    res = runner.invoke(main, ["fuzz", "--count", "0"])
    assert res.exit_code == 0 and "0/0 agree" in res.output


def test_fuzz_reproducible(runner):
    args = ["fuzz", "--count", "200", "--seed", "3"]
    assert runner.invoke(main, args).output == runner.invoke(main, args).output


def test_fuzz_catches_mutation(runner):
    res = runner.invoke(main, ["fuzz", "--count", "1000", "--seed", "42"], env={"ARCMATCH_MUTATE_PHI": "1"})
    assert res.exit_code == 1
    assert "divergence:" in res.output


def test_bench_reports(runner):
    res = runner.invoke(main, ["bench", "--m", "10", "--n", "500", "--n", "1000", "--repeats", "2", "--json"])
    assert res.exit_code == 0
    rows = [json.loads(line) for line in res.output.splitlines()]
    assert [r["n"] for r in rows] == [500, 1000]
    for r in rows:
        assert r["per_sequence_bits_bound"] == 2 * (r["m"] + 2) + 1
        assert r["initialize"] == 2 * r["tree_arcs"]
    table = runner.invoke(main, ["bench", "--m", "10", "--n", "500", "--n", "1000", "--repeats", "1"])
    assert "ratio" in table.output


def test_bench_same_seed_same_counts(runner):
    args = ["bench", "--m", "8", "--n", "300", "--repeats", "1", "--json", "--mode", "compress-random-access"]
    a = json.loads(runner.invoke(main, args).output)
    b = json.loads(runner.invoke(main, args).output)
    for rec in (a, b):
        rec.pop("wall_time_median"), rec.pop("wall_times")
    assert a == b


def test_tree_and_encode(runner, files):
    q = files("q.db", ("nestQ", *NESTED_Q))
    res = runner.invoke(main, ["tree", q])
    assert res.exit_code == 0 and "(9,10) size=1 lightdepth=1" in res.output
    res = runner.invoke(main, ["encode", "--descending", "3,1,1"])
    assert "V=0110" in res.output and "U=1011" in res.output
    assert runner.invoke(main, ["encode", "2,1"]).exit_code == 2
