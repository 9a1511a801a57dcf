import json

import pytest

from ttwalk.cli import main
from ttwalk.nielsen import NielsenSequence, is_admissible
from ttwalk.rose_map import format_rose_map, from_sequence, power

from conftest import cyclic_samples


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_is_deterministic_and_admissible(capsys):
    code, out, err = run(capsys, "sample", "--rank", "3", "--n", "100", "--trials", "10", "--seed", "7")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 10
    for line in lines:
        rec = json.loads(line)
        assert is_admissible(NielsenSequence.parse(rec["sequence"], 3))
    assert json.loads(err.splitlines()[-1])["command"] == "sample"
    _, again, _ = run(capsys, "sample", "--rank", "3", "--n", "100", "--trials", "10", "--seed", "7")
    assert again == out


def test_emit_maps(capsys, tmp_path):
    path = tmp_path / "maps.txt"
    code, _, _ = run(capsys, "sample", "--n", "10", "--trials", "2", "--emit-maps", str(path))
    assert code == 0
    assert path.read_text().count("rank 3") == 2


@pytest.mark.parametrize("rank,limit", [(3, "1/4"), (5, "7/40")])
def test_estimate_en(capsys, rank, limit):
    code, out, _ = run(capsys, "estimate-en", "--rank", str(rank), "--n", "30", "--trials", "500")
    assert code == 0
    assert json.loads(out)["theoretical_limit"] == limit


def test_property_g(capsys, tmp_path):
    manifest = tmp_path / "m.json"
    code, out, err = run(capsys, "property-g", "--n", "50", "100", "--trials", "20", "--manifest", str(manifest))
    assert code == 0
    summaries = [json.loads(l) for l in out.splitlines() if '"summary"' in l]
    assert [s["n"] for s in summaries] == [50, 100]
    assert "Pr(B|E)" in err
    assert json.loads(manifest.read_text())["caps"]["inp_cap"] == 64


def test_lyapunov_parallel_matches_serial(capsys):
    _, serial, _ = run(capsys, "lyapunov", "--n", "200", "--trials", "6")
    _, parallel, _ = run(capsys, "lyapunov", "--n", "200", "--trials", "6", "--jobs", "2")
    assert serial == parallel
    assert json.loads(serial)["ell1_hat"] > 0


def test_decompose(capsys, tmp_path, fib):
    seq = cyclic_samples(3, 15, 1, seed=3, min_len=3)[0]
    path = tmp_path / "f.txt"
    path.write_text(format_rose_map(from_sequence(seq)))
    code, out, _ = run(capsys, "decompose", str(path))
    rec = json.loads(out)
    assert code == 0 and rec["recomposition_ok"]
    assert rec["nielsen_part"] == str(seq)
    path.write_text(format_rose_map(fib))
    code, out, _ = run(capsys, "decompose", str(path))
    rec = json.loads(out)
    assert rec["power"] == 2 and rec["power_sequence_cyclically_admissible"]
    assert from_sequence(NielsenSequence.parse(rec["power_sequence"], 2)) == power(fib, 2)


def test_seed_search(capsys):
    code, out, _ = run(capsys, "seed-search", "--rank", "3")
    assert code == 0
    assert out.startswith("#") and "rank 3:" in out


def test_exit_codes(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--rank", "2"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--n", "0"])
    assert exc.value.code == 2
    path = tmp_path / "bad.txt"
    path.write_text("rank 2\na1 -> a1a2\na2 -> a1a2\n")
    code, _, err = run(capsys, "decompose", str(path))
    assert code == 3 and "precondition" in err
