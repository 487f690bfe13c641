import json
import os
import subprocess
import sys

import pytest

from shannon2d.cli import main
from shannon2d.pairing import SPIRAL, PairingSpec, save_table


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_eval_examples(capsys):
    assert run(capsys, "eval", "psi-hat", "--s", "3/8", "--y", "1/2")[:2] == (0, "1+0i\n")
    code, out, _ = run(capsys, "eval", "psi-space", "--x1", "0", "--y", "1/2", "--L", "0")
    assert code == 0 and out.startswith("0.5+0i tail_bound=")
    assert run(capsys, "eval", "shannon-hat", "--xi", "3/4")[:2] == (0, "1\n")


def test_eval_rejects_inexact(capsys):
    code, _, err = run(capsys, "eval", "shannon-hat", "--xi", "0.1")
    assert code == 2 and "dyadic" in err


def test_eval_grid_csv(tmp_path, capsys):
    out = tmp_path / "hat.csv"
    code, _, _ = run(capsys, "eval", "psi-hat", "--s-grid", "0", "1/2", "8", "--y", "1/2", "--out", str(out))
    lines = out.read_text().splitlines()
    assert code == 0 and lines[0] == "s,y,re,im" and len(lines) == 10
    assert run(capsys, "eval", "psi-hat", "--s-grid", "0", "1", "3", "--y", "0")[0] == 2


def test_verify_orthonormality(capsys):
    code, out, _ = run(capsys, "verify", "orthonormality", "--range", "3", "--M", "24")
    assert code == 0 and all(r["pass"] for r in records(out))


def test_verify_discrete(capsys):
    code, out, _ = run(capsys, "verify", "discrete-isometry", "--xi", "3/8", "--preset", "e00")
    (r,) = records(out)
    assert code == 0 and r["pass"] and r["lhs"] == [1.0, 0.0] and r["rhs"] == [1.0, 0.0]


def test_verify_calderon_coarse_fails(capsys):
    code, out, _ = run(capsys, "verify", "calderon", "--preset", "band-e00", "--grid", "coarse")
    assert code == 1 and not records(out)[0]["pass"]


@pytest.mark.parametrize("suite,extra", [
    ("parseval", ["--preset", "band-e00"]),
    ("continuous-isometry", ["--pairs", "5"]),
    ("admissibility", []),
    ("sampling", ["--T", "16"]),
])
def test_verify_suites_pass(capsys, suite, extra):
    code, out, _ = run(capsys, "verify", suite, *extra)
    assert code == 0 and records(out) and all(r["pass"] for r in records(out))


def test_tiling_locate(capsys):
    assert run(capsys, "tiling", "locate", "--point", "1/2", "1/2", "3/8", "1/2")[:2] == (0, "(0,0)\n")
    assert run(capsys, "tiling", "locate", "--point", "1/2", "1/2", "0", "1/2")[0] == 2


def test_tiling_covering_and_zero_window(capsys):
    code, out, _ = run(capsys, "tiling", "covering", "--window", "unit", "--samples", "2000", "--seed", "7")
    assert code == 0 and records(out)[0]["pass"]
    assert run(capsys, "tiling", "covering", "--w-xi1", "0", "0")[0] == 2


def test_tiling_export_slice(tmp_path, capsys):
    out = tmp_path / "slice.csv"
    code, _, _ = run(capsys, "tiling", "export-slice", "--x2", "1/2", "--xi2", "1/2", "--out", str(out))
    rows = out.read_text().splitlines()
    assert code == 0 and rows[0] == "k,m,x1_lo,x1_hi,xi1_lo,xi1_hi,r"
    assert len(rows) > 1 and all(line.endswith(",1") for line in rows[1:])


def test_pairing_commands(tmp_path, capsys):
    assert run(capsys, "pairing", "pair", "--k", "-1", "--l", "-1")[:2] == (0, "7\n")
    assert run(capsys, "pairing", "unpair", "--m", "9")[:2] == (0, "1 -1\n")
    assert run(capsys, "pairing", "verify", "--n", "500")[0] == 0
    table = tmp_path / "t.json"
    assert run(capsys, "pairing", "export", "--n", "100", "--out-file", str(table))[0] == 0
    assert run(capsys, "pairing", "unpair", "--m", "9", "--table", str(table))[1] == "1 -1\n"
    assert run(capsys, "pairing", "verify", "--n", "200", "--table", str(table))[0] == 1


def test_bad_table_fails(tmp_path, capsys):
    cells = [SPIRAL.unpair(m) for m in range(1, 300)]
    cells[4] = cells[0]
    path = tmp_path / "dup.json"
    save_table(PairingSpec.from_table(cells), 299, path)
    code, out, _ = run(capsys, "pairing", "verify", "--n", "100", "--table", str(path))
    assert code == 1 and records(out)[0]["failure"] == "duplicate"
    code, out, _ = run(capsys, "tiling", "covering", "--samples", "2000", "--table", str(path))
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["--M", "0", "pairing", "pair"],
    ["eval", "psi-hat", "--M", "0", "--s", "1/4", "--y", "0"],
    ["verify", "nonsense"],
    ["verify", "parseval", "--preset", "nope"],
    ["pairing", "unpair", "--m", "0"],
    ["eval", "psi-hat", "--s", "1/4"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"M": 3, "seed": 4}))
    code, out, _ = run(capsys, "verify", "orthonormality", "--range", "1", "--config", str(cfg))
    assert code == 0 and records(out)[0]["params"]["M"] == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "verify", "orthonormality", "--config", str(cfg))[0] == 2


def _cli(args, env=None):
    return subprocess.run([sys.executable, "-m", "shannon2d", *args], capture_output=True,
                          env=env, check=False)


def test_determinism(tmp_path):
    for sub in ("a", "b"):
        d = tmp_path / sub
        assert _cli(["tiling", "covering", "--samples", "3000", "--seed", "11", "--out", str(d)]).returncode == 0
        assert _cli(["verify", "parseval", "--out", str(d)]).returncode == 0
        assert _cli(["tiling", "export-slice", "--x2", "3/2", "--xi2", "1/2", "--out", str(d)]).returncode == 0
    for name in ("covering.jsonl", "parseval.jsonl", "slice.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_backends_agree_on_reports():
    outs = []
    for be in ("numba", "numpy"):
        env = dict(os.environ, SHANNON2D_BACKEND=be)
        outs.append(_cli(["tiling", "covering", "--samples", "2000", "--seed", "3"], env).stdout)
        outs.append(_cli(["verify", "calderon", "--preset", "band-e00"], env).stdout)
    assert outs[0] == outs[2] and outs[0]
    cal = [json.loads(outs[1]), json.loads(outs[3])]
    assert abs(cal[0]["lhs"] - cal[1]["lhs"]) < 1e-12 and cal[0]["pass"] and cal[1]["pass"]
