import importlib
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ramexp import cli, verify
from ramexp.core_arith import build_tables
from ramexp.correlation import correlation_table
from ramexp.expansion import eratosthenes_transform, lookup


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


PAIR = "tds:coeffs=1;1"

# one runnable invocation per subcommand
SAMPLES = {
    "csum": ["csum", "--q", "6", "--n", "3"],
    "transform": ["transform", "--f", "mangoldt", "--D", "6"],
    "coeffs": ["coeffs", "--f", PAIR],
    "invert": ["invert", "--coeffs", "1.5;0.5"],
    "reconstruct": ["reconstruct", "--f", PAIR, "--n", "1..4"],
    "correlate": ["correlate", "--f", PAIR, "--g", PAIR, "--N", "4", "--h", "0..1"],
    "singular": ["singular", "--f", PAIR, "--g", PAIR, "--h", "0..2"],
    "carmichael": ["carmichael", "--f", PAIR, "--g", PAIR, "--N", "4", "--ell", "1..2", "--period", "2"],
    "shift-expand": ["shift-expand", "--f", PAIR, "--g", PAIR, "--N", "4", "--h", "0..3"],
    "ap-sum": ["ap-sum", "--f", PAIR, "--N", "12", "--t", "2"],
    "twisted-sum": ["twisted-sum", "--f", PAIR, "--N", "4", "--ell", "2"],
    "gsift": ["gsift", "--f", "tds:coeffs=1;1;1;1;1;1;1", "--Q", "7", "--G", "3"],
    "coprime-corr": ["coprime-corr", "--f", PAIR, "--G", "5", "--N", "1000", "--h", "2"],
    "symmetry": ["symmetry", "--weight", "1"],
    "verify": ["verify", "holder", "--cases", "5"],
}
COMMANDS_ITEMS = sorted(cli.COMMANDS.items())


def test_csum_example():
    assert call("csum", "--q", 6, "--n", 3) == (0, "q,n,value\n6,3,-2\n", "")


def test_csum_grid_json():
    code, out, _ = call("csum", "--q", "1..3", "--n", "0..2", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 9
    assert {"q": 3, "n": 0, "value": 2} in rows


def test_holder_and_dyadic():
    assert call("csum", "--q", 6, "--n", 3, "--holder")[1] == "q,n,value\n6,3,-2\n"
    assert call("csum", "--dyadic", "1..10", "--n", 6)[1] == "A,B,h,sum,bound\n0,10,6,14,80\n"


def test_verify_example():
    code, out, _ = call("verify", "lemma-a6", "--cases", 100, "--seed", 7)
    assert code == 0
    assert out.startswith("PASS cases=100 max_err=")
    assert out.rstrip().endswith("suite=lemma-a6")


def test_correlate_row_count():
    code, out, _ = call("correlate", "--f", "sigma:s=1,D=50", "--g", "sigma:s=1,D=50",
                        "--N", 10000, "--h", "0..100")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "h,value_re,value_im,singular_re,singular_im,residual_re,residual_im"
    assert len(lines) == 102


def test_correlate_csv_matches_library():
    t = build_tables(1024)
    f = eratosthenes_transform(lookup("sigma", t, s=1), 20, t)
    code, out, _ = call("correlate", "--f", "sigma:s=1,D=20", "--g", "sigma:s=1,D=20",
                        "--N", 500, "--h", "0..5")
    direct = correlation_table(f, f, 500, range(6)).values
    vals = [complex(float(r.split(",")[1]), float(r.split(",")[2])) for r in out.splitlines()[1:]]
    assert np.array_equal(vals, direct)


def test_correlate_methods_agree():
    base = ["correlate", "--f", PAIR, "--g", "tds:coeffs=1;0;2", "--N", 300, "--h", "0..9"]
    _, a, _ = call(*base)
    _, b, _ = call(*base, "--method", "divisor")
    assert a == b
    code, c, _ = call("correlate", "--f", PAIR, "--g", PAIR, "--N", 4, "--h", 1, "--method", "fre")
    assert code == 0 and c.splitlines()[1] == "4,2,2,1,8.0,8.0,0.0,4.0"


def test_shift_expand_outputs():
    code, out, _ = call(*SAMPLES["shift-expand"])
    assert code == 0
    assert [line.split(",")[1] for line in out.splitlines()[1:]] == ["10.0", "8.0", "10.0", "8.0"]
    code, out, _ = call(*SAMPLES["shift-expand"], "--diagnostics")
    assert json.loads(out) == {"delta_fit": None, "max_residual": 0.0, "support": 2}


def test_symmetry_rows():
    code, out, _ = call("symmetry", "--N", 1000, "--H", 20)
    assert code == 0
    assert out.splitlines()[1].startswith("1000,20,532000.0,1.33,")


def test_usage_errors():
    assert call("bogus")[0] == 2
    assert call("csum", "--q", 0, "--n", 1)[0] == 2
    assert call("csum", "--frobnicate")[0] == 2
    assert call("transform", "--f", "nosuch", "--D", 4)[0] == 2
    code, _, err = call("coprime-corr", "--f", "one", "--G", 5, "--N", 100, "--q", 7, "--sum")
    assert code == 2 and "error:" in err
    assert call("coprime-corr", "--f", "one:D=1", "--G", 5, "--N", 100, "--q", 10, "--sum")[0] == 2
    assert call("transform", "--f", "one", "--D", 5000, "--tables-limit", 100)[0] == 2


def test_coprime_sum_example():
    code, out, _ = call("coprime-corr", "--f", "one:D=1", "--G", 5, "--N", 100, "--q", 7, "--sum")
    assert code == 0
    assert out.splitlines()[1] == "100,7,5,86.0,0.0,100.0,0.0,-14.0,0.0,86.0,0.0"


def test_verify_failure_exit_code(monkeypatch):
    def broken(rng, cases, t, **_):
        r = verify.SuiteResult("holder", exact=True)
        for q in range(1, cases + 1):
            r.record(1 if q == 2 else 0, {"q": q})
        return r

    monkeypatch.setitem(verify.SUITES, "holder", broken)
    code, out, _ = call("verify", "holder", "--cases", 3, "--seed", 4)
    assert code == 3
    lines = out.splitlines()
    assert lines[0] == "FAIL cases=3 max_err=1.0 suite=holder"
    assert lines[1] == 'case {"err": 1.0, "q": 2}'
    assert lines[2] == "replay: verify holder --cases 3 --seed 4"


def test_commands_cover_library():
    for target, sub in COMMANDS_ITEMS:
        mod, attr = target.split(".")
        assert callable(getattr(importlib.import_module(f"ramexp.{mod}"), attr)), target
        assert sub in SAMPLES, sub


@pytest.mark.parametrize("name", sorted(SAMPLES))
def test_every_subcommand_runs(name):
    code, out, err = call(*SAMPLES[name])
    assert code == 0, err
    assert out.strip()
    code, out, err = call(*SAMPLES[name], "--format", "json")
    assert code == 0, err
    json.loads(out)


@pytest.mark.parametrize("name", sorted(SAMPLES))
def test_threads_do_not_change_output(name):
    assert call(*SAMPLES[name])[1] == call(*SAMPLES[name], "--threads", 4)[1]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ramexp", "csum", "--q", "6", "--n", "3"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and r.stdout == "q,n,value\n6,3,-2\n"
