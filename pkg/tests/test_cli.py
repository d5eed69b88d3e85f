from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from exotic_vortex.cli import (
    EXIT_CONFIG,
    EXIT_DIVERGENCE,
    EXIT_OK,
    EXIT_TOLERANCE,
    main,
    read_fields,
)
from exotic_vortex.config import load_config
from exotic_vortex.surface import build_grid

TAUBES = """\
[problem]
family = taubes
[map]
f = 0, 0, 1
[grid]
n = 64
"""

TODA = """\
[problem]
family = toda
lambda = -1
[map]
f1 = 0, 1
f2 = 0, 0, 0.5
[grid]
n = 128
[verify]
residual_tol = 1e-6
"""

PAIR = """\
[problem]
lambda0 = 1
lambda = 1
Q = 1, -1
Q = 0, 1
r = 1, 1
vortex1 = -0.5+0i
vortex2 = 0+0i
[grid]
n = 64
[solver]
tol = 1e-9
[verify]
flux_tol = 0.02
"""

VACUUM = """\
[problem]
lambda0 = 1
lambda = 1
Q = 1, -1
Q = 0, 1
r = 1, 1
[grid]
n = 32
"""

NO_VACUUM = VACUUM.replace("lambda = 1", "lambda = -1")


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(tmp_path, *args, cfg, out="out"):
    return main([args[0], "--config", cfg, "--out", str(tmp_path / out), *args[1:]])


def test_analytic_taubes(tmp_path):
    cfg = write(tmp_path, "t.cfg", TAUBES)
    assert run(tmp_path, "analytic", cfg=cfg) == EXIT_OK
    meta = json.loads((tmp_path / "out/metadata.json").read_text())
    assert meta["family"] == "taubes" and meta["residual"]["max_abs"] < 1e-3
    grid = build_grid(load_config(cfg).surface(), 64)
    cols = read_fields(tmp_path / "out/fields.csv", grid)
    c = grid.shape[0] // 2
    assert cols["phi1_sq"][c, c] == 0.0
    with np.errstate(invalid="ignore"):
        assert np.nanmax(np.abs(cols["phi1_sq"] - np.exp(2 * cols["h1"]))) < 1e-14
    # the closed form tends to the vacuum at the rim
    assert np.nanmax(cols["phi1_sq"]) <= 1.0


def test_analytic_toda_and_verify(tmp_path):
    cfg = write(tmp_path, "toda.cfg", TODA)
    assert run(tmp_path, "analytic", cfg=cfg) == EXIT_OK
    meta = json.loads((tmp_path / "out/metadata.json").read_text())
    assert meta["residual"]["max_abs"] < 1e-6
    assert run(tmp_path, "verify", cfg=cfg) == EXIT_OK
    rep = json.loads((tmp_path / "out/verify.json").read_text())
    assert rep["residual"]["pass"] and rep["violations"] == []


def test_verify_flags_tolerance_violation(tmp_path):
    cfg = write(tmp_path, "t.cfg", TAUBES)
    assert run(tmp_path, "analytic", cfg=cfg) == EXIT_OK
    assert run(tmp_path, "verify", "--tol", "1e-30", cfg=cfg) == EXIT_TOLERANCE
    rep = json.loads((tmp_path / "out/verify.json").read_text())
    assert not rep["residual"]["pass"]


def test_solve_and_verify_pair(tmp_path):
    cfg = write(tmp_path, "pair.cfg", PAIR)
    assert run(tmp_path, "solve", cfg=cfg) == EXIT_OK
    rep = json.loads((tmp_path / "out/report.json").read_text())
    assert rep["converged"]
    assert rep["flux"]["N_inferred_abs"] == pytest.approx([1, 1], abs=0.02)
    assert len(rep["zeros"][0]) == 1 and len(rep["zeros"][1]) == 1
    hist = json.loads((tmp_path / "out/history.json").read_text())
    assert hist["residual_history"][-1] < 1e-9
    assert run(tmp_path, "verify", cfg=cfg) == EXIT_OK
    ver = json.loads((tmp_path / "out/verify.json").read_text())
    assert ver["flux"]["pass"] and ver["flux"]["expected_abs"] == [1.0, 1.0]


def test_solve_is_byte_reproducible(tmp_path):
    cfg = write(tmp_path, "pair.cfg", PAIR)
    assert run(tmp_path, "solve", cfg=cfg, out="a") == EXIT_OK
    assert run(tmp_path, "solve", cfg=cfg, out="b") == EXIT_OK
    assert (tmp_path / "a/fields.csv").read_bytes() == (tmp_path / "b/fields.csv").read_bytes()
    assert run(tmp_path, "compare", str(tmp_path / "a/fields.csv"), str(tmp_path / "b/fields.csv"), cfg=cfg) == EXIT_OK
    cmp_ = json.loads((tmp_path / "out/compare.json").read_text())
    assert all(v["l_inf"] == 0.0 for v in cmp_["norms"].values())


def test_vacuum_solve_and_verify(tmp_path):
    cfg = write(tmp_path, "vac.cfg", VACUUM)
    assert run(tmp_path, "solve", cfg=cfg) == EXIT_OK
    rep = json.loads((tmp_path / "out/report.json").read_text())
    assert rep["iterations"] <= 1
    assert rep["zeros"] == [[], []]
    assert np.max(np.abs(rep["flux"]["contracted"])) < 1e-10
    assert run(tmp_path, "verify", cfg=cfg) == EXIT_OK


def test_missing_vacuum_is_a_config_error(tmp_path):
    cfg = write(tmp_path, "nv.cfg", NO_VACUUM)
    assert run(tmp_path, "solve", cfg=cfg) == EXIT_CONFIG


def test_divergence_exit_and_history(tmp_path):
    text = PAIR.replace("tol = 1e-9", "tol = 1e-14\nmax_iter = 1")
    cfg = write(tmp_path, "div.cfg", text)
    assert run(tmp_path, "solve", cfg=cfg) == EXIT_DIVERGENCE
    hist = json.loads((tmp_path / "out/history.json").read_text())
    assert hist["converged"] is False and len(hist["residual_history"]) >= 1


def test_compare_against_closed_form(tmp_path):
    cfg = write(tmp_path, "t.cfg", TAUBES)
    assert run(tmp_path, "analytic", cfg=cfg) == EXIT_OK
    assert run(tmp_path, "compare", str(tmp_path / "out/fields.csv"), cfg=cfg) == EXIT_OK
    cmp_ = json.loads((tmp_path / "out/compare.json").read_text())
    assert cmp_["norms"]["h1"]["l_inf"] == 0.0


@pytest.mark.parametrize(
    "text",
    [
        "[problem]\nfamily = nonsense\n",
        "[problem]\nfamily = taubes\n",
        "[grid]\nn = 8\n[problem]\nfamily = taubes\n[map]\nf = 0, 1\n",
    ],
)
def test_bad_configs_exit_2(tmp_path, text):
    cfg = write(tmp_path, "bad.cfg", text)
    assert run(tmp_path, "analytic", cfg=cfg) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert run(tmp_path, "solve", cfg=str(tmp_path / "absent.cfg")) == EXIT_CONFIG


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, "t.cfg", TAUBES)
    proc = subprocess.run(
        [sys.executable, "-m", "exotic_vortex", "analytic", "--config", cfg, "--out", str(tmp_path / "m")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "max_abs" in json.loads(proc.stdout)["residual"]
