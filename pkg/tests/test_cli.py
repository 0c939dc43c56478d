"""Command line interface: exit codes, input forms, report files, and
byte-determinism of the reports across runs and kernel backends.
"""

from __future__ import annotations

import json
import os
import shutil
import subprocess
import sys

import pytest

from refinable import __version__
from refinable.cli import main

BSPLINE3 = '["1/4", "3/4", "3/4", "1/4"]'
HALF = '["1/2", "1/2", "1/2", "1/2"]'


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSpectrumCommand:
    def test_inline_mask_to_stdout(self, capsys):
        code, out, _ = run(capsys, "spectrum", BSPLINE3)
        assert code == 0
        doc = json.loads(out)
        assert doc["exact_mode"] is True
        assert doc["accuracy"]["order"] == 3
        eigs = sorted(g["exact_eigenvalue"] for g in doc["groups"])
        assert eigs == ["1/2", "1/4", "1"] or sorted(eigs) == sorted(
            ["1", "1/2", "1/4"]
        )
        assert doc["independence"]["verdict"] == "independence not contradicted"

    def test_object_document_from_file(self, tmp_path, capsys):
        path = tmp_path / "mask.json"
        path.write_text('{"name": "spline", "coefficients": %s}' % BSPLINE3)
        code, out, _ = run(capsys, "spectrum", str(path))
        assert code == 0
        assert json.loads(out)["mask"]["name"] == "spline"

    def test_stdin_dash(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO(HALF))
        code, out, _ = run(capsys, "spectrum", "-")
        assert code == 0
        doc = json.loads(out)
        assert doc["independence"]["verdict"] == "translates DEPENDENT"

    def test_out_directory(self, tmp_path, capsys):
        code, out, _ = run(capsys, "spectrum", BSPLINE3, "--out", str(tmp_path))
        assert code == 0
        assert out == ""
        text = (tmp_path / "spectrum.json").read_text()
        assert json.loads(text)["accuracy"]["order"] == 3

    def test_exact_flag_fails_on_irrational_mask(self, capsys):
        d4 = "[0.6830127018922193, 1.1830127018922193, 0.3169872981077807, -0.1830127018922193]"
        code, _, err = run(capsys, "spectrum", d4, "--exact")
        assert code == 1
        assert "error:" in err
        # without the flag the float path succeeds
        code2, out, _ = run(capsys, "spectrum", d4)
        assert code2 == 0
        assert json.loads(out)["exact_mode"] is False


class TestBasisCommand:
    def test_writes_all_files(self, tmp_path, capsys):
        code, _, _ = run(
            capsys, "basis", BSPLINE3, "--out", str(tmp_path), "--level", "6"
        )
        assert code == 0
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == [
            "basis.json",
            "h_00.csv",
            "h_01.csv",
            "h_02.csv",
            "h_03.csv",
            "phi.csv",
        ]
        phi_lines = (tmp_path / "phi.csv").read_text().splitlines()
        assert phi_lines[0] == "x,re,im"
        assert len(phi_lines) == 1 + 3 * 64 + 1  # header + N*2^level + 1 rows
        h_lines = (tmp_path / "h_00.csv").read_text().splitlines()
        assert len(h_lines) == 1 + 2 * 64 + 1
        doc = json.loads((tmp_path / "basis.json").read_text())
        assert doc["level"] == 6
        assert doc["interval"] == [-1, 1]
        assert [r["file"] for r in doc["rows"]] == [
            "h_00.csv",
            "h_01.csv",
            "h_02.csv",
            "h_03.csv",
        ]
        for row in doc["rows"]:
            assert row["homogeneity_residual"] <= 1e-7
        assert doc["reconstruction"]["residual"] <= 1e-7

    def test_requires_out_directory(self, capsys):
        code, _, err = run(capsys, "basis", BSPLINE3)
        assert code == 2
        assert "--out" in err

    def test_rejects_fractional_interval(self, tmp_path, capsys):
        code, _, err = run(
            capsys,
            "basis",
            BSPLINE3,
            "--out",
            str(tmp_path),
            "--interval",
            "0.5",
            "1",
        )
        assert code == 2
        assert "integer" in err

    def test_rejects_interval_missing_zero(self, tmp_path, capsys):
        code, _, err = run(
            capsys,
            "basis",
            BSPLINE3,
            "--out",
            str(tmp_path),
            "--interval",
            "1",
            "2",
        )
        assert code == 2

    def test_rejects_out_of_range_level(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "basis", BSPLINE3, "--out", str(tmp_path), "--level", "40"
        )
        assert code == 2
        assert "--level" in err


class TestVerifyCommand:
    def test_passes_on_half_with_dependency(self, capsys):
        code, out, _ = run(capsys, "verify", HALF, "--level", "8")
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        names = [c["name"] for c in doc["checks"]]
        assert "dependency-witness" in names
        assert all(c["passed"] for c in doc["checks"])

    @pytest.mark.filterwarnings("ignore::refinable.MaskSumWarning")
    def test_computational_failure_exits_one(self, capsys):
        # no eigenvalue 1: phi cannot be normalized, a computational failure
        code, _, err = run(capsys, "verify", '["1/2", "1/2"]', "--level", "4")
        assert code == 1
        assert "error:" in err


class TestInputErrors:
    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "spectrum", "no/such/file.json")
        assert code == 2
        assert "cannot read" in err

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("[1, 2,")
        code, _, err = run(capsys, "spectrum", str(path))
        assert code == 2
        assert "not valid JSON" in err

    def test_mask_too_short(self, capsys):
        code, _, err = run(capsys, "spectrum", "[1]")
        assert code == 2

    def test_zero_corner_coefficient(self, capsys):
        code, _, err = run(capsys, "spectrum", "[0, 1, 1]")
        assert code == 2


@pytest.fixture(scope="module")
def script():
    path = shutil.which("refinable")
    assert path, "console script not installed"
    return path


class TestConsoleScript:
    def test_version(self, script):
        proc = subprocess.run(
            [script, "--version"], capture_output=True, text=True, check=True
        )
        assert proc.stdout.strip() == f"refinable {__version__}"

    def test_unknown_subcommand_is_usage_error(self, script):
        proc = subprocess.run(
            [script, "frobnicate", "[1, 1]"], capture_output=True, text=True
        )
        assert proc.returncode == 2

    def test_reports_are_byte_identical_across_backends(self, script):
        d4 = "[0.6830127018922193, 1.1830127018922193, 0.3169872981077807, -0.1830127018922193]"
        outputs = []
        for no_numba in ("0", "1"):
            env = dict(os.environ, REFINABLE_NO_NUMBA=no_numba)
            proc = subprocess.run(
                [script, "spectrum", d4],
                capture_output=True,
                env=env,
                check=True,
            )
            outputs.append(proc.stdout)
        assert outputs[0] == outputs[1]
        assert outputs[0].endswith(b"\n")
        assert b"\r" not in outputs[0]
