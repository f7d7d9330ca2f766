from __future__ import annotations

import io
import json
import math
from fractions import Fraction

import pytest

from corrbox.boxes import box_from_json_obj, box_to_json_obj
from corrbox.cli import main
from corrbox.generators import canonical, isotropic

EXPECTED_SWEEP_HEADER = (
    "param,lambda_max,s,C,eta,I,U_A,U_B,"
    "param_exact,lambda_max_exact,s_exact,C_exact,eta_exact,I_exact,U_A_exact,U_B_exact"
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_pr_report(self, capsys):
        code, out, err = run(capsys, "analyze", "pr")
        assert code == 0 and err == ""
        obj = json.loads(out)
        assert obj["format"] == "analysis-v1"
        assert obj["chsh"]["lambda_max"] == "4/1"
        assert obj["chsh"]["values"] == ["0/1", "0/1", "4/1", "0/1"]
        assert obj["signal"] == {"a_to_b": "0/1", "b_to_a": "0/1", "s": "0/1"}
        assert obj["unpredictability"] == {"formula": "1/2", "per_party": "1/2"}
        assert obj["uncertainty"]["u_a"] == "1/2"
        assert set(obj["uncertainty"]["delta"]) == {"A0", "A1", "B0", "B1"}
        assert obj["cost"]["c"] == "1/1"
        assert obj["cost"]["eta"] == "1/1"
        assert obj["cost"]["lower_bound"] == "1/1"
        assert obj["flags"] == {
            "no_signaling": True,
            "lhv_admissible": False,
            "weakly_nonclassical": True,
            "strongly_nonclassical": True,
        }
        assert box_from_json_obj(obj["box"]) == canonical("pr")

    def test_output_is_byte_stable(self, capsys):
        _, first, _ = run(capsys, "analyze", "quantum", "--angles", "tsirelson")
        _, second, _ = run(capsys, "analyze", "quantum", "--angles", "tsirelson")
        assert first == second
        assert first.endswith("}\n")

    def test_angle_preset_matches_explicit_angles(self, capsys):
        _, preset, _ = run(capsys, "analyze", "quantum", "--angles", "tsirelson")
        _, explicit, _ = run(
            capsys, "analyze", "quantum", "--angles",
            "0.0", str(math.pi / 2), str(math.pi / 4), str(-math.pi / 4),
        )
        assert preset == explicit

    def test_wrong_angle_count_is_usage_error(self, capsys):
        code, _, err = run(capsys, "analyze", "quantum", "--angles", "0.1", "0.2")
        assert code == 2 and "angles" in err

    def test_json_flag_matches_default(self, capsys):
        _, default, _ = run(capsys, "analyze", "pr")
        code, explicit, _ = run(capsys, "analyze", "pr", "--json")
        assert code == 0
        assert explicit == default

    def test_json_and_text_conflict(self, capsys):
        code, _, err = run(capsys, "analyze", "pr", "--json", "--text")
        assert code == 2
        assert "not allowed" in err

    def test_text_mode(self, capsys):
        code, out, _ = run(capsys, "analyze", "d0_1", "--text")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "lambda_max = 4/1"
        assert "s = 1/1" in lines
        assert "C = 1/1" in lines
        assert "eta = 0/1" in lines
        assert lines[-1].startswith("flags: ")

    def test_eta_star_block(self, capsys):
        code, out, _ = run(capsys, "analyze", "pr", "--dim", "2")
        assert code == 0
        block = json.loads(out)["eta_star"]
        assert block == {"d": 2, "value": "0", "approximate": True}

    def test_eta_star_dim_four(self, capsys):
        _, out, _ = run(capsys, "analyze", "pr", "--dim", "4")
        assert json.loads(out)["eta_star"]["value"] == "-1"

    def test_isotropic_source(self, capsys):
        code, out, _ = run(capsys, "analyze", "isotropic", "--v", "3/4")
        assert code == 0
        obj = json.loads(out)
        assert obj["cost"]["c"] == "1/2"
        assert obj["chsh"]["lambda_max"] == "3/1"

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        _, stdout_text, _ = run(capsys, "analyze", "noise")
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, "analyze", "noise", "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text(encoding="utf-8") == stdout_text

    def test_stdin_source(self, capsys, monkeypatch):
        payload = json.dumps(box_to_json_obj(canonical("d2_0")))
        monkeypatch.setattr("sys.stdin", io.StringIO(payload))
        code, out, _ = run(capsys, "analyze", "-")
        assert code == 0
        assert json.loads(out)["signal"]["s"] == "0/1"

    def test_missing_v_is_usage_error(self, capsys):
        code, _, err = run(capsys, "analyze", "isotropic")
        assert code == 2
        assert err.startswith("error:")

    def test_missing_angles_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "analyze", "quantum")
        assert code == 2

    def test_unknown_source_is_usage_error(self, capsys):
        code, _, err = run(capsys, "analyze", "no-such-box")
        assert code == 2
        assert "no-such-box" in err

    def test_invalid_box_file_is_usage_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"format": "box-v1", "cells": ["1"]}', encoding="utf-8")
        code, _, err = run(capsys, "analyze", str(bad))
        assert code == 2 and err.startswith("error:")


class TestGen:
    def test_single_canonical_to_stdout(self, capsys):
        code, out, _ = run(capsys, "gen", "--kind", "noise")
        assert code == 0
        assert box_from_json_obj(json.loads(out)) == canonical("noise")

    def test_single_isotropic(self, capsys):
        code, out, _ = run(capsys, "gen", "--kind", "isotropic", "--v", "0.7")
        assert code == 0
        assert box_from_json_obj(json.loads(out)) == isotropic(Fraction(7, 10))

    def test_family_writes_numbered_files(self, capsys, tmp_path):
        out_dir = tmp_path / "boxes"
        code, out, _ = run(
            capsys, "gen", "--family", "general", "--seed", "9",
            "--count", "3", "--out", str(out_dir),
        )
        assert code == 0 and out == ""
        names = sorted(p.name for p in out_dir.iterdir())
        assert names == ["box-0000.json", "box-0001.json", "box-0002.json"]
        for name in names:
            obj = json.loads((out_dir / name).read_text(encoding="utf-8"))
            box_from_json_obj(obj)  # validates

    def test_seeded_output_is_stable(self, capsys, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        for target in (first, second):
            run(capsys, "gen", "--family", "chsh16_mixture", "--seed", "11",
                "--count", "2", "--out", str(target))
        for name in ("box-0000.json", "box-0001.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_quantum_preset(self, capsys):
        code, out, _ = run(
            capsys, "gen", "--kind", "quantum", "--angles", "tsirelson",
            "--denom", "1000000",
        )
        assert code == 0
        box = box_from_json_obj(json.loads(out))
        from corrbox.measures import chsh

        assert abs(float(chsh(box).lambda_max) - 2 * math.sqrt(2)) < 4e-6

    def test_kind_and_family_conflict(self, capsys):
        code, _, _ = run(capsys, "gen", "--kind", "pr", "--family", "general")
        assert code == 2

    def test_neither_kind_nor_family(self, capsys):
        code, _, _ = run(capsys, "gen")
        assert code == 2

    def test_count_without_family(self, capsys):
        code, _, _ = run(capsys, "gen", "--kind", "pr", "--count", "3")
        assert code == 2

    def test_count_without_out(self, capsys):
        code, _, _ = run(capsys, "gen", "--family", "general", "--count", "2")
        assert code == 2


class TestDecompose:
    def test_pr_decomposition_mixes_back(self, capsys):
        code, out, _ = run(capsys, "decompose", "pr")
        assert code == 0
        obj = json.loads(out)
        assert obj["basis"] == "full256" and obj["cost"] == "1/1"
        from corrbox.boxes import enumerate_deterministic, mix, parse_fraction

        dets = enumerate_deterministic()
        parts = [
            (parse_fraction(w), dets[int(i)].as_box()) for i, w in obj["weights"].items()
        ]
        assert mix(parts) == canonical("pr")

    def test_noise_outside_chsh16_hull(self, capsys):
        code, out, _ = run(capsys, "decompose", "noise", "--basis", "chsh16")
        assert code == 0
        assert json.loads(out) == {"basis": "chsh16", "status": "not-in-hull"}

    def test_alt_on_noise_finds_disjoint_pair(self, capsys):
        code, out, _ = run(capsys, "decompose", "noise", "--alt")
        assert code == 0
        obj = json.loads(out)
        first = set(obj["first"]["weights"])
        second = set(obj["second"]["weights"])
        assert first and second and not (first & second)
        assert obj["first"]["cost"] == "0/1" and obj["second"]["cost"] == "0/1"

    def test_alt_on_vertex_has_no_second(self, capsys):
        code, out, _ = run(capsys, "decompose", "d0_0", "--alt")
        assert code == 0
        obj = json.loads(out)
        assert obj["first"]["weights"] == {"0": "1/1"}
        assert obj["second"] is None

    def test_alt_outside_hull(self, capsys):
        code, out, _ = run(capsys, "decompose", "noise", "--basis", "chsh16", "--alt")
        assert code == 0
        assert json.loads(out)["status"] == "not-in-hull"


class TestFuzzCommand:
    def test_clean_run_exits_zero(self, capsys):
        code, out, _ = run(
            capsys, "fuzz", "--family", "chsh16_mixture", "--seed", "1",
            "--count", "20",
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["format"] == "findings-v1"
        assert obj["aborted"] is False
        assert obj["checked"] == 20

    def test_corrupted_run_exits_one_with_witness(self, capsys, monkeypatch):
        monkeypatch.setenv("CORRBOX_FUZZ_CORRUPT", "1")
        code, out, _ = run(capsys, "fuzz", "--count", "5", "--seed", "1")
        assert code == 1
        obj = json.loads(out)
        assert obj["aborted"] is True and obj["corrupted"] is True
        assert obj["violating_witnesses"]
        witness = obj["violating_witnesses"][0]
        assert witness["strictness"] == "asserted"
        box_from_json_obj(witness["box"])  # witness serializes as a valid box


class TestRepro:
    def test_exit_zero_and_empty_failures(self, capsys):
        code, out, _ = run(capsys, "repro")
        assert code == 0
        obj = json.loads(out)
        assert obj["format"] == "repro-v1"
        assert obj["failures"] == []


class TestSweep:
    def test_header_and_shape(self, capsys):
        code, out, _ = run(capsys, "sweep", "--steps", "4")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == EXPECTED_SWEEP_HEADER
        assert len(lines) == 6
        row = dict(zip(lines[0].split(","), lines[4].split(",")))  # v = 3/4
        assert row["param_exact"] == "3/4"
        assert row["C"] == "0.5" and row["C_exact"] == "1/2"
        assert row["lambda_max_exact"] == "3/1"

    def test_endpoint_rows(self, capsys):
        _, out, _ = run(capsys, "sweep", "--steps", "2")
        lines = out.splitlines()
        first = lines[1].split(",")
        last = lines[3].split(",")
        assert first[0] == "0" and last[0] == "1"
        assert last[3] == "1"  # C at the extreme point

    def test_csv_file_matches_stdout(self, capsys, tmp_path):
        _, stdout_text, _ = run(capsys, "sweep", "--steps", "3")
        target = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "sweep", "--steps", "3", "--csv", str(target))
        assert code == 0 and out == ""
        assert target.read_text(encoding="utf-8") == stdout_text

    def test_bad_kind(self, capsys):
        code, _, _ = run(capsys, "sweep", "--kind", "spiral")
        assert code == 2

    def test_zero_steps(self, capsys):
        code, _, _ = run(capsys, "sweep", "--steps", "0")
        assert code == 2


class TestParser:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2
        capsys.readouterr()

    def test_no_subcommand(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()
