"""Command-line contract: subcommand grammar, JSON schemas, exit codes,
reproducibility."""

import json

import pytest

from curvekit.cli import (
    EXIT_FILE,
    EXIT_INDETERMINATE,
    EXIT_OK,
    EXIT_OPERATIONAL,
    EXIT_USAGE,
    EXIT_VALIDATION_FAIL,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out.strip() else None, err


class TestGenerateRandom:
    def test_reproducible_byte_identical(self, capsys):
        code1, out1, _ = run(capsys, "generate", "random", "--bits", "16", "--seed", "42")
        code2, out2, _ = run(capsys, "generate", "random", "--bits", "16", "--seed", "42")
        assert code1 == code2 == EXIT_OK
        assert out1 == out2

    def test_schema_fields(self, capsys):
        code, doc, _ = run_json(
            capsys, "generate", "random", "--bits", "16", "--seed", "7"
        )
        assert code == EXIT_OK
        assert doc["schema_version"] == 1
        assert doc["kind"] == "curve_suite"
        for key in ("curve", "order", "base_point", "twist_order", "seed_trace", "policy"):
            assert key in doc
        assert doc["seed_trace"]["seed"] == 7
        # hex fields are lowercase with no prefix
        for field in ("p", "a", "b"):
            value = doc["curve"][field]
            assert value == value.lower() and not value.startswith("0x")

    def test_round_trip_through_validate(self, capsys, tmp_path):
        code, out, _ = run(capsys, "generate", "random", "--bits", "16", "--seed", "3")
        assert code == EXIT_OK
        path = tmp_path / "suite.json"
        path.write_text(out)
        code, doc, _ = run_json(capsys, "validate", "--curve", str(path))
        assert code == EXIT_OK
        assert doc["report"]["overall_pass"] is True

    def test_text_format(self, capsys):
        code, out, _ = run(
            capsys, "generate", "random", "--bits", "16", "--seed", "9",
            "--format", "text",
        )
        assert code == EXIT_OK
        assert "seed = 9" in out


class TestGenerateCm:
    def test_fixed_prime(self, capsys):
        code, doc, _ = run_json(
            capsys, "generate", "cm", "--prime", "11", "--prefer", "larger"
        )
        assert code == EXIT_OK
        assert doc["kind"] == "cm_curve"
        assert doc["cm"]["D"] == 7
        assert doc["cm"]["t"] == 4 and doc["cm"]["s"] == 2
        assert doc["curve"] == {"p": "b", "a": "5", "b": "7"}
        assert int(doc["order"]["N"], 16) == 16
        assert int(doc["twist_order"], 16) == 8

    def test_restart_is_operational_failure(self, capsys):
        code, _, err = run(capsys, "generate", "cm", "--prime", "11", "--prefer", "prime")
        assert code == EXIT_OPERATIONAL
        assert err

    def test_bits_search(self, capsys, tmp_path):
        code, doc, _ = run_json(
            capsys, "generate", "cm", "--bits", "16", "--seed", "5",
            "--prefer", "near-prime",
        )
        assert code == EXIT_OK
        assert doc["order"]["h"] <= 4
        # cm output validates as a subject file
        path = tmp_path / "cm.json"
        path.write_text(json.dumps(doc))
        code, _, _ = run(capsys, "validate", "--curve", str(path))
        assert code in (EXIT_OK, EXIT_VALIDATION_FAIL, EXIT_INDETERMINATE)

    def test_prime_and_bits_exclusive(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["generate", "cm", "--prime", "11", "--bits", "16"])
        assert info.value.code == EXIT_USAGE


class TestValidate:
    def test_e511_fixture_fails(self, capsys, tmp_path):
        doc = {
            "schema_version": 1,
            "kind": "curve_suite",
            "curve": {"p": "5", "a": "1", "b": "1"},
            "order": {"N": "9", "t": -3, "n": "9", "h": 1},
            "base_point": {"infinity": False, "x": "0", "y": "1"},
        }
        path = tmp_path / "e511.json"
        path.write_text(json.dumps(doc))
        code, report, _ = run_json(capsys, "validate", "--curve", str(path))
        assert code == EXIT_VALIDATION_FAIL
        verdicts = {c["id"]: c["verdict"] for c in report["report"]["criteria"]}
        assert verdicts["ORDER_PRIME"] == "fail"

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "validate", "--curve", "/no/such/file.json")
        assert code == EXIT_FILE

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\"curve\": {}}")
        code, _, _ = run(capsys, "validate", "--curve", str(path))
        assert code == EXIT_FILE

    def test_policy_file_override(self, capsys, tmp_path):
        suite_code, out, _ = run(
            capsys, "generate", "random", "--bits", "16", "--seed", "3"
        )
        path = tmp_path / "suite.json"
        path.write_text(out)
        policy_path = tmp_path / "policy.json"
        policy_path.write_text(json.dumps({"L": 160}))
        code, _, _ = run(
            capsys, "validate", "--curve", str(path), "--policy", str(policy_path)
        )
        assert code == EXIT_VALIDATION_FAIL  # 16-bit n cannot clear 2^160


class TestAudit:
    def test_p256_never_hard_fails(self, capsys):
        code, doc, _ = run_json(capsys, "audit", "--name", "P-256")
        assert code in (EXIT_OK, EXIT_INDETERMINATE)
        verdicts = {c["id"]: c["verdict"] for c in doc["report"]["criteria"]}
        assert verdicts["ORDER_PRIME"] == "pass"

    def test_unknown_name(self, capsys):
        code, _, err = run(capsys, "audit", "--name", "doesnotexist")
        assert code == EXIT_FILE

    def test_trend(self, capsys):
        code, doc, _ = run_json(capsys, "audit", "--trend")
        assert code == EXIT_OK
        assert doc["plurality"] == "deterministic"
        assert doc["counts"]["deterministic"] >= 3


class TestAttack:
    @pytest.fixture()
    def instance_file(self, tmp_path):
        doc = {
            "schema_version": 1,
            "kind": "dlp_instance",
            "curve": {"p": "5", "a": "1", "b": "1"},
            "base_point": {"infinity": False, "x": "0", "y": "1"},
            "n": "9",
            "target": {"infinity": False, "x": "3", "y": "1"},
        }
        path = tmp_path / "instance.json"
        path.write_text(json.dumps(doc))
        return str(path)

    def test_bsgs(self, capsys, instance_file):
        code, doc, _ = run_json(capsys, "attack", "--method", "bsgs", "--instance", instance_file)
        assert code == EXIT_OK
        assert int(doc["l"], 16) == 5
        assert doc["verified"] is True

    def test_ph(self, capsys, instance_file):
        code, doc, _ = run_json(capsys, "attack", "--method", "ph", "--instance", instance_file)
        assert code == EXIT_OK
        assert int(doc["l"], 16) == 5

    def test_lambda_interval(self, capsys, instance_file):
        code, doc, _ = run_json(
            capsys, "attack", "--method", "lambda", "--instance", instance_file,
            "--low", "0", "--high", "8", "--seed", "1",
        )
        assert code == EXIT_OK
        assert int(doc["l"], 16) == 5

    def test_exhaustive_cap(self, capsys, instance_file):
        code, _, err = run(
            capsys, "attack", "--method", "exhaustive", "--instance", instance_file,
            "--cap", "2",
        )
        assert code == EXIT_OPERATIONAL

    def test_rho_rejects_composite_order(self, capsys, instance_file):
        code, _, err = run(capsys, "attack", "--method", "rho", "--instance", instance_file)
        assert code == EXIT_USAGE
        assert "prime" in err


class TestUsage:
    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == EXIT_USAGE

    def test_no_arguments(self, capsys):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == EXIT_USAGE

    def test_bad_flag_value(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["generate", "random", "--bits", "many"])
        assert info.value.code == EXIT_USAGE
