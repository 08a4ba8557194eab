"""
Integration tests for the oreforge command line.
"""

import pytest
import json
from pathlib import Path
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import catalog as catalog_module
from abelian import Ambient
from cli import (
    EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_VERIFY_FAILED, Workspace, main, parse_weight,
)
from config import SEED_ENV_VAR
from errors import DuplicateName, ParseError, UnknownName
from spec_parser import import_spec

SPECS = Path(__file__).parent.parent / "specs"


@pytest.fixture
def cli_config(temp_directory, monkeypatch):
    """Small sample counts so CLI runs stay fast."""
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    path = Path(temp_directory) / "cli.yaml"
    path.write_text(
        "sampling:\n"
        "  seed: 7\n"
        "  samples: 20\n"
        "  max_degree: 3\n"
        "eigen:\n"
        "  weight_ball_height: 1\n"
        "verify:\n"
        "  workers: 1\n"
        "logging:\n"
        "  level: error\n"
    )
    return str(path)


def run(capsys, cli_config, *argv):
    code = main(["--config", cli_config, *argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompute:
    """compute verbs on builtins."""

    def test_weyl_product(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "mul", "A1", "d", "x")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "schema=1 kind=mul"
        assert "result=x*d + 1" in lines

    def test_json_output(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "--json", "compute", "ev", "T2", "conj_x", "conj_y")
        assert code == EXIT_OK
        record = json.loads(out)
        assert record["kind"] == "ev"
        assert record["rank"] == 2
        assert record["invariant_factors"] == []

    def test_group(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "group", "multiplicative", "(-1)", "(2)")
        assert code == EXIT_OK
        assert "structure=T = Z/2; rank r = 1; basis = [2]" in out.splitlines()

    def test_components(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "components", "A1", "ad_xd", "--element", "x*d + x + 1")
        assert code == EXIT_OK
        assert "components.count=2" in out.splitlines()

    def test_presentation_with_cocycles(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "presentation", "T2", "conj_x", "conj_y")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert "lambda[0]=lambda_21 = 2" in lines
        assert "relations_hold=true" in lines
        assert "cocycle_coherent=true" in lines
        assert "cocycle_associative=true" in lines

    def test_presentation_without_unit_section(self, capsys, cli_config):
        code, out, err = run(capsys, cli_config, "compute", "presentation", "A1", "ad_xd")
        assert code == EXIT_VALIDATION
        assert "SectionNotUnit" in err

    def test_torsion_division(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "torsion", "LZ2", "sign", "--element", "1 + x")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert "dimension=2" in lines
        assert "division_check=invertible over Frac(D_0)" in lines

    def test_apply(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "apply", "U2", "negation", "h*e")
        assert code == EXIT_OK
        assert "image=e*h" in out.splitlines()

    def test_opposite_writes_spec(self, capsys, cli_config, temp_spec_dir):
        path = temp_spec_dir / "a1_opposite.json"
        code, out, _ = run(capsys, cli_config, "compute", "opposite", "A1", "--out", str(path))
        assert code == EXIT_OK
        assert f"spec_file={path}" in out.splitlines()
        assert import_spec(str(path)).tower.generator_names == ("x", "d")

    def test_tensor(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "tensor", "A1", "A1")
        assert code == EXIT_OK
        assert "right[1]=d -> d'" in out.splitlines()

    def test_good(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "good", "S1")
        assert code == EXIT_OK
        assert "good=true" in out.splitlines()

    def test_transpose_check(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "transpose-check", "A2", "weyl_transpose")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert "samples=20" in lines
        assert "involution=true" in lines
        assert "status=PASS" in lines

    def test_transpose_check_needs_anti_map(self, capsys, cli_config):
        code, _, err = run(capsys, cli_config, "compute", "transpose-check", "A1", "ad_xd")
        assert code == EXIT_USAGE
        assert "antiAutomorphism" in err

    def test_loaded_spec(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "compute", "mul", "weyl1", "d", "x", "--spec", str(SPECS / "a1.json"))
        assert code == EXIT_OK
        assert "result=x*d + 1" in out.splitlines()


class TestErrors:
    """Exit codes for bad input."""

    def test_parse_error(self, capsys, cli_config):
        code, _, err = run(capsys, cli_config, "compute", "mul", "A1", "x +", "d")
        assert code == EXIT_USAGE
        assert err.startswith("error:")

    def test_unknown_map(self, capsys, cli_config):
        assert run(capsys, cli_config, "compute", "ev", "A1", "nope")[0] == EXIT_USAGE

    def test_missing_arguments(self, capsys, cli_config):
        assert run(capsys, cli_config, "compute", "mul", "A1")[0] == EXIT_USAGE

    def test_unknown_verb(self, capsys, cli_config):
        assert run(capsys, cli_config, "compute", "divide", "A1")[0] == EXIT_USAGE

    def test_startup_self_test_failure(self, capsys, cli_config, monkeypatch):
        monkeypatch.setattr(catalog_module, "SELF_TEST_LIMIT", 0.0)
        code, _, err = run(capsys, cli_config, "compute", "mul", "A1", "d", "x")
        assert code == EXIT_VALIDATION
        assert "SelfTestTooSlow" in err

    def test_validation_error(self, capsys, cli_config):
        code, _, err = run(capsys, cli_config, "define", str(SPECS / "invalid_laurent_delta.json"))
        assert code == EXIT_VALIDATION
        assert "LaurentWithDelta" in err


class TestDefineAndBuiltin:
    """define and builtin commands."""

    def test_define_usolv2(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "define", str(SPECS / "usolv2.json"))
        assert code == EXIT_OK
        lines = out.splitlines()
        assert "name=usolv2" in lines
        assert "construction=ore" in lines
        assert "maps.count=2" in lines

    def test_builtin_spec(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "builtin", "A1")
        assert code == EXIT_OK
        spec = json.loads(out)
        assert spec["name"] == "A1"
        assert set(spec["maps"]) == {"weyl_transpose", "ad_xd"}

    def test_builtin_list(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "builtin", "--list")
        assert code == EXIT_OK
        assert "T2" in out.splitlines()

    def test_unknown_builtin(self, capsys, cli_config):
        assert run(capsys, cli_config, "builtin", "B7")[0] == EXIT_USAGE


class TestVerify:
    """verify command exit status and determinism."""

    def test_abelian_pass(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "verify", "abelian", "--samples", "10")
        assert code == EXIT_OK
        assert out.splitlines()[-1] == "status=PASS"

    def test_deterministic(self, capsys, cli_config):
        first = run(capsys, cli_config, "--json", "verify", "abelian", "--seed", "3")[1]
        second = run(capsys, cli_config, "--json", "verify", "abelian", "--seed", "3")[1]
        assert json.loads(first)[-1]["seed"] == 3
        assert first == second

    def test_seed_from_environment(self, capsys, cli_config, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "5")
        out = run(capsys, cli_config, "--json", "verify", "abelian")[1]
        assert json.loads(out)[-1]["seed"] == 5

    @pytest.mark.slow
    def test_mutation_fails(self, capsys, cli_config):
        code, out, _ = run(capsys, cli_config, "verify", "tower", "--mutate", "opposite-sign", "--samples", "10")
        assert code == EXIT_VERIFY_FAILED
        assert "status=FAIL" in out.splitlines()


class TestWorkspace:
    """Name resolution for compute verbs."""

    def test_duplicate_registration(self):
        ws = Workspace()
        loaded = import_spec(str(SPECS / "a1.json"))
        assert ws.register(loaded) == "weyl1"
        with pytest.raises(DuplicateName):
            ws.register(loaded)

    def test_generic_maps(self):
        ws = Workspace()
        assert ws.map("A2", "transpose").owner is ws.tower("A2")
        with pytest.raises(UnknownName):
            ws.map("A2", "ad_xd")

    def test_parse_weight(self):
        assert parse_weight("(1, 1/2)", Ambient.multiplicative(2)) == (1, 0.5)
        assert parse_weight("-3", Ambient.additive(1)) == (-3,)
        with pytest.raises(ParseError):
            parse_weight("(a, b)", Ambient.additive(2))
