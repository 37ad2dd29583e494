import json
import subprocess
import sys

import pytest

from loadsmith.cli import main
from loadsmith.ingest import parse_delivery, write_delivery_json, write_delivery_yaml
from loadsmith.evalkit import generate_fixture
from loadsmith.model import Component, ComponentSet, LoadCase, LoadsDelivery, SI_UNITS, UnitSystem
from loadsmith.transform import apply_ultimate_factor, convert_units, rename_points, scale_component

POINTS = ["bearing", "lug_left", "lug_right", "nozzle"]


@pytest.fixture
def delivery_file(tmp_path):
    d = generate_fixture(21, 12, POINTS, 3, units=UnitSystem("klbf", "klbf·in"))
    path = tmp_path / "delivery.json"
    path.write_text(write_delivery_json(d), encoding="utf-8")
    return path, d


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConvert:
    def test_yaml_to_json_round_trip(self, tmp_path, capsys, delivery_file):
        path, d = delivery_file
        yaml_path = tmp_path / "delivery.yaml"
        yaml_path.write_text(write_delivery_yaml(d), encoding="utf-8")
        out_path = tmp_path / "converted.json"
        code, out, _ = run_cli(capsys, "convert", str(yaml_path), "--to", "json", "--out", str(out_path))
        assert code == 0
        assert json.loads(out)["written"] == str(out_path)
        assert parse_delivery(out_path.read_text()) == d

    def test_json_to_yaml(self, tmp_path, capsys, delivery_file):
        path, d = delivery_file
        out_path = tmp_path / "converted.yaml"
        code, _, _ = run_cli(capsys, "convert", str(path), "--to", "yaml", "--out", str(out_path))
        assert code == 0
        assert parse_delivery(out_path.read_text()) == d

    def test_trace_sidecar_written(self, tmp_path, capsys, delivery_file):
        path, _ = delivery_file
        out_path = tmp_path / "c.json"
        run_cli(capsys, "convert", str(path), "--to", "json", "--out", str(out_path))
        trace = tmp_path / "c.json.trace.ndjson"
        events = [json.loads(line) for line in trace.read_text().splitlines()]
        assert {e["event"] for e in events} >= {"invocation", "input", "output"}

    def test_missing_input_is_infrastructure(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "convert", str(tmp_path / "gone.json"), "--to", "json",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 4
        assert json.loads(err)["error"]["code"] == "FILE_NOT_FOUND"


class TestValidate:
    def test_ok_delivery(self, capsys, delivery_file):
        path, _ = delivery_file
        code, out, _ = run_cli(capsys, "validate", str(path))
        assert code == 0
        report = json.loads(out)
        assert report["ok"]
        assert report["findings"][0]["code"] == "NON_SI_UNITS"

    def test_mismatched_point_sets_exit_2(self, tmp_path, capsys):
        d = LoadsDelivery(
            name="bad", version=1, units=SI_UNITS,
            cases=(
                LoadCase(id=1, loads={"a": ComponentSet()}),
                LoadCase(id=2, loads={"b": ComponentSet()}),
            ),
        )
        path = tmp_path / "bad.json"
        path.write_text(write_delivery_json(d), encoding="utf-8")
        code, out, _ = run_cli(capsys, "validate", str(path))
        assert code == 2
        assert not json.loads(out)["ok"]

    def test_schema_error_exit_2_with_json_error(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"name": "x"}', encoding="utf-8")
        code, _, err = run_cli(capsys, "validate", str(path))
        assert code == 2
        assert json.loads(err)["error"]["code"] == "SCHEMA_ERROR"


class TestTransform:
    def test_documented_order_matches_manual_composition(self, tmp_path, capsys, delivery_file):
        path, d = delivery_file
        out_path = tmp_path / "transformed.json"
        code, out, _ = run_cli(
            capsys, "transform", str(path),
            "--rename", "lug_left=lug_port",
            "--rename", "lug_right=lug_starboard",
            "--scale", "FX=1.04",
            "--units", "N,N·m",
            "--ultimate-factor", "1.5",
            "--out", str(out_path),
        )
        assert code == 0
        assert json.loads(out)["rename_count"] == 2 * len(d.cases)

        manual, _ = rename_points(d, {"lug_left": "lug_port", "lug_right": "lug_starboard"})
        manual = scale_component(manual, Component.FX, 1.04)
        manual = convert_units(manual, SI_UNITS)
        manual = apply_ultimate_factor(manual, 1.5)
        assert parse_delivery(out_path.read_text()) == manual

    def test_bad_scale_spec_is_usage_error(self, tmp_path, capsys, delivery_file):
        path, _ = delivery_file
        code, _, err = run_cli(
            capsys, "transform", str(path), "--scale", "FX:1.04",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 1
        assert json.loads(err)["error"]["code"] == "USAGE"

    def test_unknown_component_usage_error(self, tmp_path, capsys, delivery_file):
        path, _ = delivery_file
        code, _, _ = run_cli(
            capsys, "transform", str(path), "--scale", "QQ=2",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 1


class TestEquilibrium:
    def test_balanced_exit_0(self, tmp_path, capsys):
        d = generate_fixture(31, 10, POINTS, 2, balanced=True)
        path = tmp_path / "d.json"
        path.write_text(write_delivery_json(d), encoding="utf-8")
        code, out, _ = run_cli(capsys, "equilibrium", str(path))
        assert code == 0
        assert json.loads(out)["all_balanced"]

    def test_unbalanced_exit_2(self, capsys, tmp_path, delivery_file):
        path, _ = delivery_file
        code, out, _ = run_cli(capsys, "equilibrium", str(path))
        assert code == 2
        assert not json.loads(out)["all_balanced"]

    def test_config_supplies_tolerances(self, tmp_path, capsys, delivery_file):
        path, _ = delivery_file
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"tolerances": {"abs": 1e9, "rel": 1.0}}))
        code, out, _ = run_cli(capsys, "equilibrium", str(path), "--config", str(config))
        assert code == 0  # absurdly loose tolerance from config

    def test_coords_file(self, tmp_path, capsys):
        case = LoadCase(
            id=1, loads={"a": ComponentSet(fy=10.0), "b": ComponentSet(fy=-10.0, mz=-10.0)}
        )
        d = LoadsDelivery(name="m", version=1, units=SI_UNITS, cases=(case,))
        path = tmp_path / "d.json"
        path.write_text(write_delivery_json(d), encoding="utf-8")
        coords = tmp_path / "coords.json"
        coords.write_text(json.dumps({"a": [1.0, 0.0, 0.0], "b": [0.0, 0.0, 0.0]}))
        code, out, _ = run_cli(capsys, "equilibrium", str(path), "--coords", str(coords))
        assert code == 0
        assert json.loads(out)["cases"][0]["moment_residual"] == [0.0, 0.0, 0.0]


class TestEnvelope:
    def test_writes_outputs_and_prints_ids(self, tmp_path, capsys, delivery_file):
        path, d = delivery_file
        out_dir = tmp_path / "envelope_out"
        code, out, _ = run_cli(capsys, "envelope", str(path), "--out-dir", str(out_dir))
        assert code == 0
        summary = json.loads(out)
        assert len(summary["selected_case_ids"]) == 3
        assert (out_dir / "envelope.md").exists()
        assert (out_dir / "envelope_extremes.json").exists()
        assert (out_dir / "trace.ndjson").exists()

    def test_out_dir_env_override(self, tmp_path, capsys, monkeypatch, delivery_file):
        path, _ = delivery_file
        monkeypatch.setenv("LOADSMITH_OUT_DIR", str(tmp_path / "from_env"))
        code, _, _ = run_cli(capsys, "envelope", str(path))
        assert code == 0
        assert (tmp_path / "from_env" / "envelope.md").exists()

    def test_missing_out_dir_usage_error(self, capsys, monkeypatch, delivery_file):
        path, _ = delivery_file
        monkeypatch.delenv("LOADSMITH_OUT_DIR", raising=False)
        code, _, _ = run_cli(capsys, "envelope", str(path))
        assert code == 1


class TestExportAnsys:
    def test_writes_selected_decks(self, tmp_path, capsys, delivery_file):
        path, d = delivery_file
        node_map = tmp_path / "nodes.json"
        node_map.write_text(json.dumps({p: 1000 + i for i, p in enumerate(POINTS)}))
        out_dir = tmp_path / "decks"
        ids = ",".join(str(c.id) for c in d.cases[:2])
        code, out, _ = run_cli(
            capsys, "export-ansys", str(path), "--select", ids,
            "--node-map", str(node_map), "--out-dir", str(out_dir),
        )
        assert code == 0
        written = json.loads(out)["written"]
        assert len(written) == 2
        assert all("limit_load_" in w for w in written)

    def test_exclude_point(self, tmp_path, capsys, delivery_file):
        path, d = delivery_file
        node_map = tmp_path / "nodes.json"
        node_map.write_text(json.dumps({p: 1000 + i for i, p in enumerate(POINTS)}))
        out_dir = tmp_path / "decks"
        code, out, _ = run_cli(
            capsys, "export-ansys", str(path), "--select", str(d.cases[0].id),
            "--node-map", str(node_map), "--exclude", "bearing",
            "--out-dir", str(out_dir),
        )
        assert code == 0
        deck = (out_dir / f"limit_load_{d.cases[0].id}.inp").read_text()
        assert ",1000," not in deck

    def test_node_map_required(self, tmp_path, capsys, delivery_file):
        path, _ = delivery_file
        code, _, _ = run_cli(
            capsys, "export-ansys", str(path), "--select", "1",
            "--out-dir", str(tmp_path / "decks"),
        )
        assert code == 1


class TestCompare:
    def make_extremes(self, tmp_path, capsys, delivery_file, scale=None):
        path, d = delivery_file
        out_dir = tmp_path / f"env_{scale or 'base'}"
        src = path
        if scale is not None:
            scaled = apply_ultimate_factor(d, scale)
            src = tmp_path / f"scaled_{scale}.json"
            src.write_text(write_delivery_json(scaled), encoding="utf-8")
        run_cli(capsys, "envelope", str(src), "--out-dir", str(out_dir))
        return out_dir / "envelope_extremes.json"

    def test_exceedance_exit_3(self, tmp_path, capsys, delivery_file):
        old = self.make_extremes(tmp_path, capsys, delivery_file)
        new = self.make_extremes(tmp_path, capsys, delivery_file, scale=1.2)
        out = tmp_path / "cmp.json"
        code, outtext, _ = run_cli(capsys, "compare", str(new), str(old), "--out", str(out))
        assert code == 3
        assert json.loads(outtext)["new_exceeds_old"]
        assert out.exists()
        assert out.with_suffix(".md").exists()

    def test_identity_exit_0(self, tmp_path, capsys, delivery_file):
        old = self.make_extremes(tmp_path, capsys, delivery_file)
        out = tmp_path / "cmp.json"
        code, outtext, _ = run_cli(capsys, "compare", str(old), str(old), "--out", str(out))
        assert code == 0
        assert not json.loads(outtext)["new_exceeds_old"]

    def test_widen_tol_suppresses_exceedance(self, tmp_path, capsys, delivery_file):
        old = self.make_extremes(tmp_path, capsys, delivery_file)
        new = self.make_extremes(tmp_path, capsys, delivery_file, scale=1.2)
        code, outtext, _ = run_cli(
            capsys, "compare", str(new), str(old),
            "--out", str(tmp_path / "cmp.json"), "--widen-tol", "1e9",
        )
        assert code == 0
        assert not json.loads(outtext)["new_exceeds_old"]


class TestEval:
    def test_passk_prints_29(self, capsys):
        code, out, _ = run_cli(capsys, "eval", "passk", "--p", "0.9", "--alpha", "0.05")
        assert code == 0
        assert out.strip() == "29"

    def test_passk_other_rows(self, capsys):
        for p, expected in ((0.5, "5"), (0.99, "299")):
            code, out, _ = run_cli(capsys, "eval", "passk", "--p", str(p))
            assert code == 0
            assert out.strip() == expected

    def test_run_copy_scenario(self, tmp_path, capsys):
        scenario_dir = tmp_path / "s"
        scenario_dir.mkdir()
        (scenario_dir / "payload.txt").write_text("data\n")
        (scenario_dir / "ref.txt").write_text("data\n")
        scenario = {
            "id": "cli-copy",
            "k": 2,
            "environment": {
                "stage": [{"source": "payload.txt", "dest": "payload.txt"}],
                "subject_command": [
                    "{python}", "-c", "import shutil; shutil.copyfile('payload.txt', 'o.txt')",
                ],
            },
            "checks": [{"kind": "text_golden", "actual": "o.txt", "reference": "ref.txt"}],
        }
        spath = scenario_dir / "scenario.json"
        spath.write_text(json.dumps(scenario))
        code, out, _ = run_cli(
            capsys, "eval", "run", str(spath), "--out-dir", str(tmp_path / "runs")
        )
        assert code == 0
        summary = json.loads(out)[0]
        assert summary["pass_hat_k"] and summary["passes"] == 2

    def test_run_failing_scenario_exit_2(self, tmp_path, capsys):
        scenario_dir = tmp_path / "s"
        scenario_dir.mkdir()
        (scenario_dir / "ref.txt").write_text("expected\n")
        scenario = {
            "id": "cli-fail",
            "k": 1,
            "environment": {
                "stage": [],
                "subject_command": ["{python}", "-c", "open('o.txt','w').write('nope\\n')"],
            },
            "checks": [{"kind": "text_golden", "actual": "o.txt", "reference": "ref.txt"}],
        }
        spath = scenario_dir / "scenario.json"
        spath.write_text(json.dumps(scenario))
        code, _, _ = run_cli(capsys, "eval", "run", str(spath), "--out-dir", str(tmp_path / "runs"))
        assert code == 2


class TestUsageAndErrors:
    def test_unknown_subcommand_exit_1(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 1
        assert json.loads(err)["error"]["code"] == "USAGE"

    def test_rerun_byte_identical_outputs(self, tmp_path, capsys, delivery_file):
        path, _ = delivery_file
        for attempt in ("one", "two"):
            run_cli(capsys, "envelope", str(path), "--out-dir", str(tmp_path / attempt))
        assert (tmp_path / "one" / "envelope.md").read_bytes() == (
            tmp_path / "two" / "envelope.md"
        ).read_bytes()
        assert (tmp_path / "one" / "envelope_extremes.json").read_bytes() == (
            tmp_path / "two" / "envelope_extremes.json"
        ).read_bytes()

    def test_console_entry_point_subprocess(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "loadsmith", "eval", "passk", "--p", "0.9"],
            capture_output=True, text=True, timeout=60,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "29"
