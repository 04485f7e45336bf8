import io
import json

import pytest

from teledepth.circuit import Circuit, deserialize, serialize
from teledepth.cli import (
    EXIT_OK,
    EXIT_RESOURCE_CAP,
    EXIT_USAGE,
    EXIT_VERIFY_FAIL,
    main,
)


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


class TestSynth:
    def test_writes_circuit_and_manifest(self, tmp_path):
        out = tmp_path / "mct8.json"
        code, _ = run_cli("synth", "-n", "7", "--out", str(out))
        assert code == EXIT_OK
        circuit = deserialize(out.read_text())
        from teledepth.circuit import toffoli_count, toffoli_depth
        assert toffoli_depth(circuit) == 1
        assert toffoli_count(circuit) == 6
        assert len(circuit.ancilla_qubits()) == 10
        manifest = json.loads((tmp_path / "mct8.json.manifest.json").read_text())
        assert manifest["command"] == "synth"
        assert "mct8.json" in manifest["outputs"]

    def test_stdout_mode(self):
        code, text = run_cli("synth", "-n", "3")
        assert code == EXIT_OK
        deserialize(text)

    def test_no_defer_keeps_depth(self):
        code, text = run_cli("synth", "-n", "4", "--no-defer")
        from teledepth.circuit import toffoli_depth
        assert code == EXIT_OK
        assert toffoli_depth(deserialize(text)) == 2

    def test_layout_flag(self):
        code, text = run_cli("synth", "-n", "4", "--layout")
        circuit = deserialize(text)
        for op in circuit.ops:
            if op.is_toffoli:
                lo = min(op.qubits)
                assert sorted(op.qubits) == [lo, lo + 1, lo + 2]

    def test_invalid_n_is_usage_error(self):
        code, _ = run_cli("synth", "-n", "1")
        assert code == EXIT_USAGE

    def test_missing_subcommand_is_usage_error(self):
        code, _ = run_cli()
        assert code == EXIT_USAGE


class TestVerify:
    def synth_file(self, tmp_path, n):
        out = tmp_path / f"mct{n}.json"
        run_cli("synth", "-n", str(n), "--out", str(out))
        return out

    def test_pass(self, tmp_path):
        path = self.synth_file(tmp_path, 4)
        code, text = run_cli("verify", str(path), "-n", "4")
        assert code == EXIT_OK
        assert "all match" in text

    def test_sampled_branches(self, tmp_path):
        path = self.synth_file(tmp_path, 5)
        code, text = run_cli("verify", str(path), "-n", "5",
                             "--branches", "sample:8")
        assert code == EXIT_OK
        assert "8 sampled branches" in text

    def test_mutated_circuit_fails(self, tmp_path):
        path = self.synth_file(tmp_path, 3)
        circuit = deserialize(path.read_text())
        idx = next(i for i, op in enumerate(circuit.ops)
                   if op.is_gate and op.condition is not None)
        mutated = Circuit(circuit.qubits, circuit.cbits,
                          circuit.ops[:idx] + circuit.ops[idx + 1:])
        path.write_text(serialize(mutated))
        code, text = run_cli("verify", str(path), "-n", "3")
        assert code == EXIT_VERIFY_FAIL
        assert "MISMATCH" in text

    def test_missing_file_is_usage_error(self, tmp_path):
        code, _ = run_cli("verify", str(tmp_path / "nope.json"), "-n", "3")
        assert code == EXIT_USAGE

    def test_n_mismatch_is_usage_error(self, tmp_path):
        path = self.synth_file(tmp_path, 3)
        code, _ = run_cli("verify", str(path), "-n", "6")
        assert code == EXIT_USAGE

    def test_bad_branches_value(self, tmp_path):
        path = self.synth_file(tmp_path, 3)
        code, _ = run_cli("verify", str(path), "-n", "3", "--branches", "lots")
        assert code == EXIT_USAGE


class TestSweep:
    def test_csv_row_count(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _ = run_cli("sweep", "-n", "2", "--grid", "2", "--shots", "2",
                          "--seed", "7", "--out", str(out))
        assert code == EXIT_OK
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 1 + 4

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli("sweep", "-n", "2", "--grid", "2", "--shots", "3", "--seed", "9",
                "--out", str(a))
        run_cli("sweep", "-n", "2", "--grid", "2", "--shots", "3", "--seed", "9",
                "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        ma = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        mb = json.loads((tmp_path / "b.csv.manifest.json").read_text())
        assert ma["outputs"]["a.csv"] == mb["outputs"]["b.csv"]

    def test_manifest_digest_matches_file(self, tmp_path):
        import hashlib
        out = tmp_path / "sweep.csv"
        run_cli("sweep", "-n", "2", "--grid", "2", "--shots", "2", "--seed", "1",
                "--out", str(out))
        manifest = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
        assert manifest["outputs"]["sweep.csv"] == \
            hashlib.sha256(out.read_bytes()).hexdigest()
        assert manifest["seed"] == 1

    def test_resource_cap_exit_code(self, monkeypatch):
        monkeypatch.setenv("TELEDEPTH_MAX_QUBITS", "10")
        code, _ = run_cli("sweep", "-n", "7", "--grid", "2", "--shots", "1")
        assert code == EXIT_RESOURCE_CAP


class TestCompareAndApps:
    def test_compare_table(self, tmp_path):
        out = tmp_path / "cmp.csv"
        code, _ = run_cli("compare", "--n-max", "20", "--out", str(out))
        assert code == EXIT_OK
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 1 + 19 * 5

    def test_apps_adder_verified(self, tmp_path):
        out = tmp_path / "adder.json"
        code, text = run_cli("apps", "adder", "-q", "4", "--strategy", "teleport",
                             "--out", str(out))
        assert code == EXIT_OK
        assert "all match" in text
        deserialize(out.read_text())

    def test_apps_qrom_worked_example(self):
        code, text = run_cli("apps", "qrom", "--address", "000", "--word", "101")
        assert code == EXIT_OK
        assert "all match" in text

    def test_apps_neuron_and_rule(self):
        assert run_cli("apps", "neuron", "--features", "3")[0] == EXIT_OK
        assert run_cli("apps", "rule", "--pattern", "010")[0] == EXIT_OK

    def test_apps_adder_depth_table(self, tmp_path):
        out = tmp_path / "depths.csv"
        code, _ = run_cli("apps", "adder", "-q", "3", "--depth-table", "6",
                          "--out", str(out))
        assert code == EXIT_OK
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 1 + 4

    def test_apps_usage_errors(self):
        assert run_cli("apps", "adder", "-q", "1")[0] == EXIT_USAGE
        assert run_cli("apps", "qrom", "--address", "0x0", "--word", "101")[0] \
            == EXIT_USAGE
