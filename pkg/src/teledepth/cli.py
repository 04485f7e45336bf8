"""Command-line interface: synthesis, verification, noise sweeps, cost
tables, and application builders.

Every file-producing run also writes a JSON manifest (command, parameters,
seed, version, sha256 digests of outputs) so artifacts are reproducible
from the manifest alone. Exit codes: 0 success, 1 verification failure,
2 usage error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .applications import (
    AdderSpec,
    QromWordSpec,
    RuleSpec,
    adder_depth_table,
    adder_table_to_csv,
    build_adder,
    build_decision_rule,
    build_neuron,
    build_qrom_word,
    increment_permutation,
    indicator_permutation,
    qrom_permutation,
)
from .circuit import (
    ParseError,
    deserialize,
    resource_counts,
    serialize,
    toffoli_count,
    toffoli_depth,
)
from .comparisons import comparison_table, table_to_csv
from .decompose import decompose_mct, defer_corrections, neighbor_layout
from .fidelity import (
    GridSpec,
    ResourceCapError,
    run_sweep,
    to_csv,
    verify_mct_circuit,
    verify_permutation,
)
from .simulate import max_qubits

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE_CAP = 3

_STRATEGY_ALIASES = {"unitary": "mct_unitary", "teleport": "mct_teleportation",
                     "mct_unitary": "mct_unitary",
                     "mct_teleportation": "mct_teleportation"}


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_output(path: Path, text: str) -> tuple[str, str]:
    path.write_text(text, encoding="utf-8", newline="")
    return path.name, _sha256(text.encode("utf-8"))


def _write_manifest(out: Path, command: str, params: dict, seed: int | None,
                    digests: dict[str, str]) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "seed": seed,
        "version": __version__,
        "outputs": digests,
    }
    path = out.with_name(out.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n",
                    encoding="utf-8", newline="")


def _parse_branches(value: str) -> tuple[bool | None, int | None]:
    """'auto' | 'exhaustive' | 'sample:K' | integer K -> (exhaustive, branches)."""
    if value == "auto":
        return None, None
    if value == "exhaustive":
        return True, None
    if value.startswith("sample:"):
        value = value.split(":", 1)[1]
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected 'auto', 'exhaustive', 'sample:K', or an integer, got {value!r}")
    if k < 1:
        raise argparse.ArgumentTypeError("sample count must be positive")
    return False, k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teledepth",
        description="Teleportation-based unit-Toffoli-depth synthesis toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="decompose a multi-controlled Toffoli")
    p.add_argument("-n", type=int, required=True, help="number of controls (>= 2)")
    defer = p.add_mutually_exclusive_group()
    defer.add_argument("--defer", dest="defer", action="store_true", default=True,
                       help="defer corrections to unit Toffoli depth (default)")
    defer.add_argument("--no-defer", dest="defer", action="store_false")
    p.add_argument("--layout", action="store_true",
                   help="relabel qubits so each Toffoli is on consecutive indices")
    p.add_argument("--out", type=Path, help="circuit file (default: stdout)")

    p = sub.add_parser("verify", help="check a circuit file against the MCT oracle")
    p.add_argument("circuit", type=Path)
    p.add_argument("-n", type=int, required=True, help="number of controls")
    p.add_argument("--branches", type=str, default="auto",
                   help="'auto', 'exhaustive', 'sample:K', or an integer K")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep", help="noise sweep with process-fidelity bounds")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--grid", type=int, default=19, help="points per axis (default 19)")
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--linear", action="store_true",
                   help="linear instead of log-spaced rate grid")
    p.add_argument("--out", type=Path, help="CSV file (default: stdout)")

    p = sub.add_parser("compare", help="cost table across decomposition methods")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--out", type=Path, help="CSV file (default: stdout)")

    p = sub.add_parser("apps", help="application circuit builders")
    apps = p.add_subparsers(dest="app", required=True)

    a = apps.add_parser("adder", help="increment-by-one register adder")
    a.add_argument("-q", type=int, required=True, help="register width")
    a.add_argument("--strategy", choices=sorted(_STRATEGY_ALIASES), default="unitary")
    a.add_argument("--out", type=Path)
    a.add_argument("--depth-table", type=int, metavar="QMAX",
                   help="emit the per-width depth table up to QMAX instead")

    a = apps.add_parser("qrom", help="single-word lookup")
    a.add_argument("--address", required=True)
    a.add_argument("--word", required=True)
    a.add_argument("--strategy", choices=sorted(_STRATEGY_ALIASES), default="unitary")
    a.add_argument("--out", type=Path)

    a = apps.add_parser("neuron", help="conjunction neuron")
    a.add_argument("--features", type=int, required=True)
    a.add_argument("--strategy", choices=sorted(_STRATEGY_ALIASES), default="unitary")
    a.add_argument("--out", type=Path)

    a = apps.add_parser("rule", help="pattern-matching decision rule")
    a.add_argument("--pattern", required=True)
    a.add_argument("--strategy", choices=sorted(_STRATEGY_ALIASES), default="unitary")
    a.add_argument("--out", type=Path)
    return parser


def _emit(args, text: str, command: str, params: dict, seed: int | None,
          stdout) -> None:
    if args.out is None:
        stdout.write(text)
        return
    name, digest = _write_output(args.out, text)
    _write_manifest(args.out, command, params, seed, {name: digest})


def _metrics_line(circuit) -> str:
    rc = resource_counts(circuit)
    return (f"qubits={circuit.num_qubits} toffoli_depth={toffoli_depth(circuit)} "
            f"toffoli_count={toffoli_count(circuit)} ancillas={rc['ancillas']} "
            f"bell_pairs={rc['bell_pairs']} "
            f"measurements={rc['measurements_z'] + rc['measurements_x']}")


def cmd_synth(args, stdout) -> int:
    if args.n < 2:
        print(f"error: -n must be >= 2, got {args.n}", file=sys.stderr)
        return EXIT_USAGE
    circuit = decompose_mct(args.n)
    if args.defer:
        circuit = defer_corrections(circuit)
    if args.layout:
        circuit = neighbor_layout(circuit)
    text = serialize(circuit)
    params = {"n": args.n, "defer": args.defer, "layout": args.layout}
    _emit(args, text, "synth", params, None, stdout)
    print(_metrics_line(circuit), file=sys.stderr if args.out is None else sys.stdout)
    return EXIT_OK


def cmd_verify(args, stdout) -> int:
    try:
        circuit = deserialize(args.circuit.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read {args.circuit}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"error: {args.circuit}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if len(circuit.data_qubits()) != args.n + 1:
        print(f"error: circuit has {len(circuit.data_qubits())} data qubits, "
              f"but -n {args.n} implies {args.n + 1}", file=sys.stderr)
        return EXIT_USAGE
    try:
        exhaustive, branches = _parse_branches(args.branches)
    except argparse.ArgumentTypeError as exc:
        print(f"error: --branches: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = verify_mct_circuit(circuit, args.n, branches=branches,
                                exhaustive=exhaustive, seed=args.seed)
    stdout.write(report.summary() + "\n")
    return EXIT_OK if report.ok else EXIT_VERIFY_FAIL


def cmd_sweep(args, stdout) -> int:
    if args.grid < 1:
        print("error: --grid must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    grid = GridSpec(divisions=args.grid - 1, linear=args.linear)
    try:
        result = run_sweep(args.n, grid, args.shots, args.seed)
    except ResourceCapError as exc:
        print(f"error: {exc} (cap {max_qubits()} qubits; override with "
              f"TELEDEPTH_MAX_QUBITS)", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    text = to_csv(result)
    params = {"n": args.n, "grid": args.grid, "shots": args.shots,
              "linear": args.linear}
    _emit(args, text, "sweep", params, args.seed, stdout)
    return EXIT_OK


def cmd_compare(args, stdout) -> int:
    if args.n_max < 2:
        print("error: --n-max must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    text = table_to_csv(comparison_table(range(2, args.n_max + 1)))
    _emit(args, text, "compare", {"n_max": args.n_max}, None, stdout)
    return EXIT_OK


def _verifiable(circuit) -> bool:
    return (circuit.num_qubits <= max_qubits()
            and len(circuit.measurement_cbits()) <= 8
            and len(circuit.data_qubits()) <= 8)


def _app_verify(circuit, perm, stdout) -> int:
    if not _verifiable(circuit):
        stdout.write("verification skipped (instance too large for exhaustive "
                     "branch check)\n")
        return EXIT_OK
    report = verify_permutation(circuit, perm)
    stdout.write(report.summary() + "\n")
    return EXIT_OK if report.ok else EXIT_VERIFY_FAIL


def cmd_apps(args, stdout) -> int:
    strategy = _STRATEGY_ALIASES[args.strategy] if hasattr(args, "strategy") else None
    try:
        if args.app == "adder":
            if args.depth_table is not None:
                if args.depth_table < 3:
                    print("error: --depth-table needs QMAX >= 3", file=sys.stderr)
                    return EXIT_USAGE
                text = adder_table_to_csv(adder_depth_table(range(3, args.depth_table + 1)))
                _emit(args, text, "apps adder --depth-table",
                      {"q_max": args.depth_table}, None, stdout)
                return EXIT_OK
            circuit = build_adder(AdderSpec(args.q, strategy))
            perm = increment_permutation(args.q)
            params = {"q": args.q, "strategy": strategy}
        elif args.app == "qrom":
            spec = QromWordSpec(args.address, args.word, strategy)
            circuit = build_qrom_word(spec)
            perm = qrom_permutation(spec)
            params = {"address": args.address, "word": args.word,
                      "strategy": strategy}
        elif args.app == "neuron":
            circuit = build_neuron(args.features, strategy)
            perm = indicator_permutation("1" * args.features)
            params = {"features": args.features, "strategy": strategy}
        else:
            spec = RuleSpec(args.pattern, strategy)
            circuit = build_decision_rule(spec)
            perm = indicator_permutation(spec.pattern)
            params = {"pattern": args.pattern, "strategy": strategy}
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(args, serialize(circuit), f"apps {args.app}", params, None, stdout)
    print(_metrics_line(circuit), file=sys.stderr if args.out is None else sys.stdout)
    return _app_verify(circuit, perm, stdout)


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    handler = {"synth": cmd_synth, "verify": cmd_verify, "sweep": cmd_sweep,
               "compare": cmd_compare, "apps": cmd_apps}[args.command]
    return handler(args, stdout)


if __name__ == "__main__":
    sys.exit(main())
