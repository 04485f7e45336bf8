"""Circuit intermediate representation with classical feedforward.

A circuit is an ordered list of operations over a qubit registry and a
classical-bit registry. Gates may carry a classical condition (XOR of
previously produced bits). Measured qubits are never reused; there is no
reset operation.

Index convention used throughout the package: qubit ``q`` corresponds to
bit ``q`` of a basis-state index (qubit 0 is the least significant bit).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum


class QubitKind(str, Enum):
    CONTROL = "control"
    TARGET = "target"
    ANCILLA = "ancilla"


class BitOrigin(str, Enum):
    Z_MEASUREMENT = "z-measurement"
    X_MEASUREMENT = "x-measurement"
    DERIVED_XOR = "derived-xor"


@dataclass(frozen=True)
class Qubit:
    index: int
    kind: QubitKind


@dataclass(frozen=True)
class ClassicalBit:
    index: int
    origin: BitOrigin


@dataclass(frozen=True)
class Condition:
    """XOR-of-bits condition: satisfied iff XOR(terms) XOR parity == 1."""

    terms: frozenset[int]
    parity: int = 0

    def __post_init__(self):
        object.__setattr__(self, "terms", frozenset(self.terms))
        if self.parity not in (0, 1):
            raise ValueError(f"parity must be 0 or 1, got {self.parity}")

    def value(self, bits: dict[int, int]) -> int:
        v = self.parity
        for t in self.terms:
            v ^= bits[t]
        return v

    def satisfied(self, bits: dict[int, int]) -> bool:
        return self.value(bits) == 1


class OpKind(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    CX = "cx"
    CZ = "cz"
    CCX = "ccx"
    CCZ = "ccz"
    BELL_PREP = "bell_prep"
    MEASURE_Z = "measure_z"
    MEASURE_X = "measure_x"
    XOR = "xor"


GATE_KINDS = frozenset({
    OpKind.X, OpKind.Y, OpKind.Z, OpKind.H, OpKind.S, OpKind.SDG,
    OpKind.CX, OpKind.CZ, OpKind.CCX, OpKind.CCZ,
})
TOFFOLI_KINDS = frozenset({OpKind.CCX, OpKind.CCZ})

ARITY = {
    OpKind.X: 1, OpKind.Y: 1, OpKind.Z: 1, OpKind.H: 1,
    OpKind.S: 1, OpKind.SDG: 1,
    OpKind.CX: 2, OpKind.CZ: 2,
    OpKind.CCX: 3, OpKind.CCZ: 3,
    OpKind.BELL_PREP: 2,
    OpKind.MEASURE_Z: 1, OpKind.MEASURE_X: 1,
    OpKind.XOR: 0,
}


@dataclass(frozen=True)
class Operation:
    """One circuit operation.

    ``cbit`` is the bit written by a measurement or by an XOR. ``condition``
    gates a quantum gate on classical bits; for an XOR operation the
    condition field carries the input expression whose value is written.
    """

    kind: OpKind
    qubits: tuple[int, ...] = ()
    cbit: int | None = None
    condition: Condition | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))

    @property
    def is_gate(self) -> bool:
        return self.kind in GATE_KINDS

    @property
    def is_toffoli(self) -> bool:
        return self.kind in TOFFOLI_KINDS

    @property
    def is_measurement(self) -> bool:
        return self.kind in (OpKind.MEASURE_Z, OpKind.MEASURE_X)


@dataclass
class Circuit:
    """Immutable-by-convention ordered operation list plus registries."""

    qubits: tuple[Qubit, ...]
    cbits: tuple[ClassicalBit, ...]
    ops: tuple[Operation, ...]
    name: str = ""
    source: str = field(default="synthesized", compare=False)
    # Populated by neighbor_layout: mapping old index -> new index.
    layout_permutation: dict[int, int] | None = field(default=None, compare=False)

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def data_qubits(self) -> list[int]:
        """Non-ancilla qubit indices in ascending order."""
        return sorted(q.index for q in self.qubits if q.kind != QubitKind.ANCILLA)

    def ancilla_qubits(self) -> list[int]:
        return sorted(q.index for q in self.qubits if q.kind == QubitKind.ANCILLA)

    def measurement_cbits(self) -> list[int]:
        """Bits produced by physical measurements, in circuit order."""
        return [op.cbit for op in self.ops if op.is_measurement]


class CircuitBuilder:
    """Append-only constructor for circuits."""

    def __init__(self, name: str = ""):
        self.name = name
        self._qubits: list[Qubit] = []
        self._cbits: list[ClassicalBit] = []
        self._ops: list[Operation] = []

    def add_qubit(self, kind: QubitKind) -> int:
        idx = len(self._qubits)
        self._qubits.append(Qubit(idx, kind))
        return idx

    def add_qubits(self, kind: QubitKind, count: int) -> list[int]:
        return [self.add_qubit(kind) for _ in range(count)]

    def add_cbit(self, origin: BitOrigin) -> int:
        idx = len(self._cbits)
        self._cbits.append(ClassicalBit(idx, origin))
        return idx

    def append(self, op: Operation) -> None:
        self._ops.append(op)

    def extend(self, ops) -> None:
        self._ops.extend(ops)

    def gate(self, kind: OpKind, qubits, condition: Condition | None = None) -> None:
        self.append(Operation(kind, tuple(qubits), condition=condition))

    def bell_prep(self, a: int, b: int) -> None:
        self.append(Operation(OpKind.BELL_PREP, (a, b)))

    def measure_z(self, q: int) -> int:
        c = self.add_cbit(BitOrigin.Z_MEASUREMENT)
        self.append(Operation(OpKind.MEASURE_Z, (q,), cbit=c))
        return c

    def measure_x(self, q: int) -> int:
        c = self.add_cbit(BitOrigin.X_MEASUREMENT)
        self.append(Operation(OpKind.MEASURE_X, (q,), cbit=c))
        return c

    def xor(self, condition: Condition) -> int:
        c = self.add_cbit(BitOrigin.DERIVED_XOR)
        self.append(Operation(OpKind.XOR, (), cbit=c, condition=condition))
        return c

    def build(self, source: str = "synthesized") -> Circuit:
        return Circuit(tuple(self._qubits), tuple(self._cbits), tuple(self._ops),
                       name=self.name, source=source)


class InvalidCircuitError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


def validate(circuit: Circuit) -> list[str]:
    """Return all invariant violations; the circuit is valid iff empty."""
    errors: list[str] = []
    qidx = [q.index for q in circuit.qubits]
    if sorted(qidx) != list(range(len(qidx))):
        errors.append("qubit indices must be exactly 0..N-1 and unique")
    cidx = [c.index for c in circuit.cbits]
    if sorted(cidx) != list(range(len(cidx))):
        errors.append("classical bit indices must be exactly 0..M-1 and unique")
    known_q = set(qidx)
    known_c = set(cidx)

    measured: set[int] = set()
    written: set[int] = set()
    for pos, op in enumerate(circuit.ops):
        where = f"op {pos} ({op.kind.value})"
        if op.kind not in ARITY:
            errors.append(f"{where}: unknown operation kind")
            continue
        if len(op.qubits) != ARITY[op.kind]:
            errors.append(f"{where}: arity error, expected {ARITY[op.kind]} qubits,"
                          f" got {len(op.qubits)}")
        if len(set(op.qubits)) != len(op.qubits):
            errors.append(f"{where}: qubit arguments must be distinct")
        for q in op.qubits:
            if q not in known_q:
                errors.append(f"{where}: unknown qubit {q}")
            elif q in measured:
                errors.append(f"{where}: use-after-measure on qubit {q}")
        if op.is_measurement:
            if op.cbit is None:
                errors.append(f"{where}: measurement must write a classical bit")
            for q in op.qubits:
                measured.add(q)
        if op.cbit is not None:
            if not (op.is_measurement or op.kind is OpKind.XOR):
                errors.append(f"{where}: only measurements and xor write bits")
            elif op.cbit not in known_c:
                errors.append(f"{where}: unknown classical bit {op.cbit}")
            elif op.cbit in written:
                errors.append(f"{where}: classical bit {op.cbit} written twice")
            else:
                written.add(op.cbit)
        if op.condition is not None:
            if not (op.is_gate or op.kind is OpKind.XOR):
                errors.append(f"{where}: condition allowed on gates and xor only")
            if not op.condition.terms:
                errors.append(f"{where}: condition terms must be nonempty")
            for t in op.condition.terms:
                if t not in known_c:
                    errors.append(f"{where}: condition references unknown bit {t}")
                elif t not in written:
                    errors.append(f"{where}: condition references bit {t} "
                                  "not yet produced")
        if op.kind is OpKind.XOR and op.condition is None:
            errors.append(f"{where}: xor requires an input expression")
    return errors


def check_valid(circuit: Circuit) -> None:
    errors = validate(circuit)
    if errors:
        raise InvalidCircuitError(errors)


def _dependency_predecessors(ops: tuple[Operation, ...]):
    """For each op, the indices of its direct predecessors.

    Dependencies: previous op touching a shared qubit (per qubit, the
    closest one), and the producer of every classical bit consumed.
    """
    last_on_qubit: dict[int, int] = {}
    producer: dict[int, int] = {}
    preds: list[list[int]] = []
    for i, op in enumerate(ops):
        p = set()
        for q in op.qubits:
            if q in last_on_qubit:
                p.add(last_on_qubit[q])
            last_on_qubit[q] = i
        if op.condition is not None:
            for t in op.condition.terms:
                if t in producer:
                    p.add(producer[t])
        if op.cbit is not None:
            producer[op.cbit] = i
        preds.append(sorted(p))
    return preds


def toffoli_layers(circuit_or_ops) -> list[int]:
    """Greedy ASAP Toffoli layer per operation (0 for pre-Toffoli ops)."""
    ops = circuit_or_ops.ops if isinstance(circuit_or_ops, Circuit) else tuple(circuit_or_ops)
    preds = _dependency_predecessors(ops)
    layer = [0] * len(ops)
    for i, op in enumerate(ops):
        base = max((layer[j] for j in preds[i]), default=0)
        layer[i] = base + (1 if op.is_toffoli else 0)
    return layer


def toffoli_depth(circuit: Circuit) -> int:
    """Critical-path length counting only CCX/CCZ operations."""
    check_valid(circuit)
    layers = toffoli_layers(circuit)
    return max((l for l, op in zip(layers, circuit.ops) if op.is_toffoli), default=0)


def toffoli_count(circuit: Circuit) -> int:
    return sum(1 for op in circuit.ops if op.is_toffoli)


def resource_counts(circuit: Circuit) -> dict[str, int]:
    return {
        "ancillas": sum(1 for q in circuit.qubits if q.kind == QubitKind.ANCILLA),
        "bell_pairs": sum(1 for op in circuit.ops if op.kind is OpKind.BELL_PREP),
        "measurements_z": sum(1 for op in circuit.ops if op.kind is OpKind.MEASURE_Z),
        "measurements_x": sum(1 for op in circuit.ops if op.kind is OpKind.MEASURE_X),
        "conditional_gates": sum(1 for op in circuit.ops
                                 if op.is_gate and op.condition is not None),
    }


# ---------------------------------------------------------------------------
# Serialization (text format, version 1)
# ---------------------------------------------------------------------------

FORMAT_VERSION = 1


class ParseError(ValueError):
    pass


def _op_to_record(op: Operation) -> dict:
    rec: dict = {"op": op.kind.value, "qubits": list(op.qubits)}
    if op.cbit is not None:
        rec["cbit"] = op.cbit
    if op.condition is not None:
        rec["condition"] = {"terms": sorted(op.condition.terms),
                            "parity": op.condition.parity}
    return rec


def serialize(circuit: Circuit) -> str:
    check_valid(circuit)
    doc = {
        "version": FORMAT_VERSION,
        "name": circuit.name,
        "qubits": [{"index": q.index, "kind": q.kind.value} for q in circuit.qubits],
        "cbits": [{"index": c.index, "origin": c.origin.value} for c in circuit.cbits],
        "ops": [_op_to_record(op) for op in circuit.ops],
    }
    return json.dumps(doc, indent=1) + "\n"


def _require_fields(rec: dict, allowed: set[str], required: set[str], where: str):
    for k in rec:
        if k not in allowed:
            raise ParseError(f"{where}: unknown field '{k}'")
    for k in required:
        if k not in rec:
            raise ParseError(f"{where}: missing field '{k}'")


def deserialize(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    _require_fields(doc, {"version", "name", "qubits", "cbits", "ops"},
                    {"version", "qubits", "cbits", "ops"}, "header")
    if doc["version"] != FORMAT_VERSION:
        raise ParseError(f"header: unsupported version {doc['version']!r}")

    qubits = []
    for i, rec in enumerate(doc["qubits"]):
        where = f"qubits[{i}]"
        _require_fields(rec, {"index", "kind"}, {"index", "kind"}, where)
        try:
            kind = QubitKind(rec["kind"])
        except ValueError:
            raise ParseError(f"{where}: unknown qubit kind '{rec['kind']}'") from None
        qubits.append(Qubit(rec["index"], kind))

    cbits = []
    for i, rec in enumerate(doc["cbits"]):
        where = f"cbits[{i}]"
        _require_fields(rec, {"index", "origin"}, {"index", "origin"}, where)
        try:
            origin = BitOrigin(rec["origin"])
        except ValueError:
            raise ParseError(f"{where}: unknown bit origin '{rec['origin']}'") from None
        cbits.append(ClassicalBit(rec["index"], origin))

    ops = []
    for i, rec in enumerate(doc["ops"]):
        where = f"ops[{i}]"
        _require_fields(rec, {"op", "qubits", "cbit", "condition"},
                        {"op", "qubits"}, where)
        try:
            kind = OpKind(rec["op"])
        except ValueError:
            raise ParseError(f"{where}: unknown gate kind '{rec['op']}'") from None
        condition = None
        if "condition" in rec:
            crec = rec["condition"]
            _require_fields(crec, {"terms", "parity"}, {"terms", "parity"},
                            f"{where}.condition")
            condition = Condition(frozenset(crec["terms"]), crec["parity"])
        ops.append(Operation(kind, tuple(rec["qubits"]),
                             cbit=rec.get("cbit"), condition=condition))

    circuit = Circuit(tuple(qubits), tuple(cbits), tuple(ops),
                      name=doc.get("name", ""), source="loaded")
    errors = validate(circuit)
    if errors:
        raise ParseError("invalid circuit: " + "; ".join(errors))
    return circuit


def remap_qubits(circuit: Circuit, perm: dict[int, int], name: str | None = None) -> Circuit:
    """Relabel qubit indices according to ``perm`` (a bijection on indices)."""
    if sorted(perm) != sorted(perm.values()) or sorted(perm) != [q.index for q in circuit.qubits]:
        raise ValueError("perm must be a bijection on the circuit's qubit indices")
    qubits = sorted((Qubit(perm[q.index], q.kind) for q in circuit.qubits),
                    key=lambda q: q.index)
    ops = tuple(replace(op, qubits=tuple(perm[q] for q in op.qubits))
                for op in circuit.ops)
    return Circuit(tuple(qubits), circuit.cbits, ops,
                   name=circuit.name if name is None else name,
                   source=circuit.source,
                   layout_permutation=dict(perm))
