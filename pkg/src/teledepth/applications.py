"""Application circuits built from multi-controlled Toffolis.

Four builders: an increment-by-one adder (a descending cascade of MCTs),
a single-word QROM lookup, a conjunction "neuron", and a pattern-matching
decision rule. Every multi-controlled gate can be realized either as a
measurement-free compute/uncompute chain with clean ancillas
(``mct_unitary``) or by splicing in the teleportation decomposition with
fresh ancillas per gate (``mct_teleportation``).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .circuit import (
    BitOrigin,
    Circuit,
    CircuitBuilder,
    Condition,
    Operation,
    OpKind,
    QubitKind,
    check_valid,
    toffoli_depth,
)
from .decompose import decompose_mct, defer_corrections
from .schedule import ceil_log2

STRATEGIES = ("mct_unitary", "mct_teleportation")


def _check_strategy(strategy: str) -> None:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")


def _check_bitstring(s: str, what: str) -> None:
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"{what} must be a nonempty string of 0s and 1s, got {s!r}")


# -- multi-controlled gate emission -----------------------------------------

def _append_mct_unitary(builder: CircuitBuilder, controls, target: int) -> None:
    """Compute/uncompute AND-chain onto clean ancillas; measurement-free."""
    controls = tuple(controls)
    if len(controls) == 1:
        builder.gate(OpKind.CX, (controls[0], target))
        return
    if len(controls) == 2:
        builder.gate(OpKind.CCX, (*controls, target))
        return
    chain = []
    acc = None
    for i, c in enumerate(controls[1:], start=1):
        prev = controls[0] if acc is None else acc
        if i == len(controls) - 1:
            builder.gate(OpKind.CCX, (c, prev, target))
        else:
            acc = builder.add_qubit(QubitKind.ANCILLA)
            chain.append((c, prev, acc))
            builder.gate(OpKind.CCX, (c, prev, acc))
    for c, prev, anc in reversed(chain):
        builder.gate(OpKind.CCX, (c, prev, anc))


def _splice(builder: CircuitBuilder, circuit: Circuit, data_map: dict[int, int]) -> None:
    """Inline a circuit, mapping its data qubits through ``data_map`` and
    allocating fresh host ancillas and classical bits."""
    qmap = dict(data_map)
    for q in circuit.qubits:
        if q.kind == QubitKind.ANCILLA:
            qmap[q.index] = builder.add_qubit(QubitKind.ANCILLA)
    cmap = {c.index: builder.add_cbit(c.origin) for c in circuit.cbits}
    for op in circuit.ops:
        condition = None
        if op.condition is not None:
            condition = Condition(frozenset(cmap[t] for t in op.condition.terms),
                                  op.condition.parity)
        builder.append(Operation(op.kind, tuple(qmap[q] for q in op.qubits),
                                 cbit=None if op.cbit is None else cmap[op.cbit],
                                 condition=condition))


def append_mct(builder: CircuitBuilder, controls, target: int,
               strategy: str = "mct_unitary") -> None:
    """Emit an AND-of-controls flip of ``target`` under the given strategy."""
    _check_strategy(strategy)
    controls = tuple(controls)
    if not controls:
        raise ValueError("need at least one control")
    if strategy == "mct_unitary" or len(controls) == 1:
        _append_mct_unitary(builder, controls, target)
        return
    block = defer_corrections(decompose_mct(len(controls)))
    data_map = {i: c for i, c in enumerate(controls)}
    data_map[len(controls)] = target
    _splice(builder, block, data_map)


# -- adder ------------------------------------------------------------------

@dataclass(frozen=True)
class AdderSpec:
    """Increment-by-one operator on a q-qubit register (mod 2^q)."""

    q: int
    strategy: str = "mct_unitary"

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"register width must be >= 2, got {self.q}")
        _check_strategy(self.strategy)


def build_adder(spec: AdderSpec) -> Circuit:
    """MCT cascade: flip bit j iff bits 0..j-1 are all set, most significant
    target first, ending with an unconditional X on bit 0."""
    builder = CircuitBuilder(name=f"adder_q{spec.q}_{spec.strategy}")
    reg = builder.add_qubits(QubitKind.TARGET, spec.q)
    for j in range(spec.q - 1, 0, -1):
        append_mct(builder, reg[:j], reg[j], spec.strategy)
    builder.gate(OpKind.X, (reg[0],))
    circuit = builder.build()
    check_valid(circuit)
    return circuit


def increment_permutation(q: int) -> list[int]:
    return [(i + 1) % (1 << q) for i in range(1 << q)]


def dutta_adder_depth_proxy(q: int) -> int:
    """Optimistic proxy: sum of the per-gate depth lower bounds ceil(log2 j)
    over the cascade's MCTs with j >= 2 controls."""
    return sum(ceil_log2(j) for j in range(2, q))


@dataclass(frozen=True)
class AdderDepthRow:
    q: int
    teleportation_depth: int
    dutta_proxy_depth: int
    vedral_depth: int | None = None  # published only as a plotted curve


def adder_depth_table(q_range) -> list[AdderDepthRow]:
    rows = []
    for q in q_range:
        if q < 3:
            raise ValueError(f"depth table needs q >= 3, got {q}")
        circ = build_adder(AdderSpec(q, "mct_teleportation"))
        rows.append(AdderDepthRow(q, toffoli_depth(circ), dutta_adder_depth_proxy(q)))
    return rows


ADDER_CSV_HEADER = ["q", "teleportation_depth", "dutta_proxy_depth", "vedral_depth"]


def adder_table_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ADDER_CSV_HEADER)
    for r in rows:
        writer.writerow([r.q, r.teleportation_depth, r.dutta_proxy_depth,
                         "" if r.vedral_depth is None else r.vedral_depth])
    return buf.getvalue()


# -- single-word QROM lookup ------------------------------------------------

@dataclass(frozen=True)
class QromWordSpec:
    """Lookup of one stored word at one address.

    Register layout (data qubits in order): read flag r, address bits
    a_0..a_{A-1}, match flag s, data bits d_0..d_{W-1}. The data bits
    receive the word iff r = 1 and the address equals ``address``.
    """

    address: str
    word: str
    strategy: str = "mct_unitary"

    def __post_init__(self):
        _check_bitstring(self.address, "address")
        _check_bitstring(self.word, "word")
        _check_strategy(self.strategy)


def build_qrom_word(spec: QromWordSpec) -> Circuit:
    """Compute the match flag with an MCT, copy the word with CNOTs, then
    uncompute the flag; X gates turn zero address bits into ones around the
    MCTs so the controls test for the exact address."""
    a_len, w_len = len(spec.address), len(spec.word)
    builder = CircuitBuilder(name=f"qrom_a{spec.address}_w{spec.word}_{spec.strategy}")
    r = builder.add_qubit(QubitKind.CONTROL)
    addr = builder.add_qubits(QubitKind.CONTROL, a_len)
    s = builder.add_qubit(QubitKind.TARGET)
    data = builder.add_qubits(QubitKind.TARGET, w_len)

    zero_positions = [addr[i] for i, c in enumerate(spec.address) if c == "0"]

    def flip_zeros():
        for q in zero_positions:
            builder.gate(OpKind.X, (q,))

    flip_zeros()
    append_mct(builder, (r, *addr), s, spec.strategy)
    for i, c in enumerate(spec.word):
        if c == "1":
            builder.gate(OpKind.CX, (s, data[i]))
    append_mct(builder, (r, *addr), s, spec.strategy)
    flip_zeros()
    circuit = builder.build()
    check_valid(circuit)
    return circuit


def qrom_permutation(spec: QromWordSpec) -> list[int]:
    """Basis-state truth table of the lookup. Data-register bit order:
    r, a_0.., s, d_0.. (least significant first)."""
    a_len, w_len = len(spec.address), len(spec.word)
    total = 1 + a_len + 1 + w_len
    addr_value = sum((spec.address[i] == "1") << i for i in range(a_len))
    word_value = sum((spec.word[i] == "1") << i for i in range(w_len))
    out = []
    for i in range(1 << total):
        r = i & 1
        a = (i >> 1) & ((1 << a_len) - 1)
        s_in = (i >> (1 + a_len)) & 1
        match = r == 1 and a == addr_value
        j = i
        # The copy CNOTs see s after the compute MCT, i.e. s_in XOR match.
        if s_in ^ match:
            j ^= word_value << (2 + a_len)
        out.append(j)
    return out


# -- neuron and decision rule -----------------------------------------------

def build_neuron(feature_count: int, strategy: str = "mct_unitary") -> Circuit:
    """|x, y> -> |x, y XOR AND(x)>: one MCT from the features onto the
    output qubit."""
    if feature_count < 2:
        raise ValueError(f"need at least 2 features, got {feature_count}")
    _check_strategy(strategy)
    builder = CircuitBuilder(name=f"neuron_f{feature_count}_{strategy}")
    features = builder.add_qubits(QubitKind.CONTROL, feature_count)
    out = builder.add_qubit(QubitKind.TARGET)
    append_mct(builder, features, out, strategy)
    circuit = builder.build()
    check_valid(circuit)
    return circuit


@dataclass(frozen=True)
class RuleSpec:
    """Flip the class qubit iff the feature register equals ``pattern``
    (pattern[i] is the required value of feature i)."""

    pattern: str
    strategy: str = "mct_unitary"

    def __post_init__(self):
        _check_bitstring(self.pattern, "pattern")
        if len(self.pattern) < 2:
            raise ValueError("pattern needs at least 2 features")
        _check_strategy(self.strategy)


def build_decision_rule(spec: RuleSpec) -> Circuit:
    builder = CircuitBuilder(name=f"rule_{spec.pattern}_{spec.strategy}")
    features = builder.add_qubits(QubitKind.CONTROL, len(spec.pattern))
    cls = builder.add_qubit(QubitKind.TARGET)
    zero_positions = [features[i] for i, c in enumerate(spec.pattern) if c == "0"]
    for q in zero_positions:
        builder.gate(OpKind.X, (q,))
    append_mct(builder, features, cls, spec.strategy)
    for q in zero_positions:
        builder.gate(OpKind.X, (q,))
    circuit = builder.build()
    check_valid(circuit)
    return circuit


def indicator_permutation(pattern: str) -> list[int]:
    """Truth table of the decision rule: class bit (most significant data
    bit) flips iff the features equal the pattern."""
    k = len(pattern)
    value = sum((pattern[i] == "1") << i for i in range(k))
    out = []
    for i in range(1 << (k + 1)):
        if (i & ((1 << k) - 1)) == value:
            out.append(i ^ (1 << k))
        else:
            out.append(i)
    return out
