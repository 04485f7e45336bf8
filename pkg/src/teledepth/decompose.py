"""Teleportation-based expansion of multi-controlled Toffoli gates.

One expansion level splits the controls into m groups of k (plus an odd
leftover for k=2). Per group, a Bell pair (e, e') is consumed: an
MCT_{k+1} writes the group's AND onto e, a Z measurement plus conditioned
X moves it onto e', and after the residual gate has fired, an X
measurement plus conditioned multi-Z uncomputes e' coherently. Recursing
with k=2 on the residual controls (the e' qubits and leftovers) grinds
everything down to plain Toffolis.

The deferral pass then commutes the conditioned corrections past the
Toffolis they block, leaving every CCX in a single layer.
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import (
    BitOrigin,
    Circuit,
    ClassicalBit,
    CircuitBuilder,
    Condition,
    Operation,
    OpKind,
    QubitKind,
    TOFFOLI_KINDS,
    check_valid,
    remap_qubits,
    toffoli_layers,
)
from .rewrite import MEASUREMENT_ABSORPTION, commute_conditional_through_toffoli
from .schedule import level_params

_GROUP_GATE = {1: OpKind.CX, 2: OpKind.CCX}
_UNCOMPUTE_GATE = {1: OpKind.Z, 2: OpKind.CZ, 3: OpKind.CCZ}


@dataclass(frozen=True)
class TeleportLevelPlan:
    groups: tuple[tuple[int, ...], ...]
    leftovers: tuple[int, ...]
    bell_pairs: tuple[tuple[int, int], ...]
    z_bits: tuple[int, ...]
    x_bits: tuple[int, ...]


@dataclass(frozen=True)
class TeleportFragment:
    """One expansion level, split around its residual multi-controlled gate.

    ``before`` ops are already appended to the builder when the fragment is
    produced; ``after`` ops (X measurements and conditioned uncompute gates)
    must be appended once the residual gate has been emitted.
    """

    plan: TeleportLevelPlan
    residual_controls: tuple[int, ...]
    target: int
    after: tuple[Operation, ...]


def teleport_expand(builder: CircuitBuilder, controls, target: int,
                    k: int = 2) -> TeleportFragment:
    """Emit one teleportation level for the given controls onto ``builder``.

    Requires 1 <= k <= 2 (the group gate MCT_{k+1} must be a CNOT or a
    Toffoli) and k < n, except n = 2 with k = 2: the single level used for
    a bare Toffoli.
    """
    controls = tuple(controls)
    n = len(controls)
    if n < 2:
        raise ValueError("need at least two controls")
    if k not in (1, 2):
        raise ValueError("group gates beyond the Toffoli (k > 2) are outside "
                         "the gate set")
    if k >= n and not (n == 2 and k == 2):
        raise ValueError(f"k={k} invalid for {n} controls: no decomposition needed")
    if k == 2:
        m, ell = level_params(n)
    else:
        m, ell = n, 0

    groups = tuple(tuple(controls[j * k:(j + 1) * k]) for j in range(m))
    leftovers = tuple(controls[m * k:])
    pairs, z_bits, residual = [], [], []
    uncompute: list[Operation] = []
    for group in groups:
        e = builder.add_qubit(QubitKind.ANCILLA)
        ep = builder.add_qubit(QubitKind.ANCILLA)
        pairs.append((e, ep))
        builder.bell_prep(e, ep)
        builder.gate(_GROUP_GATE[k], (*group, e))
        z = builder.measure_z(e)
        z_bits.append(z)
        builder.gate(OpKind.X, (ep,), condition=Condition(frozenset({z})))
        residual.append(ep)
    x_bits = []
    for group, (e, ep) in zip(groups, pairs):
        x = builder.add_cbit(BitOrigin.X_MEASUREMENT)
        x_bits.append(x)
        uncompute.append(Operation(OpKind.MEASURE_X, (ep,), cbit=x))
        uncompute.append(Operation(_UNCOMPUTE_GATE[k], tuple(group),
                                   condition=Condition(frozenset({x}))))
    plan = TeleportLevelPlan(groups, leftovers, tuple(pairs),
                             tuple(z_bits), tuple(x_bits))
    return TeleportFragment(plan, tuple(residual) + leftovers, target,
                            tuple(uncompute))


def _expand_recursive(builder: CircuitBuilder, controls, target: int) -> None:
    if len(controls) == 2:
        builder.gate(OpKind.CCX, (*controls, target))
        return
    frag = teleport_expand(builder, controls, target, k=2)
    _expand_recursive(builder, frag.residual_controls, target)
    builder.extend(frag.after)


def decompose_mct(n: int) -> Circuit:
    """Decompose an MCT with n controls into Toffolis plus feedforward.

    Qubits 0..n-1 are the controls, qubit n the target; ancillas follow in
    allocation order.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"control count must be an integer >= 2, got {n!r}")
    builder = CircuitBuilder(name=f"mct{n + 1}_teleport")
    controls = builder.add_qubits(QubitKind.CONTROL, n)
    target = builder.add_qubit(QubitKind.TARGET)
    if n == 2:
        # Single level: the residual is a lone CNOT from e' onto the target.
        frag = teleport_expand(builder, controls, target, k=2)
        builder.gate(OpKind.CX, (*frag.residual_controls, target))
        builder.extend(frag.after)
    else:
        _expand_recursive(builder, controls, target)
    circuit = builder.build()
    check_valid(circuit)
    return circuit


class DeferError(RuntimeError):
    pass


def _last_op_on_qubit(ops, before: int, qubit: int) -> int | None:
    for j in range(before - 1, -1, -1):
        if qubit in ops[j].qubits:
            return j
    return None


def defer_corrections(circuit: Circuit) -> Circuit:
    """Commute conditioned corrections rightward until Toffoli depth is 1.

    Applies the certified rewrite rules to every Toffoli whose layer
    exceeds one, then absorbs conditioned Paulis directly preceding a
    measurement into the outcome bit where the rules permit.
    """
    check_valid(circuit)
    ops = list(circuit.ops)
    cbits = list(circuit.cbits)
    limit = 10 * len(ops) + 10
    for _ in range(limit):
        layers = toffoli_layers(ops)
        blocked = [i for i, op in enumerate(ops)
                   if op.is_toffoli and layers[i] > 1]
        if not blocked:
            break
        ti = blocked[0]
        t = ops[ti]
        gi = None
        for q in t.qubits:
            j = _last_op_on_qubit(ops, ti, q)
            if j is not None and ops[j].is_gate and ops[j].condition is not None \
                    and ops[j].kind in (OpKind.X, OpKind.Z) \
                    and len(ops[j].qubits) == 1:
                gi = j
                break
        if gi is None:
            raise DeferError(f"no rewrite applies to blocked Toffoli at op {ti}: "
                             f"{t.kind.value} on {t.qubits}")
        repl = commute_conditional_through_toffoli(ops[gi], t)
        del ops[gi]
        ops[ti - 1:ti] = [t, *repl]  # t shifted left by the deletion
    else:
        raise DeferError("rewrite sweep limit exceeded; deferral did not converge")

    ops, cbits = _absorb_paulis_into_outcomes(ops, cbits)
    deferred = Circuit(circuit.qubits, tuple(cbits), tuple(ops),
                       name=circuit.name + "_deferred", source=circuit.source)
    check_valid(deferred)
    return deferred


def _absorb_paulis_into_outcomes(ops, cbits):
    """Apply the measurement-absorption rules wherever directly applicable."""
    ops = list(ops)
    cbits = list(cbits)
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(ops):
            if not (g.is_gate and g.condition is not None
                    and g.kind in (OpKind.X, OpKind.Z) and len(g.qubits) == 1):
                continue
            q = g.qubits[0]
            nxt = next((j for j in range(i + 1, len(ops)) if q in ops[j].qubits), None)
            if nxt is None or not ops[nxt].is_measurement:
                continue
            action = MEASUREMENT_ABSORPTION.get((g.kind, ops[nxt].kind))
            if action is None:
                continue
            meas = ops[nxt]
            del ops[i]
            if action == "flip":
                # Reported bit becomes old outcome XOR condition value.
                nxt -= 1
                new = len(cbits)
                cbits.append(ClassicalBit(new, BitOrigin.DERIVED_XOR))
                xor = Operation(OpKind.XOR, (), cbit=new,
                                condition=Condition(g.condition.terms | {meas.cbit},
                                                    g.condition.parity))
                ops.insert(nxt + 1, xor)
                for j in range(nxt + 2, len(ops)):
                    o = ops[j]
                    if o.condition is not None and meas.cbit in o.condition.terms:
                        terms = (o.condition.terms - {meas.cbit}) | {new}
                        ops[j] = Operation(o.kind, o.qubits, cbit=o.cbit,
                                           condition=Condition(terms, o.condition.parity))
            changed = True
            break
    return ops, cbits


def merge_conditionals(circuit: Circuit) -> Circuit:
    """Optional peephole: fuse adjacent conditioned duplicates.

    Adjacent (per shared qubits) conditioned X/Z/CX/CZ gates with the same
    kind and qubits merge into one gate whose condition is the XOR of the
    two; self-inverse pairs with equal conditions cancel outright. Off the
    default synthesis path; platform-dependent usefulness.
    """
    check_valid(circuit)
    ops = list(circuit.ops)
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(ops):
            if not (g.is_gate and g.condition is not None):
                continue
            nxt = None
            for j in range(i + 1, len(ops)):
                if set(ops[j].qubits) & set(g.qubits):
                    nxt = j
                    break
            if nxt is None:
                continue
            h = ops[nxt]
            if not (h.is_gate and h.condition is not None
                    and h.kind == g.kind and h.qubits == g.qubits):
                continue
            if set(h.qubits) != set(g.qubits):
                continue
            terms = g.condition.terms ^ h.condition.terms
            parity = g.condition.parity ^ h.condition.parity
            del ops[nxt]
            if terms:
                ops[i] = Operation(g.kind, g.qubits,
                                   condition=Condition(terms, parity))
            elif parity == 1:
                ops[i] = Operation(g.kind, g.qubits)  # exactly one always fires
            else:
                del ops[i]
            changed = True
            break
    merged = Circuit(circuit.qubits, circuit.cbits, tuple(ops),
                     name=circuit.name, source=circuit.source)
    check_valid(merged)
    return merged


class LayoutError(RuntimeError):
    pass


def neighbor_layout(circuit: Circuit) -> Circuit:
    """Relabel qubits so every Toffoli acts on three consecutive indices.

    Feasible whenever no qubit participates in more than one Toffoli, which
    holds for all decomposer outputs; the permutation is recorded on the
    returned circuit.
    """
    check_valid(circuit)
    seen: set[int] = set()
    perm: dict[int, int] = {}
    nxt = 0
    for op in circuit.ops:
        if not op.is_toffoli:
            continue
        if any(q in seen for q in op.qubits):
            raise LayoutError("a qubit participates in two Toffolis; "
                              "no closest-neighbor relabeling exists")
        for q in sorted(op.qubits):
            perm[q] = nxt
            nxt += 1
        seen.update(op.qubits)
    for q in sorted(qb.index for qb in circuit.qubits):
        if q not in perm:
            perm[q] = nxt
            nxt += 1
    out = remap_qubits(circuit, perm, name=circuit.name + "_neighbor")
    check_valid(out)
    return out
