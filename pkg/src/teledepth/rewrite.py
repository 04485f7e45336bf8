"""Rewrite rules for commuting classically conditioned gates rightward.

Each rule replaces a conditioned Pauli adjacent to a Toffoli or a
measurement by an equivalent sequence placed after it. Every rule carries a
brute-force certificate: gate rules are checked as dense matrix identities
on their support (for both values of the condition bit), measurement rules
by comparing reported-outcome distributions on the six Pauli eigenstates.
Measured qubits are never reused in this IR, so outcome-absorption rules
only need to preserve the reported bit, not the post-measurement state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Condition, Operation, OpKind

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)

_1Q = {OpKind.X: _X, OpKind.Y: _Y, OpKind.Z: _Z, OpKind.H: _H,
       OpKind.S: _S, OpKind.SDG: _S.conj().T}


def op_matrix(op: Operation, n: int, fired: bool = True) -> np.ndarray:
    """Dense unitary of a gate on n qubits (little-endian index convention).

    A conditioned gate with ``fired=False`` is the identity.
    """
    dim = 1 << n
    if op.condition is not None and not fired:
        return np.eye(dim, dtype=complex)
    mat = np.eye(dim, dtype=complex)
    if op.kind in _1Q:
        q = op.qubits[0]
        for i in range(dim):
            for j in range(dim):
                if (i & ~(1 << q)) == (j & ~(1 << q)):
                    mat_ij = _1Q[op.kind][(i >> q) & 1, (j >> q) & 1]
                    mat[i, j] = mat_ij
        return mat
    if op.kind is OpKind.CX:
        c, t = op.qubits
        out = np.zeros((dim, dim), dtype=complex)
        for j in range(dim):
            i = j ^ (((j >> c) & 1) << t)
            out[i, j] = 1
        return out
    if op.kind is OpKind.CCX:
        c1, c2, t = op.qubits
        out = np.zeros((dim, dim), dtype=complex)
        for j in range(dim):
            i = j ^ ((((j >> c1) & 1) & ((j >> c2) & 1)) << t)
            out[i, j] = 1
        return out
    if op.kind is OpKind.CZ:
        a, b = op.qubits
        d = np.ones(dim, dtype=complex)
        for j in range(dim):
            if (j >> a) & 1 and (j >> b) & 1:
                d[j] = -1
        return np.diag(d)
    if op.kind is OpKind.CCZ:
        a, b, c = op.qubits
        d = np.ones(dim, dtype=complex)
        for j in range(dim):
            if (j >> a) & 1 and (j >> b) & 1 and (j >> c) & 1:
                d[j] = -1
        return np.diag(d)
    raise ValueError(f"no dense matrix for operation kind {op.kind}")


def sequence_matrix(ops, n: int, fired: bool = True) -> np.ndarray:
    """Unitary of an op sequence applied in list order."""
    mat = np.eye(1 << n, dtype=complex)
    for op in ops:
        mat = op_matrix(op, n, fired=fired) @ mat
    return mat


def commute_conditional_through_toffoli(g: Operation, t: Operation) -> list[Operation]:
    """Replacement for the pair [g, t] -> [t, *returned ops].

    ``g`` is a conditioned single-qubit X or Z acting on a qubit of the
    Toffoli ``t``.
    """
    q = g.qubits[0]
    cond = g.condition
    if q not in t.qubits:
        raise ValueError("conditional gate does not touch the Toffoli")
    if t.kind is OpKind.CCX:
        a, b, tgt = t.qubits
        if g.kind is OpKind.X:
            if q == tgt:
                return [g]
            other = b if q == a else a
            return [g, Operation(OpKind.CX, (other, tgt), condition=cond)]
        if g.kind is OpKind.Z:
            if q != tgt:
                return [g]
            return [g, Operation(OpKind.CZ, (a, b), condition=cond)]
    if t.kind is OpKind.CCZ:
        if g.kind is OpKind.Z:
            return [g]
        if g.kind is OpKind.X:
            others = tuple(x for x in t.qubits if x != q)
            return [g, Operation(OpKind.CZ, others, condition=cond)]
    raise ValueError(f"no commutation rule for {g.kind} through {t.kind}")


# Measurement absorption: (pauli kind, measurement kind) -> action.
MEASUREMENT_ABSORPTION = {
    (OpKind.X, OpKind.MEASURE_Z): "flip",
    (OpKind.Z, OpKind.MEASURE_Z): "delete",
    (OpKind.Z, OpKind.MEASURE_X): "flip",
    (OpKind.X, OpKind.MEASURE_X): "delete",
}


@dataclass(frozen=True)
class RewriteRule:
    """A certified local rewrite."""

    name: str
    pauli: OpKind
    through: OpKind

    def certify(self, atol: float = 1e-12) -> bool:
        if self.through in (OpKind.CCX, OpKind.CCZ):
            return self._certify_gate(atol)
        return self._certify_measurement(atol)

    def _lhs_pair(self) -> tuple[Operation, Operation]:
        cond = Condition(frozenset({0}))
        if self.through in (OpKind.CCX, OpKind.CCZ):
            toffoli = Operation(self.through, (0, 1, 2))
            role = self.name.rsplit("_", 1)[-1]
            q = 2 if role == "target" else 0
            return Operation(self.pauli, (q,), condition=cond), toffoli
        meas = Operation(self.through, (0,), cbit=0)
        return Operation(self.pauli, (0,), condition=cond), meas

    def _certify_gate(self, atol: float) -> bool:
        g, t = self._lhs_pair()
        repl = commute_conditional_through_toffoli(g, t)
        for fired in (False, True):
            lhs = sequence_matrix([g, t], 3, fired=fired)
            rhs = sequence_matrix([t, *repl], 3, fired=fired)
            if not np.allclose(lhs, rhs, atol=atol, rtol=0):
                return False
        return True

    def _certify_measurement(self, atol: float) -> bool:
        g, meas = self._lhs_pair()
        action = MEASUREMENT_ABSORPTION[(self.pauli, self.through)]
        pauli = _1Q[self.pauli]
        basis = _H if self.through is OpKind.MEASURE_X else _I2
        # Six Pauli eigenstates as test states.
        tests = [np.array([1, 0]), np.array([0, 1]),
                 np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2),
                 np.array([1, 1j]) / np.sqrt(2), np.array([1, -1j]) / np.sqrt(2)]
        for psi in tests:
            for fired in (False, True):
                pre = pauli @ psi if fired else psi
                p_lhs = np.abs(basis @ pre) ** 2
                p_phys = np.abs(basis @ psi) ** 2
                if action == "flip" and fired:
                    p_rhs = p_phys[::-1]
                else:
                    p_rhs = p_phys
                if not np.allclose(p_lhs, p_rhs, atol=atol, rtol=0):
                    return False
        return True


def rewrite_rule_table() -> list[RewriteRule]:
    """The full certified rule set used by the deferral pass."""
    return [
        RewriteRule("cond_x_through_ccx_control", OpKind.X, OpKind.CCX),
        RewriteRule("cond_x_through_ccx_target", OpKind.X, OpKind.CCX),
        RewriteRule("cond_z_through_ccx_control", OpKind.Z, OpKind.CCX),
        RewriteRule("cond_z_through_ccx_target", OpKind.Z, OpKind.CCX),
        RewriteRule("cond_x_through_ccz_control", OpKind.X, OpKind.CCZ),
        RewriteRule("cond_z_through_ccz_control", OpKind.Z, OpKind.CCZ),
        RewriteRule("cond_x_into_measure_z", OpKind.X, OpKind.MEASURE_Z),
        RewriteRule("cond_z_into_measure_z", OpKind.Z, OpKind.MEASURE_Z),
        RewriteRule("cond_z_into_measure_x", OpKind.Z, OpKind.MEASURE_X),
        RewriteRule("cond_x_into_measure_x", OpKind.X, OpKind.MEASURE_X),
    ]
