"""Trajectory simulator with mid-circuit measurement and feedforward.

The state is stored as a sparse map (basis indices -> amplitudes) held in
parallel numpy arrays; the gate set here only creates superposition
through H, so the support stays small for the circuits this package
builds, while ``dense()`` exposes the full 2^Q vector. Qubit q is bit q
of the basis index.

Noise is unraveled into stochastic pure-state trajectories: depolarizing
events apply a uniformly random Pauli string (identity included) with
probability p, so the trajectory average is (1-p) S + p * maximally-mixed
mixing on the touched qubits; initialization and readout use bit flips.
Randomness comes from a counter-based Philox generator keyed by
(seed, trajectory index) so every trajectory is an independent,
reproducible stream.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Condition, Operation, OpKind, QubitKind

DEFAULT_MAX_QUBITS = 26
MAX_QUBITS_ENV = "TELEDEPTH_MAX_QUBITS"

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_NORM_TOL = 1e-9
_PRUNE_TOL = 1e-12


def max_qubits() -> int:
    value = os.environ.get(MAX_QUBITS_ENV)
    return int(value) if value else DEFAULT_MAX_QUBITS


class QubitCapExceeded(RuntimeError):
    pass


class NormDriftError(RuntimeError):
    pass


class BranchUnreachable(RuntimeError):
    """A forced measurement outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class NoiseModel:
    """Error probabilities for the six channel insertion points."""

    p_toffoli: float = 0.0
    p_2q: float = 0.0
    p_1q: float = 0.0
    p_init: float = 0.0
    p_readout: float = 0.0
    p_epr: float = 0.0

    def __post_init__(self):
        for name in ("p_toffoli", "p_2q", "p_1q", "p_init", "p_readout", "p_epr"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")

    @classmethod
    def hierarchy(cls, p_toffoli: float, p_epr: float) -> "NoiseModel":
        """Hierarchical model: 2q errors one order below Toffoli errors,
        1q two orders below; init matches 1q, readout matches 2q."""
        return cls(p_toffoli=p_toffoli, p_2q=p_toffoli / 10,
                   p_1q=p_toffoli / 100, p_init=p_toffoli / 100,
                   p_readout=p_toffoli / 10, p_epr=p_epr)

    @property
    def is_noiseless(self) -> bool:
        return self == NOISELESS


NOISELESS = NoiseModel()


def trajectory_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Independent reproducible stream for (seed, trajectory index)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class StateVector:
    """Sparse pure state over n qubits."""

    __slots__ = ("n_qubits", "indices", "amps")

    def __init__(self, n_qubits: int, indices: np.ndarray, amps: np.ndarray):
        if n_qubits > max_qubits():
            raise QubitCapExceeded(
                f"{n_qubits} qubits exceeds the cap of {max_qubits()} "
                f"(override with {MAX_QUBITS_ENV})")
        self.n_qubits = n_qubits
        self.indices = np.asarray(indices, dtype=np.int64)
        self.amps = np.asarray(amps, dtype=np.complex128)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        if not 0 <= index < (1 << n_qubits):
            raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
        return cls(n_qubits, np.array([index]), np.array([1.0 + 0j]))

    @classmethod
    def from_amplitudes(cls, n_qubits: int, indices, amps) -> "StateVector":
        sv = cls(n_qubits, np.asarray(indices), np.asarray(amps))
        sv._coalesce()
        return sv

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.indices.copy(), self.amps.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def dense(self) -> np.ndarray:
        out = np.zeros(1 << self.n_qubits, dtype=np.complex128)
        out[self.indices] = self.amps
        return out

    def overlap(self, other: "StateVector") -> complex:
        common, ia, ib = np.intersect1d(self.indices, other.indices,
                                        return_indices=True)
        del common
        return complex(np.sum(np.conj(self.amps[ia]) * other.amps[ib]))

    def _coalesce(self) -> None:
        uniq, inv = np.unique(self.indices, return_inverse=True)
        amps = np.zeros(len(uniq), dtype=np.complex128)
        np.add.at(amps, inv, self.amps)
        keep = np.abs(amps) > _PRUNE_TOL
        self.indices = uniq[keep]
        self.amps = amps[keep]

    def _bits(self, q: int) -> np.ndarray:
        return (self.indices >> q) & 1

    # -- gate kernels -------------------------------------------------------

    def apply_x(self, q: int) -> None:
        self.indices = self.indices ^ (1 << q)

    def apply_y(self, q: int) -> None:
        b = self._bits(q)
        self.amps = self.amps * (1j * (1 - 2 * b))
        self.indices = self.indices ^ (1 << q)

    def apply_z(self, q: int) -> None:
        self.amps = self.amps * (1 - 2 * self._bits(q))

    def apply_s(self, q: int, dagger: bool = False) -> None:
        phase = -1j if dagger else 1j
        self.amps = self.amps * np.where(self._bits(q) == 1, phase, 1.0)

    def apply_h(self, q: int) -> None:
        mask = 1 << q
        b = self._bits(q)
        lowered = self.indices & ~mask
        self.indices = np.concatenate([lowered, lowered | mask])
        self.amps = np.concatenate([self.amps * _INV_SQRT2,
                                    self.amps * (_INV_SQRT2 * (1 - 2 * b))])
        self._coalesce()

    def apply_cx(self, c: int, t: int) -> None:
        self.indices = self.indices ^ (((self.indices >> c) & 1) << t)

    def apply_cz(self, a: int, b: int) -> None:
        self.amps = self.amps * (1 - 2 * (self._bits(a) & self._bits(b)))

    def apply_ccx(self, c1: int, c2: int, t: int) -> None:
        both = (self.indices >> c1) & (self.indices >> c2) & 1
        self.indices = self.indices ^ (both << t)

    def apply_ccz(self, a: int, b: int, c: int) -> None:
        allset = self._bits(a) & self._bits(b) & self._bits(c)
        self.amps = self.amps * (1 - 2 * allset)

    def apply_gate(self, kind: OpKind, qubits: tuple[int, ...]) -> None:
        if kind is OpKind.X:
            self.apply_x(*qubits)
        elif kind is OpKind.Y:
            self.apply_y(*qubits)
        elif kind is OpKind.Z:
            self.apply_z(*qubits)
        elif kind is OpKind.H:
            self.apply_h(*qubits)
        elif kind is OpKind.S:
            self.apply_s(*qubits)
        elif kind is OpKind.SDG:
            self.apply_s(*qubits, dagger=True)
        elif kind is OpKind.CX:
            self.apply_cx(*qubits)
        elif kind is OpKind.CZ:
            self.apply_cz(*qubits)
        elif kind is OpKind.CCX:
            self.apply_ccx(*qubits)
        elif kind is OpKind.CCZ:
            self.apply_ccz(*qubits)
        else:
            raise ValueError(f"not a gate kind: {kind}")

    # -- measurement --------------------------------------------------------

    def prob_one(self, q: int) -> float:
        b = self._bits(q)
        return float(np.sum(np.abs(self.amps[b == 1]) ** 2))

    def measure_z(self, q: int, rng: np.random.Generator | None = None,
                  forced: int | None = None) -> int:
        p1 = self.prob_one(q)
        if forced is None:
            outcome = 1 if rng.random() < p1 else 0
        else:
            outcome = int(forced)
        p = p1 if outcome else 1.0 - p1
        if p < 1e-12:
            raise BranchUnreachable(f"outcome {outcome} on qubit {q} has "
                                    f"probability {p:.3e}")
        keep = self._bits(q) == outcome
        self.indices = self.indices[keep]
        self.amps = self.amps[keep] / np.sqrt(p)
        return outcome

    def check_norm(self) -> None:
        if abs(self.norm() - 1.0) > _NORM_TOL:
            raise NormDriftError(f"norm drifted to {self.norm()!r}")


def embed_basis(circuit: Circuit, data_index: int) -> StateVector:
    """Basis state with ``data_index`` bits spread over the data qubits
    (ancillas start in |0>)."""
    data = circuit.data_qubits()
    if not 0 <= data_index < (1 << len(data)):
        raise ValueError(f"input {data_index} out of range for {len(data)} data qubits")
    full = 0
    for i, q in enumerate(data):
        if (data_index >> i) & 1:
            full |= 1 << q
    return StateVector.basis(circuit.num_qubits, full)


def embed_data_state(circuit: Circuit, indices, amps) -> StateVector:
    """Spread a data-register state over the circuit's data qubits."""
    data = circuit.data_qubits()
    indices = np.asarray(indices, dtype=np.int64)
    full = np.zeros_like(indices)
    for i, q in enumerate(data):
        full |= ((indices >> i) & 1) << q
    return StateVector.from_amplitudes(circuit.num_qubits, full, amps)


# -- noise channels ---------------------------------------------------------

def apply_depolarizing(state: StateVector, qubits, p: float,
                       rng: np.random.Generator,
                       log: list | None = None) -> None:
    """With probability p, apply a uniformly random Pauli string on the
    given 1..3 qubits (identity string included)."""
    qubits = tuple(qubits)
    if not 1 <= len(qubits) <= 3:
        raise ValueError("depolarizing supports 1 to 3 qubits")
    if p == 0.0 or rng.random() >= p:
        return
    paulis = []
    for q in qubits:
        which = int(rng.integers(0, 4))
        if which == 1:
            state.apply_x(q)
        elif which == 2:
            state.apply_y(q)
        elif which == 3:
            state.apply_z(q)
        paulis.append("IXYZ"[which])
    if log is not None:
        log.append(("depolarize", qubits, "".join(paulis)))


def apply_bitflip(state: StateVector, qubit: int, p: float,
                  rng: np.random.Generator, log: list | None = None) -> None:
    if p > 0.0 and rng.random() < p:
        state.apply_x(qubit)
        if log is not None:
            log.append(("bitflip", (qubit,), "X"))


def _readout_flip(bit: int, p: float, rng: np.random.Generator,
                  log: list | None, cbit: int) -> int:
    if p > 0.0 and rng.random() < p:
        if log is not None:
            log.append(("readout_flip", (), f"c{cbit}"))
        return bit ^ 1
    return bit


@dataclass
class TrajectoryResult:
    state: StateVector
    bits: dict[int, int]
    error_log: list = field(default_factory=list)
    seed: int = 0

    def data_bits(self, circuit: Circuit) -> tuple[int, ...] | None:
        """Data-qubit bit values if they are classically determined."""
        data = circuit.data_qubits()
        vals = []
        for q in data:
            b = (self.state.indices >> q) & 1
            if len(b) == 0 or not np.all(b == b[0]):
                return None
            vals.append(int(b[0]))
        return tuple(vals)


def run_trajectory(circuit: Circuit, input_state, noise: NoiseModel | None = None,
                   seed: int = 0, *, rng: np.random.Generator | None = None,
                   forced_outcomes: dict[int, int] | None = None) -> TrajectoryResult:
    """Execute one stochastic trajectory of a circuit.

    ``input_state`` is a basis index over the data qubits (initialization
    bit flips apply) or a prepared StateVector over all qubits (the caller
    owns any preparation noise). ``forced_outcomes`` maps classical-bit
    index to the physical measurement outcome, for branch enumeration.
    """
    noise = NOISELESS if noise is None else noise
    if rng is None:
        rng = trajectory_rng(seed, 0)
    log: list = []
    if isinstance(input_state, StateVector):
        state = input_state.copy()
        if state.n_qubits != circuit.num_qubits:
            raise ValueError("input state qubit count does not match circuit")
    else:
        state = embed_basis(circuit, int(input_state))
        for q in circuit.data_qubits():
            apply_bitflip(state, q, noise.p_init, rng, log)

    bits: dict[int, int] = {}
    for op in circuit.ops:
        if op.kind is OpKind.XOR:
            bits[op.cbit] = op.condition.value(bits)
            continue
        if op.condition is not None and not op.condition.satisfied(bits):
            continue
        if op.kind is OpKind.BELL_PREP:
            a, b = op.qubits
            state.apply_h(a)
            state.apply_cx(a, b)
            apply_depolarizing(state, (a, b), noise.p_epr, rng, log)
        elif op.kind is OpKind.MEASURE_Z or op.kind is OpKind.MEASURE_X:
            q = op.qubits[0]
            if op.kind is OpKind.MEASURE_X:
                state.apply_h(q)  # part of the measurement; no separate noise
            forced = None if forced_outcomes is None else forced_outcomes.get(op.cbit)
            outcome = state.measure_z(q, rng=rng, forced=forced)
            bits[op.cbit] = _readout_flip(outcome, noise.p_readout, rng, log, op.cbit)
        elif op.is_gate:
            state.apply_gate(op.kind, op.qubits)
            if op.is_toffoli:
                apply_depolarizing(state, op.qubits, noise.p_toffoli, rng, log)
            elif len(op.qubits) == 2:
                apply_depolarizing(state, op.qubits, noise.p_2q, rng, log)
            else:
                apply_depolarizing(state, op.qubits, noise.p_1q, rng, log)
        else:
            raise ValueError(f"cannot execute operation kind {op.kind}")
        state.check_norm()
    return TrajectoryResult(state, bits, log, seed)


def sample_readout(state: StateVector, qubits, noise: NoiseModel,
                   rng: np.random.Generator) -> tuple[int, ...]:
    """Sample a Z readout of the given qubits, with readout bit flips."""
    probs = np.abs(state.amps) ** 2
    probs = probs / probs.sum()
    pick = int(rng.choice(len(probs), p=probs))
    index = int(state.indices[pick])
    out = []
    for q in qubits:
        bit = (index >> q) & 1
        if noise.p_readout > 0.0 and rng.random() < noise.p_readout:
            bit ^= 1
        out.append(bit)
    return tuple(out)


def data_marginal(state: StateVector, data_qubits) -> np.ndarray:
    """Dense data-register vector once all other qubits are collapsed."""
    data = list(data_qubits)
    rest_mask = ((1 << state.n_qubits) - 1)
    for q in data:
        rest_mask &= ~(1 << q)
    rest = state.indices & rest_mask
    if len(rest) and not np.all(rest == rest[0]):
        raise ValueError("non-data qubits are still entangled with the data register")
    packed = np.zeros(len(state.indices), dtype=np.int64)
    for i, q in enumerate(data):
        packed |= ((state.indices >> q) & 1) << i
    out = np.zeros(1 << len(data), dtype=np.complex128)
    out[packed] = state.amps
    return out


def qft_prepare(index: int, q: int) -> StateVector:
    """Analytic QFT of the basis state |index> on q qubits."""
    dim = 1 << q
    if not 0 <= index < dim:
        raise ValueError(f"state index {index} out of range for {q} qubits")
    j = np.arange(dim)
    amps = np.exp(2j * np.pi * j * index / dim) / np.sqrt(dim)
    return StateVector(q, j, amps)
