import numpy as np
import pytest

from teledepth.circuit import (
    CircuitBuilder,
    Condition,
    Operation,
    OpKind,
    QubitKind,
)
from teledepth.rewrite import op_matrix
from teledepth.simulate import (
    DEFAULT_MAX_QUBITS,
    MAX_QUBITS_ENV,
    NOISELESS,
    BranchUnreachable,
    NoiseModel,
    QubitCapExceeded,
    StateVector,
    apply_bitflip,
    apply_depolarizing,
    data_marginal,
    embed_basis,
    embed_data_state,
    qft_prepare,
    run_trajectory,
    sample_readout,
    trajectory_rng,
)

GATE_CASES = [
    (OpKind.X, (0,)), (OpKind.Y, (1,)), (OpKind.Z, (2,)),
    (OpKind.H, (0,)), (OpKind.S, (1,)), (OpKind.SDG, (2,)),
    (OpKind.CX, (0, 2)), (OpKind.CZ, (1, 2)),
    (OpKind.CCX, (0, 1, 2)), (OpKind.CCX, (2, 0, 1)),
    (OpKind.CCZ, (0, 1, 2)),
]


class TestGateKernels:
    @pytest.mark.parametrize("kind,qubits", GATE_CASES)
    def test_matches_dense_matrix_on_random_state(self, kind, qubits):
        rng = np.random.default_rng(42)
        vec = rng.normal(size=8) + 1j * rng.normal(size=8)
        vec /= np.linalg.norm(vec)
        sv = StateVector.from_amplitudes(3, np.arange(8), vec)
        sv.apply_gate(kind, qubits)
        expected = op_matrix(Operation(kind, qubits), 3) @ vec
        assert np.allclose(sv.dense(), expected, atol=1e-12)

    def test_h_coalesces_support(self):
        sv = StateVector.basis(1, 0)
        sv.apply_h(0)
        sv.apply_h(0)
        assert sv.indices.tolist() == [0]
        assert abs(sv.amps[0] - 1) < 1e-12

    def test_norm_preserved(self):
        sv = StateVector.basis(3, 5)
        for kind, qs in GATE_CASES:
            sv.apply_gate(kind, qs)
            assert abs(sv.norm() - 1) < 1e-12


class TestMeasurement:
    def test_deterministic_outcome(self):
        sv = StateVector.basis(2, 2)
        assert sv.measure_z(1, rng=trajectory_rng(0)) == 1
        assert sv.measure_z(0, rng=trajectory_rng(0)) == 0

    def test_superposition_collapse(self):
        sv = StateVector.basis(1, 0)
        sv.apply_h(0)
        out = sv.measure_z(0, forced=1)
        assert out == 1
        assert sv.indices.tolist() == [1]
        assert abs(sv.norm() - 1) < 1e-12

    def test_forced_impossible_branch_raises(self):
        sv = StateVector.basis(1, 0)
        with pytest.raises(BranchUnreachable):
            sv.measure_z(0, forced=1)

    def test_outcome_statistics(self):
        rng = trajectory_rng(7)
        ones = 0
        for _ in range(2000):
            sv = StateVector.basis(1, 0)
            sv.apply_h(0)
            ones += sv.measure_z(0, rng=rng)
        assert abs(ones / 2000 - 0.5) < 0.04


class TestRng:
    def test_streams_reproducible(self):
        a = trajectory_rng(3, 9).random(5)
        b = trajectory_rng(3, 9).random(5)
        assert np.array_equal(a, b)

    def test_streams_independent(self):
        a = trajectory_rng(3, 9).random(5)
        b = trajectory_rng(3, 10).random(5)
        c = trajectory_rng(4, 9).random(5)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestNoiseModel:
    def test_hierarchy_ratios(self):
        nm = NoiseModel.hierarchy(1e-2, 3e-3)
        assert nm.p_2q == pytest.approx(1e-3)
        assert nm.p_1q == pytest.approx(1e-4)
        assert nm.p_init == nm.p_1q
        assert nm.p_readout == nm.p_2q
        assert nm.p_epr == 3e-3

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            NoiseModel(p_toffoli=1.5)

    def test_noiseless_flag(self):
        assert NOISELESS.is_noiseless
        assert not NoiseModel(p_1q=0.1).is_noiseless


class TestChannels:
    def test_full_depolarizing_gives_maximally_mixed(self):
        # Trajectory average of 1-qubit depolarizing at p=1 on |0> must be
        # I/2; check the trace distance at 10^4 samples.
        rng = trajectory_rng(11)
        rho = np.zeros((2, 2), dtype=complex)
        samples = 10_000
        for _ in range(samples):
            sv = StateVector.basis(1, 0)
            apply_depolarizing(sv, (0,), 1.0, rng)
            v = sv.dense()
            rho += np.outer(v, v.conj())
        rho /= samples
        diff = rho - np.eye(2) / 2
        trace_distance = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff)))
        assert trace_distance < 0.02

    def test_depolarizing_event_rate(self):
        rng = trajectory_rng(12)
        log = []
        for _ in range(10_000):
            sv = StateVector.basis(2, 0)
            apply_depolarizing(sv, (0, 1), 0.25, rng, log)
        rate = len(log) / 10_000
        assert abs(rate - 0.25) < 3 * np.sqrt(0.25 * 0.75 / 10_000)

    def test_bitflip_rate(self):
        rng = trajectory_rng(13)
        flips = 0
        for _ in range(10_000):
            sv = StateVector.basis(1, 0)
            apply_bitflip(sv, 0, 0.3, rng)
            flips += int(sv.indices[0])
        assert abs(flips / 10_000 - 0.3) < 3 * np.sqrt(0.3 * 0.7 / 10_000)

    def test_two_qubit_depolarizing_uniform_over_paulis(self):
        rng = trajectory_rng(14)
        log = []
        for _ in range(16_000):
            sv = StateVector.basis(2, 0)
            apply_depolarizing(sv, (0, 1), 1.0, rng, log)
        counts = {}
        for _, _, pauli in log:
            counts[pauli] = counts.get(pauli, 0) + 1
        assert len(counts) == 16
        for c in counts.values():
            assert abs(c / 16_000 - 1 / 16) < 3 * np.sqrt((1 / 16) * (15 / 16) / 16_000)


class TestTrajectory:
    def bell_circuit(self):
        b = CircuitBuilder()
        b.add_qubit(QubitKind.CONTROL)
        b.add_qubit(QubitKind.TARGET)
        b.bell_prep(0, 1)
        return b.build()

    def test_bell_prep_state(self):
        res = run_trajectory(self.bell_circuit(), 0)
        assert res.state.indices.tolist() == [0, 3]
        assert np.allclose(res.state.amps, [1 / np.sqrt(2)] * 2)

    def test_conditional_fires_on_xor(self):
        b = CircuitBuilder()
        q = b.add_qubit(QubitKind.TARGET)
        a = b.add_qubit(QubitKind.ANCILLA)
        b.gate(OpKind.H, (a,))
        z = b.measure_z(a)
        xor = b.xor(Condition(frozenset({z}), parity=1))
        b.gate(OpKind.X, (q,), condition=Condition(frozenset({xor})))
        c = b.build()
        res = run_trajectory(c, 0, forced_outcomes={z: 0})
        assert res.bits == {z: 0, xor: 1}
        assert res.state.indices[0] & 1 == 1  # fired because xor inverted
        res = run_trajectory(c, 0, forced_outcomes={z: 1})
        assert res.state.indices[0] & 1 == 0

    def test_init_noise_flips_data_only(self):
        b = CircuitBuilder()
        b.add_qubit(QubitKind.CONTROL)
        b.add_qubit(QubitKind.ANCILLA)
        c = b.build()
        noise = NoiseModel(p_init=1.0)
        res = run_trajectory(c, 0, noise, seed=5)
        assert res.state.indices.tolist() == [1]  # data flipped, ancilla not

    def test_measure_x_has_no_separate_noise(self):
        b = CircuitBuilder()
        a = b.add_qubit(QubitKind.ANCILLA)
        b.measure_x(a)
        c = b.build()
        noise = NoiseModel(p_1q=1.0)  # would flag any 1q-noise insertion
        res = run_trajectory(c, 0, noise, forced_outcomes={0: 0})
        assert res.error_log == []

    def test_error_log_records_events(self):
        b = CircuitBuilder()
        q = b.add_qubit(QubitKind.TARGET)
        b.gate(OpKind.X, (q,))
        c = b.build()
        res = run_trajectory(c, 0, NoiseModel(p_1q=1.0), seed=3)
        assert len(res.error_log) == 1
        assert res.error_log[0][0] == "depolarize"


class TestHelpers:
    def test_embed_basis_spreads_data_bits(self):
        b = CircuitBuilder()
        b.add_qubit(QubitKind.CONTROL)
        b.add_qubit(QubitKind.ANCILLA)
        b.add_qubit(QubitKind.TARGET)
        c = b.build()
        sv = embed_basis(c, 0b11)  # data qubits are 0 and 2
        assert sv.indices.tolist() == [0b101]

    def test_embed_data_state_round_trip(self):
        b = CircuitBuilder()
        b.add_qubit(QubitKind.CONTROL)
        b.add_qubit(QubitKind.ANCILLA)
        b.add_qubit(QubitKind.TARGET)
        c = b.build()
        prep = qft_prepare(2, 2)
        sv = embed_data_state(c, prep.indices, prep.amps)
        assert np.allclose(data_marginal(sv, c.data_qubits()), prep.dense())

    def test_data_marginal_rejects_entangled_rest(self):
        sv = StateVector.from_amplitudes(2, [0, 3], [1 / np.sqrt(2)] * 2)
        with pytest.raises(ValueError, match="entangled"):
            data_marginal(sv, [0])

    def test_qft_prepare_is_unitary_column(self):
        for i in range(8):
            sv = qft_prepare(i, 3)
            assert abs(sv.norm() - 1) < 1e-12
        # Columns are orthogonal.
        a, b = qft_prepare(1, 3).dense(), qft_prepare(5, 3).dense()
        assert abs(np.vdot(a, b)) < 1e-12

    def test_sample_readout_flips_with_readout_error(self):
        sv = StateVector.basis(1, 0)
        noise = NoiseModel(p_readout=1.0)
        bits = sample_readout(sv, [0], noise, trajectory_rng(0))
        assert bits == (1,)

    def test_qubit_cap(self, monkeypatch):
        with pytest.raises(QubitCapExceeded):
            StateVector.basis(DEFAULT_MAX_QUBITS + 1, 0)
        monkeypatch.setenv(MAX_QUBITS_ENV, "30")
        StateVector.basis(DEFAULT_MAX_QUBITS + 1, 0)  # now allowed
