import pytest

from teledepth.applications import (
    AdderSpec,
    QromWordSpec,
    RuleSpec,
    STRATEGIES,
    adder_depth_table,
    adder_table_to_csv,
    build_adder,
    build_decision_rule,
    build_neuron,
    build_qrom_word,
    dutta_adder_depth_proxy,
    increment_permutation,
    indicator_permutation,
    qrom_permutation,
)
from teledepth.circuit import toffoli_depth, validate
from teledepth.fidelity import verify_permutation
from teledepth.simulate import NOISELESS, embed_basis, run_trajectory


class TestAdder:
    @pytest.mark.parametrize("strategy", STRATEGIES)
    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_increment_mod_2q(self, q, strategy):
        c = build_adder(AdderSpec(q, strategy))
        assert validate(c) == []
        report = verify_permutation(c, increment_permutation(q))
        assert report.ok, report.counterexample

    def test_wraparound(self):
        c = build_adder(AdderSpec(4))
        res = run_trajectory(c, 15, NOISELESS)
        assert res.data_bits(c) == (0, 0, 0, 0)

    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_repeated_application_is_identity(self, q):
        c = build_adder(AdderSpec(q))
        state = embed_basis(c, 3 % (1 << q))
        for _ in range(1 << q):
            state = run_trajectory(c, state, NOISELESS).state
        assert state.indices.tolist() == [3 % (1 << q)]
        assert abs(state.amps[0] - 1) < 1e-9

    def test_teleport_depth_is_q_minus_2(self):
        for q in (3, 4, 5):
            c = build_adder(AdderSpec(q, "mct_teleportation"))
            assert toffoli_depth(c) == q - 2

    def test_rejects_narrow_register(self):
        with pytest.raises(ValueError):
            AdderSpec(1)

    def test_rejects_unknown_strategy(self):
        with pytest.raises(ValueError):
            AdderSpec(4, "magic")


class TestAdderDepthTable:
    def test_reference_values(self):
        rows = {r.q: r for r in adder_depth_table(range(3, 6))}
        assert rows[4].teleportation_depth == 2
        assert rows[4].dutta_proxy_depth == 3  # ceil(log2 2) + ceil(log2 3)
        assert rows[3].teleportation_depth == 1

    def test_teleportation_at_most_proxy(self):
        for row in adder_depth_table(range(3, 11)):
            assert row.teleportation_depth <= row.dutta_proxy_depth

    def test_proxy_formula(self):
        assert dutta_adder_depth_proxy(6) == 1 + 2 + 2 + 3

    def test_csv_has_empty_unavailable_column(self):
        text = adder_table_to_csv(adder_depth_table([3, 4]))
        lines = text.strip().split("\n")
        assert lines[0] == "q,teleportation_depth,dutta_proxy_depth,vedral_depth"
        assert all(l.endswith(",") for l in lines[1:])

    def test_rejects_q_below_3(self):
        with pytest.raises(ValueError):
            adder_depth_table([2])


class TestQrom:
    def test_worked_example_match(self):
        # r=1, address 000 matched, word 101: d0 and d2 flip, s returns to 0.
        spec = QromWordSpec("000", "101")
        c = build_qrom_word(spec)
        res = run_trajectory(c, 0b1, NOISELESS)  # r=1, a=000, s=0, d=000
        bits = res.data_bits(c)
        assert bits == (1, 0, 0, 0, 0, 1, 0, 1)  # (r, a0..a2, s, d0..d2)

    def test_read_flag_off(self):
        c = build_qrom_word(QromWordSpec("000", "101"))
        res = run_trajectory(c, 0b0, NOISELESS)
        assert res.data_bits(c) == (0,) * 8

    def test_address_mismatch(self):
        c = build_qrom_word(QromWordSpec("000", "101"))
        res = run_trajectory(c, 0b11, NOISELESS)  # r=1 but a=100
        assert res.data_bits(c) == (1, 1, 0, 0, 0, 0, 0, 0)

    @pytest.mark.parametrize("strategy", STRATEGIES)
    def test_truth_table_exhaustive(self, strategy):
        spec = QromWordSpec("010", "110", strategy)
        c = build_qrom_word(spec)
        branches = None if strategy == "mct_unitary" else 12
        report = verify_permutation(c, qrom_permutation(spec), branches=branches)
        assert report.ok, report.counterexample

    def test_match_flag_always_uncomputed(self):
        spec = QromWordSpec("000", "101")
        c = build_qrom_word(spec)
        s_bit = 1 + len(spec.address)
        for r_a in range(16):  # all (r, a) combinations, s and d zero
            res = run_trajectory(c, r_a, NOISELESS)
            assert res.data_bits(c)[s_bit] == 0

    def test_rejects_bad_bitstring(self):
        with pytest.raises(ValueError):
            QromWordSpec("0a0", "101")


class TestNeuronAndRule:
    def test_neuron_conjunction(self):
        c = build_neuron(4)
        assert run_trajectory(c, 0b01111, NOISELESS).data_bits(c)[-1] == 1
        assert run_trajectory(c, 0b00111, NOISELESS).data_bits(c)[-1] == 0

    @pytest.mark.parametrize("strategy", STRATEGIES)
    def test_neuron_matches_indicator(self, strategy):
        c = build_neuron(4, strategy)
        branches = None if strategy == "mct_unitary" else 12
        report = verify_permutation(c, indicator_permutation("1111"),
                                    branches=branches)
        assert report.ok, report.counterexample

    def test_rule_fires_only_on_pattern(self):
        c = build_decision_rule(RuleSpec("0101"))
        match = 0b1010  # features f0..f3 = 0,1,0,1 little-endian
        assert run_trajectory(c, match, NOISELESS).data_bits(c)[-1] == 1
        assert run_trajectory(c, 0b1011, NOISELESS).data_bits(c)[-1] == 0

    @pytest.mark.parametrize("strategy", STRATEGIES)
    def test_rule_matches_indicator_exhaustively(self, strategy):
        c = build_decision_rule(RuleSpec("0101", strategy))
        branches = None if strategy == "mct_unitary" else 12
        report = verify_permutation(c, indicator_permutation("0101"),
                                    branches=branches)
        assert report.ok, report.counterexample

    def test_rule_undoes_preparation_x(self):
        # Feature register returns to its input value on mismatch inputs.
        c = build_decision_rule(RuleSpec("0011"))
        res = run_trajectory(c, 0b0110, NOISELESS)
        assert res.data_bits(c)[:4] == (0, 1, 1, 0)

    def test_rejects_tiny_inputs(self):
        with pytest.raises(ValueError):
            build_neuron(1)
        with pytest.raises(ValueError):
            RuleSpec("1")
