import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teledepth.schedule import (
    Schedule,
    build_schedule,
    ceil_log2,
    epr_and_ancilla,
    i_max_closed_form,
    level_params,
    toffoli_count_formula,
)


class TestLevelParams:
    @pytest.mark.parametrize("n,m,ell", [
        (2, 1, 0), (3, 1, 1), (4, 2, 0), (5, 2, 1),
        (6, 3, 0), (7, 3, 1), (8, 4, 0),
    ])
    def test_small_values(self, n, m, ell):
        assert level_params(n) == (m, ell)

    @given(st.integers(2, 1 << 16))
    def test_split_identity(self, n):
        m, ell = level_params(n)
        assert n == 2 * m + ell
        assert ell == n % 2
        assert m + ell == (n + 1) // 2  # next level count is ceil(n/2)

    @pytest.mark.parametrize("bad", [1, 0, -3, 2.0, "5"])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            level_params(bad)


class TestSchedule:
    def test_n2_single_level(self):
        s = build_schedule(2)
        assert s.i_max == 1
        assert s.levels[0].m == 1

    def test_n7_levels(self):
        s = build_schedule(7)
        assert [(lv.n, lv.m, lv.ell) for lv in s.levels] == [(7, 3, 1), (4, 2, 0)]
        assert s.sum_m == 5

    @given(st.integers(2, 1 << 16))
    @settings(max_examples=300)
    def test_i_max_closed_form_matches_recursion(self, n):
        assert build_schedule(n).i_max == i_max_closed_form(n)

    def test_i_max_exhaustive_to_4096(self):
        for n in range(2, 4097):
            assert build_schedule(n).i_max == i_max_closed_form(n)

    @given(st.integers(3, 1 << 16))
    def test_levels_strictly_shrink(self, n):
        s = build_schedule(n)
        counts = [lv.n for lv in s.levels]
        assert all(a > b for a, b in zip(counts, counts[1:]))
        assert counts[-1] > 2 or n == 2


class TestFormulas:
    @pytest.mark.parametrize("n,count,ancillas", [
        (3, 2, 2), (4, 3, 4), (5, 4, 6), (6, 5, 8), (7, 6, 10),
    ])
    def test_count_and_ancillas(self, n, count, ancillas):
        s = build_schedule(n)
        assert toffoli_count_formula(s) == count
        pairs, anc = epr_and_ancilla(s)
        assert anc == ancillas
        assert pairs * 2 == anc

    def test_n2_formula_value(self):
        # The closed form gives 2 at n = 2 (the built circuit uses 1; see
        # the decomposer's terminal-gate note).
        assert toffoli_count_formula(build_schedule(2)) == 2

    def test_ceil_log2(self):
        assert [ceil_log2(n) for n in (2, 3, 4, 5, 8, 9)] == [1, 2, 2, 3, 3, 4]
