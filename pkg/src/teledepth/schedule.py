"""Closed-form arithmetic of the halving recursion behind the decomposition.

At each level the current control count n_i splits into m_i pairs plus an
odd leftover: n_i = 2*m_i + ell_i with ell_i = (1 - (-1)^n_i)/2 and
m_i = (2*n_i - 1 + (-1)^n_i)/4. The next level handles n_{i+1} = m_i + ell_i
(equivalently ceil(n_i / 2)); the recursion ends at the first level with
m_i + ell_i = 2, except for n = 2 where a single level is used.

All arithmetic is integer-only; ceil(log2 n) is computed via bit length to
avoid floating-point edge cases at powers of two.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RecursionLevel:
    n: int
    m: int
    ell: int


@dataclass(frozen=True)
class Schedule:
    n: int
    levels: tuple[RecursionLevel, ...]

    @property
    def i_max(self) -> int:
        return len(self.levels)

    @property
    def sum_m(self) -> int:
        return sum(level.m for level in self.levels)


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"control count must be an integer >= 2, got {n!r}")


def level_params(n: int) -> tuple[int, int]:
    """Split n controls into (m pairs, leftover) at one recursion level."""
    _check_n(n)
    sign = 1 if n % 2 == 0 else -1
    ell = (1 - sign) // 2
    m = (2 * n - 1 + sign) // 4
    assert n == 2 * m + ell
    return m, ell


def build_schedule(n: int) -> Schedule:
    _check_n(n)
    levels = []
    ni = n
    while True:
        m, ell = level_params(ni)
        levels.append(RecursionLevel(ni, m, ell))
        if m + ell == 2 or ni == 2:
            break
        ni = m + ell
    return Schedule(n, tuple(levels))


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def i_max_closed_form(n: int) -> int:
    """Number of recursion levels: 1 for n = 2, ceil(log2 n) - 1 otherwise."""
    _check_n(n)
    if n == 2:
        return 1
    return ceil_log2(n) - 1


def toffoli_count_formula(schedule: Schedule) -> int:
    """1 + sum of m_i: one Toffoli per pair plus the terminal Toffoli.

    Note: at n = 2 the terminal gate of the constructed circuit is a CNOT,
    not a Toffoli, so this formula overcounts the built circuit by one
    there; it is kept as the quoted closed form.
    """
    return 1 + schedule.sum_m


def epr_and_ancilla(schedule: Schedule) -> tuple[int, int]:
    """(entangled pairs, ancilla qubits) = (sum m_i, 2 * sum m_i)."""
    s = schedule.sum_m
    return s, 2 * s
