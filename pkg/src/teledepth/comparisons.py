"""Cost registry for competing multi-controlled-Toffoli decompositions.

Only quantities quoted as formulas are included; anything published solely
as a plotted curve is marked unavailable rather than estimated. Non-integer
depth formulas are reported both raw and ceilinged (depth is integral).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

from .schedule import build_schedule, ceil_log2, epr_and_ancilla, toffoli_count_formula


@dataclass(frozen=True)
class CostFormula:
    """Per-method asymptotic costs; ``None`` fields are unavailable."""

    name: str
    toffoli_depth: Callable[[int], float]
    toffoli_count: Callable[[int], int] | None = None
    ancillas: Callable[[int], int] | None = None
    note: str = ""


def _teleport_depth(n: int) -> float:
    return 1.0


def _teleport_count(n: int) -> int:
    return toffoli_count_formula(build_schedule(n))


def _teleport_ancillas(n: int) -> int:
    return epr_and_ancilla(build_schedule(n))[1]


def registry() -> list[CostFormula]:
    return [
        CostFormula("nie", lambda n: 20.0 * math.log2(n),
                    ancillas=lambda n: 1,
                    note="logarithmic-depth construction, single ancilla"),
        CostFormula("khattar_1anc", lambda n: float(2 * n - 3),
                    ancillas=lambda n: 1,
                    note="linear depth, single ancilla"),
        CostFormula("khattar_2anc", lambda n: 4.0 * math.log2(n),
                    ancillas=lambda n: 2,
                    note="approximate logarithmic depth, two ancillas"),
        CostFormula("dutta_bound", lambda n: float(ceil_log2(n)),
                    note="depth lower bound; ancilla/count curves unavailable"),
        CostFormula("teleportation", _teleport_depth,
                    toffoli_count=_teleport_count,
                    ancillas=_teleport_ancillas,
                    note="measurement-and-feedforward decomposition"),
    ]


@dataclass(frozen=True)
class TableRow:
    n: int
    method: str
    toffoli_depth: int
    toffoli_depth_raw: float
    toffoli_count: int | None
    ancillas: int | None


def comparison_table(n_range) -> list[TableRow]:
    """Depth/count/ancilla rows per (n, method); unavailable cells None."""
    rows = []
    methods = registry()
    for n in n_range:
        if not 2 <= n <= (1 << 16):
            raise ValueError(f"n={n} outside supported range [2, 65536]")
        for f in methods:
            raw = float(f.toffoli_depth(n))
            rows.append(TableRow(
                n=n, method=f.name,
                toffoli_depth=math.ceil(raw - 1e-12),
                toffoli_depth_raw=raw,
                toffoli_count=None if f.toffoli_count is None else f.toffoli_count(n),
                ancillas=None if f.ancillas is None else f.ancillas(n)))
    return rows


CSV_HEADER = ["n", "method", "toffoli_depth", "toffoli_depth_raw",
              "toffoli_count", "ancillas"]


def table_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.n, r.method, r.toffoli_depth, repr(r.toffoli_depth_raw),
                         "" if r.toffoli_count is None else r.toffoli_count,
                         "" if r.ancillas is None else r.ancillas])
    return buf.getvalue()
