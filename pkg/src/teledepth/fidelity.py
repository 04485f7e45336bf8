"""Oracle verification, classical fidelities, and noise-sweep harness.

The multi-controlled Toffoli oracle is evaluated exactly; decomposed
circuits are checked against it per measurement branch. Process fidelity
of noisy runs is sandwiched by the Hofmann bounds computed from two
complementary classical fidelities: F_z over the computational basis and
F_c over the mutually unbiased (Fourier-transformed) basis, with
F_z + F_c - 1 <= F_pro <= min(F_z, F_c).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .simulate import (
    NOISELESS,
    NoiseModel,
    data_marginal,
    embed_data_state,
    max_qubits,
    qft_prepare,
    run_trajectory,
    sample_readout,
    trajectory_rng,
)

_PHASE_TOL = 1e-9


# -- exact oracle -----------------------------------------------------------

def mct_oracle(n: int, index: int) -> int:
    """Image of basis index under the (n+1)-qubit multi-controlled Toffoli.

    Bit i < n is control i; bit n is the target.
    """
    if not 0 <= index < (1 << (n + 1)):
        raise ValueError(f"index {index} out of range for {n + 1} qubits")
    mask = (1 << n) - 1
    if index & mask == mask:
        return index ^ (1 << n)
    return index


def mct_oracle_bits(bits) -> tuple[int, ...]:
    """Bit-tuple form: (c_0, ..., c_{n-1}, t) -> same with t ^= AND(c)."""
    bits = tuple(bits)
    n = len(bits) - 1
    index = sum(b << i for i, b in enumerate(bits))
    out = mct_oracle(n, index)
    return tuple((out >> i) & 1 for i in range(n + 1))


def mct_permutation(n: int) -> np.ndarray:
    dim = 1 << (n + 1)
    return np.array([mct_oracle(n, j) for j in range(dim)], dtype=np.int64)


# -- branch verification ----------------------------------------------------

EXHAUSTIVE_BRANCH_LIMIT = 4
DEFAULT_SAMPLED_BRANCHES = 256


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    n: int
    inputs_tested: int
    branches_tested: int
    exhaustive: bool
    counterexample: dict | None = None

    def summary(self) -> str:
        mode = "exhaustive" if self.exhaustive else "sampled"
        head = (f"n={self.n}: {self.branches_tested} {mode} branches x "
                f"{self.inputs_tested} inputs")
        if self.ok:
            return head + " -> all match oracle"
        return head + f" -> MISMATCH {self.counterexample}"


def _branch_outcomes(circuit: Circuit, branches: int | None, seed: int):
    """Yield forced-outcome maps; exhaustive when branches is None."""
    mc = circuit.measurement_cbits()
    if branches is None:
        for b in range(1 << len(mc)):
            yield {c: (b >> k) & 1 for k, c in enumerate(mc)}
    else:
        rng = trajectory_rng(seed, 0)
        for _ in range(branches):
            draws = rng.integers(0, 2, size=len(mc))
            yield {c: int(draws[k]) for k, c in enumerate(mc)}


def verify_permutation(circuit: Circuit, perm, *, branches: int | None = None,
                       exhaustive: bool | None = None, seed: int = 0,
                       label: int | None = None) -> VerificationReport:
    """Check that every measurement branch of a circuit realizes the given
    permutation of data-register basis states.

    Within one branch all inputs must additionally acquire the same global
    phase, so each branch is the permutation exactly (up to a branch-global
    phase). Default policy: exhaustive branches when the circuit has at
    most 8 measurements, otherwise 256 seeded sampled branches.
    """
    mc = circuit.measurement_cbits()
    if exhaustive is None and branches is None:
        exhaustive = len(mc) <= 8
    elif exhaustive is None:
        exhaustive = False
    if exhaustive:
        branches = None
    elif branches is None:
        branches = DEFAULT_SAMPLED_BRANCHES

    data = circuit.data_qubits()
    dim = 1 << len(data)
    if len(perm) != dim:
        raise ValueError(f"permutation has {len(perm)} entries, expected {dim}")
    if label is None:
        label = len(data)
    tested = 0
    for forced in _branch_outcomes(circuit, branches, seed):
        tested += 1
        ref_amp = None
        for i in range(dim):
            result = run_trajectory(circuit, i, NOISELESS, forced_outcomes=forced)
            got = result.data_bits(circuit)
            expected = int(perm[i])
            expected_bits = tuple((expected >> k) & 1 for k in range(len(data)))
            if got != expected_bits:
                return VerificationReport(False, label, dim, tested, branches is None,
                                          {"input": i, "branch": dict(forced),
                                           "expected": expected_bits, "got": got})
            amp = complex(result.state.amps[0])
            if ref_amp is None:
                ref_amp = amp
            elif abs(amp - ref_amp) > _PHASE_TOL:
                return VerificationReport(False, label, dim, tested, branches is None,
                                          {"input": i, "branch": dict(forced),
                                           "error": "relative phase",
                                           "amp": amp, "reference": ref_amp})
    return VerificationReport(True, label, dim, tested, branches is None)


def verify_mct_circuit(circuit: Circuit, n: int, *, branches: int | None = None,
                       exhaustive: bool | None = None,
                       seed: int = 0) -> VerificationReport:
    """Check a circuit against the MCT oracle on every basis input, per
    measurement branch (see ``verify_permutation`` for the branch policy)."""
    data = circuit.data_qubits()
    if len(data) != n + 1:
        raise ValueError(f"circuit has {len(data)} data qubits, expected {n + 1}")
    return verify_permutation(circuit, mct_permutation(n), branches=branches,
                              exhaustive=exhaustive, seed=seed, label=n)


# -- statistical helpers ----------------------------------------------------

def wilson_interval(successes: int, total: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        raise ValueError("total must be positive")
    p = successes / total
    denom = 1 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = (z / denom) * np.sqrt(p * (1 - p) / total + z * z / (4 * total * total))
    return (float(max(0.0, center - half)), float(min(1.0, center + half)))


def hofmann_bounds(f_z: float, f_c: float) -> tuple[float, float]:
    """(f_z + f_c - 1, min(f_z, f_c)); the lower bound may be negative and
    is reported raw."""
    for v in (f_z, f_c):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"classical fidelity {v} outside [0, 1]")
    return (f_z + f_c - 1.0, min(f_z, f_c))


# -- classical fidelities ---------------------------------------------------

def _count_z(circuit: Circuit, n: int, noise: NoiseModel, shots: int,
             seed: int, stream_base: int) -> tuple[int, int]:
    data = circuit.data_qubits()
    dim = 1 << (n + 1)
    successes = 0
    for i in range(dim):
        expected = mct_oracle(n, i)
        for s in range(shots):
            rng = trajectory_rng(seed, (stream_base + i) * shots + s)
            result = run_trajectory(circuit, i, noise, rng=rng)
            bits = sample_readout(result.state, data, noise, rng)
            got = sum(b << k for k, b in enumerate(bits))
            successes += got == expected
    return successes, dim * shots


def _count_c(circuit: Circuit, n: int, noise: NoiseModel, shots: int,
             seed: int, stream_base: int) -> tuple[int, int]:
    data = circuit.data_qubits()
    q = n + 1
    dim = 1 << q
    perm = mct_permutation(n)
    inv_sqrt_dim = 1.0 / np.sqrt(dim)
    successes = 0
    for i in range(dim):
        prepared = qft_prepare(i, q)
        for s in range(shots):
            rng = trajectory_rng(seed, (stream_base + i) * shots + s)
            state = embed_data_state(circuit, prepared.indices, prepared.amps)
            result = run_trajectory(circuit, state, noise, rng=rng)
            v = result.state
            marginal = data_marginal(v, data)
            # Rotate back: inverse oracle (an involution) then inverse
            # Fourier transform; an ideal run lands exactly on |i>.
            rotated = np.fft.fft(marginal[perm]) * inv_sqrt_dim
            probs = np.abs(rotated) ** 2
            probs /= probs.sum()
            j = int(rng.choice(dim, p=probs))
            for k in range(q):
                if noise.p_readout > 0.0 and rng.random() < noise.p_readout:
                    j ^= 1 << k
            successes += j == i
    return successes, dim * shots


def classical_fidelity_z(circuit: Circuit, n: int, noise: NoiseModel,
                         shots: int, seed: int, stream_base: int = 0) -> float:
    """Average probability of the correct computational-basis outcome over
    all 2^{n+1} basis inputs, estimated with ``shots`` trajectories each."""
    successes, total = _count_z(circuit, n, noise, shots, seed, stream_base)
    return successes / total


def classical_fidelity_c(circuit: Circuit, n: int, noise: NoiseModel,
                         shots: int, seed: int, stream_base: int = 0) -> float:
    """Average success probability over the Fourier-transformed (mutually
    unbiased) input basis, scored by rotating the output back ideally."""
    successes, total = _count_c(circuit, n, noise, shots, seed, stream_base)
    return successes / total


@dataclass(frozen=True)
class FidelityEstimate:
    f_z: float
    f_c: float
    lower: float
    upper: float
    shots_per_input: int
    inputs_count: int
    f_z_interval: tuple[float, float] | None = None
    f_c_interval: tuple[float, float] | None = None


def estimate_fidelity(circuit: Circuit, n: int, noise: NoiseModel, shots: int,
                      seed: int, *, stream_base_z: int = 0,
                      stream_base_c: int | None = None,
                      z: float = 1.96) -> FidelityEstimate:
    dim = 1 << (n + 1)
    if stream_base_c is None:
        stream_base_c = stream_base_z + dim
    sz, total = _count_z(circuit, n, noise, shots, seed, stream_base_z)
    sc, _ = _count_c(circuit, n, noise, shots, seed, stream_base_c)
    f_z, f_c = sz / total, sc / total
    lower, upper = hofmann_bounds(f_z, f_c)
    return FidelityEstimate(f_z, f_c, lower, upper, shots, dim,
                            wilson_interval(sz, total, z),
                            wilson_interval(sc, total, z))


# -- noise sweep ------------------------------------------------------------

class ResourceCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Per-axis rate grid: ``divisions`` equal parts between the endpoints,
    log-spaced by default (so divisions + 1 points, endpoints inclusive)."""

    start: float = 1e-3
    stop: float = 1e-1
    divisions: int = 18
    linear: bool = False

    def __post_init__(self):
        if not (0.0 < self.start <= self.stop):
            raise ValueError("need 0 < start <= stop")
        if self.divisions < 0:
            raise ValueError("divisions must be nonnegative")

    def rates(self) -> tuple[float, ...]:
        if self.divisions == 0:
            return (self.start,)
        if self.linear:
            pts = np.linspace(self.start, self.stop, self.divisions + 1)
        else:
            pts = np.geomspace(self.start, self.stop, self.divisions + 1)
        return tuple(float(p) for p in pts)


@dataclass(frozen=True)
class SweepGrid:
    n: int
    toffoli_rates: tuple[float, ...]
    epr_rates: tuple[float, ...]
    cells: tuple[tuple[FidelityEstimate, ...], ...]  # [toffoli][epr]
    shots: int
    seed: int

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.toffoli_rates), len(self.epr_rates))


def run_sweep(n: int, grid: GridSpec, shots: int, seed: int, *,
              circuit: Circuit | None = None, n_cap: int = 7,
              progress=None) -> SweepGrid:
    """Estimate Hofmann-bounded fidelity on every (p_toffoli, p_epr) cell.

    Trajectory randomness is indexed by (cell, basis, input, shot), so
    results are independent of execution order. ``circuit`` defaults to
    the deferred teleportation decomposition of the n-control MCT.
    """
    if not 2 <= n <= n_cap:
        raise ResourceCapError(f"n={n} outside the supported range [2, {n_cap}]")
    if circuit is None:
        from .decompose import decompose_mct, defer_corrections
        circuit = defer_corrections(decompose_mct(n))
    if circuit.num_qubits > max_qubits():
        raise ResourceCapError(f"circuit needs {circuit.num_qubits} qubits, "
                               f"cap is {max_qubits()}")
    t_rates = grid.rates()
    e_rates = grid.rates()
    dim = 1 << (n + 1)
    rows = []
    for ti, pt in enumerate(t_rates):
        row = []
        for ei, pe in enumerate(e_rates):
            cell = ti * len(e_rates) + ei
            noise = NoiseModel.hierarchy(pt, pe)
            est = estimate_fidelity(circuit, n, noise, shots, seed,
                                    stream_base_z=(cell * 2) * dim,
                                    stream_base_c=(cell * 2 + 1) * dim)
            row.append(est)
            if progress is not None:
                progress(cell, len(t_rates) * len(e_rates), est)
        rows.append(tuple(row))
    return SweepGrid(n, t_rates, e_rates, tuple(rows), shots, seed)


CSV_HEADER = ["n", "p_toffoli", "p_epr", "p_2q", "p_1q", "p_init",
              "p_readout", "f_z", "f_c", "lower", "upper", "shots", "seed"]


def to_csv(grid: SweepGrid) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for ti, pt in enumerate(grid.toffoli_rates):
        for ei, pe in enumerate(grid.epr_rates):
            est = grid.cells[ti][ei]
            noise = NoiseModel.hierarchy(pt, pe)
            writer.writerow([grid.n, repr(pt), repr(pe), repr(noise.p_2q),
                             repr(noise.p_1q), repr(noise.p_init),
                             repr(noise.p_readout), repr(est.f_z), repr(est.f_c),
                             repr(est.lower), repr(est.upper),
                             grid.shots, grid.seed])
    return buf.getvalue()


def delta_fidelity(grid_a: SweepGrid, grid_b: SweepGrid) -> SweepGrid:
    """Cellwise subtraction (a - b) of like fidelities and bounds."""
    if grid_a.shape != grid_b.shape:
        raise ValueError(f"grid shapes differ: {grid_a.shape} vs {grid_b.shape}")
    cells = []
    for row_a, row_b in zip(grid_a.cells, grid_b.cells):
        cells.append(tuple(
            FidelityEstimate(a.f_z - b.f_z, a.f_c - b.f_c,
                             a.lower - b.lower, a.upper - b.upper,
                             a.shots_per_input, a.inputs_count)
            for a, b in zip(row_a, row_b)))
    return SweepGrid(grid_a.n, grid_a.toffoli_rates, grid_a.epr_rates,
                     tuple(cells), grid_a.shots, grid_a.seed)
