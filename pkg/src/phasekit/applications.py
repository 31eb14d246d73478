"""Worked scenarios: identical qubits, the Shor network, the dihedral HSP, and the binary phase circuit."""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

import numpy as np

from .cost import average_cost_fourier, make_cost
from .povm import SeedMatrix, outcome_distribution
from .spectrum import NORM_TOL, CanonicalModel, PhaseNetwork, SpectrumTable

TWO_PI = 2 * np.pi
MAX_DIHEDRAL_Q = 1 << 16
ENTANGLEMENT_NOTE = "optimal symmetric-subspace states are entangled states of the N qubits"


def symmetric_model(N: int, a: complex, b: complex) -> CanonicalModel:
    """Canonical model of ``(a|0> + b|1>)**N`` under ``n_l = 1`` for every qubit.

    ``x_k = sqrt(C(N, k)) |a|**(N-k) |b|**k``; the absorbed phase of ``|k>`` is
    ``(N-k) arg(a) + k arg(b)``.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    a, b = complex(a), complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > NORM_TOL:
        raise ValueError("(a, b) must be normalized")
    k = np.arange(N + 1)
    binom = np.array([comb(N, int(j)) for j in k], dtype=float)
    x = np.sqrt(binom) * abs(a) ** (N - k) * abs(b) ** k
    phases = np.exp(1j * ((N - k) * np.angle(a) + k * np.angle(b)))
    return CanonicalModel(x / np.linalg.norm(x), phases)


def product_state_cost(N: int) -> float:
    """Half-angle cost of the equal-weight product state on ``N`` identical qubits."""
    if N < 1:
        raise ValueError("N must be at least 1")
    terms = sum(np.sqrt(float(comb(N, k)) * comb(N, k + 1)) for k in range(N))
    return float(0.5 - terms / 2 ** (N + 1))


def product_family_cost(N: int, theta: float, kind: str = "half_angle") -> float:
    """Average cost of ``(cos theta |0> + sin theta |1>)**N`` under the optimal measurement."""
    model = symmetric_model(N, np.cos(theta), np.sin(theta))
    return average_cost_fourier(model, SeedMatrix.ones(N + 1), make_cost(kind, N + 1))


def shor_multipliers(L: int) -> PhaseNetwork:
    """Binary-weight network ``n_l = 2**(l-1)`` for ``l = 1..L``."""
    if L < 1:
        raise ValueError("L must be at least 1")
    return PhaseNetwork(tuple(1 << l for l in range(L)))


@dataclass(frozen=True)
class DihedralInstance:
    """Samples ``k_j`` from ``{0 .. 2**n - 1}``; the model has ``q = sum k_j + 1``."""

    n: int
    samples: tuple[int, ...]

    def __post_init__(self):
        samples = tuple(int(k) for k in self.samples)
        if self.n < 0 or any(not 0 <= k < 2 ** self.n for k in samples):
            raise ValueError(f"samples must lie in [0, 2**{self.n})")
        object.__setattr__(self, "samples", samples)

    @property
    def q(self) -> int:
        return sum(self.samples) + 1

    @classmethod
    def random(cls, n: int, m: int, rng: np.random.Generator) -> "DihedralInstance":
        return cls(n, tuple(int(k) for k in rng.integers(0, 2 ** n, m)))


def subset_sum_counts(samples) -> np.ndarray:
    """Subset-sum multiplicities that tolerate zero samples (which double the count at every sum)."""
    counts = np.zeros(sum(samples) + 1, dtype=np.int64)
    counts[0] = 1
    for k in samples:
        if k == 0:
            counts = 2 * counts
        else:
            counts[k:] = counts[k:] + counts[:-k]
    return counts


def dihedral_model(instance: DihedralInstance) -> tuple[CanonicalModel, SpectrumTable]:
    """Canonical model of ``prod_j (|0> + exp(i k_j phi)|1>) / sqrt(2)``.

    ``x_j = sqrt(n_j / 2**m)`` with ``n_j`` the number of subsets of the
    samples summing to ``j``.
    """
    m = len(instance.samples)
    if m > 62:
        raise ValueError("at most 62 samples are supported")
    counts = subset_sum_counts(instance.samples)
    x = np.sqrt(counts / 2.0 ** m)
    return CanonicalModel(x), SpectrumTable(counts)


def circular_distance(a, b):
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class DihedralReport:
    n: int
    m: int
    trials: int
    seed: int
    p_within_bin: float
    p_within_target: float
    mean_error: float
    error_histogram: tuple[int, ...]
    bin_edges: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "trials": self.trials,
            "seed": self.seed,
            "p_within_bin": self.p_within_bin,
            "p_within_target": self.p_within_target,
            "mean_error": self.mean_error,
            "error_histogram": list(self.error_histogram),
            "bin_edges": list(self.bin_edges),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def histogram_csv(self) -> str:
        lines = ["bin_low,bin_high,count"]
        for lo, hi, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.error_histogram):
            lines.append(f"{lo!r},{hi!r},{c}")
        return "\n".join(lines) + "\n"


# error bins in units of 2 pi / q; the last bin also takes everything beyond its upper edge
HIST_BINS = 8
HIST_WIDTH = 0.5


def dihedral_estimate_experiment(n: int, m: int, trials: int, seed: int) -> DihedralReport:
    """Estimate a uniform phase from ``m`` random dihedral samples with the QFT measurement.

    Success is reported two ways: error within half an outcome bin
    (``pi / q``) and within the target ``2 pi / 2**n``.  The error histogram
    is binned in units of the outcome spacing ``2 pi / q`` of each trial.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if m * (2 ** n - 1) + 1 > MAX_DIHEDRAL_Q:
        raise ValueError(f"worst-case q exceeds the cap {MAX_DIHEDRAL_Q}")
    rng = np.random.default_rng(seed)
    within_bin = within_target = 0
    err_sum = 0.0
    hist = np.zeros(HIST_BINS, dtype=np.int64)
    target = TWO_PI / 2 ** n
    for _ in range(trials):
        inst = DihedralInstance.random(n, m, rng)
        model, _ = dihedral_model(inst)
        q = model.q
        phi = rng.uniform(0, TWO_PI)
        probs = outcome_distribution(model, phi)
        s = int(rng.choice(q, p=probs))
        err = float(circular_distance(TWO_PI * s / q, phi))
        within_bin += err <= np.pi / q + 1e-15
        within_target += err <= target
        err_sum += err
        units = err / (TWO_PI / q)
        hist[min(int(units / HIST_WIDTH), HIST_BINS - 1)] += 1
    edges = tuple(HIST_WIDTH * i for i in range(HIST_BINS + 1))
    return DihedralReport(n, m, trials, seed, within_bin / trials, within_target / trials,
                          err_sum / trials, tuple(int(h) for h in hist), edges)


@dataclass(frozen=True)
class GateList:
    """``(qubit, m)`` pairs, each meaning ``u_phi ** m`` on that qubit."""

    gates: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if any(m < 1 for _, m in self.gates):
            raise ValueError("phase multiples must be positive")

    def network(self) -> PhaseNetwork:
        return PhaseNetwork(tuple(m for _, m in self.gates))

    def phase_of(self, k: int, phi: float) -> complex:
        """Accumulated phase on basis state ``|k>`` (bit ``l`` of ``k`` on qubit ``l``)."""
        out = 1.0 + 0.0j
        for qubit, m in self.gates:
            if (k >> qubit) & 1:
                out *= np.exp(1j * m * phi)
        return out


@dataclass(frozen=True)
class CircuitCheck:
    bits: int
    phi: float
    max_error: float
    passed: bool


def phase_circuit(bits: int, phi: float, tol: float = 1e-12) -> tuple[GateList, CircuitCheck]:
    """Per-bit decomposition of ``|k> -> exp(i phi k)|k>`` on ``bits`` qubits.

    Verified by comparing the accumulated gate phases against the target for
    every ``k < 2**bits``.
    """
    if bits < 1:
        raise ValueError("bits must be at least 1")
    gates = GateList(tuple((l, 1 << l) for l in range(bits)))
    k = np.arange(2 ** bits)
    bit_matrix = (k[:, None] >> np.arange(bits)[None, :]) & 1
    per_gate = np.exp(1j * np.array([m for _, m in gates.gates]) * phi)
    achieved = np.prod(np.where(bit_matrix == 1, per_gate[None, :], 1.0), axis=1)
    target = np.exp(1j * phi * k)
    err = float(np.max(np.abs(achieved - target)))
    return gates, CircuitCheck(bits, float(phi), err, err <= tol)
