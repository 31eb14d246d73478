"""Phase networks, their shift-operator spectrum, and reduction to the canonical model.

A network applies ``u_phi ** n_l`` to qubit ``l``.  On the computational basis
state ``|b_1 ... b_L>`` this is multiplication by ``exp(i phi sum_l b_l n_l)``,
so the eigenvalues of the shift operator are the subset sums of the
multipliers.  Basis states are indexed big-endian: qubit 0 is the most
significant bit, matching ``np.kron`` ordering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

SUPPORT_TOL = 1e-12
NORM_TOL = 1e-9
MAX_CANONICALIZE_QUBITS = 24


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhaseNetwork:
    """Multiset of positive integer multipliers ``n_l`` defining ``U_phi``."""

    multipliers: tuple[int, ...]

    def __post_init__(self):
        mults = tuple(int(n) for n in self.multipliers)
        for raw, n in zip(self.multipliers, mults):
            if n != raw or n < 1:
                raise ValueError(f"multipliers must be positive integers, got {raw!r}")
        object.__setattr__(self, "multipliers", mults)

    @property
    def num_qubits(self) -> int:
        return len(self.multipliers)

    @property
    def total(self) -> int:
        return sum(self.multipliers)

    @classmethod
    def from_json(cls, text: str) -> "PhaseNetwork":
        data = json.loads(text)
        if not isinstance(data, list) or any(isinstance(n, bool) or not isinstance(n, int) for n in data):
            raise ValueError("network must be a JSON array of positive integers")
        return cls(tuple(data))

    def to_json(self) -> str:
        return json.dumps(list(self.multipliers))

    def eigenvalues(self) -> np.ndarray:
        """Shift-operator eigenvalue of every computational basis state (length ``2**L``)."""
        sums = np.zeros(1, dtype=np.int64)
        for n in self.multipliers:
            sums = (sums[:, None] + np.array([0, n], dtype=np.int64)[None, :]).ravel()
        return sums

    def unitary_diagonal(self, phi: float) -> np.ndarray:
        return np.exp(1j * phi * self.eigenvalues())


@dataclass(frozen=True)
class SpectrumTable:
    multiplicities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "multiplicities", _frozen(self.multiplicities))

    @property
    def total(self) -> int:
        return len(self.multiplicities) - 1

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(k) for k in np.flatnonzero(self.multiplicities))

    def is_complete(self) -> bool:
        """Every integer in ``0..N`` is a subset sum."""
        return bool(np.all(self.multiplicities > 0))

    def is_multiplicity_free(self) -> bool:
        return bool(np.all(self.multiplicities <= 1))

    def tolist(self) -> list[int]:
        return [int(m) for m in self.multiplicities]


def subset_sum_spectrum(network: PhaseNetwork | list[int] | tuple[int, ...]) -> SpectrumTable:
    """Count bitstrings per subset sum with the standard 0/1 knapsack recurrence.

    Runs in ``O(L * N)``.  Counts switch to Python integers once ``2**L`` could
    overflow int64.
    """
    if not isinstance(network, PhaseNetwork):
        network = PhaseNetwork(tuple(network))
    dtype = np.int64 if network.num_qubits < 62 else object
    counts = np.zeros(network.total + 1, dtype=dtype)
    counts[0] = 1
    for n in network.multipliers:
        shifted = counts[:-n].copy()
        counts[n:] += shifted
    return SpectrumTable(counts)


@dataclass(frozen=True)
class CanonicalModel:
    """Non-degenerate estimation problem on ``span{|k>}``, ``k = 0..q-1``.

    ``amplitudes[k]`` is ``x_k = <k|Psi_0> >= 0``.  ``phases[k]`` is the unit
    modulus factor absorbed when forming ``|k>`` (1 where ``x_k = 0``).
    Entries with ``x_k = 0`` complete the support to ``Z_q`` with zero weight.
    """

    amplitudes: np.ndarray
    phases: np.ndarray = None

    def __post_init__(self):
        x = np.asarray(self.amplitudes, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-d vector")
        if np.any(x < 0) or not np.all(np.isfinite(x)):
            raise ValueError("amplitudes must be finite and nonnegative")
        norm = np.linalg.norm(x)
        if norm == 0:
            raise ValueError("amplitudes must not all vanish")
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"amplitudes are not normalized (norm {norm})")
        x = np.where(x * x > SUPPORT_TOL, x, 0.0)
        x = x / np.linalg.norm(x)
        if self.phases is None:
            ph = np.ones(x.size, dtype=complex)
        else:
            ph = np.asarray(self.phases, dtype=complex)
            if ph.shape != x.shape:
                raise ValueError("phases must match amplitudes in length")
        object.__setattr__(self, "amplitudes", _frozen(x))
        object.__setattr__(self, "phases", _frozen(ph))

    @property
    def q(self) -> int:
        return self.amplitudes.size

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(k) for k in np.flatnonzero(self.amplitudes))

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "support": list(self.support),
            "amplitudes": [float(v) for v in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CanonicalModel":
        x = np.asarray(data["amplitudes"], dtype=float)
        if "q" in data and int(data["q"]) != x.size:
            raise ValueError("q does not match the amplitude count")
        return cls(x)


def _input_vector(network: PhaseNetwork, state) -> np.ndarray:
    if network.num_qubits > MAX_CANONICALIZE_QUBITS:
        raise ValueError(f"canonicalize supports at most {MAX_CANONICALIZE_QUBITS} qubits")
    psi = np.asarray(state, dtype=complex).ravel()
    if psi.size != 2 ** network.num_qubits:
        raise ValueError(f"expected {2 ** network.num_qubits} amplitudes, got {psi.size}")
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("input state is the zero vector")
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"input state is not normalized (norm {norm})")
    return psi


def canonicalize(network: PhaseNetwork, state) -> CanonicalModel:
    """Project ``state`` onto each shift eigenspace and keep weights and phases.

    Only ``p_k`` and one phase per eigenspace are retained; the projected
    vectors themselves are available from :func:`eigenbasis_vector`.
    """
    psi = _input_vector(network, state)
    ks = network.eigenvalues()
    weights = np.abs(psi) ** 2
    p = np.bincount(ks, weights=weights, minlength=network.total + 1)

    # phase of the dominant component within each eigenspace
    order = np.lexsort((-weights, ks))
    first = np.ones(order.size, dtype=bool)
    first[1:] = ks[order][1:] != ks[order][:-1]
    lead = order[first]
    phases = np.ones(network.total + 1, dtype=complex)
    lead_vals = psi[lead]
    nonzero = np.abs(lead_vals) > 0
    phases[ks[lead][nonzero]] = lead_vals[nonzero] / np.abs(lead_vals[nonzero])
    phases[p <= SUPPORT_TOL] = 1.0

    x = np.sqrt(np.where(p > SUPPORT_TOL, p, 0.0))
    return CanonicalModel(x / np.linalg.norm(x), phases)


def eigenbasis_vector(network: PhaseNetwork, state, k: int) -> np.ndarray:
    """Return ``|k> = P_k |Psi_0> / sqrt(p_k)`` as a ``2**L`` vector."""
    psi = _input_vector(network, state)
    proj = np.where(network.eigenvalues() == k, psi, 0)
    norm = np.linalg.norm(proj)
    if norm ** 2 <= SUPPORT_TOL:
        raise ValueError(f"eigenvalue {k} is not in the support of the state")
    return proj / norm


def apply_phase(model: CanonicalModel, phi: float) -> np.ndarray:
    """Evolve the canonical state: component ``k`` becomes ``x_k exp(i k phi)``."""
    phi = float(np.mod(phi, 2 * np.pi))
    k = np.arange(model.q)
    return model.amplitudes * np.exp(1j * k * phi)
