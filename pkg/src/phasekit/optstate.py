"""Cost operators and cost-optimal input states."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cost import CostSpec, is_holevo
from .spectrum import _frozen

RESIDUAL_TOL = 1e-8
DEGENERACY_TOL = 1e-10
MAX_DENSE_DIM = 512


class NumericalError(RuntimeError):
    """An eigen-solve or feasibility check failed."""


@dataclass(frozen=True)
class CostOperator:
    """Real symmetric Toeplitz matrix ``int dphi/2pi exp(i(h-k)phi) C(phi)``."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.asarray(self.matrix, dtype=float)))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.matrix @ x)


@dataclass(frozen=True)
class OptimalStateResult:
    amplitudes: np.ndarray
    min_cost: float
    cost_label: str = "custom"
    holevo: bool = True
    degenerate: bool = False
    nonnegative: bool = True

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes))

    @property
    def q(self) -> int:
        return self.amplitudes.size

    def to_dict(self) -> dict:
        return {
            "amplitudes": [float(v) for v in self.amplitudes],
            "min_cost": float(self.min_cost),
            "q": self.q,
            "cost_label": self.cost_label,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def cost_operator(cost: CostSpec, q: int) -> CostOperator:
    """Diagonal ``-c_0``; entry ``(h, k)`` is ``-c_|h-k| / 2`` off the diagonal."""
    if q < 1:
        raise ValueError("q must be at least 1")
    col = np.zeros(q)
    n = min(q, cost.coefficients.size)
    col[:n] = -cost.coefficients[:n] / 2
    col[0] = -cost.coefficients[0]
    return CostOperator(scipy.linalg.toeplitz(col))


def optimal_state(cost: CostSpec, q: int) -> OptimalStateResult:
    """Minimum eigenpair of the cost operator, sign-fixed to be nonnegative.

    Non-Holevo costs still get the eigenpair but ``holevo`` is False: the
    QFT-basis measurement is then not known to be optimal.
    """
    if q > MAX_DENSE_DIM:
        raise ValueError(f"dense eigen-solve is limited to q <= {MAX_DENSE_DIM}")
    op = cost_operator(cost, q).matrix
    try:
        vals, vecs = np.linalg.eigh(op)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigen-solver failed: {exc}") from exc
    lam = float(vals[0])
    scale = max(1.0, float(np.max(np.abs(op))))
    degenerate = q > 1 and vals[1] - vals[0] <= DEGENERACY_TOL * scale
    x = vecs[:, 0]
    if degenerate:
        # a nonnegative vector in the eigenspace, if one exists, is the projection of the all-ones vector
        block = vecs[:, np.abs(vals - lam) <= DEGENERACY_TOL * scale]
        cand = block @ (block.T @ np.ones(q))
        if np.linalg.norm(cand) > 1e-8:
            x = cand / np.linalg.norm(cand)
    x = x * np.sign(x[np.argmax(np.abs(x))])
    nonnegative = bool(np.all(x >= -1e-12))
    if nonnegative:
        x = np.clip(x, 0, None)
        x /= np.linalg.norm(x)
    residual = np.linalg.norm(op @ x - lam * x)
    if residual > RESIDUAL_TOL * scale:
        raise NumericalError(f"eigenpair residual {residual:.3g} exceeds tolerance")
    return OptimalStateResult(x, lam, cost.label, is_holevo(cost, q), bool(degenerate), nonnegative)


def closed_form_state(kind: str, q: int) -> np.ndarray:
    """Sine (Chebyshev) state or the equally weighted state."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if kind == "sine":
        j = np.arange(q)
        return np.sqrt(2 / (q + 1)) * np.sin((j + 1) * np.pi / (q + 1))
    if kind == "uniform":
        return np.full(q, 1 / np.sqrt(q))
    raise ValueError(f"unknown closed-form state {kind!r}")


def closed_form_min_cost(kind: str, q: int, epsilon: float | None = None) -> float:
    """Minimum cost from the closed forms.

    The window value is the small-``epsilon`` approximation attained by the
    uniform state.
    """
    half = np.sin(np.pi / (2 * (q + 1))) ** 2
    if kind == "half_angle":
        return float(half)
    if kind == "variance":
        return float(4 * half)
    if kind == "window":
        if epsilon is None:
            raise ValueError("window minimum cost needs epsilon")
        return float(1 - epsilon * (q + 1) / (2 * np.pi))
    raise ValueError(f"no closed form for {kind!r}")


def fidelity_error_minimum(N: int) -> tuple[np.ndarray, float]:
    """Maximise ``Re sum_j a_j conj(a_{j+1})`` over normalized complex ``a`` of length ``N+1``.

    Works in real coordinates ``(Re a, Im a)``, where the objective is a
    quadratic form with a block-diagonal path-graph matrix.  Returns the
    maximiser and the fidelity error ``1/2 - max/2``.
    """
    n = N + 1
    path = (np.eye(n, k=1) + np.eye(n, k=-1)) / 2
    form = np.block([[path, np.zeros((n, n))], [np.zeros((n, n)), path]])
    vals, vecs = np.linalg.eigh(form)
    v = vecs[:, -1]
    alpha = v[:n] + 1j * v[n:]
    alpha = alpha * np.exp(-1j * np.angle(alpha[np.argmax(np.abs(alpha))]))
    return alpha, float(0.5 - 0.5 * vals[-1])
