"""Even, 2pi-periodic cost functions as cosine series and their average cost.

A cost is stored as coefficients ``c_0 .. c_L`` of
``C(phi) = -sum_l c_l cos(l phi)``.  With the QFT-basis measurement only
harmonics ``l < q`` reach the average cost, so callers truncate at ``q``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .povm import SeedMatrix, conditional_density
from .spectrum import CanonicalModel, _frozen

KINDS = ("variance", "half_angle", "likelihood", "window", "fidelity", "custom")


@dataclass(frozen=True)
class CostSpec:
    coefficients: np.ndarray
    label: str = "custom"
    epsilon: float | None = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("cost needs at least the constant coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("cost coefficients must be finite")
        if self.label not in KINDS:
            raise ValueError(f"unknown cost label {self.label!r}")
        object.__setattr__(self, "coefficients", _frozen(c))

    def truncated(self, q: int) -> "CostSpec":
        return CostSpec(self.coefficients[:max(q, 1)], self.label, self.epsilon)

    def evaluate(self, phi):
        """``-sum_l c_l cos(l phi)``, folded onto ``[0, pi]`` so evenness is exact."""
        phi = np.abs(np.asarray(phi, dtype=float))
        r = np.mod(phi, 2 * np.pi)
        r = np.minimum(r, 2 * np.pi - r)
        ls = np.arange(self.coefficients.size)
        val = -np.cos(np.multiply.outer(r, ls)) @ self.coefficients
        return float(val) if np.ndim(val) == 0 else val

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "coefficients": [float(c) for c in self.coefficients],
            "epsilon": self.epsilon,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CostSpec":
        return cls(np.asarray(data["coefficients"], dtype=float), data["label"], data.get("epsilon"))


def fidelity_coefficients(model: CanonicalModel) -> np.ndarray:
    """Coefficients of ``1 - |<Psi_0|U_phi|Psi_0>|**2`` for the model's state.

    ``c_l`` sums ``x_h**2 x_k**2`` over ordered pairs with ``|h-k| = l``,
    i.e. twice the sum over ``h < k``.
    """
    w = model.amplitudes ** 2
    auto = np.correlate(w, w, mode="full")[model.q - 1:]
    c = 2 * auto
    c[0] = np.sum(w ** 2) - 1
    return c


def make_cost(kind: str, truncation_q: int | None = None, *, epsilon: float | None = None,
              model: CanonicalModel | None = None, custom_coeffs=None) -> CostSpec:
    """Build one of the standard costs.

    ``truncation_q`` caps the series at ``l < q``.  It is required for the
    likelihood and window costs, whose series are infinite.

    The window cost uses ``c_0 = eps/pi - 1`` and ``c_l = sin(l eps)/(l pi)``.
    This series is ``(1 - eps/pi)/2 + indicator(|phi| > eps)/2``, an affine
    image of the 0/1 window, so it has the same optimal states and
    measurement but halved cost differences.
    """
    if truncation_q is not None and truncation_q < 1:
        raise ValueError("truncation_q must be at least 1")
    if kind == "variance":
        c = np.array([-2.0, 2.0])
    elif kind == "half_angle":
        c = np.array([-0.5, 0.5])
    elif kind == "likelihood":
        if truncation_q is None:
            raise ValueError("likelihood cost needs truncation_q")
        c = np.full(truncation_q, 1 / np.pi)
        c[0] = 1 / (2 * np.pi)
    elif kind == "window":
        if truncation_q is None:
            raise ValueError("window cost needs truncation_q")
        if epsilon is None or not 0 < epsilon <= np.pi:
            raise ValueError("window cost needs 0 < epsilon <= pi")
        ls = np.arange(1, truncation_q)
        c = np.empty(truncation_q)
        c[0] = epsilon / np.pi - 1
        c[1:] = np.sin(ls * epsilon) / (ls * np.pi)
    elif kind == "fidelity":
        if model is None:
            raise ValueError("fidelity cost needs a model")
        c = fidelity_coefficients(model)
    elif kind == "custom":
        if custom_coeffs is None:
            raise ValueError("custom cost needs coefficients")
        c = np.asarray(custom_coeffs, dtype=float)
    else:
        raise ValueError(f"unknown cost kind {kind!r}")
    if truncation_q is not None:
        c = c[:truncation_q]
    return CostSpec(c, kind, epsilon if kind == "window" else None)


def evaluate(cost: CostSpec, phi):
    return cost.evaluate(phi)


def is_holevo(cost: CostSpec, q: int) -> bool:
    """True iff ``c_l >= 0`` for ``1 <= l < q``."""
    return bool(np.all(cost.coefficients[1:q] >= 0))


def _seed_entries(seed) -> np.ndarray:
    return np.asarray(seed.entries if isinstance(seed, SeedMatrix) else seed)


def average_cost_fourier(model: CanonicalModel, seed, cost: CostSpec) -> float:
    """Average cost of the covariant POVM generated by ``seed`` (finite Fourier sum)."""
    chi = _seed_entries(seed)
    q = model.q
    if chi.shape != (q, q):
        raise ValueError(f"seed dimension {chi.shape} does not match q={q}")
    x = model.amplitudes
    c = cost.coefficients[:q]
    # overlap[l] = sum over ordered pairs |h-k| = l of x_h Re(chi_hk) x_k
    weighted = np.outer(x, x) * np.real(chi)
    overlap = np.array([2 * np.trace(weighted, offset=l) for l in range(1, c.size)])
    return float(-c[0] - 0.5 * np.dot(c[1:], overlap))


def average_costs_for_seeds(model: CanonicalModel, seeds: np.ndarray, cost: CostSpec) -> np.ndarray:
    """Vectorised :func:`average_cost_fourier` over a stack of seeds ``(n, q, q)``."""
    q = model.q
    x = model.amplitudes
    c = np.zeros(q)
    n = min(q, cost.coefficients.size)
    c[:n] = cost.coefficients[:n]
    h, k = np.indices((q, q))
    weights = np.where(h != k, c[np.abs(h - k)], 0.0) * np.outer(x, x)
    return -c[0] - 0.5 * np.einsum("hk,nhk->n", weights, np.real(seeds))


def average_cost_quadrature(model: CanonicalModel, cost: CostSpec, grid_points: int | None = None) -> float:
    """Independent check: trapezoid integral of ``p(theta) C(theta)`` over ``[0, 2pi)``.

    The integrand is a trigonometric polynomial, so the rule is exact once the
    grid has more points than its degree.
    """
    q = model.q
    if grid_points is None:
        grid_points = 4 * max(q, cost.coefficients.size)
    if grid_points < 2 * q:
        raise ValueError(f"grid_points must be at least 2q = {2 * q}")
    theta = 2 * np.pi * np.arange(grid_points) / grid_points
    integrand = conditional_density(model, theta) * cost.evaluate(theta)
    return float(2 * np.pi * np.mean(integrand))
